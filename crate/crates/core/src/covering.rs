//! Coset actions `G/H`, the subgroup `H_2`, covering morphisms between coset
//! actions, the universal cover `E_n / (EP_n)_2` and `pi_1 = EP_n / (EP_n)_2`.

use std::sync::{Arc, OnceLock};

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use serde::Serialize;
use thiserror::Error;

use crate::action::{self, ActionError, CoveringDefect, GlobalAction, LocalFamily, PointedAction};
use crate::group::{FiniteGroup, GroupError};
use crate::matgroup::{self, Matrix, MatrixError, SubgroupClosure};
use crate::path::{Pi1Search, PathError};
use crate::ring::FiniteRing;
use crate::steinberg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoveringError {
    #[error("{0} is not a subgroup of the ambient group")]
    NotSubgroup(String),
    #[error("coset actions over different ambient groups")]
    AmbientMismatch,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("internal inconsistency: {0}")]
    Group(#[from] GroupError),
    #[error(transparent)]
    Path(#[from] PathError),
}

type MatrixSet = IndexSet<Matrix, FxBuildHasher>;

/// Right cosets `H g` of `H` in `G` with local groups acting by right multiplication.
#[derive(Clone, Debug)]
pub struct CosetAction {
    pub group: Arc<SubgroupClosure>,
    pub subgroup: Arc<SubgroupClosure>,
    /// Coset id of each element of `group`.
    pub labels: Vec<u32>,
    /// Minimal representative (index into `group`) of each coset.
    pub reps: Vec<usize>,
    pub pointed: PointedAction,
}

impl CosetAction {
    pub fn new(
        group: Arc<SubgroupClosure>,
        subgroup: Arc<SubgroupClosure>,
        family: &LocalFamily,
    ) -> Result<Self, CoveringError> {
        if !subgroup.is_subgroup_of(&group) {
            return Err(CoveringError::NotSubgroup("H".into()));
        }
        if let Some(a) = (0..family.len()).find(|&a| !family.groups[a].is_subgroup_of(&group)) {
            return Err(CoveringError::NotSubgroup(format!("local group {}", family.names[a])));
        }
        let (labels, reps) = subgroup.right_coset_labels(&group);
        let ring = group.ring().clone();
        let names = (0..reps.len()).map(|c| format!("Hg{c}")).collect();
        let action = GlobalAction::from_matrix_family(names, family, |c, m| {
            let g = group.element(reps[c as usize]).mul_unchecked(m, &ring);
            labels[group.index_of(&g).expect("closed under local groups")]
        })?;
        let base = labels[group.index_of(&Matrix::identity(group.n())).expect("identity")];
        Ok(CosetAction {
            pointed: PointedAction::new(action, base)?,
            group,
            subgroup,
            labels,
            reps,
        })
    }

    pub fn action(&self) -> &GlobalAction {
        &self.pointed.action
    }

    pub fn base(&self) -> u32 {
        self.pointed.base
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn coset_of(&self, g: &Matrix) -> Option<u32> {
        self.group.index_of(g).map(|k| self.labels[k])
    }

    /// `(H g) m = H (g m)` for every `g` in `G` and every local generator `m`.
    pub fn is_well_defined(&self, family: &LocalFamily) -> bool {
        let ring = self.group.ring();
        family.groups.iter().enumerate().all(|(a, sub)| {
            sub.iter().enumerate().all(|(k, m)| {
                self.group.iter().enumerate().all(|(gi, g)| {
                    let moved = self.coset_of(&g.mul_unchecked(m, ring));
                    moved == Some(self.action().group(a).act(self.labels[gi], k))
                })
            })
        })
    }

    /// `H_source g -> H_self g`; requires the source subgroup inside `self`'s.
    pub fn projection_from(&self, source: &CosetAction) -> Result<Vec<u32>, CoveringError> {
        if !Arc::ptr_eq(&self.group, &source.group) && self.group.len() != source.group.len() {
            return Err(CoveringError::AmbientMismatch);
        }
        if !source.subgroup.is_subgroup_of(&self.subgroup) {
            return Err(CoveringError::NotSubgroup("source subgroup".into()));
        }
        Ok(source
            .reps
            .iter()
            .map(|&k| self.coset_of(source.group.element(k)).ok_or(CoveringError::AmbientMismatch))
            .collect::<Result<_, _>>()?)
    }
}

/// Covering test with the offending point on failure.
pub fn is_covering(
    p: &[u32],
    source: &GlobalAction,
    target: &GlobalAction,
) -> Result<Result<(), CoveringDefect>, ActionError> {
    Ok(match action::covering_defect(p, source, target)? {
        None => Ok(()),
        Some(d) => Err(d),
    })
}

/// Subgroup generated by `elements`, adding a generator only when it is new.
fn greedy_closure(
    ring: &Arc<FiniteRing>,
    n: usize,
    elements: impl IntoIterator<Item = Matrix>,
    cap: usize,
) -> Result<SubgroupClosure, MatrixError> {
    let mut gens = Vec::new();
    let mut current = SubgroupClosure::trivial(ring.clone(), n);
    for m in elements {
        if !current.contains(&m) {
            gens.push(m);
            current = SubgroupClosure::generate(ring.clone(), n, gens.clone(), cap)?;
        }
    }
    Ok(current)
}

fn maximal_products(locals: &LocalFamily, ring: &FiniteRing, mut visit: impl FnMut(Matrix)) {
    let max = locals.maximal();
    for &a in &max {
        for &b in &max {
            for x in locals.groups[a].iter() {
                for y in locals.groups[b].iter() {
                    visit(x.mul_unchecked(y, ring));
                }
            }
        }
    }
}

/// Reusable data for `H_2` over one ambient group: the products
/// `U = {e_a e_b}` over maximal indices and, on demand, their `G`-conjugates.
pub struct H2Context {
    group: Arc<SubgroupClosure>,
    products: MatrixSet,
    conjugates: OnceLock<MatrixSet>,
}

impl H2Context {
    pub fn new(group: Arc<SubgroupClosure>, locals: &LocalFamily) -> Self {
        let mut products = MatrixSet::default();
        maximal_products(locals, group.ring(), |m| {
            products.insert(m);
        });
        H2Context {
            group,
            products,
            conjugates: OnceLock::new(),
        }
    }

    pub fn conjugates(&self) -> &MatrixSet {
        self.conjugates
            .get_or_init(|| matgroup::conjugation_closure(self.products.iter().cloned(), &self.group))
    }

    pub fn h2(&self, h: &SubgroupClosure) -> Result<SubgroupClosure, CoveringError> {
        if !h.is_subgroup_of(&self.group) {
            return Err(CoveringError::NotSubgroup("H".into()));
        }
        let ring = self.group.ring();
        let n = self.group.n();
        let quick = greedy_closure(
            ring,
            n,
            self.products.iter().filter(|m| h.contains(m)).cloned(),
            usize::MAX,
        )?;
        if quick.len() == h.len() {
            return Ok(quick);
        }
        Ok(greedy_closure(
            ring,
            n,
            self.conjugates().iter().filter(|m| h.contains(m)).cloned(),
            usize::MAX,
        )?)
    }
}

/// `H_2`: generated by the elements of `H` of the form `x^-1 e_a e_b x`.
/// Products whose conjugates are not needed are streamed, not stored.
pub fn h2(
    h: &SubgroupClosure,
    g: &Arc<SubgroupClosure>,
    locals: &LocalFamily,
) -> Result<SubgroupClosure, CoveringError> {
    if !h.is_subgroup_of(g) {
        return Err(CoveringError::NotSubgroup("H".into()));
    }
    let ring = g.ring();
    let mut hits = MatrixSet::default();
    maximal_products(locals, ring, |m| {
        if h.contains(&m) {
            hits.insert(m);
        }
    });
    let quick = greedy_closure(ring, g.n(), hits, usize::MAX)?;
    if quick.len() == h.len() {
        return Ok(quick);
    }
    log::debug!("H_2 not saturated by unconjugated products; sweeping conjugates");
    H2Context::new(g.clone(), locals).h2(h)
}

/// `H / H_2` after checking that `H_2` is normal in `H`.
pub fn quotient_group(h: &SubgroupClosure, h2: &SubgroupClosure) -> Result<FiniteGroup, CoveringError> {
    Ok(FiniteGroup::quotient(h, h2)?)
}

/// The groups `E_n`, `EP_n`, `(EP_n)_2` and the nilpotent local family.
#[derive(Clone, Debug)]
pub struct ElementaryData {
    pub ring: Arc<FiniteRing>,
    pub n: usize,
    pub family: LocalFamily,
    pub e: Arc<SubgroupClosure>,
    pub ep: Arc<SubgroupClosure>,
    pub ep2: Arc<SubgroupClosure>,
}

impl ElementaryData {
    pub fn build(n: usize, ring: &Arc<FiniteRing>, cap: usize) -> Result<Self, CoveringError> {
        let family = LocalFamily::nilpotent(n, ring);
        let e = Arc::new(matgroup::elementary_group(n, ring, cap)?);
        let ep = Arc::new(matgroup::stabilizer_of_e(&e));
        let ep2 = Arc::new(h2(&ep, &e, &family)?);
        Ok(ElementaryData {
            ring: ring.clone(),
            n,
            family,
            e,
            ep,
            ep2,
        })
    }

    pub fn pi1(&self) -> Result<FiniteGroup, CoveringError> {
        quotient_group(&self.ep, &self.ep2)
    }
}

#[derive(Clone, Debug)]
pub struct UniversalCover {
    pub cover: CosetAction,
    pub base: CosetAction,
    /// `E/(EP)_2 -> E/EP`.
    pub projection: Vec<u32>,
}

impl UniversalCover {
    /// Cosets of the cover lying over the base point.
    pub fn fiber_over_base(&self) -> Vec<u32> {
        (0..self.cover.len() as u32)
            .filter(|&c| self.projection[c as usize] == self.base.base())
            .collect()
    }
}

pub fn universal_cover(data: &ElementaryData) -> Result<UniversalCover, CoveringError> {
    let cover = CosetAction::new(data.e.clone(), data.ep2.clone(), &data.family)?;
    let base = CosetAction::new(data.e.clone(), data.ep.clone(), &data.family)?;
    let projection = base.projection_from(&cover)?;
    Ok(UniversalCover {
        cover,
        base,
        projection,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Pi1Algebraic {
    pub ep_order: usize,
    pub ep2_order: usize,
    pub group: FiniteGroup,
}

pub fn pi1_algebraic(n: usize, ring: &Arc<FiniteRing>, cap: usize) -> Result<Pi1Algebraic, CoveringError> {
    let data = ElementaryData::build(n, ring, cap)?;
    Ok(Pi1Algebraic {
        ep_order: data.ep.len(),
        ep2_order: data.ep2.len(),
        group: data.pi1()?,
    })
}

/// The cover of a path-connected action whose sheets are `pi_1` and whose
/// step labels come from an edge-path computation.
pub fn cover_from_search(pointed: &PointedAction, search: &Pi1Search) -> Result<PointedAction, CoveringError> {
    let group = &search.group;
    let lifted = pointed.action.lift(
        group.order(),
        |x, y| search.step_label(x, y).expect("local orbit steps are edges"),
        |a, b| group.mul(a, b),
    )?;
    let base = pointed.base * group.order() as u32;
    Ok(PointedAction::new(lifted, base)?)
}

/// An ambient group with designated local subgroups where `H_2` is proper in `H`.
#[derive(Clone, Debug)]
pub struct ToyInstance {
    pub group: Arc<SubgroupClosure>,
    pub family: LocalFamily,
    pub h: Arc<SubgroupClosure>,
}

/// `G = <E_j1(1) : j = 2..6>` over `F_2`, elementary abelian of order 32,
/// indexed by subsets of at most two generators; `H` is the all-ones column.
pub fn toy_instance() -> ToyInstance {
    let ring: Arc<FiniteRing> = Arc::new("GF:2".parse().expect("valid ring"));
    let n = 6;
    let gen = |j: usize| matgroup::elementary(n, j, 0, 1).expect("off-diagonal");
    let group = Arc::new(
        SubgroupClosure::generate(ring.clone(), n, (1..n).map(gen).collect(), usize::MAX).expect("uncapped"),
    );
    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
    subsets.extend((1..n).map(|j| vec![j]));
    for i in 1..n {
        for j in i + 1..n {
            subsets.push(vec![i, j]);
        }
    }
    let names = subsets
        .iter()
        .map(|s| {
            let parts: Vec<String> = s.iter().map(|j| (j + 1).to_string()).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let groups = subsets
        .iter()
        .map(|s| SubgroupClosure::generate(ring.clone(), n, s.iter().map(|&j| gen(j)).collect(), usize::MAX))
        .collect::<Result<Vec<_>, _>>()
        .expect("uncapped");
    let mut all_ones = Matrix::identity(n);
    for j in 1..n {
        all_ones.set(j, 0, 1);
    }
    let h = Arc::new(SubgroupClosure::generate(ring, n, vec![all_ones], usize::MAX).expect("uncapped"));
    ToyInstance {
        group,
        family: LocalFamily::from_subgroups(names, groups),
        h,
    }
}

/// `theta` on local normal forms is a bijection from the star of `1` in
/// `St_n` onto the union of the local subgroups. Returns the star size.
pub fn steinberg_star_bijection(family: &LocalFamily, ring: &FiniteRing) -> Result<usize, String> {
    let mut star = MatrixSet::default();
    for sub in &family.groups {
        star.extend(sub.iter().cloned());
    }
    let mut words = IndexSet::<steinberg::SteinbergWord, FxBuildHasher>::default();
    for m in &star {
        let w = steinberg::local_normal_form(m, ring).ok_or_else(|| format!("{m:?} has no local normal form"))?;
        if steinberg::theta(&w, ring) != *m {
            return Err(format!("theta({w}) differs from its source matrix"));
        }
        if !words.insert(w) {
            return Err("two matrices share a normal form".into());
        }
    }
    Ok(words.len())
}
