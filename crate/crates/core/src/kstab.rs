//! `K_1`, `K_0^s` and the maps of the exact sequence
//! `(K_2n)_2 -> K_2n -> pi_1 -> K_1,n-1/(K_1,n-1)_2 -> K_1n -> pi_0 -> K^s_0,n-1 -> K^s_0,n`,
//! with a verifier that checks composites and exactness on finite rings.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::covering::{CoveringError, ElementaryData};
use crate::group::{FiniteGroup, GroupError};
use crate::matgroup::{self, Matrix, MatrixError, SubgroupClosure};
use crate::path::Pi0;
use crate::ring::{Code, FiniteRing};
use crate::steinberg::{self, SteinbergWord};
use crate::unimodular::{self, UmAction, UmError};

pub const DEFAULT_GL_CAP: u128 = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KError {
    #[error("enumerating GL_{n} means scanning {count} matrices, above the cap {cap}")]
    TooLarge { n: usize, count: u128, cap: u128 },
    #[error("matrix {0} does not fix e, so it has no right diagonal")]
    NotInP(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Um(#[from] UmError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug)]
pub struct KCaps {
    pub closure: usize,
    pub gl: u128,
}

impl Default for KCaps {
    fn default() -> Self {
        KCaps {
            closure: matgroup::DEFAULT_CLOSURE_CAP,
            gl: DEFAULT_GL_CAP,
        }
    }
}

/// Calls `f` on every matrix with unit determinant.
pub fn for_each_invertible(
    n: usize,
    ring: &FiniteRing,
    cap: u128,
    mut f: impl FnMut(Matrix, Code),
) -> Result<(), KError> {
    let q = ring.size() as u128;
    let count = q.pow((n * n) as u32);
    if count > cap {
        return Err(KError::TooLarge { n, count, cap });
    }
    let mut digits = vec![0 as Code; n * n];
    for _ in 0..count {
        let mut m = Matrix::identity(n);
        for (k, &d) in digits.iter().enumerate() {
            m.set(k / n, k % n, d);
        }
        let det = m.det(ring);
        if ring.is_unit(det) {
            f(m, det);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if (*d as u128) < q {
                break;
            }
            *d = 0;
        }
    }
    Ok(())
}

pub fn general_linear(n: usize, ring: &Arc<FiniteRing>, cap: u128) -> Result<SubgroupClosure, KError> {
    let mut members = Vec::new();
    for_each_invertible(n, ring, cap, |m, _| members.push(m))?;
    Ok(SubgroupClosure::from_subgroup_elements(ring.clone(), n, members))
}

#[derive(Clone, Debug, Serialize)]
pub struct K1Class {
    pub rep: Matrix,
    pub det: Code,
    pub size: usize,
}

/// `GL_n / E_n`; class 0 is `[I]`.
#[derive(Clone, Debug)]
pub struct K1 {
    pub e: Arc<SubgroupClosure>,
    pub classes: Vec<K1Class>,
    rep_inverses: Vec<Matrix>,
    pub gl_order: usize,
    pub e_normal: bool,
    pub det_constant: bool,
    pub group: Option<FiniteGroup>,
}

impl K1 {
    pub fn class_of(&self, g: &Matrix) -> Option<usize> {
        let ring = self.e.ring();
        self.rep_inverses
            .iter()
            .position(|ri| self.e.contains(&ri.mul_unchecked(g, ring)))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub fn k1(e: Arc<SubgroupClosure>, cap: u128) -> Result<K1, KError> {
    let ring = e.ring().clone();
    let n = e.n();
    let id = Matrix::identity(n);
    let mut k = K1 {
        classes: vec![K1Class {
            rep: id.clone(),
            det: ring.one(),
            size: 0,
        }],
        rep_inverses: vec![id],
        e,
        gl_order: 0,
        e_normal: false,
        det_constant: true,
        group: None,
    };
    for_each_invertible(n, &ring, cap, |m, det| {
        k.gl_order += 1;
        let c = match k.class_of(&m) {
            Some(c) => c,
            None => {
                let inv = m.inverse(&ring).expect("unit determinant");
                k.classes.push(K1Class { rep: m, det, size: 0 });
                k.rep_inverses.push(inv);
                k.classes.len() - 1
            }
        };
        k.classes[c].size += 1;
        if k.classes[c].det != det {
            k.det_constant = false;
        }
    })?;
    k.e_normal = k.classes.iter().zip(&k.rep_inverses).all(|(c, ri)| {
        k.e.generators()
            .iter()
            .all(|g| k.e.contains(&ri.mul_unchecked(g, &ring).mul_unchecked(&c.rep, &ring)))
    });
    if k.e_normal {
        let order = k.classes.len();
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let p = k.classes[a].rep.mul_unchecked(&k.classes[b].rep, &ring);
                mul[a * order + b] = k.class_of(&p).expect("GL is closed") as u32;
            }
        }
        k.group = Some(FiniteGroup::from_table(order, mul)?);
    }
    Ok(k)
}

/// The lower-right block `tau` of `sigma = [[1, 0], [v, tau]]`.
pub fn right_diagonal(sigma: &Matrix) -> Result<Matrix, KError> {
    if !matgroup::fixes_e(sigma) {
        return Err(KError::NotInP(format!("{sigma:?}")));
    }
    Ok(sigma.lower_right_block())
}

/// `[[1, 0], [v, I]]`.
pub fn e_column(v: &[Code]) -> Matrix {
    let mut m = Matrix::identity(v.len() + 1);
    for (i, &x) in v.iter().enumerate() {
        m.set(i + 1, 0, x);
    }
    m
}

pub fn transpose(m: &Matrix) -> Matrix {
    let n = m.n();
    let mut t = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            t.set(j, i, m.get(i, j));
        }
    }
    t
}

/// Class in `K^s_0,m` over a finite ring: stably free modules are free, so the rank decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct K0sClass {
    pub rank: usize,
}

/// A basis of `ker(w -> w . v^t)` together with a complement vector, all
/// rows of one invertible matrix.
#[derive(Clone, Debug, Serialize)]
pub struct KernelBasis {
    pub row: Vec<Code>,
    pub basis: Vec<Vec<Code>>,
    pub complement: Vec<Code>,
}

/// Kernel of `w -> w . v^t` from any `sigma` with `e sigma = v`: rows `2..n` of `(sigma^t)^-1`.
pub fn kernel_basis(v: &[Code], sigma: &Matrix, ring: &FiniteRing) -> Option<KernelBasis> {
    let n = v.len();
    let e: Vec<Code> = (0..n).map(|i| if i == 0 { ring.one() } else { ring.zero() }).collect();
    if sigma.act_on_row(&e, ring) != v {
        return None;
    }
    let inv = transpose(sigma).inverse(ring)?;
    let rows = inv.rows();
    let dot = |w: &[Code]| {
        w.iter()
            .zip(v)
            .fold(ring.zero(), |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)))
    };
    if rows[1..].iter().any(|w| dot(w) != ring.zero()) || dot(&rows[0]) != ring.one() {
        return None;
    }
    Some(KernelBasis {
        row: v.to_vec(),
        basis: rows[1..].to_vec(),
        complement: rows[0].clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            detail: reason.into(),
            witnesses: Vec::new(),
        }
    }

    pub fn with_witnesses(mut self, w: Vec<String>) -> Self {
        self.witnesses = w;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

const MAX_WITNESSES: usize = 8;

/// Exactness at `pi_1 = H/H_2`: every coset in `ker mu` lies in the image of
/// `eta`, witnessed by factoring each `sigma` with right diagonal in `M` as
/// `e_column(v) * diag(1, tau)` with both factors in `H_2`.
pub fn exactness_at_pi1(
    h: &SubgroupClosure,
    h2: &SubgroupClosure,
    in_m: impl Fn(&Matrix) -> bool,
    eta_images: &[Matrix],
) -> Result<Check, KError> {
    let ring = h.ring();
    let (labels, reps) = h2.right_coset_labels(h);
    let label = |m: &Matrix| h.index_of(m).map(|k| labels[k]);
    let mut im_eta: Vec<u32> = eta_images.iter().filter_map(label).collect();
    im_eta.sort_unstable();
    im_eta.dedup();
    let mut ker_mu = Vec::new();
    for (c, &r) in reps.iter().enumerate() {
        if in_m(&right_diagonal(h.element(r))?) {
            ker_mu.push(c as u32);
        }
    }
    let mut factored = 0;
    let mut bad = Vec::new();
    for sigma in h.iter() {
        let tau = right_diagonal(sigma)?;
        if !in_m(&tau) {
            continue;
        }
        let v: Vec<Code> = (1..sigma.n()).map(|i| sigma.get(i, 0)).collect();
        let col = e_column(&v);
        let diag = Matrix::block_diag_one(&tau);
        let ok = col.mul_unchecked(&diag, ring) == *sigma && h2.contains(&col) && h2.contains(&diag);
        if ok {
            factored += 1;
        } else if bad.len() < MAX_WITNESSES {
            bad.push(format!("{sigma:?}"));
        }
    }
    let missing: Vec<u32> = ker_mu.iter().copied().filter(|c| !im_eta.contains(c)).collect();
    let ok = missing.is_empty() && bad.is_empty();
    Ok(Check::new(
        "exact at pi1: ker mu in im eta",
        ok,
        format!(
            "|ker mu| = {}, |im eta| = {}, {} elements factored through H_2, {} not",
            ker_mu.len(),
            im_eta.len(),
            factored,
            bad.len()
        ),
    )
    .with_witnesses(bad))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SequenceSizes {
    pub e: usize,
    pub gl: usize,
    pub ep: usize,
    pub ep2: usize,
    pub um: usize,
    pub pi0: usize,
    pub pi1: usize,
    pub k1: usize,
    pub k1_lower_quotient: usize,
    pub k2_witnesses: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    pub ring: String,
    pub n: usize,
    pub sizes: SequenceSizes,
    pub checks: Vec<Check>,
}

impl SequenceReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Everything the sequence maps need, computed once.
pub struct SequenceData {
    pub ring: Arc<FiniteRing>,
    pub n: usize,
    pub groups: ElementaryData,
    pub um: UmAction,
    pub pi0: Pi0,
    pi0_of: Vec<usize>,
    pub k1: K1,
    pub gl_lower: SubgroupClosure,
    pub e_lower: SubgroupClosure,
    /// `{tau : diag(1, tau) in (EP_n)_2}`.
    pub m: SubgroupClosure,
    lower_labels: Vec<u32>,
    lower_reps: Vec<usize>,
    pi1_labels: Vec<u32>,
    pi1_reps: Vec<usize>,
    pub k2_witnesses: Vec<SteinbergWord>,
}

impl SequenceData {
    pub fn build(n: usize, ring: &Arc<FiniteRing>, caps: KCaps) -> Result<Self, KError> {
        let groups = ElementaryData::build(n, ring, caps.closure)?;
        let um = unimodular::build_um_action(n, ring)?;
        let pi0 = um.pi0();
        let mut pi0_of = vec![usize::MAX; um.rows.len()];
        for (c, class) in pi0.classes.iter().enumerate() {
            for &x in class {
                pi0_of[x as usize] = c;
            }
        }
        let k1 = k1(groups.e.clone(), caps.gl)?;
        let gl_lower = general_linear(n - 1, ring, caps.gl)?;
        let e_lower = matgroup::elementary_group(n - 1, ring, caps.closure)?;
        let m = gl_lower.filter_subgroup(|t| groups.ep2.contains(&Matrix::block_diag_one(t)));
        let (lower_labels, lower_reps) = m.right_coset_labels(&gl_lower);
        let (pi1_labels, pi1_reps) = groups.ep2.right_coset_labels(&groups.ep);
        let k2_witnesses = steinberg::relator_words(n, ring);
        Ok(SequenceData {
            ring: ring.clone(),
            n,
            groups,
            um,
            pi0,
            pi0_of,
            k1,
            gl_lower,
            e_lower,
            m,
            lower_labels,
            lower_reps,
            pi1_labels,
            pi1_reps,
            k2_witnesses,
        })
    }

    fn e_row(&self) -> Vec<Code> {
        let mut e = vec![self.ring.zero(); self.n];
        e[0] = self.ring.one();
        e
    }

    pub fn pi1_cosets(&self) -> usize {
        self.pi1_reps.len()
    }

    pub fn lower_cosets(&self) -> usize {
        self.lower_reps.len()
    }

    /// `delta`: inclusion of `(K_2,n)_2` witnesses.
    pub fn delta(&self, w: &SteinbergWord) -> SteinbergWord {
        w.clone()
    }

    /// `eta(Y) = theta(Y) (EP_n)_2`; `None` if `theta(Y)` is outside `EP_n`.
    pub fn eta(&self, w: &SteinbergWord) -> Option<u32> {
        let t = steinberg::theta(w, &self.ring);
        self.groups.ep.index_of(&t).map(|k| self.pi1_labels[k])
    }

    /// `mu(sigma (EP)_2) = [sigma_rd]` in `K_1,n-1 / (K_1,n-1)_2`.
    pub fn mu(&self, coset: u32) -> Result<u32, KError> {
        let sigma = self.groups.ep.element(self.pi1_reps[coset as usize]);
        self.mu_of(sigma)
    }

    pub fn mu_of(&self, sigma: &Matrix) -> Result<u32, KError> {
        let tau = right_diagonal(sigma)?;
        let k = self.gl_lower.index_of(&tau).ok_or(MatrixError::NotInvertible)?;
        Ok(self.lower_labels[k])
    }

    /// `lambda([tau]) = diag(1, tau) E_n`.
    pub fn lambda(&self, lower: u32) -> usize {
        self.lambda_of(self.gl_lower.element(self.lower_reps[lower as usize]))
    }

    fn lambda_of(&self, tau: &Matrix) -> usize {
        self.k1
            .class_of(&Matrix::block_diag_one(tau))
            .expect("diag(1, tau) is invertible")
    }

    /// `alpha([sigma]) = [e sigma]` in `pi_0`.
    pub fn alpha(&self, class: usize) -> usize {
        self.alpha_of(&self.k1.classes[class].rep)
    }

    fn alpha_of(&self, sigma: &Matrix) -> usize {
        let v = sigma.act_on_row(&self.e_row(), &self.ring);
        self.pi0_of[self.um.point_of(&v).expect("e sigma is unimodular") as usize]
    }

    /// `beta([v]) = [ker(w -> w v^t)]`, with the kernel basis as evidence.
    pub fn beta(&self, point: u32) -> Option<(K0sClass, KernelBasis)> {
        let v = self.um.row(point);
        let e = self.e_row();
        for c in &self.k1.classes {
            let start = self.um.point_of(&c.rep.act_on_row(&e, &self.ring)).expect("unimodular");
            if let Some(path) = self.um.find_path(start, point) {
                let sigma = c.rep.mul_unchecked(&path.matrix, &self.ring);
                let basis = kernel_basis(v, &sigma, &self.ring)?;
                return Some((K0sClass { rank: basis.basis.len() }, basis));
            }
        }
        None
    }

    /// `gamma(P) = P + R`.
    pub fn gamma(&self, p: K0sClass) -> K0sClass {
        K0sClass { rank: p.rank + 1 }
    }

    pub fn report(&self) -> Result<SequenceReport, KError> {
        let ring = &self.ring;
        let n = self.n;
        let mut checks = Vec::new();
        let base_pi1 = self.pi1_labels[self.groups.ep.index_of(&Matrix::identity(n)).expect("identity")];
        let base_lower = self.lower_labels[self.gl_lower.index_of(&Matrix::identity(n - 1)).expect("identity")];
        let base_pi0 = self.pi0.base_class.expect("pointed");
        let k0_base = |m: usize| K0sClass { rank: m };

        checks.push(Check::new(
            "E_n normal in GL_n",
            self.k1.e_normal,
            format!("{} classes in K_1,{n}", self.k1.len()),
        ));
        let sizes_ok = self.k1.classes.iter().all(|c| c.size == self.groups.e.len());
        checks.push(Check::new(
            "K_1 coset decomposition",
            sizes_ok && self.k1.gl_order == self.k1.len() * self.groups.e.len(),
            format!("|GL| = {} = {} x {}", self.k1.gl_order, self.k1.len(), self.groups.e.len()),
        ));
        checks.push(Check::new("det constant on K_1 classes", self.k1.det_constant, ""));
        checks.push(Check::new(
            "(EP_n)_2 normal in EP_n",
            self.groups.ep2.is_normalized_by(&self.groups.ep),
            format!("|EP| = {}, |(EP)_2| = {}", self.groups.ep.len(), self.groups.ep2.len()),
        ));
        let n_ker = self
            .gl_lower
            .filter_subgroup(|t| self.groups.e.contains(&Matrix::block_diag_one(t)));
        checks.push(Check::new(
            "E_n-1 inside (K_1,n-1)_2",
            self.e_lower.is_subgroup_of(&self.m),
            format!("|E_{}| = {}, |M| = {}", n - 1, self.e_lower.len(), self.m.len()),
        ));
        checks.push(Check::new(
            "(K_1,n-1)_2 normal in ker(K_1,n-1 -> K_1,n)",
            self.m.is_subgroup_of(&n_ker) && self.m.is_normalized_by(&n_ker),
            format!("|M| = {}, |kernel preimage| = {}", self.m.len(), n_ker.len()),
        ));

        // base points
        let empty = SteinbergWord::empty(n);
        checks.push(Check::new("delta preserves base", self.delta(&empty).is_empty(), ""));
        checks.push(Check::new("eta preserves base", self.eta(&empty) == Some(base_pi1), ""));
        checks.push(Check::new("mu preserves base", self.mu(base_pi1)? == base_lower, ""));
        checks.push(Check::new("lambda preserves base", self.lambda(base_lower) == 0, ""));
        checks.push(Check::new("alpha preserves base", self.alpha(0) == base_pi0, ""));
        let beta_base = self.beta(self.um.base());
        checks.push(Check::new(
            "beta preserves base",
            beta_base.as_ref().is_some_and(|(c, _)| *c == k0_base(n - 1)),
            "",
        ));
        checks.push(Check::new(
            "gamma preserves base",
            self.gamma(k0_base(n - 1)) == k0_base(n),
            "",
        ));

        // well-definedness
        let mu_bad: Vec<String> = self
            .groups
            .ep
            .iter()
            .enumerate()
            .filter(|(k, s)| self.mu_of(s).ok() != self.mu(self.pi1_labels[*k]).ok())
            .take(MAX_WITNESSES)
            .map(|(_, s)| format!("{s:?}"))
            .collect();
        checks.push(Check::new("mu well defined", mu_bad.is_empty(), "").with_witnesses(mu_bad));
        let lambda_bad: Vec<String> = self
            .gl_lower
            .iter()
            .enumerate()
            .filter(|(k, t)| self.lambda_of(t) != self.lambda(self.lower_labels[*k]))
            .take(MAX_WITNESSES)
            .map(|(_, t)| format!("{t:?}"))
            .collect();
        checks.push(Check::new("lambda well defined", lambda_bad.is_empty(), "").with_witnesses(lambda_bad));
        let gens = matgroup::elementary_generators(n, ring);
        let alpha_ok = self.k1.classes.iter().all(|c| {
            gens.iter()
                .all(|g| self.alpha_of(&c.rep.mul_unchecked(g, ring)) == self.alpha_of(&c.rep))
        });
        checks.push(Check::new("alpha well defined", alpha_ok, ""));

        // composites
        let local_witnesses: Vec<&SteinbergWord> = self
            .k2_witnesses
            .iter()
            .filter(|w| steinberg::is_local(w).is_some())
            .collect();
        let all_k2 = self.k2_witnesses.iter().all(|w| steinberg::k2_witness(w, ring));
        checks.push(Check::new(
            "K_2 witnesses have trivial theta",
            all_k2,
            format!(
                "{} relator words, {} of them local",
                self.k2_witnesses.len(),
                local_witnesses.len()
            ),
        ));
        let eta_delta = local_witnesses
            .iter()
            .all(|w| self.eta(&self.delta(w)) == Some(base_pi1));
        checks.push(Check::new(
            "eta . delta = base",
            eta_delta,
            format!("{} witnesses", local_witnesses.len()),
        ));
        let mut mu_eta = true;
        for w in &self.k2_witnesses {
            mu_eta &= match self.eta(w) {
                Some(c) => self.mu(c)? == base_lower,
                None => false,
            };
        }
        checks.push(Check::new(
            "mu . eta = base",
            mu_eta,
            format!("{} witnesses", self.k2_witnesses.len()),
        ));
        let mut lambda_mu = true;
        for c in 0..self.pi1_cosets() as u32 {
            lambda_mu &= self.lambda(self.mu(c)?) == 0;
        }
        checks.push(Check::new(
            "lambda . mu = base",
            lambda_mu,
            format!("{} cosets of (EP)_2", self.pi1_cosets()),
        ));
        let alpha_lambda = (0..self.lower_cosets() as u32).all(|t| self.alpha(self.lambda(t)) == base_pi0);
        let ker_alpha: Vec<usize> = (0..self.k1.len()).filter(|&c| self.alpha(c) == base_pi0).collect();
        let mut im_lambda: Vec<usize> = (0..self.lower_cosets() as u32).map(|t| self.lambda(t)).collect();
        im_lambda.sort_unstable();
        im_lambda.dedup();
        checks.push(Check::new("alpha . lambda = base", alpha_lambda, ""));
        let beta_alpha = (0..self.k1.len()).all(|c| {
            let class = self.alpha(c);
            let point = self.pi0.classes[class][0];
            self.beta(point).is_some_and(|(k, _)| k == k0_base(n - 1))
        });
        checks.push(Check::new("beta . alpha = base", beta_alpha, ""));

        let mut betas = Vec::new();
        let mut beta_missing = Vec::new();
        for class in &self.pi0.classes {
            match self.beta(class[0]) {
                Some((k, _)) => betas.push(k),
                None => beta_missing.push(unimodular::format_row(self.um.row(class[0]), ring)),
            }
        }
        let gamma_beta = betas.iter().all(|&k| self.gamma(k) == k0_base(n));
        checks.push(Check::new("gamma . beta = base", gamma_beta && beta_missing.is_empty(), ""));

        // exactness
        checks.push(Check::skipped(
            "exact at K_2,n: ker eta in im delta",
            "needs the word problem in St_n",
        ));
        let eta_images: Vec<Matrix> = self
            .k2_witnesses
            .iter()
            .map(|w| steinberg::theta(w, ring))
            .chain(std::iter::once(Matrix::identity(n)))
            .collect();
        checks.push(exactness_at_pi1(
            &self.groups.ep,
            &self.groups.ep2,
            |t| self.m.contains(t),
            &eta_images,
        )?);

        let mut im_mu: Vec<u32> = (0..self.pi1_cosets() as u32)
            .map(|c| self.mu(c))
            .collect::<Result<_, _>>()?;
        im_mu.sort_unstable();
        im_mu.dedup();
        let ker_lambda: Vec<u32> = (0..self.lower_cosets() as u32).filter(|&t| self.lambda(t) == 0).collect();
        let mut lower_witnesses = Vec::new();
        let mut lower_ok = true;
        for &t in &ker_lambda {
            let d = Matrix::block_diag_one(self.gl_lower.element(self.lower_reps[t as usize]));
            let hit = self.groups.ep.contains(&d) && self.mu_of(&d)? == t;
            lower_ok &= hit && im_mu.contains(&t);
            if lower_witnesses.len() < MAX_WITNESSES {
                lower_witnesses.push(format!("{d:?}"));
            }
        }
        checks.push(
            Check::new(
                "exact at K_1,n-1/(K_1,n-1)_2: ker lambda in im mu",
                lower_ok,
                format!("|ker lambda| = {}, |im mu| = {}", ker_lambda.len(), im_mu.len()),
            )
            .with_witnesses(lower_witnesses),
        );
        checks.push(Check::new(
            "exact at K_1,n: ker alpha = im lambda",
            ker_alpha == im_lambda,
            format!("ker alpha = {ker_alpha:?}, im lambda = {im_lambda:?}"),
        ));
        let ker_beta: Vec<usize> = (0..self.pi0.classes.len())
            .filter(|&c| self.beta(self.pi0.classes[c][0]).is_some_and(|(k, _)| k == k0_base(n - 1)))
            .collect();
        let mut im_alpha: Vec<usize> = (0..self.k1.len()).map(|c| self.alpha(c)).collect();
        im_alpha.sort_unstable();
        im_alpha.dedup();
        checks.push(Check::new(
            "exact at pi_0: ker beta = im alpha",
            ker_beta == im_alpha,
            format!("ker beta = {ker_beta:?}, im alpha = {im_alpha:?}"),
        ));
        let ker_gamma_ok = betas.iter().all(|k| self.gamma(*k) == k0_base(n));
        checks.push(
            Check::new(
                "exact at K^s_0,n-1: ker gamma = im beta",
                ker_gamma_ok && beta_missing.is_empty(),
                format!("im beta has ranks {:?}", betas.iter().map(|k| k.rank).collect::<Vec<_>>()),
            )
            .with_witnesses(beta_missing),
        );
        let mut beta_rows_ok = true;
        for x in 0..self.um.rows.len() as u32 {
            beta_rows_ok &= self.beta(x).is_some_and(|(k, _)| k == betas[self.pi0_of[x as usize]]);
        }
        checks.push(Check::new(
            "beta constant on pi_0 classes",
            beta_rows_ok,
            format!("{} rows", self.um.rows.len()),
        ));

        Ok(SequenceReport {
            ring: ring.spec(),
            n,
            sizes: SequenceSizes {
                e: self.groups.e.len(),
                gl: self.k1.gl_order,
                ep: self.groups.ep.len(),
                ep2: self.groups.ep2.len(),
                um: self.um.rows.len(),
                pi0: self.pi0.classes.len(),
                pi1: self.pi1_cosets(),
                k1: self.k1.len(),
                k1_lower_quotient: self.lower_cosets(),
                k2_witnesses: self.k2_witnesses.len(),
            },
            checks,
        })
    }
}

pub fn verify_sequence(n: usize, ring: &Arc<FiniteRing>, caps: KCaps) -> Result<SequenceReport, KError> {
    SequenceData::build(n, ring, caps)?.report()
}
