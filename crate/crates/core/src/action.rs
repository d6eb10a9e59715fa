//! Finite global actions: a carrier, an index set with a reflexive relation,
//! local groups acting on local subsets, and structure homomorphisms.
//!
//! Points and group elements are dense `u32` ids. Each local group carries
//! its Cayley table and one permutation of the carrier per element, with
//! [`NONE`] marking points outside the local set.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::matgroup::{self, Matrix, NilpotentSet, SubgroupClosure};
use crate::ring::FiniteRing;

pub const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("point {0} is not in the carrier")]
    PointOutOfRange(u32),
    #[error("index {0} does not exist")]
    IndexOutOfRange(usize),
    #[error("malformed action data: {0}")]
    Malformed(String),
    #[error("empty line window [{0}, {1}]")]
    EmptyWindow(i64, i64),
    #[error("map has {got} entries but the source carrier has {want} points")]
    MapLength { got: usize, want: usize },
    #[error("map is not surjective: point {0} of the target has no preimage")]
    NotSurjective(u32),
}

#[derive(Clone, Debug)]
pub struct LocalGroup {
    order: usize,
    mul: Vec<u32>,
    perms: Vec<Vec<u32>>,
}

impl LocalGroup {
    pub fn new(mul: Vec<u32>, perms: Vec<Vec<u32>>) -> Result<Self, ActionError> {
        let order = perms.len();
        if order == 0 || mul.len() != order * order {
            return Err(ActionError::Malformed("group table size".into()));
        }
        Ok(LocalGroup { order, mul, perms })
    }

    /// The trivial group fixing every point of `domain`.
    pub fn trivial(points: usize, domain: &[bool]) -> Self {
        let perm = (0..points as u32)
            .map(|x| if domain[x as usize] { x } else { NONE })
            .collect();
        LocalGroup {
            order: 1,
            mul: vec![0],
            perms: vec![perm],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn act(&self, x: u32, g: usize) -> u32 {
        self.perms[g][x as usize]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }
}

/// Local subgroups of one matrix group, with their names and inclusion order.
#[derive(Clone, Debug)]
pub struct LocalFamily {
    pub names: Vec<String>,
    pub groups: Vec<SubgroupClosure>,
    pub le: Vec<Vec<bool>>,
}

impl LocalFamily {
    /// `(E_n(R))_alpha` for every nilpotent `alpha`, ordered by inclusion.
    pub fn nilpotent(n: usize, ring: &Arc<FiniteRing>) -> Self {
        let sets = matgroup::all_nilpotent_sets(n);
        let names = sets.iter().map(|s| s.to_string()).collect();
        let groups = sets.iter().map(|s| matgroup::local_subgroup(s, ring)).collect();
        let le = sets
            .iter()
            .map(|a| sets.iter().map(|b| a.is_subset(b)).collect())
            .collect();
        LocalFamily { names, groups, le }
    }

    /// Arbitrary subgroups ordered by inclusion.
    pub fn from_subgroups(names: Vec<String>, groups: Vec<SubgroupClosure>) -> Self {
        let le = groups
            .iter()
            .map(|a| groups.iter().map(|b| a.is_subgroup_of(b)).collect())
            .collect();
        LocalFamily { names, groups, le }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Indices not strictly below any other index.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| {
                (0..self.len()).all(|b| a == b || !self.le[a][b] || self.le[b][a])
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct GlobalAction {
    points: usize,
    labels: Vec<String>,
    names: Vec<String>,
    local_sets: Vec<Vec<bool>>,
    groups: Vec<LocalGroup>,
    le: Vec<Vec<bool>>,
    theta: FxHashMap<(usize, usize), Vec<u32>>,
    orbit_of: Vec<Vec<u32>>,
    orbits: Vec<Vec<Vec<u32>>>,
}

impl GlobalAction {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        labels: Vec<String>,
        names: Vec<String>,
        local_sets: Vec<Vec<bool>>,
        groups: Vec<LocalGroup>,
        le: Vec<Vec<bool>>,
        theta: FxHashMap<(usize, usize), Vec<u32>>,
    ) -> Result<Self, ActionError> {
        let points = labels.len();
        let k = names.len();
        if local_sets.len() != k || groups.len() != k || le.len() != k {
            return Err(ActionError::Malformed("index data lengths differ".into()));
        }
        if le.iter().any(|r| r.len() != k) || local_sets.iter().any(|s| s.len() != points) {
            return Err(ActionError::Malformed("relation or local set has wrong size".into()));
        }
        for g in &groups {
            if g.perms.iter().any(|p| p.len() != points) {
                return Err(ActionError::Malformed("permutation has wrong size".into()));
            }
            if g.perms
                .iter()
                .flatten()
                .any(|&y| y != NONE && y as usize >= points)
            {
                return Err(ActionError::Malformed("permutation leaves the carrier".into()));
            }
        }
        let mut action = GlobalAction {
            points,
            labels,
            names,
            local_sets,
            groups,
            le,
            theta,
            orbit_of: Vec::new(),
            orbits: Vec::new(),
        };
        action.compute_orbits();
        Ok(action)
    }

    fn compute_orbits(&mut self) {
        self.orbit_of.clear();
        self.orbits.clear();
        for a in 0..self.names.len() {
            let mut of = vec![NONE; self.points];
            let mut orbits: Vec<Vec<u32>> = Vec::new();
            for x in 0..self.points as u32 {
                if !self.local_sets[a][x as usize] || of[x as usize] != NONE {
                    continue;
                }
                let id = orbits.len() as u32;
                let mut members = vec![x];
                of[x as usize] = id;
                let mut head = 0;
                while head < members.len() {
                    let y = members[head];
                    head += 1;
                    for g in 0..self.groups[a].order {
                        let z = self.groups[a].act(y, g);
                        if z != NONE && of[z as usize] == NONE {
                            of[z as usize] = id;
                            members.push(z);
                        }
                    }
                }
                members.sort_unstable();
                orbits.push(members);
            }
            self.orbit_of.push(of);
            self.orbits.push(orbits);
        }
    }

    /// Single-domain action of matrix local groups on `labels.len()` points.
    pub fn from_matrix_family(
        labels: Vec<String>,
        family: &LocalFamily,
        act: impl Fn(u32, &Matrix) -> u32,
    ) -> Result<Self, ActionError> {
        let points = labels.len();
        let mut groups = Vec::with_capacity(family.len());
        for sub in &family.groups {
            groups.push(matrix_local_group(sub, points, &act));
        }
        let mut theta = FxHashMap::default();
        for a in 0..family.len() {
            for b in 0..family.len() {
                if family.le[a][b] {
                    let big = &family.groups[b];
                    let map = family.groups[a]
                        .iter()
                        .map(|m| big.index_of(m).map_or(NONE, |i| i as u32))
                        .collect();
                    theta.insert((a, b), map);
                }
            }
        }
        GlobalAction::new(
            labels,
            family.names.clone(),
            vec![vec![true; points]; family.len()],
            groups,
            family.le.clone(),
            theta,
        )
    }

    /// The line action on the window `lo..=hi`: swap groups on `{m, m+1}` and a trivial index `*`.
    pub fn line(lo: i64, hi: i64) -> Result<Self, ActionError> {
        if hi < lo {
            return Err(ActionError::EmptyWindow(lo, hi));
        }
        let points = (hi - lo + 1) as usize;
        let labels: Vec<String> = (lo..=hi).map(|m| m.to_string()).collect();
        let mut names = vec!["*".to_string()];
        let mut local_sets = vec![vec![true; points]];
        let mut groups = vec![LocalGroup::trivial(points, &vec![true; points])];
        for m in 0..points.saturating_sub(1) {
            names.push((lo + m as i64).to_string());
            let mut set = vec![false; points];
            set[m] = true;
            set[m + 1] = true;
            let id: Vec<u32> = (0..points as u32)
                .map(|x| if set[x as usize] { x } else { NONE })
                .collect();
            let mut swap = id.clone();
            swap[m] = m as u32 + 1;
            swap[m + 1] = m as u32;
            groups.push(LocalGroup::new(vec![0, 1, 1, 0], vec![id, swap])?);
            local_sets.push(set);
        }
        let k = names.len();
        let mut le = vec![vec![false; k]; k];
        let mut theta = FxHashMap::default();
        for (a, row) in le.iter_mut().enumerate() {
            row[a] = true;
            row[0] = a == 0;
        }
        for (b, g) in groups.iter().enumerate() {
            le[0][b] = true;
            let id: Vec<u32> = (0..g.order as u32).collect();
            theta.insert((b, b), id);
            if b > 0 {
                theta.insert((0, b), vec![0]);
            }
        }
        GlobalAction::new(labels, names, local_sets, groups, le, theta)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn label(&self, x: u32) -> &str {
        &self.labels[x as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_count(&self) -> usize {
        self.names.len()
    }

    pub fn index_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn group(&self, a: usize) -> &LocalGroup {
        &self.groups[a]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn in_local_set(&self, a: usize, x: u32) -> bool {
        self.local_sets[a][x as usize]
    }

    pub fn is_single_domain(&self) -> bool {
        self.local_sets.iter().all(|s| s.iter().all(|&b| b))
    }

    /// Orbit id of `x` under `G_a`, or [`NONE`] outside `X_a`.
    #[inline]
    pub fn orbit_id(&self, a: usize, x: u32) -> u32 {
        self.orbit_of[a][x as usize]
    }

    pub fn orbit(&self, a: usize, x: u32) -> &[u32] {
        let id = self.orbit_of[a][x as usize];
        if id == NONE {
            &[]
        } else {
            &self.orbits[a][id as usize]
        }
    }

    pub fn orbits(&self, a: usize) -> &[Vec<u32>] {
        &self.orbits[a]
    }

    /// Whether all `pts` lie in one orbit of a single local group.
    pub fn common_orbit(&self, pts: &[u32]) -> bool {
        (0..self.index_count()).any(|a| self.one_orbit_of(a, pts))
    }

    fn one_orbit_of(&self, a: usize, pts: &[u32]) -> bool {
        let first = self.orbit_of[a][pts[0] as usize];
        first != NONE && pts.iter().all(|&p| self.orbit_of[a][p as usize] == first)
    }

    /// Points reachable from `x` by one element of one local group, excluding `x`.
    pub fn one_step(&self, x: u32) -> Vec<u32> {
        let mut out: Vec<u32> = (0..self.index_count())
            .flat_map(|a| self.orbit(a, x).iter().copied())
            .filter(|&y| y != x)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn check_point(&self, x: u32) -> Result<(), ActionError> {
        if (x as usize) < self.points {
            Ok(())
        } else {
            Err(ActionError::PointOutOfRange(x))
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |axiom: &str, detail: String| {
            out.push(Violation {
                axiom: axiom.to_string(),
                detail,
            })
        };
        let k = self.index_count();
        for a in 0..k {
            if !self.le[a][a] {
                push("reflexive", format!("index {} is not <= itself", self.names[a]));
            }
            let g = &self.groups[a];
            for x in 0..self.points as u32 {
                let inside = self.local_sets[a][x as usize];
                if inside && g.act(x, 0) != x {
                    push("identity", format!("identity of {} moves {}", self.names[a], self.label(x)));
                }
                for h in 0..g.order {
                    let y = g.act(x, h);
                    if inside != (y != NONE) || (y != NONE && !self.local_sets[a][y as usize]) {
                        push(
                            "local set",
                            format!("element {h} of {} does not act on {}", self.names[a], self.label(x)),
                        );
                    }
                }
            }
            if (0..g.order).any(|h| g.mul(0, h) != h || g.mul(h, 0) != h) {
                push("identity", format!("element 0 of {} is not the identity", self.names[a]));
            }
            'comp: for h1 in 0..g.order {
                for h2 in 0..g.order {
                    let p = g.mul(h1, h2);
                    for x in 0..self.points as u32 {
                        if !self.local_sets[a][x as usize] {
                            continue;
                        }
                        let y = g.act(x, h1);
                        if y == NONE || g.act(x, p) != g.act(y, h2) {
                            push(
                                "composition",
                                format!("{}: x.({h1}*{h2}) != (x.{h1}).{h2} at {}", self.names[a], self.label(x)),
                            );
                            break 'comp;
                        }
                    }
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                if !self.le[a][b] {
                    continue;
                }
                let Some(th) = self.theta.get(&(a, b)) else {
                    push("structure map", format!("missing theta for {} <= {}", self.names[a], self.names[b]));
                    continue;
                };
                let (ga, gb) = (&self.groups[a], &self.groups[b]);
                if th.len() != ga.order || th.iter().any(|&t| t as usize >= gb.order) {
                    push("structure map", format!("theta {} -> {} has bad shape", self.names[a], self.names[b]));
                    continue;
                }
                'hom: for h1 in 0..ga.order {
                    for h2 in 0..ga.order {
                        let lhs = th[ga.mul(h1, h2)] as usize;
                        let rhs = gb.mul(th[h1] as usize, th[h2] as usize);
                        if lhs != rhs {
                            push(
                                "structure map",
                                format!("theta {} -> {} is not a homomorphism", self.names[a], self.names[b]),
                            );
                            break 'hom;
                        }
                    }
                }
                'compat: for x in 0..self.points as u32 {
                    if !(self.local_sets[a][x as usize] && self.local_sets[b][x as usize]) {
                        continue;
                    }
                    for h in 0..ga.order {
                        let y = ga.act(x, h);
                        if y == NONE || !self.local_sets[b][y as usize] {
                            push(
                                "compatibility",
                                format!(
                                    "{} does not preserve the overlap with {} at {}",
                                    self.names[a], self.names[b], self.label(x)
                                ),
                            );
                            break 'compat;
                        }
                        if gb.act(x, th[h] as usize) != y {
                            push(
                                "compatibility",
                                format!(
                                    "x.g != x.theta(g) for {} <= {} at {}",
                                    self.names[a], self.names[b], self.label(x)
                                ),
                            );
                            break 'compat;
                        }
                    }
                }
            }
        }
        out
    }

    /// `points[0]` is the base of the frame.
    pub fn is_frame(&self, points: &[u32], a: usize) -> bool {
        let Some(&x0) = points.first() else {
            return false;
        };
        a < self.index_count()
            && points.iter().all(|&p| (p as usize) < self.points)
            && self.one_orbit_of(a, points)
            && self.local_sets[a][x0 as usize]
    }

    /// Star at `x`: the union of the local orbits of `x`, with those orbits as local sets.
    /// Returns the star together with its embedding into `self`.
    pub fn star(&self, x: u32) -> Result<(GlobalAction, Vec<u32>), ActionError> {
        self.check_point(x)?;
        let idx: Vec<usize> = (0..self.index_count())
            .filter(|&a| self.local_sets[a][x as usize])
            .collect();
        let mut carrier: Vec<u32> = idx.iter().flat_map(|&a| self.orbit(a, x).iter().copied()).collect();
        carrier.sort_unstable();
        carrier.dedup();
        let mut local_id = vec![NONE; self.points];
        for (i, &p) in carrier.iter().enumerate() {
            local_id[p as usize] = i as u32;
        }
        let m = carrier.len();
        let mut local_sets = Vec::new();
        let mut groups = Vec::new();
        for &a in &idx {
            let orbit = self.orbit(a, x);
            let mut set = vec![false; m];
            for &p in orbit {
                set[local_id[p as usize] as usize] = true;
            }
            let g = &self.groups[a];
            let perms = (0..g.order)
                .map(|h| {
                    (0..m)
                        .map(|i| {
                            if set[i] {
                                local_id[g.act(carrier[i], h) as usize]
                            } else {
                                NONE
                            }
                        })
                        .collect()
                })
                .collect();
            groups.push(LocalGroup::new(g.mul.clone(), perms)?);
            local_sets.push(set);
        }
        let le = idx
            .iter()
            .map(|&a| idx.iter().map(|&b| self.le[a][b]).collect())
            .collect();
        let mut theta = FxHashMap::default();
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                if let Some(t) = self.theta.get(&(a, b)) {
                    theta.insert((i, j), t.clone());
                }
            }
        }
        let labels = carrier.iter().map(|&p| self.labels[p as usize].clone()).collect();
        let names = idx.iter().map(|&a| self.names[a].clone()).collect();
        let star = GlobalAction::new(labels, names, local_sets, groups, le, theta)?;
        Ok((star, carrier))
    }

    /// Product action: pairs `(a, b)` have id `a * |B| + b`.
    pub fn product(&self, other: &GlobalAction) -> Result<GlobalAction, ActionError> {
        let (p, q) = (self.points, other.points);
        let labels = (0..p)
            .flat_map(|a| (0..q).map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", self.labels[a], other.labels[b]))
            .collect();
        let (ka, kb) = (self.index_count(), other.index_count());
        let mut names = Vec::new();
        let mut local_sets = Vec::new();
        let mut groups = Vec::new();
        for a in 0..ka {
            for b in 0..kb {
                names.push(format!("({},{})", self.names[a], other.names[b]));
                let set: Vec<bool> = (0..p * q)
                    .map(|z| self.local_sets[a][z / q] && other.local_sets[b][z % q])
                    .collect();
                let (ga, gb) = (&self.groups[a], &other.groups[b]);
                let ob = gb.order;
                let order = ga.order * ob;
                let mut mul = vec![0u32; order * order];
                for u in 0..order {
                    for v in 0..order {
                        mul[u * order + v] =
                            (ga.mul(u / ob, v / ob) * ob + gb.mul(u % ob, v % ob)) as u32;
                    }
                }
                let perms = (0..order)
                    .map(|u| {
                        (0..p * q)
                            .map(|z| {
                                if !set[z] {
                                    return NONE;
                                }
                                let x = ga.act((z / q) as u32, u / ob);
                                let y = gb.act((z % q) as u32, u % ob);
                                x * q as u32 + y
                            })
                            .collect()
                    })
                    .collect();
                groups.push(LocalGroup::new(mul, perms)?);
                local_sets.push(set);
            }
        }
        let k = ka * kb;
        let mut le = vec![vec![false; k]; k];
        let mut theta = FxHashMap::default();
        for i in 0..k {
            for j in 0..k {
                let (a1, b1, a2, b2) = (i / kb, i % kb, j / kb, j % kb);
                if self.le[a1][a2] && other.le[b1][b2] {
                    le[i][j] = true;
                    if let (Some(t1), Some(t2)) =
                        (self.theta.get(&(a1, a2)), other.theta.get(&(b1, b2)))
                    {
                        let ob1 = other.groups[b1].order;
                        let ob2 = other.groups[b2].order;
                        let map = (0..self.groups[a1].order * ob1)
                            .map(|u| t1[u / ob1] * ob2 as u32 + t2[u % ob1])
                            .collect();
                        theta.insert((i, j), map);
                    }
                }
            }
        }
        GlobalAction::new(labels, names, local_sets, groups, le, theta)
    }

    /// Restriction to a subset that every local group leaves invariant.
    pub fn restrict(&self, keep: &[bool]) -> Result<(GlobalAction, Vec<u32>), ActionError> {
        let carrier: Vec<u32> = (0..self.points as u32).filter(|&x| keep[x as usize]).collect();
        let mut local_id = vec![NONE; self.points];
        for (i, &p) in carrier.iter().enumerate() {
            local_id[p as usize] = i as u32;
        }
        let m = carrier.len();
        let mut groups = Vec::new();
        let mut local_sets = Vec::new();
        for a in 0..self.index_count() {
            let g = &self.groups[a];
            let set: Vec<bool> = carrier.iter().map(|&p| self.local_sets[a][p as usize]).collect();
            let mut perms = Vec::with_capacity(g.order);
            for h in 0..g.order {
                let mut perm = Vec::with_capacity(m);
                for (i, &p) in carrier.iter().enumerate() {
                    if !set[i] {
                        perm.push(NONE);
                        continue;
                    }
                    let y = g.act(p, h);
                    if y == NONE || local_id[y as usize] == NONE {
                        return Err(ActionError::Malformed(format!(
                            "subset is not invariant under {}",
                            self.names[a]
                        )));
                    }
                    perm.push(local_id[y as usize]);
                }
                perms.push(perm);
            }
            groups.push(LocalGroup::new(g.mul.clone(), perms)?);
            local_sets.push(set);
        }
        let labels = carrier.iter().map(|&p| self.labels[p as usize].clone()).collect();
        let action = GlobalAction::new(
            labels,
            self.names.clone(),
            local_sets,
            groups,
            self.le.clone(),
            self.theta.clone(),
        )?;
        Ok((action, carrier))
    }

    /// Covering action on `points x sheets`: `(v, s) . h = (v . h, s * label(v, v . h))`.
    /// `label` must be multiplicative along every local orbit for this to be an action.
    pub fn lift(
        &self,
        sheets: usize,
        label: impl Fn(u32, u32) -> usize,
        sheet_mul: impl Fn(usize, usize) -> usize,
    ) -> Result<GlobalAction, ActionError> {
        let total = self.points * sheets;
        let labels = (0..total)
            .map(|z| format!("{}#{}", self.labels[z / sheets], z % sheets))
            .collect();
        let mut groups = Vec::with_capacity(self.index_count());
        let mut local_sets = Vec::with_capacity(self.index_count());
        for a in 0..self.index_count() {
            let g = &self.groups[a];
            let set: Vec<bool> = (0..total).map(|z| self.local_sets[a][z / sheets]).collect();
            let perms = (0..g.order)
                .map(|h| {
                    (0..total)
                        .map(|z| {
                            let v = (z / sheets) as u32;
                            let w = g.act(v, h);
                            if w == NONE {
                                NONE
                            } else {
                                let s = sheet_mul(z % sheets, label(v, w));
                                (w as usize * sheets + s) as u32
                            }
                        })
                        .collect()
                })
                .collect();
            groups.push(LocalGroup::new(g.mul.clone(), perms)?);
            local_sets.push(set);
        }
        GlobalAction::new(
            labels,
            self.names.clone(),
            local_sets,
            groups,
            self.le.clone(),
            self.theta.clone(),
        )
    }

    /// Path components of the one-step graph; component ids follow first appearance.
    pub fn components(&self) -> Vec<u32> {
        let mut comp = vec![NONE; self.points];
        let mut next = 0;
        for s in 0..self.points as u32 {
            if comp[s as usize] != NONE {
                continue;
            }
            comp[s as usize] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for a in 0..self.index_count() {
                    for &y in self.orbit(a, x) {
                        if comp[y as usize] == NONE {
                            comp[y as usize] = next;
                            queue.push_back(y);
                        }
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

fn matrix_local_group(
    sub: &SubgroupClosure,
    points: usize,
    act: &impl Fn(u32, &Matrix) -> u32,
) -> LocalGroup {
    let ring = sub.ring();
    let order = sub.len();
    let mut mul = vec![0u32; order * order];
    for (i, a) in sub.iter().enumerate() {
        for (j, b) in sub.iter().enumerate() {
            let p = a.mul_unchecked(b, ring);
            mul[i * order + j] = sub.index_of(&p).expect("subgroup is closed") as u32;
        }
    }
    let perms = sub
        .iter()
        .map(|m| (0..points as u32).map(|x| act(x, m)).collect())
        .collect();
    LocalGroup { order, mul, perms }
}

/// Frame preservation checked orbit by orbit: every local orbit of `source`
/// must land inside a single local orbit of `target`.
pub fn is_morphism(f: &[u32], source: &GlobalAction, target: &GlobalAction) -> bool {
    morphism_defect(f, source, target).is_none()
}

/// The first local orbit whose image is not a frame, as `(index, orbit representative)`.
pub fn morphism_defect(f: &[u32], source: &GlobalAction, target: &GlobalAction) -> Option<(usize, u32)> {
    if f.len() != source.len() || f.iter().any(|&y| y as usize >= target.len()) {
        return Some((usize::MAX, NONE));
    }
    for a in 0..source.index_count() {
        for orbit in source.orbits(a) {
            let image: Vec<u32> = orbit.iter().map(|&x| f[x as usize]).collect();
            if !target.common_orbit(&image) {
                return Some((a, orbit[0]));
            }
        }
    }
    None
}

/// A bijection `a0 -> b0` intertwining every local group element, for two
/// actions whose local groups are listed identically.
pub fn pointed_isomorphism(a: &GlobalAction, a0: u32, b: &GlobalAction, b0: u32) -> Option<Vec<u32>> {
    if a.len() != b.len() || a.index_count() != b.index_count() {
        return None;
    }
    for i in 0..a.index_count() {
        if a.groups[i].order != b.groups[i].order {
            return None;
        }
    }
    let mut phi = vec![NONE; a.len()];
    let mut used = vec![false; b.len()];
    phi[a0 as usize] = b0;
    used[b0 as usize] = true;
    let mut queue = VecDeque::from([a0]);
    while let Some(x) = queue.pop_front() {
        let fx = phi[x as usize];
        for i in 0..a.index_count() {
            for h in 0..a.groups[i].order {
                let y = a.groups[i].act(x, h);
                let fy = b.groups[i].act(fx, h);
                if (y == NONE) != (fy == NONE) {
                    return None;
                }
                if y == NONE {
                    continue;
                }
                if phi[y as usize] == NONE {
                    if used[fy as usize] {
                        return None;
                    }
                    phi[y as usize] = fy;
                    used[fy as usize] = true;
                    queue.push_back(y);
                } else if phi[y as usize] != fy {
                    return None;
                }
            }
        }
    }
    phi.iter().all(|&v| v != NONE).then_some(phi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringDefect {
    pub point: u32,
    pub reason: String,
}

/// Whether `p` restricts to an isomorphism `star(b) -> star(p(b))` at every `b`.
/// Local sets of a star are single orbits, so frames there are subsets of
/// those orbits and both directions reduce to orbit containment.
pub fn covering_defect(
    p: &[u32],
    source: &GlobalAction,
    target: &GlobalAction,
) -> Result<Option<CoveringDefect>, ActionError> {
    if p.len() != source.len() {
        return Err(ActionError::MapLength {
            got: p.len(),
            want: source.len(),
        });
    }
    let mut hit = vec![false; target.len()];
    for &y in p {
        target.check_point(y)?;
        hit[y as usize] = true;
    }
    if let Some(y) = hit.iter().position(|&h| !h) {
        return Err(ActionError::NotSurjective(y as u32));
    }
    let star_of = |act: &GlobalAction, x: u32| -> Vec<u32> {
        let mut s: Vec<u32> = (0..act.index_count())
            .flat_map(|a| act.orbit(a, x).iter().copied())
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    for b in 0..source.len() as u32 {
        let pb = p[b as usize];
        let s = star_of(source, b);
        let t = star_of(target, pb);
        let mut image: Vec<u32> = s.iter().map(|&x| p[x as usize]).collect();
        image.sort_unstable();
        let before = image.len();
        image.dedup();
        if image.len() != before {
            return Ok(Some(CoveringDefect {
                point: b,
                reason: "not injective on the star".into(),
            }));
        }
        if image != t {
            return Ok(Some(CoveringDefect {
                point: b,
                reason: "star image differs from the target star".into(),
            }));
        }
        for a in 0..source.index_count() {
            let orbit = source.orbit(a, b);
            if orbit.is_empty() {
                continue;
            }
            let img: Vec<u32> = orbit.iter().map(|&x| p[x as usize]).collect();
            if !(0..target.index_count()).any(|c| {
                target.orbit_id(c, pb) != NONE
                    && img.iter().all(|&y| target.orbit_id(c, y) == target.orbit_id(c, pb))
            }) {
                return Ok(Some(CoveringDefect {
                    point: b,
                    reason: format!("orbit of {} does not map into a local orbit", source.index_name(a)),
                }));
            }
        }
        let mut inverse: FxHashMap<u32, u32> = FxHashMap::default();
        for &x in &s {
            inverse.insert(p[x as usize], x);
        }
        for c in 0..target.index_count() {
            let orbit = target.orbit(c, pb);
            if orbit.is_empty() {
                continue;
            }
            let pre: Vec<u32> = orbit.iter().map(|y| inverse[y]).collect();
            if !(0..source.index_count()).any(|a| {
                source.orbit_id(a, b) != NONE
                    && pre.iter().all(|&x| source.orbit_id(a, x) == source.orbit_id(a, b))
            }) {
                return Ok(Some(CoveringDefect {
                    point: b,
                    reason: format!("preimage of the {} orbit is not a frame", target.index_name(c)),
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct PointedAction {
    pub action: GlobalAction,
    pub base: u32,
}

impl PointedAction {
    pub fn new(action: GlobalAction, base: u32) -> Result<Self, ActionError> {
        action.check_point(base)?;
        Ok(PointedAction { action, base })
    }
}

/// Index of `alpha` in a nilpotent [`LocalFamily`] built for the same `n`.
pub fn nilpotent_index(family: &LocalFamily, alpha: &NilpotentSet) -> Option<usize> {
    let name = alpha.to_string();
    family.names.iter().position(|s| *s == name)
}
