//! Paths in a global action, elementary homotopies, a bounded homotopy search,
//! `pi_0`, and a presentation-based `pi_1`.
//!
//! A path is a finite window `[x_ld, ..., x_ud]` extended by constants on both
//! sides. The homotopy search works on reduced words (no repeated neighbours),
//! which identifies paths differing by stutters and shifts. One search move
//! inserts or deletes a point `z` between `a` and `b` when `a, z, b` lie in a
//! single local orbit, or inserts or removes a spike `a, z, a`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::action::{GlobalAction, PointedAction, NONE};
use crate::group::FiniteGroup;
use crate::presentation::{Presentation, PresentationError, Word};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least one point")]
    Empty,
    #[error("endpoint mismatch: {0} vs {1}")]
    EndpointMismatch(u32, u32),
    #[error("points {from} and {to} at position {position} share no local orbit")]
    NotAdjacent { position: usize, from: u32, to: u32 },
    #[error("point {0} is not in the carrier")]
    PointOutOfRange(u32),
    #[error("the carrier is not path connected to the base point")]
    BaseDisconnected,
    #[error("homotopy trace step {0} is not an elementary move")]
    BadTrace(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    ld: i64,
    window: Vec<u32>,
}

impl Path {
    pub fn new(ld: i64, window: Vec<u32>) -> Result<Self, PathError> {
        if window.is_empty() {
            return Err(PathError::Empty);
        }
        let mut p = Path { ld, window };
        p.canonicalize();
        Ok(p)
    }

    pub fn constant(x: u32) -> Self {
        Path {
            ld: 0,
            window: vec![x],
        }
    }

    fn canonicalize(&mut self) {
        let lead = self
            .window
            .windows(2)
            .take_while(|w| w[0] == w[1])
            .count();
        self.window.drain(..lead);
        self.ld += lead as i64;
        while self.window.len() > 1 && self.window[self.window.len() - 1] == self.window[self.window.len() - 2] {
            self.window.pop();
        }
    }

    pub fn ld(&self) -> i64 {
        self.ld
    }

    pub fn ud(&self) -> i64 {
        self.ld + self.window.len() as i64 - 1
    }

    pub fn window(&self) -> &[u32] {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.window.len() == 1
    }

    pub fn in_point(&self) -> u32 {
        self.window[0]
    }

    pub fn ter_point(&self) -> u32 {
        self.window[self.window.len() - 1]
    }

    /// Value at any integer, constant outside the window.
    pub fn at(&self, m: i64) -> u32 {
        let k = (m - self.ld).clamp(0, self.window.len() as i64 - 1);
        self.window[k as usize]
    }

    /// Checks that consecutive points share a local orbit.
    pub fn check(&self, action: &GlobalAction) -> Result<(), PathError> {
        for &x in &self.window {
            if x as usize >= action.len() {
                return Err(PathError::PointOutOfRange(x));
            }
        }
        for (k, w) in self.window.windows(2).enumerate() {
            if w[0] != w[1] && !action.common_orbit(w) {
                return Err(PathError::NotAdjacent {
                    position: k,
                    from: w[0],
                    to: w[1],
                });
            }
        }
        Ok(())
    }

    /// Traverses `self`, then `other`.
    pub fn compose(&self, other: &Path) -> Result<Path, PathError> {
        if self.ter_point() != other.in_point() {
            return Err(PathError::EndpointMismatch(self.ter_point(), other.in_point()));
        }
        if self.is_constant() {
            return Ok(other.clone());
        }
        if other.is_constant() {
            return Ok(self.clone());
        }
        let mut window = self.window.clone();
        window.extend_from_slice(&other.window[1..]);
        Path::new(self.ld, window)
    }

    pub fn inverse(&self) -> Path {
        let mut window = self.window.clone();
        window.reverse();
        Path {
            ld: -self.ud(),
            window,
        }
    }

    /// The window with repeated neighbours collapsed.
    pub fn reduced(&self) -> Vec<u32> {
        let mut out = self.window.clone();
        out.dedup();
        out
    }
}

/// Paths one literal elementary homotopy away:
/// `(x,x,y) <-> (x,y,y)` and `(x,x,x) <-> (x,y,x)` at one position.
pub fn elementary_neighbors(action: &GlobalAction, path: &Path) -> Vec<Path> {
    let mut out = FxHashSet::default();
    let lo = path.ld() - 1;
    let hi = path.ud() + 1;
    let base: Vec<u32> = (lo..=hi).map(|m| path.at(m)).collect();
    for i in 0..base.len() - 2 {
        let (x, m, y) = (base[i], base[i + 1], base[i + 2]);
        let mut replacements = Vec::new();
        if x == m && m != y {
            replacements.push(y);
        } else if x != m && m == y {
            replacements.push(x);
        } else if x == m && m == y {
            replacements.extend(action.one_step(x));
        } else if x == y {
            replacements.push(x);
        }
        for z in replacements {
            let mut w = base.clone();
            w[i + 1] = z;
            let p = Path::new(lo, w).expect("nonempty");
            if p.check(action).is_ok() {
                out.insert(p);
            }
        }
    }
    let mut out: Vec<Path> = out.into_iter().collect();
    out.sort();
    out
}

/// Neighbour structure of an action used by the search.
struct MoveTable<'a> {
    action: &'a GlobalAction,
    adjacent: Vec<Vec<u32>>,
}

impl<'a> MoveTable<'a> {
    fn new(action: &'a GlobalAction) -> Self {
        let adjacent = (0..action.len() as u32).map(|x| action.one_step(x)).collect();
        MoveTable { action, adjacent }
    }

    fn between(&self, a: u32, b: u32) -> Vec<u32> {
        let act = self.action;
        let mut out: Vec<u32> = (0..act.index_count())
            .filter(|&i| {
                let o = act.orbit_id(i, a);
                o != NONE && o == act.orbit_id(i, b)
            })
            .flat_map(|i| act.orbit(i, a).iter().copied())
            .filter(|&z| z != a && z != b)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn neighbors(&self, w: &[u32], max_len: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let m = w.len();
        for k in 1..m.saturating_sub(1) {
            if w[k - 1] == w[k + 1] {
                let mut v = w[..k].to_vec();
                v.extend_from_slice(&w[k + 2..]);
                out.push(v);
            } else if self.action.common_orbit(&[w[k - 1], w[k], w[k + 1]]) {
                let mut v = w[..k].to_vec();
                v.extend_from_slice(&w[k + 1..]);
                out.push(v);
            }
        }
        if m < max_len {
            for k in 0..m - 1 {
                for z in self.between(w[k], w[k + 1]) {
                    let mut v = w[..=k].to_vec();
                    v.push(z);
                    v.extend_from_slice(&w[k + 1..]);
                    out.push(v);
                }
            }
        }
        if m + 1 < max_len {
            for k in 0..m {
                for &z in &self.adjacent[w[k] as usize] {
                    let mut v = w[..=k].to_vec();
                    v.push(z);
                    v.extend_from_slice(&w[k..]);
                    out.push(v);
                }
            }
        }
        out
    }
}

/// Reduced-word moves (see the module docs) from a path, as paths starting at `ld = 0`.
pub fn one_step_neighbors(action: &GlobalAction, path: &Path, max_len: usize) -> Vec<Path> {
    let table = MoveTable::new(action);
    let mut out: Vec<Path> = table
        .neighbors(&path.reduced(), max_len)
        .into_iter()
        .map(|w| Path::new(0, w).expect("nonempty"))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    pub max_steps: usize,
    /// Longest reduced word allowed; `None` means three times the longer input.
    pub max_window: Option<usize>,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_steps: DEFAULT_MAX_STEPS,
            max_window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyTrace {
    pub paths: Vec<Path>,
}

impl HomotopyTrace {
    pub fn moves(&self) -> usize {
        self.paths.len().saturating_sub(1)
    }

    /// Endpoints fixed, and each step either keeps the reduced word or is one search move.
    pub fn verify(&self, action: &GlobalAction) -> Result<(), PathError> {
        let Some(first) = self.paths.first() else {
            return Err(PathError::Empty);
        };
        let table = MoveTable::new(action);
        for (k, p) in self.paths.iter().enumerate() {
            p.check(action)?;
            if p.in_point() != first.in_point() || p.ter_point() != first.ter_point() {
                return Err(PathError::BadTrace(k));
            }
        }
        for (k, pair) in self.paths.windows(2).enumerate() {
            let (a, b) = (pair[0].reduced(), pair[1].reduced());
            if a == b {
                continue;
            }
            let limit = a.len().max(b.len()) + 2;
            if !table.neighbors(&a, limit).contains(&b) {
                return Err(PathError::BadTrace(k));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum HomotopyAnswer {
    Yes { trace: HomotopyTrace },
    /// The reachable set within the window cap was exhausted.
    No { explored: usize },
    Undecided { explored: usize },
}

impl HomotopyAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, HomotopyAnswer::Yes { .. })
    }
}

struct Side {
    words: Vec<Vec<u32>>,
    parent: Vec<u32>,
    index: FxHashMap<Vec<u32>, u32>,
    heap: BinaryHeap<Reverse<(usize, u32)>>,
}

impl Side {
    fn new(start: Vec<u32>) -> Self {
        let mut index = FxHashMap::default();
        index.insert(start.clone(), 0);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((start.len(), 0)));
        Side {
            words: vec![start],
            parent: vec![u32::MAX],
            index,
            heap,
        }
    }

    fn chain(&self, mut id: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        while id != u32::MAX {
            out.push(self.words[id as usize].clone());
            id = self.parent[id as usize];
        }
        out
    }
}

/// Bidirectional best-first search (shortest words first) between two paths with equal endpoints.
pub fn stably_homotopic(
    action: &GlobalAction,
    a: &Path,
    b: &Path,
    caps: SearchCaps,
) -> Result<HomotopyAnswer, PathError> {
    a.check(action)?;
    b.check(action)?;
    if a.in_point() != b.in_point() {
        return Err(PathError::EndpointMismatch(a.in_point(), b.in_point()));
    }
    if a.ter_point() != b.ter_point() {
        return Err(PathError::EndpointMismatch(a.ter_point(), b.ter_point()));
    }
    let (ra, rb) = (a.reduced(), b.reduced());
    if ra == rb {
        let paths = if a == b { vec![a.clone()] } else { vec![a.clone(), b.clone()] };
        return Ok(HomotopyAnswer::Yes {
            trace: HomotopyTrace { paths },
        });
    }
    let max_len = caps
        .max_window
        .unwrap_or(3 * a.len().max(b.len()))
        .max(ra.len())
        .max(rb.len());
    let table = MoveTable::new(action);
    let mut sides = [Side::new(ra), Side::new(rb)];
    let mut explored = 0usize;
    let mut turn = 0usize;
    loop {
        if sides[0].heap.is_empty() && sides[1].heap.is_empty() {
            return Ok(HomotopyAnswer::No { explored });
        }
        if explored >= caps.max_steps {
            return Ok(HomotopyAnswer::Undecided { explored });
        }
        if sides[turn].heap.is_empty() {
            turn ^= 1;
        }
        let Reverse((_, id)) = sides[turn].heap.pop().expect("nonempty heap");
        explored += 1;
        let word = sides[turn].words[id as usize].clone();
        for nb in table.neighbors(&word, max_len) {
            if sides[turn].index.contains_key(&nb) {
                continue;
            }
            let new_id = sides[turn].words.len() as u32;
            let side = &mut sides[turn];
            side.index.insert(nb.clone(), new_id);
            side.words.push(nb.clone());
            side.parent.push(id);
            side.heap.push(Reverse((nb.len(), new_id)));
            if let Some(&other_id) = sides[turn ^ 1].index.get(&nb) {
                let mut here = sides[turn].chain(new_id);
                let there = sides[turn ^ 1].chain(other_id);
                here.reverse();
                here.extend(there.into_iter().skip(1));
                if turn == 1 {
                    here.reverse();
                }
                let mut paths = vec![a.clone()];
                paths.extend(here.into_iter().map(|w| Path::new(0, w).expect("nonempty")));
                paths.push(b.clone());
                paths.dedup();
                return Ok(HomotopyAnswer::Yes {
                    trace: HomotopyTrace { paths },
                });
            }
        }
        turn ^= 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi0 {
    pub classes: Vec<Vec<u32>>,
    pub base_class: Option<usize>,
}

/// Path components, ordered by smallest member.
pub fn pi0(action: &GlobalAction, base: Option<u32>) -> Pi0 {
    let comp = action.components();
    let count = comp.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut classes = vec![Vec::new(); count];
    for (x, &c) in comp.iter().enumerate() {
        classes[c as usize].push(x as u32);
    }
    let base_class = base.map(|b| comp[b as usize] as usize);
    Pi0 { classes, base_class }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pi1Caps {
    pub max_cosets: usize,
    pub search: SearchCaps,
    /// Products `rep(x) * generator` confirmed by homotopy search; 0 disables.
    pub cross_checks: usize,
}

impl Default for Pi1Caps {
    fn default() -> Self {
        Pi1Caps {
            max_cosets: 1_000_000,
            search: SearchCaps {
                max_steps: 200_000,
                max_window: None,
            },
            cross_checks: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Pi1Search {
    pub group: FiniteGroup,
    pub edges: usize,
    pub triangles: usize,
    pub generators_after_elimination: usize,
    pub relators_after_elimination: usize,
    /// One loop at the base point per group element.
    pub loops: Vec<Path>,
    pub confirmed: usize,
    pub unconfirmed: usize,
    /// Group element of each edge `(x, y)` with `x < y`, as a closed loop
    /// through the spanning tree.
    #[serde(skip)]
    pub edge_labels: Vec<(u32, u32, usize)>,
}

impl Pi1Search {
    /// Label of the step `x -> y`; identity on `x == y`.
    pub fn step_label(&self, x: u32, y: u32) -> Option<usize> {
        if x == y {
            return Some(0);
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        let k = self
            .edge_labels
            .binary_search_by_key(&(a, b), |&(p, q, _)| (p, q))
            .ok()?;
        let g = self.edge_labels[k].2;
        Some(if x < y { g } else { self.group.inverse(g) })
    }

    /// Group element of a loop at the base, as the product of its step labels.
    pub fn element_of(&self, path: &Path) -> Option<usize> {
        path.window()
            .windows(2)
            .try_fold(0, |acc, w| Some(self.group.mul(acc, self.step_label(w[0], w[1])?)))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Pi1Answer {
    Group(Pi1Search),
    Undecided { reason: String },
}

/// `pi_1` from the edge-path presentation: one generator per pair of points in a
/// common local orbit, a spanning tree from the base killed, one relator per
/// triple in a common local orbit. The resulting group is enumerated by
/// Todd-Coxeter and its products are spot-checked by homotopy search.
pub fn pi1_by_search(pointed: &PointedAction, caps: Pi1Caps) -> Result<Pi1Answer, PathError> {
    let action = &pointed.action;
    let base = pointed.base;
    let n = action.len();
    let mut edge_id: FxHashMap<(u32, u32), usize> = FxHashMap::default();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut triangles: FxHashSet<(u32, u32, u32)> = FxHashSet::default();
    for a in 0..action.index_count() {
        for orbit in action.orbits(a) {
            for (i, &x) in orbit.iter().enumerate() {
                for (j, &y) in orbit.iter().enumerate().skip(i + 1) {
                    edge_id.entry((x, y)).or_insert_with(|| {
                        edges.push((x, y));
                        edges.len() - 1
                    });
                    for &z in &orbit[j + 1..] {
                        triangles.insert((x, y, z));
                    }
                }
            }
        }
    }
    let letter = |x: u32, y: u32| -> i32 {
        if x < y {
            edge_id[&(x, y)] as i32 + 1
        } else {
            -(edge_id[&(y, x)] as i32 + 1)
        }
    };
    let mut parent = vec![NONE; n];
    parent[base as usize] = base;
    let mut queue = VecDeque::from([base]);
    let table = MoveTable::new(action);
    while let Some(x) = queue.pop_front() {
        for &y in &table.adjacent[x as usize] {
            if parent[y as usize] == NONE {
                parent[y as usize] = x;
                queue.push_back(y);
            }
        }
    }
    if parent.contains(&NONE) {
        return Err(PathError::BaseDisconnected);
    }
    let mut relators: Vec<Word> = Vec::new();
    for x in 0..n as u32 {
        if x != base {
            relators.push(vec![letter(parent[x as usize], x)]);
        }
    }
    let mut tri: Vec<(u32, u32, u32)> = triangles.into_iter().collect();
    tri.sort_unstable();
    for &(x, y, z) in &tri {
        relators.push(vec![letter(x, y), letter(y, z), letter(z, x)]);
    }
    let full = Presentation::new(edges.len(), relators).expect("letters in range");
    let (small, images) = full.eliminate_short();
    let enumeration = match small.enumerate(caps.max_cosets) {
        Ok(e) => e,
        Err(PresentationError::CosetCap(c)) => {
            return Ok(Pi1Answer::Undecided {
                reason: format!("coset enumeration exceeded {c} cosets"),
            })
        }
        Err(e) => {
            return Ok(Pi1Answer::Undecided {
                reason: e.to_string(),
            })
        }
    };

    // a surviving generator is represented by an original edge mapping to it
    let mut gen_edge: Vec<Option<(usize, i32)>> = vec![None; small.generators];
    for (e, img) in images.iter().enumerate() {
        if let [l] = img.as_slice() {
            let g = l.unsigned_abs() as usize - 1;
            if gen_edge[g].is_none() {
                gen_edge[g] = Some((e, l.signum()));
            }
        }
    }
    let tree_path = |mut x: u32| -> Vec<u32> {
        let mut out = vec![x];
        while x != base {
            x = parent[x as usize];
            out.push(x);
        }
        out.reverse();
        out
    };
    let edge_loop = |e: usize, s: i32| -> Vec<u32> {
        let (x, y) = if s > 0 { edges[e] } else { (edges[e].1, edges[e].0) };
        let mut w = tree_path(x);
        let mut back = tree_path(y);
        back.reverse();
        w.extend(back);
        w
    };
    let word_loop = |word: &[i32]| -> Path {
        let mut w = vec![base];
        for &l in word {
            let g = l.unsigned_abs() as usize - 1;
            let (e, s) = gen_edge[g].expect("every surviving generator has an edge");
            let piece = edge_loop(e, s * l.signum());
            w.extend_from_slice(&piece[1..]);
        }
        Path::new(0, w).expect("nonempty")
    };
    let loops: Vec<Path> = enumeration.reps.iter().map(|r| word_loop(r)).collect();
    let group = enumeration.group;
    let eval = |word: &[i32]| -> usize {
        word.iter().fold(0, |acc, &l| {
            let g = enumeration.generator_images[l.unsigned_abs() as usize - 1];
            group.mul(acc, if l > 0 { g } else { group.inverse(g) })
        })
    };
    let mut edge_labels: Vec<(u32, u32, usize)> = edges
        .iter()
        .zip(&images)
        .map(|(&(x, y), img)| (x, y, eval(img)))
        .collect();
    edge_labels.sort_unstable();
    let mut confirmed = 0;
    let mut unconfirmed = 0;
    let mut budget = caps.cross_checks;
    'outer: for x in 0..group.order() {
        for g in 0..small.generators {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            let lhs = loops[x].compose(&word_loop(&[g as i32 + 1]))?;
            let target = group.mul(x, enumeration.generator_images[g]);
            match stably_homotopic(action, &lhs, &loops[target], caps.search)? {
                HomotopyAnswer::Yes { trace } => {
                    trace.verify(action)?;
                    confirmed += 1;
                }
                _ => unconfirmed += 1,
            }
        }
    }
    Ok(Pi1Answer::Group(Pi1Search {
        group,
        edges: edges.len(),
        triangles: tri.len(),
        generators_after_elimination: small.generators,
        relators_after_elimination: small.relators.len(),
        loops,
        confirmed,
        unconfirmed,
        edge_labels,
    }))
}
