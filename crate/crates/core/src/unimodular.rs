//! Unimodular rows `Um_n(R)` as a pointed global action with the local groups
//! `(E_n(R))_alpha` acting by right multiplication.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, GlobalAction, LocalFamily, PointedAction};
use crate::matgroup::{self, Matrix};
use crate::path::{Path, Pi0};
use crate::ring::{Code, FiniteRing};

pub const DEFAULT_ROW_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UmError {
    #[error("n must be at least 3 (got {0})")]
    SmallDimension(usize),
    #[error("n = {0} is too large for enumerating nilpotent sets")]
    LargeDimension(usize),
    #[error("|R|^n = {count} exceeds the row cap {cap}")]
    TooLarge { count: u128, cap: usize },
    #[error("row has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error(transparent)]
    Action(#[from] ActionError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodularRow {
    pub entries: Vec<Code>,
    /// `sum entries[i] * witness[i] = 1`.
    pub witness: Vec<Code>,
}

fn dot(a: &[Code], b: &[Code], ring: &FiniteRing) -> Code {
    a.iter()
        .zip(b)
        .fold(ring.zero(), |acc, (&x, &y)| ring.add(acc, ring.mul(x, y)))
}

/// All vectors of `R^n` in lexicographic order of codes.
fn all_vectors(n: usize, q: usize) -> impl Iterator<Item = Vec<Code>> {
    let total = (q as u64).pow(n as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = (k % q as u64) as Code;
            k /= q as u64;
        }
        v
    })
}

/// Exhaustive witness search.
pub fn find_witness(v: &[Code], ring: &FiniteRing) -> Option<Vec<Code>> {
    all_vectors(v.len(), ring.size()).find(|w| dot(v, w, ring) == ring.one())
}

pub fn enumerate_um(n: usize, ring: &FiniteRing, cap: usize) -> Result<Vec<UnimodularRow>, UmError> {
    let count = (ring.size() as u128).pow(n as u32);
    if count > cap as u128 {
        return Err(UmError::TooLarge { count, cap });
    }
    Ok(all_vectors(n, ring.size())
        .filter_map(|v| {
            find_witness(&v, ring).map(|w| UnimodularRow {
                entries: v,
                witness: w,
            })
        })
        .collect())
}

pub fn format_row(v: &[Code], ring: &FiniteRing) -> String {
    let parts: Vec<String> = v.iter().map(|&c| ring.format(c)).collect();
    format!("({})", parts.join(","))
}

/// `v * E_ij(r)`: adds `r * v_i` to coordinate `j`.
pub fn apply_elementary(v: &[Code], i: usize, j: usize, r: Code, ring: &FiniteRing) -> Vec<Code> {
    let mut out = v.to_vec();
    out[j] = ring.add(out[j], ring.mul(r, v[i]));
    out
}

/// A path of single elementary steps together with the matrix it spells.
#[derive(Clone, Debug, Serialize)]
pub struct ElementaryPath {
    pub path: Path,
    /// 0-based `(i, j, r)` for each step `E_ij(r)`.
    pub steps: Vec<(usize, usize, Code)>,
    pub matrix: Matrix,
}

#[derive(Clone, Debug)]
pub struct UmAction {
    pub ring: Arc<FiniteRing>,
    pub n: usize,
    pub rows: Vec<UnimodularRow>,
    pub pointed: PointedAction,
    pub family: LocalFamily,
    index: FxHashMap<Vec<Code>, u32>,
}

pub fn build_um_action(n: usize, ring: &Arc<FiniteRing>) -> Result<UmAction, UmError> {
    if n < 3 {
        return Err(UmError::SmallDimension(n));
    }
    if n > 5 {
        return Err(UmError::LargeDimension(n));
    }
    let rows = enumerate_um(n, ring, DEFAULT_ROW_CAP)?;
    let index: FxHashMap<Vec<Code>, u32> = rows
        .iter()
        .enumerate()
        .map(|(k, r)| (r.entries.clone(), k as u32))
        .collect();
    let family = LocalFamily::nilpotent(n, ring);
    let labels = rows.iter().map(|r| format_row(&r.entries, ring)).collect();
    let action = GlobalAction::from_matrix_family(labels, &family, |x, m| {
        let image = m.act_on_row(&rows[x as usize].entries, ring);
        index[&image]
    })?;
    let mut e = vec![0; n];
    e[0] = ring.one();
    let base = index[&e];
    Ok(UmAction {
        ring: ring.clone(),
        n,
        rows,
        pointed: PointedAction::new(action, base)?,
        family,
        index,
    })
}

impl UmAction {
    pub fn action(&self) -> &GlobalAction {
        &self.pointed.action
    }

    pub fn base(&self) -> u32 {
        self.pointed.base
    }

    pub fn point_of(&self, v: &[Code]) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn row(&self, x: u32) -> &[Code] {
        &self.rows[x as usize].entries
    }

    /// Breadth-first search through single elementary generators.
    pub fn find_path(&self, from: u32, to: u32) -> Option<ElementaryPath> {
        let ring = &self.ring;
        let n = self.n;
        let mut prev: Vec<Option<(u32, (usize, usize, Code))>> = vec![None; self.rows.len()];
        let mut seen = vec![false; self.rows.len()];
        seen[from as usize] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for (i, j) in matgroup::off_diagonal(n) {
                for r in ring.elements().skip(1) {
                    let y = apply_elementary(self.row(x), i, j, r, ring);
                    let y = self.index[&y];
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        prev[y as usize] = Some((x, (i, j, r)));
                        queue.push_back(y);
                    }
                }
            }
        }
        if !seen[to as usize] {
            return None;
        }
        let mut points = vec![to];
        let mut steps = Vec::new();
        let mut cur = to;
        while let Some((p, step)) = prev[cur as usize] {
            points.push(p);
            steps.push(step);
            cur = p;
        }
        points.reverse();
        steps.reverse();
        let mut matrix = Matrix::identity(n);
        for &(i, j, r) in &steps {
            let e = matgroup::elementary(n, i, j, r).expect("off-diagonal");
            matrix = matrix.mul_unchecked(&e, ring);
        }
        Some(ElementaryPath {
            path: Path::new(0, points).expect("nonempty"),
            steps,
            matrix,
        })
    }

    /// Restriction to the path component of `e`, with its embedding.
    pub fn eum_component(&self) -> Result<(PointedAction, Vec<u32>), UmError> {
        let comp = self.action().components();
        let base_comp = comp[self.base() as usize];
        let keep: Vec<bool> = comp.iter().map(|&c| c == base_comp).collect();
        let (action, emb) = self.action().restrict(&keep)?;
        let base = emb.iter().position(|&x| x == self.base()).expect("base kept") as u32;
        Ok((PointedAction::new(action, base)?, emb))
    }

    pub fn pi0(&self) -> Pi0 {
        crate::path::pi0(self.action(), Some(self.base()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Arc<FiniteRing> {
        Arc::new(s.parse().unwrap())
    }

    #[test]
    fn counts_over_small_rings() {
        assert_eq!(enumerate_um(3, &ring("GF:2"), DEFAULT_ROW_CAP).unwrap().len(), 7);
        assert_eq!(enumerate_um(3, &ring("GF:3"), DEFAULT_ROW_CAP).unwrap().len(), 26);
        let z4 = enumerate_um(3, &ring("Zmod:4"), DEFAULT_ROW_CAP).unwrap();
        // unimodular over Z/4 iff some entry is odd
        assert_eq!(z4.len(), 64 - 8);
        assert!(z4.iter().all(|r| r.entries.iter().any(|c| c % 2 == 1)));
        for r in &z4 {
            assert_eq!(dot(&r.entries, &r.witness, &ring("Zmod:4")), 1);
        }
        assert_eq!(find_witness(&[1, 0, 0], &ring("Zmod:6")), Some(vec![1, 0, 0]));
        assert!(matches!(
            enumerate_um(3, &ring("GF:2"), 4),
            Err(UmError::TooLarge { count: 8, cap: 4 })
        ));
    }

    #[test]
    fn um3_f2_action() {
        let um = build_um_action(3, &ring("GF:2")).unwrap();
        assert!(um.action().validate().is_empty());
        assert!(um.action().is_single_domain());
        assert_eq!(um.action().index_count(), 19);
        let e = um.base();
        assert_eq!(um.row(e), &[1, 0, 0]);
        let e12 = matgroup::elementary(3, 0, 1, 1).unwrap();
        assert_eq!(e12.act_on_row(um.row(e), &um.ring), vec![1, 1, 0]);
        let pi0 = um.pi0();
        assert_eq!(pi0.classes.len(), 1);
        assert_eq!(pi0.classes[0].len(), 7);
        let (eum, _) = um.eum_component().unwrap();
        assert_eq!(eum.action.len(), 7);
    }

    #[test]
    fn paths_between_rows() {
        let um = build_um_action(3, &ring("GF:2")).unwrap();
        let e = um.base();
        let t = um.point_of(&[0, 1, 0]).unwrap();
        let p = um.find_path(e, t).unwrap();
        assert!(p.steps.len() <= 3);
        assert_eq!(p.path.in_point(), e);
        assert_eq!(p.path.ter_point(), t);
        p.path.check(um.action()).unwrap();
        assert_eq!(p.matrix.act_on_row(um.row(e), &um.ring), vec![0, 1, 0]);
        let c = um.find_path(e, e).unwrap();
        assert!(c.path.is_constant());
        assert!(matches!(build_um_action(2, &ring("GF:2")), Err(UmError::SmallDimension(2))));
    }
}
