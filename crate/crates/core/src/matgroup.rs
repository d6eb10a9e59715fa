//! Square matrices over a [`FiniteRing`], elementary generators, nilpotent
//! index sets and explicit finite subgroups.
//!
//! Indices are 0-based in the API (`elementary(n, 0, 1, r)` is `E_12(r)`);
//! serialized forms use the 1-based convention.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::ring::{Code, FiniteRing};

pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("elementary matrix needs i != j (got i = j = {0})")]
    DiagonalPosition(usize),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("closure exceeded the cap of {cap} elements ({reached} reached)")]
    ClosureCap { cap: usize, reached: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
}

/// An `n x n` matrix of ring codes, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Matrix {
    n: usize,
    entries: SmallVec<[Code; 16]>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Code]> = self.entries.chunks(self.n).collect();
        write!(f, "{rows:?}")
    }
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut entries: SmallVec<[Code; 16]> = SmallVec::from_elem(0, n * n);
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Matrix { n, entries }
    }

    pub fn from_rows(rows: &[Vec<Code>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut entries = SmallVec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::DimensionMismatch(row.len(), n));
            }
            entries.extend_from_slice(row);
        }
        Ok(Matrix { n, entries })
    }

    pub fn diagonal(diag: &[Code]) -> Self {
        let n = diag.len();
        let mut m = Matrix::identity(n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Code {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Code) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Code] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Code>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u16::from(i == j)))
    }

    /// Product without dimension checks.
    pub fn mul_unchecked(&self, other: &Matrix, ring: &FiniteRing) -> Matrix {
        let n = self.n;
        let mut entries: SmallVec<[Code; 16]> = SmallVec::from_elem(0, n * n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.entries[k * n + j];
                    if b != 0 {
                        let idx = i * n + j;
                        entries[idx] = ring.add(entries[idx], ring.mul(a, b));
                    }
                }
            }
        }
        Matrix { n, entries }
    }

    pub fn mul(&self, other: &Matrix, ring: &FiniteRing) -> Result<Matrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        Ok(self.mul_unchecked(other, ring))
    }

    /// Row vector times matrix.
    pub fn act_on_row(&self, row: &[Code], ring: &FiniteRing) -> Vec<Code> {
        let n = self.n;
        let mut out = vec![0; n];
        for (k, &a) in row.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.entries[k * n + j];
                if b != 0 {
                    *o = ring.add(*o, ring.mul(a, b));
                }
            }
        }
        out
    }

    /// Determinant by Laplace expansion over column subsets (no division).
    pub fn det(&self, ring: &FiniteRing) -> Code {
        let n = self.n;
        if n == 0 {
            return ring.one();
        }
        if n <= 3 {
            return self.det_cofactor(ring);
        }
        let mut dp = vec![0 as Code; 1 << n];
        dp[0] = ring.one();
        for mask in 0usize..(1 << n) {
            let val = dp[mask];
            if val == 0 {
                continue;
            }
            let row = mask.count_ones() as usize;
            if row == n {
                continue;
            }
            for c in 0..n {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let a = self.get(row, c);
                if a == 0 {
                    continue;
                }
                let higher = (mask >> (c + 1)).count_ones();
                let mut term = ring.mul(val, a);
                if higher % 2 == 1 {
                    term = ring.neg(term);
                }
                let next = mask | (1 << c);
                dp[next] = ring.add(dp[next], term);
            }
        }
        dp[(1 << n) - 1]
    }

    fn det_cofactor(&self, ring: &FiniteRing) -> Code {
        match self.n {
            1 => self.get(0, 0),
            2 => ring.sub(
                ring.mul(self.get(0, 0), self.get(1, 1)),
                ring.mul(self.get(0, 1), self.get(1, 0)),
            ),
            _ => {
                let mut acc = ring.zero();
                for c in 0..self.n {
                    let a = self.get(0, c);
                    if a == 0 {
                        continue;
                    }
                    let t = ring.mul(a, self.minor(0, c).det_cofactor(ring));
                    acc = if c % 2 == 0 { ring.add(acc, t) } else { ring.sub(acc, t) };
                }
                acc
            }
        }
    }

    /// Deletes row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> Matrix {
        let n = self.n;
        let mut entries = SmallVec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != r) {
            for j in (0..n).filter(|&j| j != c) {
                entries.push(self.get(i, j));
            }
        }
        Matrix { n: n - 1, entries }
    }

    /// Inverse through the adjugate; `None` when the determinant is not a unit.
    pub fn inverse(&self, ring: &FiniteRing) -> Option<Matrix> {
        let n = self.n;
        let dinv = ring.try_invert(self.det(ring))?;
        if n == 1 {
            return Some(Matrix::from_rows(&[vec![dinv]]).expect("1x1"));
        }
        let mut out = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let mut cof = self.minor(i, j).det(ring);
                if (i + j) % 2 == 1 {
                    cof = ring.neg(cof);
                }
                out.set(j, i, ring.mul(cof, dinv));
            }
        }
        Some(out)
    }

    /// Embeds `tau` as the lower-right block of `diag(1, tau)`.
    pub fn block_diag_one(tau: &Matrix) -> Matrix {
        let n = tau.n + 1;
        let mut m = Matrix::identity(n);
        for i in 0..tau.n {
            for j in 0..tau.n {
                m.set(i + 1, j + 1, tau.get(i, j));
            }
        }
        m
    }

    /// Lower-right `(n-1) x (n-1)` block (the "right diagonal" of a matrix fixing `e`).
    pub fn lower_right_block(&self) -> Matrix {
        self.minor(0, 0)
    }

    /// Row-major integer codes, as used in reports.
    pub fn to_rows_u32(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|&c| c as u32).collect())
            .collect()
    }
}

/// `E_ij(r) = I + r e_ij` (0-based `i`, `j`).
pub fn elementary(n: usize, i: usize, j: usize, r: Code) -> Result<Matrix, MatrixError> {
    if i == j {
        return Err(MatrixError::DiagonalPosition(i));
    }
    for index in [i, j] {
        if index >= n {
            return Err(MatrixError::IndexOutOfRange { index, n });
        }
    }
    let mut m = Matrix::identity(n);
    m.set(i, j, r);
    Ok(m)
}

/// All off-diagonal positions of an `n x n` matrix, row-major.
pub fn off_diagonal(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// The elementary generators `E_ij(r)`, `r != 0`.
pub fn elementary_generators(n: usize, ring: &FiniteRing) -> Vec<Matrix> {
    off_diagonal(n)
        .flat_map(|(i, j)| {
            ring.elements()
                .skip(1)
                .map(move |r| elementary(n, i, j, r).expect("off-diagonal"))
        })
        .collect()
}

/// A subset of off-diagonal positions, stored as a bitmask (so `n <= 8`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilpotentSet {
    n: u8,
    mask: u64,
}

impl fmt::Debug for NilpotentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NilpotentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs()
            .map(|(i, j)| format!("({},{})", i + 1, j + 1))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub const MAX_INDEX_DIM: usize = 8;

impl NilpotentSet {
    #[inline]
    fn bit(n: usize, i: usize, j: usize) -> u64 {
        1u64 << (i * n + j)
    }

    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_INDEX_DIM, "index sets support n <= {MAX_INDEX_DIM}");
        NilpotentSet { n: n as u8, mask: 0 }
    }

    /// Builds the set of positions without checking nilpotency.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut s = Self::empty(n);
        for &(i, j) in pairs {
            assert!(i < n && j < n && i != j, "({i},{j}) is not in J_{n}");
            s.mask |= Self::bit(n, i, j);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask & Self::bit(self.n(), i, j) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        off_diagonal(self.n()).filter(|&(i, j)| self.contains(i, j))
    }

    pub fn is_subset(&self, other: &NilpotentSet) -> bool {
        self.n == other.n && self.mask & !other.mask == 0
    }

    pub fn intersect(&self, other: &NilpotentSet) -> NilpotentSet {
        assert_eq!(self.n, other.n);
        NilpotentSet {
            n: self.n,
            mask: self.mask & other.mask,
        }
    }

    /// Antisymmetric and transitively closed.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.n();
        for (i, j) in self.pairs() {
            if self.contains(j, i) {
                return false;
            }
            for k in 0..n {
                if k != j && self.contains(j, k) && (k == i || !self.contains(i, k)) {
                    return false;
                }
            }
        }
        true
    }

    /// Transitive closure; `None` when it would contain a diagonal position or a symmetric pair.
    pub fn nilpotent_closure(n: usize, pairs: &[(usize, usize)]) -> Option<NilpotentSet> {
        let mut reach = vec![vec![false; n]; n];
        for &(i, j) in pairs {
            reach[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| reach[i][i]) {
            return None;
        }
        let closed: Vec<(usize, usize)> = off_diagonal(n).filter(|&(i, j)| reach[i][j]).collect();
        let s = NilpotentSet::from_pairs(n, &closed);
        s.is_nilpotent().then_some(s)
    }

    /// `delta = {(i, j) : i < j}`.
    pub fn max_delta(n: usize) -> NilpotentSet {
        let pairs: Vec<(usize, usize)> = off_diagonal(n).filter(|&(i, j)| i < j).collect();
        NilpotentSet::from_pairs(n, &pairs)
    }

    /// Image under `(i, j) -> (pi(i), pi(j))`.
    pub fn permuted(&self, pi: &[usize]) -> NilpotentSet {
        let pairs: Vec<(usize, usize)> = self.pairs().map(|(i, j)| (pi[i], pi[j])).collect();
        NilpotentSet::from_pairs(self.n(), &pairs)
    }

    /// A linear order of `0..n` in which every pair `(i, j)` of the set has `i` before `j`.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.n();
        let mut indeg = vec![0usize; n];
        for (_, j) in self.pairs() {
            indeg[j] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut done = vec![false; n];
        while order.len() < n {
            let next = (0..n)
                .find(|&v| !done[v] && indeg[v] == 0)
                .expect("nilpotent sets are acyclic");
            done[next] = true;
            order.push(next);
            for (i, j) in self.pairs() {
                if i == next {
                    indeg[j] -= 1;
                }
            }
        }
        order
    }
}

/// Every nilpotent subset of `J_n`, ordered by bitmask. Only small `n` is practical.
pub fn all_nilpotent_sets(n: usize) -> Vec<NilpotentSet> {
    assert!(n <= 5, "enumerating all nilpotent sets is only supported for n <= 5");
    let positions: Vec<(usize, usize)> = off_diagonal(n).collect();
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << positions.len()) {
        let pairs: Vec<(usize, usize)> = positions
            .iter()
            .enumerate()
            .filter(|(k, _)| bits & (1 << k) != 0)
            .map(|(_, &p)| p)
            .collect();
        let s = NilpotentSet::from_pairs(n, &pairs);
        if s.is_nilpotent() {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// The `n!` maximal nilpotent sets, as permutation images of `delta`.
pub fn maximal_nilpotent_sets(n: usize) -> Vec<NilpotentSet> {
    let delta = NilpotentSet::max_delta(n);
    let mut out: Vec<NilpotentSet> = permutations(n).iter().map(|p| delta.permuted(p)).collect();
    out.sort();
    out.dedup();
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `M_{pi^-1} m M_pi`: entry `(i, j)` moves to `(pi(i), pi(j))`.
pub fn sn_conjugate(pi: &[usize], m: &Matrix) -> Matrix {
    let n = m.n();
    let mut out = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            out.set(pi[i], pi[j], m.get(i, j));
        }
    }
    out
}

pub fn sn_on_index(pi: &[usize], alpha: &NilpotentSet) -> NilpotentSet {
    alpha.permuted(pi)
}

type ElementSet = IndexSet<Matrix, FxBuildHasher>;

/// A finite matrix group held as an explicit element set.
#[derive(Clone)]
pub struct SubgroupClosure {
    ring: Arc<FiniteRing>,
    n: usize,
    generators: Vec<Matrix>,
    elements: ElementSet,
}

impl fmt::Debug for SubgroupClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupClosure")
            .field("ring", &self.ring.spec())
            .field("n", &self.n)
            .field("order", &self.len())
            .field("generators", &self.generators.len())
            .finish()
    }
}

impl SubgroupClosure {
    /// Subgroup generated by `generators`, by breadth-first right multiplication.
    pub fn generate(
        ring: Arc<FiniteRing>,
        n: usize,
        generators: Vec<Matrix>,
        cap: usize,
    ) -> Result<Self, MatrixError> {
        for g in &generators {
            if g.n() != n {
                return Err(MatrixError::DimensionMismatch(g.n(), n));
            }
        }
        let mut elements = ElementSet::default();
        elements.insert(Matrix::identity(n));
        let mut head = 0;
        while head < elements.len() {
            let x = elements.get_index(head).expect("in range").clone();
            head += 1;
            for g in &generators {
                let y = x.mul_unchecked(g, &ring);
                if !elements.contains(&y) {
                    if elements.len() >= cap {
                        return Err(MatrixError::ClosureCap {
                            cap,
                            reached: elements.len(),
                        });
                    }
                    elements.insert(y);
                }
            }
        }
        Ok(SubgroupClosure {
            ring,
            n,
            generators,
            elements,
        })
    }

    pub fn trivial(ring: Arc<FiniteRing>, n: usize) -> Self {
        Self::generate(ring, n, Vec::new(), 1).expect("trivial group fits")
    }

    /// Wraps a set the caller knows to be a subgroup; a small generating set is
    /// extracted greedily.
    pub fn from_subgroup_elements(
        ring: Arc<FiniteRing>,
        n: usize,
        members: Vec<Matrix>,
    ) -> Self {
        let mut generators: Vec<Matrix> = Vec::new();
        let mut current = Self::trivial(ring.clone(), n);
        for m in &members {
            if !current.contains(m) {
                generators.push(m.clone());
                current = Self::generate(ring.clone(), n, generators.clone(), usize::MAX)
                    .expect("uncapped");
            }
        }
        let mut elements = ElementSet::default();
        elements.extend(members);
        debug_assert_eq!(elements.len(), current.len());
        SubgroupClosure {
            ring,
            n,
            generators,
            elements,
        }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.contains(m)
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        self.elements.get_index_of(m)
    }

    pub fn element(&self, i: usize) -> &Matrix {
        self.elements.get_index(i).expect("element index in range")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matrix> {
        self.elements.iter()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupClosure) -> bool {
        self.iter().all(|m| other.contains(m))
    }

    /// Elements of `self` satisfying `keep`, as a subgroup (the predicate must cut out one).
    pub fn filter_subgroup(&self, keep: impl Fn(&Matrix) -> bool) -> SubgroupClosure {
        let members: Vec<Matrix> = self.iter().filter(|m| keep(m)).cloned().collect();
        Self::from_subgroup_elements(self.ring.clone(), self.n, members)
    }

    pub fn intersection(&self, other: &SubgroupClosure) -> SubgroupClosure {
        self.filter_subgroup(|m| other.contains(m))
    }

    /// Checks closure under products of generators and the presence of the identity.
    pub fn is_closed(&self) -> bool {
        self.contains(&Matrix::identity(self.n))
            && self.iter().all(|x| {
                self.generators
                    .iter()
                    .all(|g| self.contains(&x.mul_unchecked(g, &self.ring)))
            })
    }

    /// `g^-1 h g` stays inside `self` for every `h` in `self` and generator `g` of `by`.
    pub fn is_normalized_by(&self, by: &SubgroupClosure) -> bool {
        let ring = &self.ring;
        by.generators.iter().all(|g| {
            let gi = g.inverse(ring).expect("group elements are invertible");
            self.generators
                .iter()
                .all(|h| self.contains(&gi.mul_unchecked(h, ring).mul_unchecked(g, ring)))
        })
    }

    /// Orders of the right cosets `H g`; `labels[k]` is the coset id of element `k` of `ambient`.
    pub fn right_coset_labels(&self, ambient: &SubgroupClosure) -> (Vec<u32>, Vec<usize>) {
        let mut labels = vec![u32::MAX; ambient.len()];
        let mut reps = Vec::new();
        for (k, g) in ambient.iter().enumerate() {
            if labels[k] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(k);
            for h in self.iter() {
                let hg = h.mul_unchecked(g, &self.ring);
                let idx = ambient
                    .index_of(&hg)
                    .expect("subgroup cosets lie in the ambient group");
                labels[idx] = id;
            }
        }
        (labels, reps)
    }
}

/// Closure of `{E_ij(r) : (i,j) in alpha, r in R}`.
pub fn local_subgroup(alpha: &NilpotentSet, ring: &Arc<FiniteRing>) -> SubgroupClosure {
    let n = alpha.n();
    let gens: Vec<Matrix> = alpha
        .pairs()
        .flat_map(|(i, j)| {
            ring.elements()
                .skip(1)
                .map(move |r| elementary(n, i, j, r).expect("off-diagonal"))
        })
        .collect();
    SubgroupClosure::generate(ring.clone(), n, gens, usize::MAX).expect("local groups are small")
}

/// `E_n(R)`, generated by all elementary matrices.
pub fn elementary_group(
    n: usize,
    ring: &Arc<FiniteRing>,
    cap: usize,
) -> Result<SubgroupClosure, MatrixError> {
    SubgroupClosure::generate(ring.clone(), n, elementary_generators(n, ring), cap)
}

/// Diagonal ones, zeros off `alpha`: membership test for the local group without closure.
pub fn supported_on(m: &Matrix, alpha: &NilpotentSet) -> bool {
    let n = m.n();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let v = m.get(i, j);
            if i == j {
                v == 1
            } else {
                v == 0 || alpha.contains(i, j)
            }
        })
    })
}

/// `{g in G : e g = e}` with `e = (1, 0, ..., 0)`, i.e. first row equal to `e`.
pub fn stabilizer_of_e(group: &SubgroupClosure) -> SubgroupClosure {
    group.filter_subgroup(fixes_e)
}

pub fn fixes_e(m: &Matrix) -> bool {
    m.get(0, 0) == 1 && (1..m.n()).all(|j| m.get(0, j) == 0)
}

/// `g^-1 x g` for `g` in `group`'s generators, breadth first, starting from `seeds`.
pub fn conjugation_closure(
    seeds: impl IntoIterator<Item = Matrix>,
    group: &SubgroupClosure,
) -> IndexSet<Matrix, FxBuildHasher> {
    let ring = group.ring();
    let conj: Vec<(Matrix, Matrix)> = group
        .generators()
        .iter()
        .map(|g| (g.inverse(ring).expect("invertible"), g.clone()))
        .collect();
    let mut seen: IndexSet<Matrix, FxBuildHasher> = IndexSet::default();
    let mut queue = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for (gi, g) in &conj {
            let y = gi.mul_unchecked(&x, ring).mul_unchecked(g, ring);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}
