//! Finite groups given by Cayley tables. Element 0 is always the identity.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::matgroup::SubgroupClosure;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not square or has out-of-range entries")]
    Shape,
    #[error("element 0 is not a two-sided identity")]
    Identity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("subgroup is not normal: conjugate of a generator by {0:?} leaves it")]
    NotNormal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup { order: 1, mul: vec![0] }
    }

    /// Checks the table with Light's associativity test over a generating set.
    pub fn from_table(order: usize, mul: Vec<u32>) -> Result<Self, GroupError> {
        if order == 0 || mul.len() != order * order || mul.iter().any(|&v| v as usize >= order) {
            return Err(GroupError::Shape);
        }
        let g = FiniteGroup { order, mul };
        for a in 0..order {
            if g.mul(0, a) != a || g.mul(a, 0) != a {
                return Err(GroupError::Identity);
            }
        }
        for a in 0..order {
            if !(0..order).any(|b| g.mul(a, b) == 0) {
                return Err(GroupError::NoInverse(a));
            }
        }
        for s in g.generators() {
            for x in 0..order {
                let xs = g.mul(x, s);
                for y in 0..order {
                    if g.mul(xs, y) != g.mul(x, g.mul(s, y)) {
                        return Err(GroupError::NotAssociative(x, s, y));
                    }
                }
            }
        }
        Ok(g)
    }

    /// `G / N` on cosets of a normal subgroup, labelled in `G`'s element order.
    pub fn quotient(g: &SubgroupClosure, n: &SubgroupClosure) -> Result<Self, GroupError> {
        if !n.is_normalized_by(g) {
            return Err(GroupError::NotNormal(format!("{:?}", g.generators())));
        }
        let (labels, reps) = n.right_coset_labels(g);
        let k = reps.len();
        let ring = g.ring();
        let mut mul = vec![0u32; k * k];
        for (a, &ra) in reps.iter().enumerate() {
            for (b, &rb) in reps.iter().enumerate() {
                let p = g.element(ra).mul_unchecked(g.element(rb), ring);
                let idx = g.index_of(&p).expect("closed");
                mul[a * k + b] = labels[idx];
            }
        }
        FiniteGroup::from_table(k, mul)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    pub fn table(&self) -> Vec<Vec<u32>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&b| self.mul(a, b) == 0)
            .expect("validated table")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn span(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// A greedy generating set, in element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut seen = self.span(&gens);
        for a in 0..self.order {
            if !seen[a] {
                gens.push(a);
                seen = self.span(&gens);
            }
        }
        gens
    }

    /// An isomorphism `self -> other` as an element map, if one exists.
    pub fn isomorphism_to(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        if self.order != other.order {
            return None;
        }
        let gens = self.generators();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let o = self.element_order(g);
                (0..other.order).filter(|&h| other.element_order(h) == o).collect()
            })
            .collect();
        let mut choice = vec![0usize; gens.len()];
        self.search_iso(other, &gens, &candidates, &mut choice, 0)
    }

    fn search_iso(
        &self,
        other: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        choice: &mut Vec<usize>,
        depth: usize,
    ) -> Option<Vec<usize>> {
        if depth == gens.len() {
            return self.extend_map(other, gens, choice);
        }
        for &c in &candidates[depth] {
            choice[depth] = c;
            if let Some(m) = self.search_iso(other, gens, candidates, choice, depth + 1) {
                return Some(m);
            }
        }
        None
    }

    fn extend_map(&self, other: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let mut phi = vec![UNSET; self.order];
        phi[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(images) {
                let y = self.mul(x, s);
                let img = other.mul(phi[x], t);
                if phi[y] == UNSET {
                    phi[y] = img;
                    queue.push_back(y);
                } else if phi[y] != img {
                    return None;
                }
            }
        }
        let mut hit = vec![false; other.order];
        for &v in &phi {
            if hit[v] {
                return None;
            }
            hit[v] = true;
        }
        for a in 0..self.order {
            for b in 0..self.order {
                if phi[self.mul(a, b)] != other.mul(phi[a], phi[b]) {
                    return None;
                }
            }
        }
        Some(phi)
    }

    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        self.isomorphism_to(other).is_some()
    }

    /// `Z/k` with `a * b = a + b mod k`.
    pub fn cyclic(k: usize) -> Self {
        let mul = (0..k)
            .flat_map(|a| (0..k).map(move |b| ((a + b) % k) as u32))
            .collect();
        FiniteGroup::from_table(k, mul).expect("cyclic table")
    }
}
