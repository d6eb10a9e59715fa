//! Words in the Steinberg generators `X_ij(r)`, the map `theta` to `E_n(R)`,
//! and the normal form of local elements.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::matgroup::{self, Matrix, NilpotentSet};
use crate::ring::{Code, FiniteRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinbergError {
    #[error("letter X_{{{i}{j}}} is invalid for n = {n}")]
    BadLetter { i: usize, j: usize, n: usize },
    #[error("matrix is not in the local subgroup of {0}")]
    NotLocal(String),
}

/// `X_ij(r)^exp`, 0-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub i: usize,
    pub j: usize,
    pub r: Code,
    pub exp: i8,
}

impl Letter {
    pub fn new(i: usize, j: usize, r: Code) -> Self {
        Letter { i, j, r, exp: 1 }
    }

    pub fn inverse(self) -> Self {
        Letter {
            exp: -self.exp,
            ..self
        }
    }

    /// The equivalent letter with exponent `+1`.
    fn positive(self, ring: &FiniteRing) -> Letter {
        if self.exp < 0 {
            Letter::new(self.i, self.j, ring.neg(self.r))
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SteinbergWord {
    n: usize,
    letters: Vec<Letter>,
}

impl fmt::Display for SteinbergWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "X{}{}({})", l.i + 1, l.j + 1, l.r)?;
            if l.exp < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl SteinbergWord {
    pub fn empty(n: usize) -> Self {
        SteinbergWord {
            n,
            letters: Vec::new(),
        }
    }

    /// Builds a word and merges adjacent letters at the same position.
    pub fn new(n: usize, letters: Vec<Letter>, ring: &FiniteRing) -> Result<Self, SteinbergError> {
        for l in &letters {
            if l.i == l.j || l.i >= n || l.j >= n {
                return Err(SteinbergError::BadLetter { i: l.i, j: l.j, n });
            }
        }
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for l in letters {
            match out.last_mut() {
                Some(last) if (last.i, last.j) == (l.i, l.j) => {
                    let merged = ring.add(last.positive(ring).r, l.positive(ring).r);
                    *last = Letter::new(l.i, l.j, merged);
                }
                _ => out.push(l),
            }
            if out.last().is_some_and(|t| t.r == 0) {
                out.pop();
            }
        }
        Ok(SteinbergWord { n, letters: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &SteinbergWord, ring: &FiniteRing) -> SteinbergWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        SteinbergWord::new(self.n, letters, ring).expect("letters already valid")
    }

    pub fn inverse(&self, ring: &FiniteRing) -> SteinbergWord {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        SteinbergWord::new(self.n, letters, ring).expect("letters already valid")
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &SteinbergWord, b: &SteinbergWord, ring: &FiniteRing) -> SteinbergWord {
        a.concat(b, ring)
            .concat(&a.inverse(ring), ring)
            .concat(&b.inverse(ring), ring)
    }

    pub fn letter(n: usize, i: usize, j: usize, r: Code, ring: &FiniteRing) -> Result<Self, SteinbergError> {
        SteinbergWord::new(n, vec![Letter::new(i, j, r)], ring)
    }
}

pub fn theta(word: &SteinbergWord, ring: &FiniteRing) -> Matrix {
    let n = word.n;
    word.letters.iter().fold(Matrix::identity(n), |acc, l| {
        let r = l.positive(ring).r;
        let e = matgroup::elementary(n, l.i, l.j, r).expect("validated letter");
        acc.mul_unchecked(&e, ring)
    })
}

/// Smallest nilpotent set containing every letter position, if one exists.
pub fn is_local(word: &SteinbergWord) -> Option<NilpotentSet> {
    let pairs: Vec<(usize, usize)> = word.letters.iter().map(|l| (l.i, l.j)).collect();
    NilpotentSet::nilpotent_closure(word.n, &pairs)
}

/// Factorization `m = R_last ... R_first` over a linear extension of `alpha`,
/// where `R_i` carries row `i` of `m`.
pub fn local_matrix_to_word(
    alpha: &NilpotentSet,
    m: &Matrix,
    ring: &FiniteRing,
) -> Result<SteinbergWord, SteinbergError> {
    if m.n() != alpha.n() || !matgroup::supported_on(m, alpha) {
        return Err(SteinbergError::NotLocal(alpha.to_string()));
    }
    let order = alpha.linear_extension();
    let mut letters = Vec::new();
    for &i in order.iter().rev() {
        for j in 0..m.n() {
            if j != i && m.get(i, j) != 0 {
                letters.push(Letter::new(i, j, m.get(i, j)));
            }
        }
    }
    SteinbergWord::new(m.n(), letters, ring)
}

/// Normal form independent of the ambient local set: factor over the
/// nilpotent closure of the support of `m`.
pub fn local_normal_form(m: &Matrix, ring: &FiniteRing) -> Option<SteinbergWord> {
    let n = m.n();
    let support: Vec<(usize, usize)> = matgroup::off_diagonal(n).filter(|&(i, j)| m.get(i, j) != 0).collect();
    let alpha = NilpotentSet::nilpotent_closure(n, &support)?;
    local_matrix_to_word(&alpha, m, ring).ok()
}

pub fn k2_witness(word: &SteinbergWord, ring: &FiniteRing) -> bool {
    theta(word, ring).is_identity()
}

/// Defining relators of `St_n(R)` over all index choices and ring elements:
/// `[X_ij(r), X_jl(s)] X_il(rs)^-1` and `[X_ij(r), X_kl(s)]` for `j != k`, `i != l`.
pub fn relator_words(n: usize, ring: &FiniteRing) -> Vec<SteinbergWord> {
    let mut out = Vec::new();
    let pos: Vec<(usize, usize)> = matgroup::off_diagonal(n).collect();
    for &(i, j) in &pos {
        for &(k, l) in &pos {
            for r in ring.elements().skip(1) {
                for s in ring.elements().skip(1) {
                    let a = SteinbergWord::letter(n, i, j, r, ring).expect("valid");
                    let b = SteinbergWord::letter(n, k, l, s, ring).expect("valid");
                    let c = SteinbergWord::commutator(&a, &b, ring);
                    if j == k && i != l {
                        let t = SteinbergWord::letter(n, i, l, ring.mul(r, s), ring)
                            .expect("valid")
                            .inverse(ring);
                        out.push(c.concat(&t, ring));
                    } else if j != k && i != l {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}
