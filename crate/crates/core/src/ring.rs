//! Finite commutative rings with canonical element codes.
//!
//! Every element is identified with a `u16` code. For `Zmod`/`GF` rings the
//! code is the least non-negative residue; for polynomial quotients it is the
//! base-`p` number whose digits are the reduced coefficients (constant term
//! first). Code `0` is always zero and code `1` is always one.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Element code. Matrices and rows store these directly.
pub type Code = u16;

/// Hard upper bound on the number of elements (codes must fit a `u16`).
pub const MAX_RING_SIZE: u64 = 1 << 16;

/// Rings above this size still work, but closures over them get slow.
pub const DEFAULT_SOFT_CAP: usize = 64;

const TABLE_LIMIT: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("malformed ring spec `{0}` (expected Zmod:<m>, GF:<p> or GFpoly:<p>:<c0,...,ck>)")]
    Malformed(String),
    #[error("modulus must be at least 2, got {0} (the zero ring is not supported)")]
    ZeroRing(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quotient polynomial must be monic of degree >= 1, got leading coefficient {0}")]
    NotMonic(u64),
    #[error("ring would have {0} elements, more than the supported {MAX_RING_SIZE}")]
    TooLarge(u64),
    #[error("operands belong to different rings")]
    MixedRings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingKind {
    IntegersMod { m: u32 },
    PrimeField { p: u32 },
    /// `F_p[x]/(f)`; `modulus` lists `c0, ..., ck` with `ck == 1`.
    PolyQuotient { p: u32, modulus: Vec<u32> },
}

/// A finite commutative ring with unity.
#[derive(Clone)]
pub struct FiniteRing {
    kind: RingKind,
    size: usize,
    /// characteristic (p or m) and polynomial degree (1 for integer rings)
    base: u32,
    degree: usize,
    fingerprint: u64,
    add_table: Option<Vec<Code>>,
    mul_table: Option<Vec<Code>>,
    neg: Vec<Code>,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({})", self.spec())
    }
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for FiniteRing {}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn parse_u64(s: &str, spec: &str) -> Result<u64, RingError> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| RingError::Malformed(spec.to_string()))
}

impl FromStr for FiniteRing {
    type Err = RingError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        FiniteRing::parse(spec)
    }
}

impl FiniteRing {
    /// Parses a ring spec: `Zmod:<m>`, `GF:<p>` or `GFpoly:<p>:<c0,...,ck>`.
    ///
    /// For `GFpoly` the list holds every coefficient of the quotient polynomial
    /// from the constant term up, including the leading one, so
    /// `GFpoly:2:1,1,1` is `F_2[x]/(x^2+x+1)`.
    pub fn parse(spec: &str) -> Result<Self, RingError> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let kind = match parts.as_slice() {
            ["Zmod", m] => {
                let m = parse_u64(m, spec)?;
                if m < 2 {
                    return Err(RingError::ZeroRing(m));
                }
                if m > MAX_RING_SIZE {
                    return Err(RingError::TooLarge(m));
                }
                RingKind::IntegersMod { m: m as u32 }
            }
            ["GF", p] => {
                let p = parse_u64(p, spec)?;
                if !is_prime(p) {
                    return Err(RingError::NotPrime(p));
                }
                if p > MAX_RING_SIZE {
                    return Err(RingError::TooLarge(p));
                }
                RingKind::PrimeField { p: p as u32 }
            }
            ["GFpoly", p, coeffs] => {
                let p = parse_u64(p, spec)?;
                if !is_prime(p) {
                    return Err(RingError::NotPrime(p));
                }
                let coeffs: Vec<u64> = coeffs
                    .split(',')
                    .map(|c| parse_u64(c, spec))
                    .collect::<Result<_, _>>()?;
                if coeffs.iter().any(|&c| c >= p) {
                    return Err(RingError::Malformed(spec.to_string()));
                }
                let lead = *coeffs.last().expect("split yields at least one item");
                if coeffs.len() < 2 || lead != 1 {
                    return Err(RingError::NotMonic(lead));
                }
                let degree = coeffs.len() as u32 - 1;
                let size = (p as u128).pow(degree);
                if size > MAX_RING_SIZE as u128 {
                    return Err(RingError::TooLarge(size.min(u64::MAX as u128) as u64));
                }
                RingKind::PolyQuotient {
                    p: p as u32,
                    modulus: coeffs.into_iter().map(|c| c as u32).collect(),
                }
            }
            _ => return Err(RingError::Malformed(spec.to_string())),
        };
        Ok(Self::from_kind(kind))
    }

    fn from_kind(kind: RingKind) -> Self {
        let (base, degree) = match &kind {
            RingKind::IntegersMod { m } => (*m, 1),
            RingKind::PrimeField { p } => (*p, 1),
            RingKind::PolyQuotient { p, modulus } => (*p, modulus.len() - 1),
        };
        let size = (base as usize).pow(degree as u32);
        let mut hasher = rustc_hash::FxHasher::default();
        kind.hash(&mut hasher);
        let mut ring = FiniteRing {
            kind,
            size,
            base,
            degree,
            fingerprint: hasher.finish(),
            add_table: None,
            mul_table: None,
            neg: Vec::new(),
        };
        ring.neg = (0..size).map(|a| ring.neg_slow(a as Code)).collect();
        if size <= TABLE_LIMIT {
            let mut add = Vec::with_capacity(size * size);
            let mut mul = Vec::with_capacity(size * size);
            for a in 0..size {
                for b in 0..size {
                    add.push(ring.add_slow(a as Code, b as Code));
                    mul.push(ring.mul_slow(a as Code, b as Code));
                }
            }
            ring.add_table = Some(add);
            ring.mul_table = Some(mul);
        }
        if size > DEFAULT_SOFT_CAP {
            log::warn!(
                "ring {} has {} elements; closure operations may be slow",
                ring.spec(),
                size
            );
        }
        ring
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    /// Canonical spec string; parsing it yields an equal ring.
    pub fn spec(&self) -> String {
        match &self.kind {
            RingKind::IntegersMod { m } => format!("Zmod:{m}"),
            RingKind::PrimeField { p } => format!("GF:{p}"),
            RingKind::PolyQuotient { p, modulus } => {
                let cs: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
                format!("GFpoly:{p}:{}", cs.join(","))
            }
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn characteristic(&self) -> u32 {
        self.base
    }

    pub fn zero(&self) -> Code {
        0
    }

    pub fn one(&self) -> Code {
        1
    }

    /// All elements in canonical order: `0`, `1`, then increasing codes.
    pub fn elements(&self) -> impl Iterator<Item = Code> + Clone {
        (0..self.size).map(|c| c as Code)
    }

    /// Coefficient vector (constant term first) of an element; length 1 for integer rings.
    pub fn coefficients(&self, a: Code) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.degree);
        let mut a = a as u32;
        for _ in 0..self.degree {
            v.push(a % self.base);
            a /= self.base;
        }
        v
    }

    fn from_coefficients(&self, cs: &[u32]) -> Code {
        cs.iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.base + c) as Code
    }

    #[inline]
    pub fn add(&self, a: Code, b: Code) -> Code {
        match &self.add_table {
            Some(t) => t[a as usize * self.size + b as usize],
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn mul(&self, a: Code, b: Code) -> Code {
        match &self.mul_table {
            Some(t) => t[a as usize * self.size + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Code) -> Code {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    fn add_slow(&self, a: Code, b: Code) -> Code {
        if self.degree == 1 {
            return ((a as u32 + b as u32) % self.base) as Code;
        }
        let (x, y) = (self.coefficients(a), self.coefficients(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.base).collect();
        self.from_coefficients(&s)
    }

    fn neg_slow(&self, a: Code) -> Code {
        if self.degree == 1 {
            return ((self.base - a as u32) % self.base) as Code;
        }
        let x = self.coefficients(a);
        let s: Vec<u32> = x.iter().map(|u| (self.base - u) % self.base).collect();
        self.from_coefficients(&s)
    }

    fn mul_slow(&self, a: Code, b: Code) -> Code {
        match &self.kind {
            RingKind::IntegersMod { m } | RingKind::PrimeField { p: m } => {
                ((a as u64 * b as u64) % *m as u64) as Code
            }
            RingKind::PolyQuotient { p, modulus } => {
                let p = *p as u64;
                let d = self.degree;
                let (x, y) = (self.coefficients(a), self.coefficients(b));
                let mut prod = vec![0u64; 2 * d - 1];
                for (i, u) in x.iter().enumerate() {
                    for (j, v) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + *u as u64 * *v as u64) % p;
                    }
                }
                // x^d = -(c0 + c1 x + ... + c_{d-1} x^{d-1})
                for k in (d..prod.len()).rev() {
                    let top = prod[k];
                    if top == 0 {
                        continue;
                    }
                    prod[k] = 0;
                    for (i, c) in modulus[..d].iter().enumerate() {
                        let t = k - d + i;
                        prod[t] = (prod[t] + (p - top) * *c as u64) % p;
                    }
                }
                let cs: Vec<u32> = prod[..d].iter().map(|&c| c as u32).collect();
                self.from_coefficients(&cs)
            }
        }
    }

    /// The inverse of `a` if it is a unit.
    pub fn try_invert(&self, a: Code) -> Option<Code> {
        match &self.kind {
            RingKind::IntegersMod { m } | RingKind::PrimeField { p: m } => {
                let (g, x) = ext_gcd(a as i64, *m as i64);
                (g == 1).then(|| x.rem_euclid(*m as i64) as Code)
            }
            RingKind::PolyQuotient { .. } => {
                self.elements().find(|&b| self.mul(a, b) == self.one())
            }
        }
    }

    pub fn is_unit(&self, a: Code) -> bool {
        self.try_invert(a).is_some()
    }

    pub fn units(&self) -> Vec<Code> {
        self.elements().filter(|&a| self.is_unit(a)).collect()
    }

    /// Wraps a code as a ring-tagged element.
    pub fn elem(&self, code: Code) -> RingElem {
        assert!((code as usize) < self.size, "code {code} out of range");
        RingElem {
            ring: self.fingerprint,
            code,
        }
    }

    /// Checked arithmetic on tagged elements. `b` is ignored for `Neg`.
    pub fn arith(&self, op: ArithOp, a: RingElem, b: RingElem) -> Result<RingElem, RingError> {
        if a.ring != self.fingerprint || b.ring != self.fingerprint {
            return Err(RingError::MixedRings);
        }
        let code = match op {
            ArithOp::Add => self.add(a.code, b.code),
            ArithOp::Mul => self.mul(a.code, b.code),
            ArithOp::Neg => self.neg(a.code),
        };
        Ok(self.elem(code))
    }

    /// Human-readable form: an integer, or a polynomial in `x`.
    pub fn format(&self, a: Code) -> String {
        if self.degree == 1 {
            return a.to_string();
        }
        let cs = self.coefficients(a);
        let terms: Vec<String> = cs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r, old_s)
}

/// A ring element tagged with the ring it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingElem {
    ring: u64,
    code: Code,
}

impl RingElem {
    pub fn code(&self) -> Code {
        self.code
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> FiniteRing {
        s.parse().unwrap()
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(ring("Zmod:4").size(), 4);
        assert_eq!(ring("GF:2").size(), 2);
        assert_eq!(ring("GFpoly:2:1,1,1").size(), 4);
        assert_eq!(ring("GFpoly:3:2,0,1").size(), 9);
        assert_eq!(ring("Zmod:6").spec(), "Zmod:6");
        assert_eq!(ring(" GFpoly:2:0,0,1").spec(), "GFpoly:2:0,0,1");
    }

    #[test]
    fn spec_errors() {
        assert!(matches!(FiniteRing::parse("Zmod:1"), Err(RingError::ZeroRing(1))));
        assert!(matches!(FiniteRing::parse("Zmod:0"), Err(RingError::ZeroRing(0))));
        assert!(matches!(FiniteRing::parse("GF:4"), Err(RingError::NotPrime(4))));
        assert!(matches!(FiniteRing::parse("GFpoly:4:1,1"), Err(RingError::NotPrime(4))));
        assert!(matches!(FiniteRing::parse("GFpoly:2:1,1,0"), Err(RingError::NotMonic(0))));
        assert!(matches!(FiniteRing::parse("GFpoly:2:1"), Err(RingError::NotMonic(1))));
        assert!(matches!(FiniteRing::parse("GFpoly:2:1,2,1"), Err(RingError::Malformed(_))));
        assert!(matches!(FiniteRing::parse("Zmod"), Err(RingError::Malformed(_))));
        assert!(matches!(FiniteRing::parse("Zmod:x"), Err(RingError::Malformed(_))));
        assert!(matches!(FiniteRing::parse("Q:3"), Err(RingError::Malformed(_))));
        assert!(matches!(FiniteRing::parse("Zmod:70000"), Err(RingError::TooLarge(_))));
    }

    #[test]
    fn zmod4_arithmetic() {
        let r = ring("Zmod:4");
        assert_eq!(r.add(3, 3), 2);
        assert_eq!(r.mul(2, 2), 0);
        assert_eq!(r.neg(1), 3);
        assert_eq!(r.try_invert(3), Some(3));
        assert_eq!(r.try_invert(2), None);
        assert_eq!(r.elements().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn zmod6_inverse() {
        assert_eq!(ring("Zmod:6").try_invert(5), Some(5));
        assert_eq!(ring("Zmod:6").units(), vec![1, 5]);
    }

    #[test]
    fn gf4_is_a_field() {
        let r = ring("GFpoly:2:1,1,1");
        let x = r.from_coefficients(&[0, 1]);
        let x_plus_1 = r.from_coefficients(&[1, 1]);
        // x^2 = x + 1 in F_2[x]/(x^2+x+1)
        assert_eq!(r.mul(x, x), x_plus_1);
        assert!(r.elements().skip(1).all(|a| r.is_unit(a)));
        assert_eq!(r.format(x_plus_1), "x+1");
    }

    #[test]
    fn dual_numbers_over_f2() {
        let r = ring("GFpoly:2:0,0,1");
        assert_eq!(r.size(), 4);
        let x = r.from_coefficients(&[0, 1]);
        assert_eq!(r.mul(x, x), 0);
        assert_eq!(r.units().len(), 2);
    }

    #[test]
    fn mixed_ring_operands_rejected() {
        let a = ring("Zmod:4");
        let b = ring("Zmod:6");
        let e = b.elem(1);
        assert_eq!(
            a.arith(ArithOp::Add, a.elem(1), e),
            Err(RingError::MixedRings)
        );
        assert_eq!(a.arith(ArithOp::Mul, a.elem(3), a.elem(3)).unwrap().code(), 1);
    }
}
