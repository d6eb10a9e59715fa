//! Finite presentations and Todd-Coxeter enumeration over the trivial subgroup.
//!
//! A letter is `g + 1` for generator `g` and `-(g + 1)` for its inverse.

use std::collections::VecDeque;

use thiserror::Error;

use crate::group::{FiniteGroup, GroupError};

pub type Word = Vec<i32>;

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("coset enumeration exceeded {0} cosets")]
    CosetCap(usize),
    #[error("letter {0} refers to a missing generator")]
    BadLetter(i32),
    #[error("coset table does not define a group: {0}")]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Word>,
}

pub fn inverse_word(w: &[i32]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

/// Result of enumerating `G = <X | R>` on the cosets of the trivial subgroup.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub group: FiniteGroup,
    /// A word for each element, in breadth-first order from the identity.
    pub reps: Vec<Word>,
    /// The element represented by each generator.
    pub generator_images: Vec<usize>,
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for &l in relators.iter().flatten() {
            if l == 0 || l.unsigned_abs() as usize > generators {
                return Err(PresentationError::BadLetter(l));
            }
        }
        Ok(Presentation { generators, relators })
    }

    /// Removes generators killed or identified by relators of length one or two.
    /// Returns the smaller presentation and the image of each old generator.
    pub fn eliminate_short(&self) -> (Presentation, Vec<Word>) {
        let id = self.generators;
        let mut parent: Vec<usize> = (0..=id).collect();
        let mut sign: Vec<i32> = vec![1; id + 1];

        fn find(parent: &mut [usize], sign: &mut [i32], g: usize) -> (usize, i32) {
            if parent[g] == g {
                return (g, 1);
            }
            let p = parent[g];
            let (root, s) = find(parent, sign, p);
            parent[g] = root;
            sign[g] *= s;
            (root, sign[g])
        }

        let rewrite = |parent: &mut Vec<usize>, sign: &mut Vec<i32>, w: &[i32]| -> Word {
            let mut out = Vec::with_capacity(w.len());
            for &l in w {
                let g = l.unsigned_abs() as usize - 1;
                let (root, s) = find(parent, sign, g);
                if root != id {
                    out.push(l.signum() * s * (root as i32 + 1));
                }
            }
            cyclic_reduce(&out)
        };

        let mut relators: Vec<Word> = self.relators.clone();
        loop {
            let mut changed = false;
            let mut kept = Vec::with_capacity(relators.len());
            for r in &relators {
                let w = rewrite(&mut parent, &mut sign, r);
                match w.len() {
                    0 => changed = true,
                    1 => {
                        let root = w[0].unsigned_abs() as usize - 1;
                        parent[root] = id;
                        changed = true;
                    }
                    2 if w[0].unsigned_abs() != w[1].unsigned_abs() => {
                        let (ra, sa) = (w[0].unsigned_abs() as usize - 1, w[0].signum());
                        let (rb, sb) = (w[1].unsigned_abs() as usize - 1, w[1].signum());
                        parent[ra] = rb;
                        sign[ra] = -sb * sa;
                        changed = true;
                    }
                    _ => kept.push(w),
                }
            }
            relators = kept;
            if !changed {
                break;
            }
        }

        let mut new_id = vec![usize::MAX; id];
        let mut count = 0;
        for g in 0..id {
            if find(&mut parent, &mut sign, g).0 == g {
                new_id[g] = count;
                count += 1;
            }
        }
        let renumber = |w: &[i32]| -> Word {
            w.iter()
                .map(|&l| l.signum() * (new_id[l.unsigned_abs() as usize - 1] as i32 + 1))
                .collect()
        };
        let mut rels: Vec<Word> = relators.iter().map(|r| renumber(r)).collect();
        rels.sort();
        rels.dedup();
        let images = (0..id)
            .map(|g| {
                let (root, s) = find(&mut parent, &mut sign, g);
                if root == id {
                    Vec::new()
                } else {
                    vec![s * (new_id[root] as i32 + 1)]
                }
            })
            .collect();
        (
            Presentation {
                generators: count,
                relators: rels,
            },
            images,
        )
    }

    /// Hasse-Low-Trotter enumeration with coincidence processing.
    pub fn enumerate(&self, cap: usize) -> Result<Enumeration, PresentationError> {
        let mut en = Enumerator::new(2 * self.generators, cap);
        let relators: Vec<Vec<usize>> = self
            .relators
            .iter()
            .map(|r| r.iter().map(|&l| letter_col(l)).collect())
            .collect();
        let mut c = 0u32;
        while (c as usize) < en.defined() {
            if en.live(c) {
                for r in &relators {
                    en.scan_and_fill(c, r)?;
                    if !en.live(c) {
                        break;
                    }
                }
                if en.live(c) {
                    for x in 0..en.cols {
                        if en.get(c, x) == UNDEF {
                            en.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        en.finish(self.generators)
    }
}

fn letter_col(l: i32) -> usize {
    let g = l.unsigned_abs() as usize - 1;
    if l > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn col_letter(x: usize) -> i32 {
    let g = (x / 2) as i32 + 1;
    if x % 2 == 0 {
        g
    } else {
        -g
    }
}

struct Enumerator {
    cols: usize,
    cap: usize,
    table: Vec<u32>,
    fwd: Vec<u32>,
    queue: VecDeque<u32>,
}

impl Enumerator {
    fn new(cols: usize, cap: usize) -> Self {
        Enumerator {
            cols,
            cap,
            table: vec![UNDEF; cols],
            fwd: vec![0],
            queue: VecDeque::new(),
        }
    }

    fn defined(&self) -> usize {
        self.fwd.len()
    }

    fn live(&self, c: u32) -> bool {
        self.fwd[c as usize] == c
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.cols + x] = v;
    }

    fn define(&mut self, c: u32, x: usize) -> Result<u32, PresentationError> {
        if self.defined() >= self.cap {
            return Err(PresentationError::CosetCap(self.cap));
        }
        let d = self.defined() as u32;
        self.fwd.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.fwd[r as usize] != r {
            r = self.fwd[r as usize];
        }
        let mut k = c;
        while self.fwd[k as usize] != r {
            let next = self.fwd[k as usize];
            self.fwd[k as usize] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (p, q) = (self.rep(a), self.rep(b));
        if p != q {
            let (lo, hi) = if p < q { (p, q) } else { (q, p) };
            self.fwd[hi as usize] = lo;
            self.queue.push_back(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(g) = self.queue.pop_front() {
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, x ^ 1, UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != UNDEF {
                    self.merge(nu, mx);
                } else {
                    let nx = self.get(nu, x ^ 1);
                    if nx != UNDEF {
                        self.merge(mu, nx);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<(), PresentationError> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = w.len() as isize - 1;
        loop {
            while i <= j && self.get(f, w[i as usize]) != UNDEF {
                f = self.get(f, w[i as usize]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, w[j as usize] ^ 1) != UNDEF {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let x = w[i as usize];
                self.set(f, x, b);
                self.set(b, x ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i as usize])?;
        }
    }

    fn finish(mut self, generators: usize) -> Result<Enumeration, PresentationError> {
        let mut order_of = vec![u32::MAX; self.defined()];
        let mut cosets = vec![0u32];
        let mut reps: Vec<Word> = vec![Vec::new()];
        order_of[0] = 0;
        let mut head = 0;
        while head < cosets.len() {
            let c = cosets[head];
            head += 1;
            for x in 0..self.cols {
                let d = self.get(c, x);
                let d = self.rep(d);
                if order_of[d as usize] == u32::MAX {
                    order_of[d as usize] = cosets.len() as u32;
                    cosets.push(d);
                    let mut w = reps[order_of[c as usize] as usize].clone();
                    w.push(col_letter(x));
                    reps.push(w);
                }
            }
        }
        let k = cosets.len();
        let mut step = vec![0u32; k * self.cols];
        for (i, &c) in cosets.iter().enumerate() {
            for x in 0..self.cols {
                let d = self.get(c, x);
                let d = self.rep(d);
                step[i * self.cols + x] = order_of[d as usize];
            }
        }
        let apply = |mut e: usize, w: &[i32]| -> usize {
            for &l in w {
                e = step[e * self.cols + letter_col(l)] as usize;
            }
            e
        };
        let mut mul = vec![0u32; k * k];
        for a in 0..k {
            for (b, rb) in reps.iter().enumerate() {
                mul[a * k + b] = apply(a, rb) as u32;
            }
        }
        let group = FiniteGroup::from_table(k, mul)?;
        let generator_images = (0..generators).map(|g| apply(0, &[g as i32 + 1])).collect();
        Ok(Enumeration {
            group,
            reps,
            generator_images,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(p: &Presentation) -> usize {
        p.enumerate(100_000).unwrap().group.order()
    }

    #[test]
    fn classical_orders() {
        // <a | a^5>
        assert_eq!(order_of(&Presentation::new(1, vec![vec![1; 5]]).unwrap()), 5);
        // S3 = <a, b | a^2, b^3, (ab)^2>
        let s3 = Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]]).unwrap();
        let e = s3.enumerate(1000).unwrap();
        assert_eq!(e.group.order(), 6);
        assert!(!e.group.is_abelian());
        // A5 = <a, b | a^2, b^3, (ab)^5>
        let a5 = Presentation::new(
            2,
            vec![vec![1, 1], vec![2, 2, 2], [1, 2].repeat(5)],
        )
        .unwrap();
        assert_eq!(order_of(&a5), 60);
        // Q8 = <a, b | a^4, a^2 b^-2, b^-1 a b a>
        let q8 = Presentation::new(2, vec![vec![1; 4], vec![1, 1, -2, -2], vec![-2, 1, 2, 1]]).unwrap();
        assert_eq!(order_of(&q8), 8);
        // trivial: <a, b | ab^-1, a>
        assert_eq!(order_of(&Presentation::new(2, vec![vec![1, -2], vec![1]]).unwrap()), 1);
    }

    #[test]
    fn cap_is_reported() {
        let z100 = Presentation::new(1, vec![vec![1; 100]]).unwrap();
        assert_eq!(z100.enumerate(10).unwrap_err(), PresentationError::CosetCap(10));
    }

    #[test]
    fn elimination_keeps_the_group() {
        // <a, b, c | a b^-1, c, b^3> is Z/3
        let p = Presentation::new(3, vec![vec![1, -2], vec![3], vec![2, 2, 2]]).unwrap();
        let (q, images) = p.eliminate_short();
        assert_eq!(q.generators, 1);
        assert_eq!(images[2], Vec::<i32>::new());
        assert_eq!(images[0].len(), 1);
        assert_eq!(order_of(&q), 3);
        assert_eq!(Presentation::new(1, vec![vec![3]]).unwrap_err(), PresentationError::BadLetter(3));
    }

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(cyclic_reduce(&[-1, 2, 3, 1]), vec![2, 3]);
        assert_eq!(inverse_word(&[1, -2]), vec![2, -1]);
    }
}
