use std::sync::Arc;

use proptest::prelude::*;

use globact::matgroup::{self, Matrix, NilpotentSet};
use globact::path::Path;
use globact::ring::{Code, FiniteRing};
use globact::steinberg::{self, Letter, SteinbergWord};
use globact::unimodular;

const RINGS: [&str; 6] = ["GF:2", "GF:3", "GF:5", "Zmod:4", "Zmod:6", "GFpoly:2:0,0,1"];

fn ring() -> impl Strategy<Value = Arc<FiniteRing>> {
    prop::sample::select(&RINGS[..]).prop_map(|s| Arc::new(s.parse().unwrap()))
}

fn ring_with(k: usize) -> impl Strategy<Value = (Arc<FiniteRing>, Vec<Code>)> {
    ring().prop_flat_map(move |r| {
        let q = r.size() as Code;
        (Just(r), prop::collection::vec(0..q, k))
    })
}

fn matrix(n: usize) -> impl Strategy<Value = (Arc<FiniteRing>, Matrix, Matrix)> {
    ring_with(2 * n * n).prop_map(move |(r, c)| {
        let rows = |off: usize| (0..n).map(|i| c[off + i * n..off + (i + 1) * n].to_vec()).collect::<Vec<_>>();
        let a = Matrix::from_rows(&rows(0)).unwrap();
        let b = Matrix::from_rows(&rows(n * n)).unwrap();
        (r, a, b)
    })
}

fn words(n: usize) -> impl Strategy<Value = (Arc<FiniteRing>, SteinbergWord, SteinbergWord)> {
    let positions: Vec<(usize, usize)> = matgroup::off_diagonal(n).collect();
    ring()
        .prop_flat_map(move |r| {
            let q = r.size() as Code;
            let letter = (prop::sample::select(positions.clone()), 1..q).prop_map(|((i, j), c)| Letter::new(i, j, c));
            let letters = prop::collection::vec(letter, 0..8);
            (Just(r), letters.clone(), letters)
        })
        .prop_map(move |(r, a, b)| {
            let w = SteinbergWord::new(n, a, &r).unwrap();
            let u = SteinbergWord::new(n, b, &r).unwrap();
            (r, w, u)
        })
}

proptest! {
    #[test]
    fn ring_axioms((r, c) in ring_with(3)) {
        let (a, b, d) = (c[0], c[1], c[2]);
        prop_assert_eq!(r.add(a, b), r.add(b, a));
        prop_assert_eq!(r.mul(a, b), r.mul(b, a));
        prop_assert_eq!(r.mul(r.mul(a, b), d), r.mul(a, r.mul(b, d)));
        prop_assert_eq!(r.mul(a, r.add(b, d)), r.add(r.mul(a, b), r.mul(a, d)));
        prop_assert_eq!(r.add(a, r.neg(a)), r.zero());
        prop_assert_eq!(r.sub(a, b), r.add(a, r.neg(b)));
        prop_assert_eq!(r.mul(a, r.one()), a);
        match r.try_invert(a) {
            Some(inv) => prop_assert_eq!(r.mul(a, inv), r.one()),
            None => prop_assert!(r.elements().all(|x| r.mul(a, x) != r.one())),
        }
    }

    #[test]
    fn det_is_multiplicative((r, a, b) in matrix(3)) {
        let ab = a.mul(&b, &r).unwrap();
        prop_assert_eq!(ab.det(&r), r.mul(a.det(&r), b.det(&r)));
    }

    #[test]
    fn inverse_iff_unit_det((r, a, _) in matrix(3)) {
        match a.inverse(&r) {
            Some(inv) => {
                prop_assert!(a.mul(&inv, &r).unwrap().is_identity());
                prop_assert!(inv.mul(&a, &r).unwrap().is_identity());
            }
            None => prop_assert!(!r.is_unit(a.det(&r))),
        }
    }

    #[test]
    fn row_action_is_right_action((r, a, b) in matrix(3), seed in any::<u64>()) {
        let q = r.size() as u64;
        let v: Vec<Code> = (0..3).map(|k| ((seed >> (8 * k)) % q) as Code).collect();
        let ab = a.mul(&b, &r).unwrap();
        prop_assert_eq!(ab.act_on_row(&v, &r), b.act_on_row(&a.act_on_row(&v, &r), &r));
    }

    #[test]
    fn theta_is_a_homomorphism((r, w, u) in words(3)) {
        let lhs = steinberg::theta(&w.concat(&u, &r), &r);
        let rhs = steinberg::theta(&w, &r).mul(&steinberg::theta(&u, &r), &r).unwrap();
        prop_assert_eq!(lhs, rhs);
        let inv = steinberg::theta(&w.inverse(&r), &r);
        prop_assert!(inv.mul(&steinberg::theta(&w, &r), &r).unwrap().is_identity());
    }

    #[test]
    fn local_normal_form_round_trip((r, w, _) in words(3)) {
        let m = steinberg::theta(&w, &r);
        if let Some(nf) = steinberg::local_normal_form(&m, &r) {
            prop_assert_eq!(steinberg::theta(&nf, &r), m.clone());
            prop_assert!(steinberg::is_local(&nf).is_some());
        }
        if steinberg::is_local(&w).is_some() {
            prop_assert!(steinberg::local_normal_form(&m, &r).is_some());
        }
    }

    #[test]
    fn nilpotent_closure_is_nilpotent(pairs in prop::collection::vec((0usize..4, 0usize..4), 0..6)) {
        let pairs: Vec<(usize, usize)> = pairs.into_iter().filter(|(i, j)| i != j).collect();
        match NilpotentSet::nilpotent_closure(4, &pairs) {
            Some(alpha) => {
                prop_assert!(alpha.is_nilpotent());
                prop_assert!(pairs.iter().all(|&(i, j)| alpha.contains(i, j)));
            }
            None => prop_assert!(!NilpotentSet::from_pairs(4, &pairs).is_nilpotent()),
        }
    }

    #[test]
    fn path_laws(walk in prop::collection::vec(0u32..7, 1..10), ld in -5i64..5) {
        let r: Arc<FiniteRing> = Arc::new("GF:2".parse().unwrap());
        let um = unimodular::build_um_action(3, &r).unwrap();
        let um = um.action();
        let p = Path::new(ld, walk).unwrap();
        prop_assert_eq!(p.inverse().inverse(), p.clone());
        prop_assert_eq!(p.inverse().in_point(), p.ter_point());
        prop_assert_eq!(p.at(p.ld() - 10), p.in_point());
        prop_assert_eq!(p.at(p.ud() + 10), p.ter_point());
        let back = p.compose(&p.inverse()).unwrap();
        prop_assert_eq!(back.in_point(), back.ter_point());
        prop_assert_eq!(back.check(um).is_ok(), p.check(um).is_ok());
        let c = Path::constant(p.ter_point());
        let pc = p.compose(&c).unwrap();
        prop_assert_eq!(pc.window(), p.window());
    }

    #[test]
    fn path_compose_is_associative(a in prop::collection::vec(0u32..5, 1..5), b in prop::collection::vec(0u32..5, 1..5), c in prop::collection::vec(0u32..5, 1..5)) {
        let mut b = b;
        let mut c = c;
        b[0] = *a.last().unwrap();
        c[0] = *b.last().unwrap();
        let (a, b, c) = (Path::new(0, a).unwrap(), Path::new(0, b).unwrap(), Path::new(0, c).unwrap());
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left.reduced(), right.reduced());
    }
}
