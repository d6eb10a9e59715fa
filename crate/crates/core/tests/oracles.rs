//! Brute-force oracles for the computed group orders, H_2, K_1 and the covers.

use std::collections::BTreeSet;
use std::sync::Arc;

use globact::action::{self, LocalFamily};
use globact::covering::{self, CosetAction, ElementaryData, H2Context};
use globact::group::FiniteGroup;
use globact::kstab::{self, CheckStatus, KCaps, SequenceData};
use globact::matgroup::{self, Matrix, SubgroupClosure};
use globact::path::{self, Pi1Answer, Pi1Caps};
use globact::ring::{Code, FiniteRing};
use globact::unimodular;

fn ring(s: &str) -> Arc<FiniteRing> {
    Arc::new(s.parse().unwrap())
}

fn all_matrices(n: usize, q: usize) -> impl Iterator<Item = Matrix> {
    (0..q.pow((n * n) as u32)).map(move |mut k| {
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, (k % q) as Code);
                k /= q;
            }
        }
        m
    })
}

/// Rows independent over F_2: no nonempty subset sums to zero.
fn invertible_mod_2(m: &Matrix) -> bool {
    let n = m.n();
    (1u32..1 << n).all(|s| {
        (0..n).any(|j| (0..n).filter(|&i| s >> i & 1 == 1).map(|i| m.get(i, j) % 2).sum::<u16>() % 2 == 1)
    })
}

#[test]
fn gl_and_sl_orders_over_z4() {
    let gl_mod_2 = all_matrices(3, 2).filter(invertible_mod_2).count();
    assert_eq!(gl_mod_2, 168);
    let z4 = ring("Zmod:4");
    // a matrix over Z/4 is invertible iff it is invertible mod 2
    assert_eq!(gl_mod_2 * 512, 86016);
    let mut gl = 0;
    kstab::for_each_invertible(3, &z4, kstab::DEFAULT_GL_CAP, |m, _| {
        assert!(invertible_mod_2(&m));
        gl += 1;
    })
    .unwrap();
    assert_eq!(gl, 86016);
    let sl = all_matrices(3, 4).filter(|m| m.det(&z4) == 1).count();
    let e = matgroup::elementary_group(3, &z4, matgroup::DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(e.len(), sl);
    assert_eq!(sl, 43008);
}

#[test]
fn ep_orders() {
    for (spec, q) in [("GF:2", 2), ("Zmod:4", 4), ("GF:3", 3)] {
        let r = ring(spec);
        let sl2 = all_matrices(2, q).filter(|m| m.det(&r) == 1).count();
        let data = ElementaryData::build(3, &r, matgroup::DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(data.ep.len(), q * q * sl2, "{spec}");
    }
}

#[test]
fn um_counts_by_crt() {
    let count = |s: &str| unimodular::enumerate_um(3, &ring(s), 1 << 20).unwrap().len();
    assert_eq!(count("GF:2"), 7);
    assert_eq!(count("GF:3"), 26);
    assert_eq!(count("Zmod:6"), count("GF:2") * count("GF:3"));
    assert_eq!(count("Zmod:6"), 182);
}

/// `H_2` straight from the definition: every `x` in `G`, every pair of local elements.
fn h2_brute(h: &SubgroupClosure, g: &SubgroupClosure, family: &LocalFamily) -> BTreeSet<Matrix> {
    let r = g.ring();
    let locals: BTreeSet<Matrix> = family.groups.iter().flat_map(|s| s.iter().cloned()).collect();
    let mut products = BTreeSet::new();
    for a in &locals {
        for b in &locals {
            products.insert(a.mul_unchecked(b, r));
        }
    }
    let mut gens = BTreeSet::new();
    for x in g.iter() {
        let xi = x.inverse(r).unwrap();
        for p in &products {
            let c = xi.mul_unchecked(p, r).mul_unchecked(x, r);
            if h.contains(&c) {
                gens.insert(c);
            }
        }
    }
    let closure = SubgroupClosure::generate(r.clone(), g.n(), gens.into_iter().collect(), usize::MAX).unwrap();
    closure.iter().cloned().collect()
}

#[test]
fn h2_matches_definition() {
    let r = ring("GF:2");
    let data = ElementaryData::build(3, &r, matgroup::DEFAULT_CLOSURE_CAP).unwrap();
    let brute = h2_brute(&data.ep, &data.e, &data.family);
    assert_eq!(brute.len(), 24);
    assert_eq!(data.ep2.iter().cloned().collect::<BTreeSet<_>>(), brute);

    let ctx = H2Context::new(data.e.clone(), &data.family);
    for gens in [
        vec![matgroup::elementary(3, 0, 1, 1).unwrap()],
        vec![Matrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap()],
        vec![
            matgroup::elementary(3, 1, 0, 1).unwrap(),
            matgroup::elementary(3, 2, 1, 1).unwrap(),
        ],
    ] {
        let h = SubgroupClosure::generate(r.clone(), 3, gens, usize::MAX).unwrap();
        let fast: BTreeSet<Matrix> = ctx.h2(&h).unwrap().iter().cloned().collect();
        assert_eq!(fast, h2_brute(&h, &data.e, &data.family), "|H| = {}", h.len());
    }

    let toy = covering::toy_instance();
    let brute = h2_brute(&toy.h, &toy.group, &toy.family);
    assert_eq!(brute.len(), 1);
    assert_eq!(covering::h2(&toy.h, &toy.group, &toy.family).unwrap().len(), 1);
}

#[test]
fn k1_classes_follow_units() {
    for spec in ["GF:2", "GF:3", "Zmod:4", "GFpoly:2:0,0,1"] {
        let r = ring(spec);
        let e = Arc::new(matgroup::elementary_group(3, &r, matgroup::DEFAULT_CLOSURE_CAP).unwrap());
        let k = kstab::k1(e.clone(), kstab::DEFAULT_GL_CAP).unwrap();
        assert_eq!(k.len(), r.units().len(), "{spec}");
        assert!(k.det_constant && k.e_normal);
        assert_eq!(k.gl_order, k.len() * e.len());
        let dets: BTreeSet<Code> = k.classes.iter().map(|c| c.det).collect();
        assert_eq!(dets.len(), k.len());
    }
}

#[test]
fn alpha_and_beta_over_z4() {
    let r = ring("Zmod:4");
    let data = SequenceData::build(3, &r, KCaps::default()).unwrap();
    let c = data.k1.class_of(&Matrix::diagonal(&[3, 1, 1])).unwrap();
    let image = data.alpha(c);
    let p = data.um.point_of(&[3, 0, 0]).unwrap();
    assert!(data.pi0.classes[image].contains(&p));
    for x in 0..data.um.rows.len() as u32 {
        let (class, basis) = data.beta(x).unwrap();
        assert_eq!(class.rank, 2);
        assert_eq!(basis.row, data.um.row(x));
    }
    for c in 0..data.pi1_cosets() as u32 {
        assert_eq!(data.lambda(data.mu(c).unwrap()), 0);
    }
}

#[test]
fn kernel_bases_over_f2() {
    let r = ring("GF:2");
    let um = unimodular::build_um_action(3, &r).unwrap();
    for x in 0..um.rows.len() as u32 {
        let p = um.find_path(um.base(), x).unwrap();
        let kb = kstab::kernel_basis(um.row(x), &p.matrix, &r).unwrap();
        let mut rows = kb.basis.clone();
        rows.push(kb.complement.clone());
        assert!(r.is_unit(Matrix::from_rows(&rows).unwrap().det(&r)));
    }
}

#[test]
fn toy_exactness_at_pi1_is_reported() {
    let toy = covering::toy_instance();
    let h2 = covering::h2(&toy.h, &toy.group, &toy.family).unwrap();
    let check = kstab::exactness_at_pi1(&toy.h, &h2, |t| h2.contains(&Matrix::block_diag_one(t)), &[
        Matrix::identity(6),
    ])
    .unwrap();
    assert_eq!(check.status, CheckStatus::Fail);
    assert_eq!(check.witnesses.len(), 1);
    assert!(check.detail.contains("|ker mu| = 2"));
}

#[test]
fn cover_uniqueness_over_f2() {
    let r = ring("GF:2");
    let data = ElementaryData::build(3, &r, matgroup::DEFAULT_CLOSURE_CAP).unwrap();
    let uc = covering::universal_cover(&data).unwrap();
    let um = unimodular::build_um_action(3, &r).unwrap();
    let (eum, _) = um.eum_component().unwrap();
    let Pi1Answer::Group(search) = path::pi1_by_search(&eum, Pi1Caps::default()).unwrap() else {
        panic!("undecided");
    };
    let lifted = covering::cover_from_search(&eum, &search).unwrap();
    assert!(action::pointed_isomorphism(&lifted.action, lifted.base, uc.cover.action(), uc.cover.base()).is_some());
    assert_eq!(uc.fiber_over_base().len(), data.ep.len() / data.ep2.len());
}

#[test]
fn covering_composition() {
    let toy = covering::toy_instance();
    let r = toy.group.ring().clone();
    let elements: Vec<Matrix> = toy.group.iter().cloned().collect();
    let mut seen = BTreeSet::new();
    let mut subgroups = Vec::new();
    for a in &elements {
        for b in &elements {
            let h = SubgroupClosure::generate(r.clone(), 6, vec![a.clone(), b.clone()], usize::MAX).unwrap();
            let key: BTreeSet<Matrix> = h.iter().cloned().collect();
            if seen.insert(key) {
                subgroups.push(Arc::new(h));
            }
        }
    }
    let actions: Vec<CosetAction> = subgroups
        .iter()
        .map(|h| CosetAction::new(toy.group.clone(), h.clone(), &toy.family).unwrap())
        .collect();
    let covers = |i: usize, j: usize| -> Option<Vec<u32>> {
        if !subgroups[i].is_subgroup_of(&subgroups[j]) {
            return None;
        }
        let p = actions[j].projection_from(&actions[i]).unwrap();
        let ok = covering::is_covering(&p, actions[i].action(), actions[j].action()).unwrap().is_ok();
        ok.then_some(p)
    };
    let m = subgroups.len();
    let mut found = 0;
    for i in 0..m {
        for j in 0..m {
            let Some(p) = covers(i, j) else { continue };
            for k in 0..m {
                let Some(q) = covers(j, k) else { continue };
                let qp: Vec<u32> = p.iter().map(|&x| q[x as usize]).collect();
                assert!(covering::is_covering(&qp, actions[i].action(), actions[k].action()).unwrap().is_ok());
                found += 1;
            }
        }
    }
    assert!(found > m);
}

#[test]
fn steinberg_star() {
    for (spec, q) in [("GF:2", 2usize), ("GF:3", 3)] {
        let r = ring(spec);
        let family = LocalFamily::nilpotent(3, &r);
        let size = covering::steinberg_star_bijection(&family, &r).unwrap();
        let union: BTreeSet<Matrix> = family.groups.iter().flat_map(|g| g.iter().cloned()).collect();
        assert_eq!(size, union.len());
        // each of the six maximal sets carries q^3 elements
        assert!(size <= 6 * q.pow(3));
    }
}

#[test]
fn toy_quotient_is_cyclic() {
    let toy = covering::toy_instance();
    let one = SubgroupClosure::trivial(toy.group.ring().clone(), 6);
    let pi1 = covering::quotient_group(&toy.h, &one).unwrap();
    assert!(pi1.is_isomorphic(&FiniteGroup::cyclic(2)));
}
