use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use globact::covering::{self, CosetAction, ElementaryData, H2Context};
use globact::kstab::{self, KCaps};
use globact::matgroup::{self, Matrix, NilpotentSet, SubgroupClosure};
use globact::path::{self, HomotopyAnswer, Path, Pi1Answer, Pi1Caps, SearchCaps};
use globact::ring::FiniteRing;
use globact::steinberg::{self, Letter, SteinbergWord};
use globact::unimodular;

type Outcome = Result<String, String>;

fn ring(spec: &str) -> Arc<FiniteRing> {
    Arc::new(spec.parse().expect("valid ring"))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for (spec, size) in [("GF:2", Some(7)), ("GF:3", Some(26)), ("Zmod:4", None)] {
        let start = Instant::now();
        let r = ring(spec);
        let um = unimodular::build_um_action(3, &r).map_err(|e| e.to_string())?;
        let pi0 = um.pi0();
        ensure(pi0.classes.len() == 1, format!("{spec}: {} classes", pi0.classes.len()))?;
        if let Some(s) = size {
            ensure(pi0.classes[0].len() == s, format!("{spec}: class size {}", pi0.classes[0].len()))?;
        }
        let e = matgroup::elementary_group(3, &r, matgroup::DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
        let orbit: BTreeSet<Vec<u16>> = e.iter().map(|g| g.act_on_row(&[1, 0, 0], &r)).collect();
        let class: BTreeSet<Vec<u16>> = pi0.classes[0].iter().map(|&x| um.row(x).to_vec()).collect();
        ensure(orbit == class, format!("{spec}: pi_0 class differs from the E_3 orbit of e"))?;
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(10), format!("{spec}: took {elapsed:?}"))?;
        notes.push(format!("{spec} 1 class of {} ({:.2?})", class.len(), elapsed));
    }
    Ok(notes.join(", "))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    for spec in ["GF:2", "GF:3", "Zmod:4", "Zmod:6", "GFpoly:2:0,0,1"] {
        let start = Instant::now();
        let p = covering::pi1_algebraic(3, &ring(spec), matgroup::DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
        ensure(
            p.group.is_trivial() && p.ep_order == p.ep2_order,
            format!("{spec}: |EP| = {}, |(EP)_2| = {}", p.ep_order, p.ep2_order),
        )?;
        if spec == "GF:2" {
            ensure(p.ep_order == 24, format!("|EP_3(F_2)| = {}", p.ep_order))?;
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(300), format!("{spec}: took {elapsed:?}"))?;
        notes.push(format!("{spec} |EP|=|(EP)_2|={} ({:.1?})", p.ep_order, elapsed));
    }
    Ok(notes.join(", "))
}

fn criterion_3() -> Outcome {
    let r = ring("GF:2");
    let um = unimodular::build_um_action(3, &r).map_err(|e| e.to_string())?;
    let (eum, _) = um.eum_component().map_err(|e| e.to_string())?;
    let Pi1Answer::Group(search) = path::pi1_by_search(&eum, Pi1Caps::default()).map_err(|e| e.to_string())? else {
        return Err("search undecided on EUm_3(F_2)".into());
    };
    let data = ElementaryData::build(3, &r, matgroup::DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
    let alg = data.pi1().map_err(|e| e.to_string())?;
    ensure(search.group.is_isomorphic(&alg), "EUm_3(F_2): routes disagree")?;

    let toy = covering::toy_instance();
    let h2 = covering::h2(&toy.h, &toy.group, &toy.family).map_err(|e| e.to_string())?;
    let toy_alg = covering::quotient_group(&toy.h, &h2).map_err(|e| e.to_string())?;
    let toy_action = CosetAction::new(toy.group.clone(), toy.h.clone(), &toy.family).map_err(|e| e.to_string())?;
    let Pi1Answer::Group(toy_search) =
        path::pi1_by_search(&toy_action.pointed, Pi1Caps::default()).map_err(|e| e.to_string())?
    else {
        return Err("search undecided on the toy".into());
    };
    ensure(toy_alg.order() >= 2, "toy pi_1 is trivial")?;
    ensure(
        toy_search.group.isomorphism_to(&toy_alg).is_some(),
        format!("toy: search order {} vs algebraic {}", toy_search.group.order(), toy_alg.order()),
    )?;
    Ok(format!(
        "EUm_3(F_2): both trivial; toy: both order {} ({} of {} search products confirmed by homotopy)",
        toy_alg.order(),
        toy_search.confirmed,
        toy_search.confirmed + toy_search.unconfirmed
    ))
}

fn random_subgroup(
    rng: &mut ChaCha8Rng,
    pool: &SubgroupClosure,
    extra: &[Matrix],
    count: std::ops::RangeInclusive<usize>,
) -> SubgroupClosure {
    let mut gens: Vec<Matrix> = extra.to_vec();
    for _ in 0..rng.random_range(count) {
        gens.push(pool.element(rng.random_range(0..pool.len())).clone());
    }
    SubgroupClosure::generate(pool.ring().clone(), pool.n(), gens, usize::MAX).expect("uncapped")
}

fn criterion_4() -> Outcome {
    let r = ring("GF:2");
    let data = ElementaryData::build(3, &r, matgroup::DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
    let ctx = H2Context::new(data.e.clone(), &data.family);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut agree, mut coverings, mut total) = (0, 0, 0);
    let mut disagreements = Vec::new();
    while total < 60 {
        let h = random_subgroup(&mut rng, &data.e, &[], 1..=2);
        let h2 = ctx.h2(&h).map_err(|e| e.to_string())?;
        let k = if rng.random_bool(0.5) {
            random_subgroup(&mut rng, &h, h2.generators(), 0..=1)
        } else {
            random_subgroup(&mut rng, &h, &[], 0..=2)
        };
        let top = CosetAction::new(data.e.clone(), Arc::new(k.clone()), &data.family).map_err(|e| e.to_string())?;
        let bottom = CosetAction::new(data.e.clone(), Arc::new(h.clone()), &data.family).map_err(|e| e.to_string())?;
        let p = bottom.projection_from(&top).map_err(|e| e.to_string())?;
        let star = covering::is_covering(&p, top.action(), bottom.action())
            .map_err(|e| e.to_string())?
            .is_ok();
        let algebraic = h2.is_subgroup_of(&k);
        total += 1;
        coverings += star as usize;
        if star == algebraic {
            agree += 1;
        } else {
            disagreements.push(format!("|H|={} |K|={} |H_2|={}", h.len(), k.len(), h2.len()));
        }
    }
    ensure(
        disagreements.is_empty(),
        format!("{} of {total} pairs disagree: {:?}", disagreements.len(), disagreements),
    )?;
    ensure(coverings > 0 && coverings < total, format!("{coverings} of {total} pairs are coverings"))?;
    Ok(format!("{agree}/{total} pairs agree ({coverings} coverings)"))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    for spec in ["GF:2", "GF:3", "Zmod:4", "Zmod:6", "GFpoly:2:0,0,1"] {
        let start = Instant::now();
        let report = kstab::verify_sequence(3, &ring(spec), KCaps::default()).map_err(|e| e.to_string())?;
        let failed: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        ensure(failed.is_empty(), format!("{spec}: {failed:?}"))?;
        if spec == "Zmod:4" {
            ensure(report.sizes.k1 == 2, format!("K_1,3(Z/4) has {} classes", report.sizes.k1))?;
        }
        notes.push(format!("{spec} K1={} ({:.1?})", report.sizes.k1, start.elapsed()));
    }
    Ok(notes.join(", "))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for (spec, count) in [("GF:2", 8), ("GF:3", 27)] {
        let r = ring(spec);
        let delta = NilpotentSet::max_delta(3);
        let local = matgroup::local_subgroup(&delta, &r);
        let order = delta.linear_extension();
        let positions: Vec<(usize, usize)> = order
            .iter()
            .rev()
            .flat_map(|&i| (0..3).filter(move |&j| delta.contains(i, j)).map(move |j| (i, j)))
            .collect();
        let mut images = BTreeSet::new();
        let q = r.size();
        for code in 0..q.pow(positions.len() as u32) {
            let mut c = code;
            let letters: Vec<Letter> = positions
                .iter()
                .map(|&(i, j)| {
                    let v = (c % q) as u16;
                    c /= q;
                    Letter::new(i, j, v)
                })
                .collect();
            let w = SteinbergWord::new(3, letters, &r).map_err(|e| e.to_string())?;
            ensure(steinberg::is_local(&w).is_none_or(|a| a.is_subset(&delta)), "word escapes delta")?;
            let m = steinberg::theta(&w, &r);
            ensure(local.contains(&m), "theta leaves the local subgroup")?;
            images.insert(m);
        }
        ensure(images.len() == count && local.len() == count, format!("{spec}: {} images", images.len()))?;
        for m in local.iter() {
            let w = steinberg::local_matrix_to_word(&delta, m, &r).map_err(|e| e.to_string())?;
            ensure(steinberg::theta(&w, &r) == *m, format!("{spec}: round trip fails at {m:?}"))?;
        }
        notes.push(format!("{spec} {count}"));
    }
    Ok(notes.join(", "))
}

fn criterion_7() -> Outcome {
    let r = ring("GF:2");
    let um = unimodular::build_um_action(3, &r).map_err(|e| e.to_string())?;
    let act = um.action();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut yes, mut max_moves) = (0, 0);
    for _ in 0..100 {
        let len = rng.random_range(1..=10);
        let mut window = vec![rng.random_range(0..act.len() as u32)];
        for _ in 1..len {
            let x = *window.last().expect("nonempty");
            let next = if rng.random_bool(0.2) {
                x
            } else {
                *act.one_step(x).choose(&mut rng).expect("connected")
            };
            window.push(next);
        }
        let omega = Path::new(rng.random_range(-3..=3), window).map_err(|e| e.to_string())?;
        let loop_ = omega.compose(&omega.inverse()).map_err(|e| e.to_string())?;
        let constant = Path::constant(omega.in_point());
        match path::stably_homotopic(act, &loop_, &constant, SearchCaps::default()).map_err(|e| e.to_string())? {
            HomotopyAnswer::Yes { trace } => {
                trace.verify(act).map_err(|e| e.to_string())?;
                max_moves = max_moves.max(trace.moves());
                yes += 1;
            }
            HomotopyAnswer::No { .. } => return Err(format!("search exhausted for {omega:?}")),
            HomotopyAnswer::Undecided { .. } => return Err(format!("undecided for {omega:?}")),
        }
    }
    Ok(format!("{yes}/100 null-homotopic, 0 undecided, longest trace {max_moves} moves"))
}

fn criterion_8() -> Outcome {
    let mut checked = 0usize;
    for spec in ["GF:2", "GF:3", "Zmod:4"] {
        let r = ring(spec);
        let n = 3;
        let e = |i, j, x| matgroup::elementary(n, i, j, x).expect("off-diagonal");
        let pos: Vec<(usize, usize)> = matgroup::off_diagonal(n).collect();
        for &(i, j) in &pos {
            for &(k, l) in &pos {
                for a in r.elements() {
                    for b in r.elements() {
                        let x = e(i, j, a);
                        let y = e(k, l, b);
                        let xi = x.inverse(&r).ok_or("E_ij(r) not invertible")?;
                        let yi = y.inverse(&r).ok_or("E_kl(s) not invertible")?;
                        let comm = x.mul_unchecked(&y, &r).mul_unchecked(&xi, &r).mul_unchecked(&yi, &r);
                        let expected = if j == k && i != l {
                            Some(e(i, l, r.mul(a, b)))
                        } else if j != k && i != l {
                            Some(Matrix::identity(n))
                        } else {
                            None
                        };
                        if let Some(want) = expected {
                            ensure(comm == want, format!("{spec}: [E{i}{j}({a}), E{k}{l}({b})]"))?;
                            checked += 1;
                        }
                    }
                }
                if (i, j) == (k, l) {
                    for a in r.elements() {
                        for b in r.elements() {
                            let lhs = e(i, j, a).mul_unchecked(&e(i, j, b), &r);
                            ensure(lhs == e(i, j, r.add(a, b)), format!("{spec}: additivity at {i}{j}"))?;
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} identities over F_2, F_3, Z/4"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("pi_0 transitivity", criterion_1),
        ("pi_1 vanishing", criterion_2),
        ("dual-route pi_1", criterion_3),
        ("covering criterion", criterion_4),
        ("exact sequence", criterion_5),
        ("local isomorphism", criterion_6),
        ("homotopy calculus", criterion_7),
        ("elementary relations", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
