use std::collections::VecDeque;
use std::path::Path as FsPath;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use globact::action::{GlobalAction, PointedAction, NONE};
use globact::covering::{self, ElementaryData};
use globact::kstab::{self, Check, KCaps};
use globact::path::{self, HomotopyAnswer, Path, Pi1Answer, Pi1Caps, Pi1Search, SearchCaps};
use globact::ring::Code;
use globact::unimodular::{self, UmAction};

use crate::config::{Cli, CliError, Command, Common};
use crate::report::Report;

const SAMPLED_LOOPS: usize = 16;

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let start = Instant::now();
    cli.common.validate()?;
    let mut report = match &cli.command {
        Command::Pi0 => pi0(&cli.common)?,
        Command::Pi1 { cross_check } => pi1(&cli.common, *cross_check)?,
        Command::Verify => verify(&cli.common)?,
        Command::Homotopy { path_a, path_b } => homotopy(&cli.common, path_a, path_b)?,
        Command::ValidateAction => validate_action(&cli.common)?,
    };
    if cli.common.timing {
        report.elapsed = Some(start.elapsed());
    }
    Ok(report)
}

fn search_caps(common: &Common) -> SearchCaps {
    SearchCaps {
        max_steps: common.cap_steps,
        max_window: common.cap_window,
    }
}

fn um_action(common: &Common) -> Result<UmAction, CliError> {
    let ring = common.ring()?;
    Ok(unimodular::build_um_action(common.n, &ring)?)
}

fn pi0(common: &Common) -> Result<Report, CliError> {
    let um = um_action(common)?;
    let pi0 = um.pi0();
    let rep = |c: &[u32]| {
        let x = if c.contains(&um.base()) { um.base() } else { c[0] };
        um.action().label(x).to_string()
    };
    let classes: Vec<_> = pi0
        .classes
        .iter()
        .map(|c| json!({ "size": c.len(), "representative": rep(c) }))
        .collect();
    let mut lines = vec![format!(
        "pi_0(Um_{}({})): {} class(es) over {} rows",
        um.n,
        um.ring.spec(),
        pi0.classes.len(),
        um.rows.len()
    )];
    for c in &pi0.classes {
        lines.push(format!("  {} rows, representative {}", c.len(), rep(c)));
    }
    let covered: usize = pi0.classes.iter().map(Vec::len).sum();
    let base_ok = pi0
        .base_class
        .is_some_and(|b| pi0.classes[b].contains(&um.base()));
    let checks = vec![
        Check::new("classes partition Um_n", covered == um.rows.len(), format!("{covered} rows")),
        Check::new("base class contains e", base_ok, ""),
    ];
    let result = json!({
        "rows": um.rows.len(),
        "class_count": pi0.classes.len(),
        "classes": classes,
        "base_class": pi0.base_class,
    });
    Ok(Report::new(lines, result, checks))
}

fn pi1(common: &Common, cross_check: bool) -> Result<Report, CliError> {
    let ring = common.ring()?;
    let data = ElementaryData::build(common.n, &ring, common.cap_closure)?;
    let (group, normal) = match data.pi1() {
        Ok(g) => (Some(g), true),
        Err(_) => (None, false),
    };
    let mut lines = vec![format!(
        "pi_1(EUm_{}({})) = EP/(EP)_2: |EP| = {}, |(EP)_2| = {}",
        common.n,
        ring.spec(),
        data.ep.len(),
        data.ep2.len()
    )];
    let mut checks = vec![Check::new("(EP_n)_2 normal in EP_n", normal, "")];
    let mut result = json!({
        "ep_order": data.ep.len(),
        "ep2_order": data.ep2.len(),
    });
    if let Some(g) = &group {
        lines.push(format!("order {}", g.order()));
        result["order"] = json!(g.order());
        result["table"] = json!(g.table());
    }
    let mut undecided = false;
    if cross_check {
        let um = unimodular::build_um_action(common.n, &ring)?;
        let (eum, _) = um.eum_component()?;
        let caps = Pi1Caps {
            search: search_caps(common),
            ..Pi1Caps::default()
        };
        let answer = path::pi1_by_search(&eum, caps).map_err(|e| CliError::Inconsistent(e.to_string()))?;
        match answer {
            Pi1Answer::Group(search) => {
                let agree = group.as_ref().is_some_and(|g| g.is_isomorphic(&search.group));
                lines.push(format!("homotopy search: order {}", search.group.order()));
                checks.push(Check::new(
                    "search and algebraic pi_1 isomorphic",
                    agree,
                    format!("search order {}", search.group.order()),
                ));
                undecided |= search.unconfirmed > 0;
                checks.push(Check::new(
                    "search products confirmed by homotopy",
                    true,
                    format!("{} confirmed, {} left open by the caps", search.confirmed, search.unconfirmed),
                ));
                let (sampled, open) = sample_loops(&eum, &search, common)?;
                undecided |= open > 0;
                checks.push(Check::new(
                    "sampled loops homotopic to their group representative",
                    sampled.is_empty(),
                    format!("{SAMPLED_LOOPS} loops from seed {}, {open} undecided", common.seed),
                ).with_witnesses(sampled));
                result["search_order"] = json!(search.group.order());
            }
            Pi1Answer::Undecided { reason } => {
                undecided = true;
                lines.push(format!("homotopy search undecided: {reason}"));
                checks.push(Check::skipped("search and algebraic pi_1 isomorphic", &reason));
            }
        }
    }
    let report = Report::new(lines, result, checks);
    Ok(if undecided && report.status == crate::report::Status::Pass {
        report.undecided()
    } else {
        report
    })
}

/// Random closed walks at the base, closed up along a breadth-first tree.
fn sample_loops(
    pointed: &PointedAction,
    search: &Pi1Search,
    common: &Common,
) -> Result<(Vec<String>, usize), CliError> {
    let action = &pointed.action;
    let parent = bfs_parents(action, pointed.base);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut bad = Vec::new();
    let mut open = 0;
    for _ in 0..SAMPLED_LOOPS {
        let mut window = vec![pointed.base];
        for _ in 0..rng.random_range(1..=6) {
            let x = *window.last().expect("nonempty");
            if let Some(&y) = action.one_step(x).choose(&mut rng) {
                window.push(y);
            }
        }
        let mut x = *window.last().expect("nonempty");
        while x != pointed.base {
            x = parent[x as usize];
            window.push(x);
        }
        let walk = Path::new(0, window)?;
        let g = search
            .element_of(&walk)
            .ok_or_else(|| CliError::Inconsistent("loop step is not an edge".into()))?;
        let answer = path::stably_homotopic(action, &walk, &search.loops[g], search_caps(common))
            .map_err(|e| CliError::Inconsistent(e.to_string()))?;
        match answer {
            HomotopyAnswer::Yes { .. } => {}
            HomotopyAnswer::No { .. } => bad.push(format!("{:?}", walk.window())),
            HomotopyAnswer::Undecided { .. } => open += 1,
        }
    }
    Ok((bad, open))
}

fn bfs_parents(action: &GlobalAction, base: u32) -> Vec<u32> {
    let mut parent = vec![NONE; action.len()];
    parent[base as usize] = base;
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        for y in action.one_step(x) {
            if parent[y as usize] == NONE {
                parent[y as usize] = x;
                queue.push_back(y);
            }
        }
    }
    parent
}

fn verify(common: &Common) -> Result<Report, CliError> {
    let ring = common.ring()?;
    let caps = KCaps {
        closure: common.cap_closure,
        ..KCaps::default()
    };
    let seq = kstab::verify_sequence(common.n, &ring, caps)?;
    let s = &seq.sizes;
    let lines = vec![
        format!("exact sequence for n = {} over {}", seq.n, seq.ring),
        format!(
            "|E| = {}, |GL| = {}, |EP| = {}, |(EP)_2| = {}, |Um| = {}",
            s.e, s.gl, s.ep, s.ep2, s.um
        ),
        format!(
            "|pi_0| = {}, |pi_1| = {}, |K_1,n| = {}, |K_1,n-1/(K_1,n-1)_2| = {}",
            s.pi0, s.pi1, s.k1, s.k1_lower_quotient
        ),
    ];
    let result = json!({ "sizes": seq.sizes });
    Ok(Report::new(lines, result, seq.checks))
}

fn read_path(file: &FsPath, um: &UmAction) -> Result<Path, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let rows: Vec<Vec<Code>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let points = rows
        .iter()
        .map(|r| {
            um.point_of(r)
                .ok_or_else(|| CliError::Config(format!("{}: {r:?} is not a unimodular row", file.display())))
        })
        .collect::<Result<Vec<u32>, _>>()?;
    let path = Path::new(0, points).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    path.check(um.action())
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    Ok(path)
}

fn homotopy(common: &Common, a: &FsPath, b: &FsPath) -> Result<Report, CliError> {
    let um = um_action(common)?;
    let pa = read_path(a, &um)?;
    let pb = read_path(b, &um)?;
    let answer = path::stably_homotopic(um.action(), &pa, &pb, search_caps(common))?;
    let label = |p: &Path| -> Vec<String> { p.window().iter().map(|&x| um.action().label(x).to_string()).collect() };
    let (word, result, checks) = match &answer {
        HomotopyAnswer::Yes { trace } => {
            let verified = trace.verify(um.action()).is_ok();
            let steps: Vec<Vec<String>> = trace.paths.iter().map(label).collect();
            (
                "yes",
                json!({ "answer": "yes", "moves": trace.moves(), "trace": steps }),
                vec![Check::new("trace replays as elementary homotopies", verified, "")],
            )
        }
        HomotopyAnswer::No { explored } => ("no", json!({ "answer": "no", "explored": explored }), Vec::new()),
        HomotopyAnswer::Undecided { explored } => (
            "undecided",
            json!({ "answer": "undecided", "explored": explored }),
            vec![Check::skipped("stable homotopy", "search caps reached")],
        ),
    };
    let lines = vec![
        format!("a = {}", label(&pa).join(" ")),
        format!("b = {}", label(&pb).join(" ")),
        format!("stably homotopic: {word}"),
    ];
    let report = Report::new(lines, result, checks);
    Ok(if word == "undecided" { report.undecided() } else { report })
}

fn validate_action(common: &Common) -> Result<Report, CliError> {
    let ring = common.ring()?;
    let um = unimodular::build_um_action(common.n, &ring)?;
    let violations = um.action().validate();
    let mut checks = vec![Check::new(
        "Um_n axioms",
        violations.is_empty(),
        format!("{} points, {} indices", um.action().len(), um.action().index_count()),
    )
    .with_witnesses(violations.iter().take(8).map(|v| format!("{}: {}", v.axiom, v.detail)).collect())];
    let data = ElementaryData::build(common.n, &ring, common.cap_closure)?;
    let uc = covering::universal_cover(&data)?;
    let cover_violations = uc.cover.action().validate();
    checks.push(
        Check::new(
            "E_n/(EP_n)_2 axioms",
            cover_violations.is_empty(),
            format!("{} cosets", uc.cover.len()),
        )
        .with_witnesses(
            cover_violations
                .iter()
                .take(8)
                .map(|v| format!("{}: {}", v.axiom, v.detail))
                .collect(),
        ),
    );
    checks.push(Check::new(
        "coset action independent of representative",
        uc.cover.is_well_defined(&data.family),
        "",
    ));
    let covering_defect = covering::is_covering(&uc.projection, uc.cover.action(), uc.base.action())
        .map_err(|e| CliError::Inconsistent(e.to_string()))?;
    checks.push(Check::new(
        "E_n/(EP_n)_2 -> E_n/EP_n is a covering",
        covering_defect.is_ok(),
        covering_defect
            .err()
            .map(|d| format!("at {}: {}", d.point, d.reason))
            .unwrap_or_default(),
    ));
    let lines = vec![format!(
        "global actions over {} with n = {}: Um_n has {} points, E_n/(EP_n)_2 has {}",
        ring.spec(),
        common.n,
        um.rows.len(),
        uc.cover.len()
    )];
    let result = json!({ "um_points": um.rows.len(), "cover_points": uc.cover.len() });
    Ok(Report::new(lines, result, checks))
}
