//! Acceptance criteria 1-12. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use kab_core::analysis::{dependency_graph, is_weakly_acyclic};
use kab_core::dllite::{Reasoner, Substitution};
use kab_core::oracle::{
    check_bisimilar, oracle_b_repairs, oracle_certain_answers, oracle_consistency, oracle_full_ts,
    ChaseConfig,
};
use kab_core::ts::{build_ts, build_ts_with, BuildOptions, FreshPolicy};
use kab_core::{
    b_repairs, c_repair, cqa_answers, model_check, tau, viol, ABox, Assertion, BuildError,
    BuildLimits, MuFormula, Semantics, TBox, TransitionSystem,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const C1_LIMIT: Duration = Duration::from_millis(1);
const C5_LIMIT: Duration = Duration::from_secs(10);
const C6_LIMIT: Duration = Duration::from_secs(30);
const C8_LIMIT: Duration = Duration::from_secs(10);
const C12_LIMIT: Duration = Duration::from_secs(60);

const RANDOM_INSTANCES: u64 = 300;
const RANDOM_SEED: u64 = 0x6b61_6232;
const FULL_TS_EXTRA_VALUES: usize = 4;

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn abox(facts: &[Assertion]) -> ABox {
    facts.iter().cloned().collect()
}

fn running_tbox() -> TBox {
    common::kab("running").tbox
}

fn verdict(ts: &TransitionSystem, f: &MuFormula) -> Result<bool, String> {
    model_check(ts, f, ts.query_mode())
        .map(|r| r.verdict)
        .map_err(|e| e.to_string())
}

fn build(name: &str, semantics: Semantics) -> Result<TransitionSystem, String> {
    build_ts(&common::kab(name), semantics, BuildLimits::default())
        .map_err(|e| format!("{name}/{semantics}: {e}"))
}

fn c1() -> Outcome {
    let t = running_tbox();
    let a = abox(&[Assertion::concept("C", "a"), Assertion::concept("D", "a")]);
    let expected: BTreeSet<ABox> = [
        abox(&[Assertion::concept("C", "a")]),
        abox(&[Assertion::concept("D", "a")]),
    ]
    .into();
    ensure(b_repairs(&a, &t).into_set() == expected, "b-repairs differ")?;
    ensure(c_repair(&a, &t).is_empty(), "c-repair is not empty")?;
    let mut times: Vec<Duration> = (0..11)
        .map(|_| {
            let start = Instant::now();
            let r = b_repairs(&a, &t);
            let c = c_repair(&a, &t);
            std::hint::black_box((r, c));
            start.elapsed()
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    ensure(median < C1_LIMIT, format!("median {median:?} over {C1_LIMIT:?}"))?;
    Ok(format!("median {median:?}"))
}

fn c2() -> Outcome {
    let ts = build("running", Semantics::Standard)?;
    let names: Vec<&str> = ts.out_edges(0).filter_map(|e| e.label.action_name()).collect();
    ensure(!names.contains(&"g1"), "s0 has a g1 successor")?;
    ensure(names.contains(&"g2"), "s0 has no g2 successor")?;
    Ok(format!("{} g2 successors", names.len()))
}

fn c3() -> Outcome {
    let ts = build("running", Semantics::Bold)?;
    let empty = BTreeMap::new();
    let marked = abox(&[
        Assertion::concept("C", "a"),
        Assertion::concept("D", "a"),
        Assertion::concept("State", "temp"),
    ]);
    let m = ts.find_state(&marked, &empty).ok_or("marked state missing")?;
    ensure(ts.has_edge(0, m), "no edge from s0 to the marked state")?;
    for end in ["C", "D"] {
        let s = ts
            .find_state(&abox(&[Assertion::concept(end, "a")]), &empty)
            .ok_or(format!("state {{{end}(a)}} missing"))?;
        ensure(ts.has_edge(m, s), format!("no repair edge to {{{end}(a)}}"))?;
    }
    Ok("both runs present".into())
}

fn c4() -> Outcome {
    let t = running_tbox();
    let a = abox(&[Assertion::concept("C", "a"), Assertion::concept("D", "a")]);
    let labels = viol(&a, &t);
    let expected: BTreeSet<String> = t.labels().map(str::to_string).collect();
    ensure(labels == expected && labels.len() == 1, format!("viol = {labels:?}"))?;
    let label = labels.into_iter().next().unwrap();
    let ts = build("running", Semantics::ExtBold)?;
    let empty = BTreeMap::new();
    let marked = abox(&[
        Assertion::concept("C", "a"),
        Assertion::concept("D", "a"),
        Assertion::concept("State", "temp"),
    ]);
    let m = ts.find_state(&marked, &empty).ok_or("marked state missing")?;
    let succ = ts.successors(m);
    ensure(succ.len() == 2, format!("{} repair successors", succ.len()))?;
    let tag = Assertion::concept("Viol", label.as_str());
    for &s in succ {
        ensure(ts.state(s).abox.contains(&tag), format!("repair successor {s} lacks Viol({label})"))?;
    }
    Ok(format!("viol = {{{label}}}"))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in common::FIXTURES {
        let spec = common::kab(name);
        let suite = common::suite(name);
        ensure(suite.len() >= 10, format!("{name}: suite has {} formulas", suite.len()))?;
        for s in Semantics::ALL {
            let a = build_ts(&spec, s, BuildLimits::default()).map_err(|e| e.to_string())?;
            let opts = BuildOptions {
                fresh: FreshPolicy { reverse: true, skip: 3 },
                ..Default::default()
            };
            let b = build_ts_with(&spec, s, &opts).map_err(|e| e.to_string())?;
            let bisim = check_bisimilar(&a, &b).map_err(|e| e.to_string())?;
            ensure(bisim, format!("{name}/{s}: prunings not bisimilar"))?;
            for (pname, f) in &suite {
                ensure(verdict(&a, f)? == verdict(&b, f)?, format!("{name}/{s}: {pname} differs"))?;
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < C5_LIMIT, format!("{t:?} over {C5_LIMIT:?}"))?;
    Ok(format!("{checked} verdict pairs in {t:?}"))
}

fn answers_set(r: &kab_core::dllite::Relation) -> BTreeSet<Substitution> {
    r.substitutions().into_iter().collect()
}

fn c6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let cfg = ChaseConfig::default();
    let mut inconsistent = 0;
    for i in 0..RANDOM_INSTANCES {
        let inst = common::random_instance(&mut rng);
        let r = Reasoner::new(inst.tbox.clone());
        let ours = answers_set(&r.certain_answers(&inst.query, &inst.abox));
        let theirs = oracle_certain_answers(&inst.query, &inst.tbox, &inst.abox, &cfg).map_err(|e| e.to_string())?;
        ensure(ours == theirs, format!("instance {i}: certain answers differ: {inst:?}"))?;
        let consistent = r.is_consistent(&inst.abox);
        let oc = oracle_consistency(&inst.tbox, &inst.abox, &cfg).map_err(|e| e.to_string())?;
        ensure(consistent == oc, format!("instance {i}: consistency differs: {inst:?}"))?;
        let br = b_repairs(&inst.abox, &inst.tbox);
        let ob = oracle_b_repairs(&inst.abox, &inst.tbox).map_err(|e| e.to_string())?;
        ensure(br == ob, format!("instance {i}: b-repairs differ: {inst:?}"))?;
        inconsistent += usize::from(!consistent);
    }
    let t = start.elapsed();
    ensure(t < C6_LIMIT, format!("{t:?} over {C6_LIMIT:?}"))?;
    Ok(format!("{RANDOM_INSTANCES} instances ({inconsistent} inconsistent) in {t:?}"))
}

fn total_calls(ts: &TransitionSystem) -> usize {
    ts.states()
        .iter()
        .flat_map(|s| s.map.keys())
        .collect::<BTreeSet<_>>()
        .len()
}

fn c7() -> Outcome {
    let domain: BTreeSet<String> = (0..FULL_TS_EXTRA_VALUES).map(|i| format!("d{i}")).collect();
    let mut compared = 0;
    let mut fixtures = Vec::new();
    for name in common::FIXTURES {
        let spec = common::kab(name);
        let suite = common::suite(name);
        for s in Semantics::ALL {
            let pruned = build(name, s)?;
            if total_calls(&pruned) > 2 {
                continue;
            }
            let full = oracle_full_ts(&spec, s, &domain, BuildLimits::default()).map_err(|e| e.to_string())?;
            for (pname, f) in &suite {
                ensure(
                    verdict(&pruned, f)? == verdict(&full, f)?,
                    format!("{name}/{s}: {pname} differs from the unpruned system"),
                )?;
                compared += 1;
            }
        }
        fixtures.push(name);
    }
    ensure(!fixtures.is_empty(), "no fixture has at most two calls")?;
    Ok(format!("{compared} verdicts over {fixtures:?}"))
}

fn c8() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in common::FIXTURES {
        let s = build(name, Semantics::Standard)?;
        let eb = build(name, Semantics::ExtBold)?;
        let ec = build(name, Semantics::ExtCertain)?;
        for (pname, f) in common::suite(name) {
            let t = tau(&f);
            let vs = verdict(&s, &f)?;
            let veb = verdict(&eb, &t)?;
            let vec = verdict(&ec, &t)?;
            ensure(vs == veb && veb == vec, format!("{name}: {pname} gives s={vs} eb={veb} ec={vec}"))?;
            checked += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < C8_LIMIT, format!("{t:?} over {C8_LIMIT:?}"))?;
    Ok(format!("{checked} formulas in {t:?}"))
}

fn c9() -> Outcome {
    ensure(is_weakly_acyclic(&dependency_graph(&common::kab("running"))), "running is not weakly acyclic")?;
    let gcycle = common::kab("running_gcycle");
    ensure(!is_weakly_acyclic(&dependency_graph(&gcycle)), "g-cycle variant certified weakly acyclic")?;
    for name in common::FIXTURES {
        ensure(is_weakly_acyclic(&dependency_graph(&common::kab(name))), format!("{name} is not weakly acyclic"))?;
        for s in Semantics::ALL {
            build(name, s)?;
        }
    }
    let limits = BuildLimits {
        max_states: Some(200),
        ..BuildLimits::default()
    };
    match build_ts(&gcycle, Semantics::Standard, limits) {
        Err(BuildError::LimitExceeded { kind, bound }) => Ok(format!("g-cycle stopped by {kind} = {bound}")),
        Err(e) => Err(format!("g-cycle: unexpected error {e}")),
        Ok(ts) => Err(format!("g-cycle built {} states", ts.len())),
    }
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let cfg = ChaseConfig::default();
    let (mut consistent, mut inconsistent) = (0, 0);
    for i in 0..RANDOM_INSTANCES {
        let inst = common::random_instance(&mut rng);
        let cqa = answers_set(&cqa_answers(&inst.query, &inst.tbox, &inst.abox));
        if Reasoner::new(inst.tbox.clone()).is_consistent(&inst.abox) {
            let ca = answers_set(&Reasoner::new(inst.tbox.clone()).certain_answers(&inst.query, &inst.abox));
            ensure(cqa == ca, format!("instance {i}: cqa differs from certain answers: {inst:?}"))?;
            consistent += 1;
        } else {
            let mut meet: Option<BTreeSet<Substitution>> = None;
            for r in oracle_b_repairs(&inst.abox, &inst.tbox).map_err(|e| e.to_string())?.iter() {
                let ans = oracle_certain_answers(&inst.query, &inst.tbox, r, &cfg).map_err(|e| e.to_string())?;
                meet = Some(match meet {
                    None => ans,
                    Some(m) => m.intersection(&ans).cloned().collect(),
                });
            }
            let meet = meet.ok_or("no repairs")?;
            ensure(cqa == meet, format!("instance {i}: cqa differs from repair intersection: {inst:?}"))?;
            inconsistent += 1;
        }
    }
    Ok(format!("{consistent} consistent, {inconsistent} inconsistent"))
}

fn has_concept(ts: &TransitionSystem, s: usize, concept: &str, ind: Option<&str>) -> bool {
    ts.state(s).abox.iter().any(|a| match a {
        Assertion::Concept { concept: c, term } => {
            c == concept && ind.is_none_or(|i| term.as_constant() == Some(i))
        }
        Assertion::Role { .. } => false,
    })
}

/// Optimistic: some sequence of action/repair pairs reaches a state with a D fact.
fn search_optimistic(ts: &TransitionSystem) -> bool {
    let mut seen = BTreeSet::from([ts.initial()]);
    let mut frontier = vec![ts.initial()];
    while let Some(s) = frontier.pop() {
        if has_concept(ts, s, "D", None) {
            return true;
        }
        for &m in ts.successors(s) {
            for &r in ts.successors(m) {
                if seen.insert(r) {
                    frontier.push(r);
                }
            }
        }
    }
    false
}

/// Robust: some action wins for every repair, within `depth` rounds.
fn search_robust(ts: &TransitionSystem, s: usize, depth: usize) -> bool {
    if has_concept(ts, s, "D", Some("a")) {
        return true;
    }
    depth > 0
        && ts.successors(s).iter().any(|&m| {
            ts.successors(m)
                .iter()
                .all(|&r| search_robust(ts, r, depth - 1))
        })
}

fn c11() -> Outcome {
    let ts = build("running", Semantics::Bold)?;
    let suite: BTreeMap<String, MuFormula> = common::suite("running").into_iter().collect();
    let opt = verdict(&ts, &suite["opt_d"])?;
    let robust = verdict(&ts, &suite["robust_d"])?;
    let opt_search = search_optimistic(&ts);
    let robust_search = search_robust(&ts, ts.initial(), ts.len());
    ensure(opt_search && !robust_search, "exhaustive search disagrees with the expected verdicts")?;
    ensure(opt == opt_search, format!("optimistic: checker {opt}, search {opt_search}"))?;
    ensure(robust == robust_search, format!("robust: checker {robust}, search {robust_search}"))?;
    Ok(format!("optimistic={opt} robust={robust}"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        (1, "running-example repairs", c1),
        (2, "standard semantics rejects g1", c2),
        (3, "b-system runs", c3),
        (4, "viol labelling in the eb-system", c4),
        (5, "pruning faithfulness", c5),
        (6, "oracle equivalence, reasoning core", c6),
        (7, "oracle equivalence, state space", c7),
        (8, "tau reduction", c8),
        (9, "weak acyclicity", c9),
        (10, "CQA coherence", c10),
        (11, "model-checking verdicts", c11),
    ];
    let suite_start = Instant::now();
    let mut failed = Vec::new();
    for (n, title, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2} ({title}): {detail} [{t:?}]"),
            Err(why) => {
                println!("FAIL criterion {n:>2} ({title}): {why} [{t:?}]");
                failed.push(n);
            }
        }
    }
    let total = suite_start.elapsed();
    if total < C12_LIMIT {
        println!("PASS criterion 12 (whole-suite runtime): {total:?} under {C12_LIMIT:?}");
    } else {
        println!("FAIL criterion 12 (whole-suite runtime): {total:?} over {C12_LIMIT:?}");
        failed.push(12);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
