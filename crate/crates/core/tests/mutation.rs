//! Deliberately broken variants of the main path must be caught by the oracles.

mod common;

use std::collections::BTreeSet;

use kab_core::dllite::{Db, Reasoner, TBox};
use kab_core::oracle::{
    check_bisimilar, oracle_b_repairs, oracle_certain_answers, oracle_consistency, ChaseConfig,
};
use kab_core::ts::{build_ts, Edge};
use kab_core::{b_repairs, model_check, ABox, BuildLimits, RepairSet, Semantics, TransitionSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 99;
const INSTANCES: usize = 300;

fn instances() -> Vec<common::Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..INSTANCES).map(|_| common::random_instance(&mut rng)).collect()
}

#[test]
fn unrewritten_evaluation_is_caught() {
    let cfg = ChaseConfig::default();
    let caught = instances().iter().any(|i| {
        let mutant: BTreeSet<_> = Db::new(&i.abox).eval_ucq(&i.query).substitutions().into_iter().collect();
        mutant != oracle_certain_answers(&i.query, &i.tbox, &i.abox, &cfg).unwrap()
    });
    assert!(caught);
}

#[test]
fn dropping_functionality_is_caught() {
    let cfg = ChaseConfig::default();
    let caught = instances().iter().any(|i| {
        let mut weakened = TBox::new();
        for pi in i.tbox.positive() {
            weakened.add_inclusion(pi.sub.clone(), pi.sup.clone());
        }
        for c in i.tbox.constraints() {
            if !matches!(c.constraint, kab_core::dllite::Constraint::Funct(_)) {
                weakened.add_constraint(c.constraint.clone());
            }
        }
        Reasoner::new(weakened).is_consistent(&i.abox) != oracle_consistency(&i.tbox, &i.abox, &cfg).unwrap()
    });
    assert!(caught);
}

#[test]
fn losing_a_repair_is_caught() {
    let caught = instances().iter().any(|i| {
        let mutant: RepairSet = b_repairs(&i.abox, &i.tbox).iter().take(1).cloned().collect();
        mutant != oracle_b_repairs(&i.abox, &i.tbox).unwrap()
    });
    assert!(caught);
}

#[test]
fn non_maximal_repairs_are_caught() {
    let caught = instances().iter().any(|i| {
        let mutant: RepairSet = b_repairs(&i.abox, &i.tbox)
            .iter()
            .map(|r| r.iter().skip(1).cloned().collect::<ABox>())
            .collect();
        mutant != oracle_b_repairs(&i.abox, &i.tbox).unwrap()
    });
    assert!(caught);
}

fn without_edge(ts: &TransitionSystem, drop: usize) -> TransitionSystem {
    let edges: Vec<Edge> = ts
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != drop)
        .map(|(_, e)| e.clone())
        .collect();
    TransitionSystem::from_parts(
        ts.semantics(),
        ts.query_mode(),
        ts.tbox().clone(),
        ts.states().to_vec(),
        edges,
        ts.fixed_constants().clone(),
        ts.limits(),
    )
}

#[test]
fn a_missing_transition_is_caught() {
    let ts = build_ts(&common::kab("running"), Semantics::Bold, BuildLimits::default()).unwrap();
    let suite = common::suite("running");
    for i in 0..ts.edges().len() {
        let mutant = without_edge(&ts, i);
        let bisim = check_bisimilar(&ts, &mutant).unwrap();
        let differs = suite.iter().any(|(_, f)| {
            model_check(&ts, f, ts.query_mode()).unwrap().verdict
                != model_check(&mutant, f, mutant.query_mode()).unwrap().verdict
        });
        // a verdict change must never go unnoticed by the bisimulation check
        assert!(!(bisim && differs), "edge {i}");
    }
    let caught = (0..ts.edges().len()).any(|i| !check_bisimilar(&ts, &without_edge(&ts, i)).unwrap());
    assert!(caught);
}
