mod common;

use std::collections::{BTreeMap, BTreeSet};

use kab_core::dllite::Reasoner;
use kab_core::kab::{do_effects, legal_assignments};
use kab_core::oracle::{
    check_bisimilar, oracle_b_repairs, oracle_certain_answers, oracle_consistency, ChaseConfig,
};
use kab_core::ts::{
    build_ts, build_ts_with, canonical_theta, equality_commitments, BuildOptions, FreshPolicy,
};
use kab_core::{
    b_repairs, c_repair, model_check, parse_property, ABox, Assertion, BuildLimits, GroundTerm,
    MuFormula, QueryMode, Semantics, SkolemCall,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> common::Instance {
    common::random_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn rename(h: &BTreeMap<String, String>, c: &str) -> String {
    h.get(c).cloned().unwrap_or_else(|| c.to_string())
}

fn rename_term(h: &BTreeMap<String, String>, t: &GroundTerm) -> GroundTerm {
    match t {
        GroundTerm::Constant(c) => GroundTerm::Constant(rename(h, c)),
        GroundTerm::Call(call) => GroundTerm::Call(SkolemCall {
            function: call.function.clone(),
            args: call.args.iter().map(|a| rename(h, a)).collect(),
        }),
    }
}

fn tickets_abox() -> impl Strategy<Value = ABox> {
    let ind = prop::sample::select(vec!["a", "b", "c", "e"]);
    let fact = (0..5usize, ind.clone(), ind).prop_map(|(p, x, y)| match p {
        0 => Assertion::concept("Req", x),
        1 => Assertion::concept("Item", x),
        2 => Assertion::concept("Done", x),
        3 => Assertion::concept("Log", x),
        _ => Assertion::role("Ticket", x, y),
    });
    prop::collection::vec(fact, 0..6).prop_map(|v| v.into_iter().collect())
}

/// Permutations of the individuals outside the fixed constants of the tickets KAB.
fn renaming() -> impl Strategy<Value = BTreeMap<String, String>> {
    Just(vec!["b", "c", "e"]).prop_shuffle().prop_map(|img| {
        ["b", "c", "e"]
            .iter()
            .zip(img)
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    })
}

fn leaf() -> impl Strategy<Value = MuFormula> {
    prop::sample::select(vec![
        "[C(a)]",
        "exists x.[D(x)]",
        "forall x.[C(x)]",
        "true",
        "![G(a)]",
        "exists x.([C(x)] & <>[G(x)])",
    ])
    .prop_map(|s| parse_property(s).unwrap())
}

fn body() -> impl Strategy<Value = MuFormula> {
    let base = prop_oneof![leaf(), Just(MuFormula::var("Z"))];
    base.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MuFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MuFormula::or(a, b)),
            (leaf(), inner.clone()).prop_map(|(a, b)| MuFormula::implies(MuFormula::not(a), b)),
            inner.clone().prop_map(MuFormula::diamond),
            inner.prop_map(MuFormula::boxed),
        ]
    })
}

fn closed_formula() -> impl Strategy<Value = MuFormula> {
    (body(), any::<bool>()).prop_map(|(b, least)| {
        if least {
            MuFormula::mu("Z", b)
        } else {
            MuFormula::nu("Z", b)
        }
    })
}

fn semantics() -> impl Strategy<Value = Semantics> {
    prop::sample::select(Semantics::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rewriting_matches_the_chase(seed in any::<u64>()) {
        let inst = instance(seed);
        let ours: BTreeSet<_> = Reasoner::new(inst.tbox.clone())
            .certain_answers(&inst.query, &inst.abox)
            .substitutions()
            .into_iter()
            .collect();
        let chase = oracle_certain_answers(&inst.query, &inst.tbox, &inst.abox, &ChaseConfig::default()).unwrap();
        prop_assert_eq!(ours, chase);
    }

    #[test]
    fn consistency_matches_the_chase(seed in any::<u64>()) {
        let inst = instance(seed);
        let ours = Reasoner::new(inst.tbox.clone()).is_consistent(&inst.abox);
        prop_assert_eq!(ours, oracle_consistency(&inst.tbox, &inst.abox, &ChaseConfig::default()).unwrap());
    }

    #[test]
    fn b_repairs_match_enumeration(seed in any::<u64>()) {
        let inst = instance(seed);
        prop_assert_eq!(b_repairs(&inst.abox, &inst.tbox), oracle_b_repairs(&inst.abox, &inst.tbox).unwrap());
    }

    #[test]
    fn c_repair_is_below_every_b_repair(seed in any::<u64>()) {
        let inst = instance(seed);
        let c = c_repair(&inst.abox, &inst.tbox);
        for r in b_repairs(&inst.abox, &inst.tbox).iter() {
            prop_assert!(c.iter().all(|f| r.contains(f)));
        }
    }

    #[test]
    fn do_is_equivariant(a in tickets_abox(), h in renaming()) {
        let spec = common::kab("tickets");
        let r = Reasoner::new(spec.tbox.clone());
        let ha = a.map_terms(|t| rename_term(&h, t));
        let moved: BTreeSet<_> = legal_assignments(&spec, &r, &a, QueryMode::Certain)
            .into_iter()
            .map(|(i, s)| (i, s.into_iter().map(|(p, v)| (p, rename_term(&h, &v))).collect::<BTreeMap<_, _>>()))
            .collect();
        let direct: BTreeSet<_> = legal_assignments(&spec, &r, &ha, QueryMode::Certain).into_iter().collect();
        prop_assert_eq!(&moved, &direct);
        for (i, sigma) in legal_assignments(&spec, &r, &a, QueryMode::Certain) {
            let action = &spec.actions[i];
            let out = do_effects(&r, &a, action, &sigma, QueryMode::Certain);
            let hsigma = sigma.iter().map(|(p, v)| (p.clone(), rename_term(&h, v))).collect();
            let hout = do_effects(&r, &ha, action, &hsigma, QueryMode::Certain);
            prop_assert_eq!(out.map_terms(|t| rename_term(&h, t)), hout);
            prop_assert_eq!(do_effects(&r, &a, action, &sigma, QueryMode::Certain), out);
        }
    }

    #[test]
    fn representatives_extend_maps(
        n in 1usize..=3,
        extra in prop::collection::btree_set("[a-d]", 0..3),
        used_fresh in prop::collection::btree_set(0usize..4, 0..3),
        reverse in any::<bool>(),
        skip in 0usize..4,
    ) {
        let new: BTreeSet<SkolemCall> = (0..n).map(|i| SkolemCall::new(format!("f{i}"), &["a"])).collect();
        let old = SkolemCall::new("g", &["a"]);
        let m: BTreeMap<SkolemCall, String> = [(old.clone(), "a".to_string())].into();
        let constants: BTreeSet<String> = extra.into_iter().chain(["a".to_string()]).collect();
        let used: BTreeSet<String> = constants
            .iter()
            .cloned()
            .chain(used_fresh.into_iter().map(|i| format!("$v{i}")))
            .collect();
        for h in equality_commitments(&new, &constants) {
            let theta = canonical_theta(&h, &used, FreshPolicy { reverse, skip });
            prop_assert!(h.respected_by(&theta, &constants));
            prop_assert!(theta.keys().all(|c| !m.contains_key(c)));
            for v in theta.values() {
                prop_assert!(constants.contains(v) || !used.contains(v));
            }
            let mut union = m.clone();
            union.extend(theta.clone());
            prop_assert_eq!(union.len(), m.len() + theta.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prunings_are_bisimilar_and_agree(
        fixture in prop::sample::select(common::FIXTURES.to_vec()),
        sem in semantics(),
        reverse in any::<bool>(),
        skip in 0usize..6,
        f in closed_formula(),
    ) {
        let spec = common::kab(fixture);
        let a = build_ts(&spec, sem, BuildLimits::default()).unwrap();
        let opts = BuildOptions { fresh: FreshPolicy { reverse, skip }, ..Default::default() };
        let b = build_ts_with(&spec, sem, &opts).unwrap();
        prop_assert!(check_bisimilar(&a, &b).unwrap());
        for (_, p) in common::suite(fixture).iter().chain([(String::new(), f)].iter()) {
            let va = model_check(&a, p, a.query_mode()).unwrap().verdict;
            let vb = model_check(&b, p, b.query_mode()).unwrap().verdict;
            prop_assert_eq!(va, vb);
        }
    }

    #[test]
    fn closed_formulas_ignore_the_initial_valuation(sem in semantics(), f in closed_formula()) {
        let ts = build_ts(&common::kab("running"), sem, BuildLimits::default()).unwrap();
        let base = model_check(&ts, &f, ts.query_mode()).unwrap();
        for wrapped in [MuFormula::mu("Y", f.clone()), MuFormula::nu("Y", f.clone())] {
            let r = model_check(&ts, &wrapped, ts.query_mode()).unwrap();
            prop_assert_eq!(&r.extension, &base.extension);
        }
    }

    #[test]
    fn formulas_round_trip(f in closed_formula()) {
        prop_assert_eq!(parse_property(&f.to_string()).unwrap(), f);
    }
}

#[test]
fn random_instances_touch_every_axiom_kind() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let insts: Vec<_> = (0..200).map(|_| common::random_instance(&mut rng)).collect();
    assert!(insts.iter().any(|i| !Reasoner::new(i.tbox.clone()).is_consistent(&i.abox)));
    assert!(insts.iter().any(|i| i.tbox.positive().len() >= 2));
    assert!(insts.iter().any(|i| i.query.cqs[0].atoms.len() == 2));
    assert!(insts.iter().all(|i| i.tbox.len() <= 4 && i.abox.len() <= 6));
}
