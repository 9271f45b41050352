//! The unpruned construction: every total assignment of new service calls into
//! an explicit finite domain.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::dllite::syntax::{STATE_CONCEPT, TEMP_CONSTANT, VIOL_CONCEPT};
use crate::dllite::{ABox, Assertion, Reasoner, SkolemCall};
use crate::kab::{calls, do_effects, ground, legal_assignments, KabSpec};
use crate::repair::{b_repairs_with, c_repair_with};
use crate::ts::{
    BuildError, BuildLimits, Edge, EdgeLabel, LimitKind, RepairKind, Semantics, TransitionSystem,
    TsState,
};

/// Every total function from `calls` into `domain`.
fn all_thetas(calls: &[SkolemCall], domain: &[String]) -> Vec<BTreeMap<SkolemCall, String>> {
    let mut out = vec![BTreeMap::new()];
    for c in calls {
        out = out
            .into_iter()
            .flat_map(|theta| {
                domain.iter().map(move |d| {
                    let mut t = theta.clone();
                    t.insert(c.clone(), d.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Builds the system with service-call results drawn from `domain`, which is
/// extended with the initial ABox constants and the distinguished constants.
pub fn oracle_full_ts(
    spec: &KabSpec,
    semantics: Semantics,
    domain: &BTreeSet<String>,
    limits: BuildLimits,
) -> Result<TransitionSystem, BuildError> {
    spec.validate()?;
    let reasoner = Reasoner::new(spec.tbox.clone());
    if !reasoner.is_consistent(&spec.a0) {
        return Err(BuildError::InconsistentInitialAbox);
    }
    let mode = semantics.default_query_mode();
    let fixed = spec.fixed_constants();
    let mut dom: BTreeSet<String> = domain.clone();
    dom.extend(fixed.iter().cloned());
    let dom: Vec<String> = dom.into_iter().collect();
    let marker = Assertion::concept(STATE_CONCEPT, TEMP_CONSTANT);

    let s0 = TsState {
        abox: spec.a0.clone(),
        map: BTreeMap::new(),
    };
    let mut states = vec![s0.clone()];
    let mut ids: HashMap<TsState, usize> = [(s0, 0)].into();
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let s = states[id].clone();
        let mut succ: Vec<(EdgeLabel, TsState)> = Vec::new();
        if semantics.is_two_step() && s.abox.contains(&marker) {
            let mut pre = s.abox.clone();
            pre.remove(&marker);
            let viol = reasoner.viol(&pre);
            let (kind, repairs): (RepairKind, Vec<ABox>) = match semantics {
                Semantics::Bold | Semantics::ExtBold => {
                    (RepairKind::Bold, b_repairs_with(&reasoner, &pre).iter().cloned().collect())
                }
                _ => (RepairKind::Certain, vec![c_repair_with(&reasoner, &pre)]),
            };
            for mut r in repairs {
                if semantics.is_extended() {
                    for d in &viol {
                        r.insert(Assertion::concept(VIOL_CONCEPT, d.clone()));
                    }
                }
                succ.push((
                    EdgeLabel::Repair(kind),
                    TsState {
                        abox: r,
                        map: s.map.clone(),
                    },
                ));
            }
        } else {
            for (idx, sigma) in legal_assignments(spec, &reasoner, &s.abox, mode) {
                let action = &spec.actions[idx];
                let facts = do_effects(&reasoner, &s.abox, action, &sigma, mode);
                let new: Vec<SkolemCall> =
                    calls(&facts).into_iter().filter(|c| !s.map.contains_key(c)).collect();
                for theta in all_thetas(&new, &dom) {
                    let mut map = s.map.clone();
                    map.extend(theta.clone());
                    let mut abox = ground(&facts, &map).expect("total assignment");
                    match semantics {
                        Semantics::Standard if !reasoner.is_consistent(&abox) => continue,
                        Semantics::Standard | Semantics::Tolerant => {}
                        _ => {
                            abox.insert(marker.clone());
                        }
                    }
                    let shown: Vec<String> = theta.iter().map(|(c, v)| format!("{c}={v}")).collect();
                    let label = EdgeLabel::Action {
                        action: action.name.clone(),
                        sigma: sigma.iter().map(|(p, v)| (p.clone(), v.to_string())).collect(),
                        commitment: shown.join(";"),
                    };
                    succ.push((label, TsState { abox, map }));
                }
            }
        }
        for (label, t) in succ {
            let dst = match ids.get(&t) {
                Some(&d) => d,
                None => {
                    let d = states.len();
                    if let Some(b) = limits.max_states {
                        if d + 1 > b {
                            return Err(BuildError::LimitExceeded {
                                kind: LimitKind::States,
                                bound: b,
                            });
                        }
                    }
                    ids.insert(t.clone(), d);
                    states.push(t);
                    queue.push_back(d);
                    d
                }
            };
            edges.push(Edge { src: id, label, dst });
        }
    }
    Ok(TransitionSystem::from_parts(
        semantics, mode, spec.tbox.clone(), states, edges, fixed, limits,
    ))
}
