use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::commit::{canonical_theta, equality_commitments, FreshPolicy};
use super::{
    BuildError, BuildLimits, Edge, EdgeLabel, LimitKind, RepairKind, Semantics, TransitionSystem,
    TsState,
};
use crate::dllite::syntax::{STATE_CONCEPT, TEMP_CONSTANT, VIOL_CONCEPT};
use crate::dllite::{ABox, Assertion, Reasoner};
use crate::kab::{calls, do_effects_with, ground, legal_assignments_with, make_leaf, KabSpec, QueryMode};
use crate::repair::{b_repairs_with, c_repair_with};

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub limits: BuildLimits,
    pub fresh: FreshPolicy,
    /// Overrides the semantics' default query mode.
    pub query_mode: Option<QueryMode>,
    pub parallel: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            limits: BuildLimits::default(),
            fresh: FreshPolicy::default(),
            query_mode: None,
            parallel: true,
        }
    }
}

impl From<BuildLimits> for BuildOptions {
    fn from(limits: BuildLimits) -> Self {
        BuildOptions {
            limits,
            ..BuildOptions::default()
        }
    }
}

fn marker() -> Assertion {
    Assertion::concept(STATE_CONCEPT, TEMP_CONSTANT)
}

struct Ctx<'a> {
    spec: &'a KabSpec,
    reasoner: Reasoner,
    semantics: Semantics,
    mode: QueryMode,
    fixed: BTreeSet<String>,
    fresh: FreshPolicy,
}

impl Ctx<'_> {
    fn successors(&self, s: &TsState) -> Vec<(EdgeLabel, TsState)> {
        if self.semantics.is_two_step() && s.abox.contains(&marker()) {
            self.repair_successors(s)
        } else {
            self.action_successors(s)
        }
    }

    fn action_successors(&self, s: &TsState) -> Vec<(EdgeLabel, TsState)> {
        let leaf = make_leaf(&self.reasoner, &s.abox, self.mode);
        let mut out = Vec::new();
        for (idx, sigma) in legal_assignments_with(self.spec, leaf.as_ref()) {
            let action = &self.spec.actions[idx];
            let facts = do_effects_with(leaf.as_ref(), action, &sigma);
            let all_calls = calls(&facts);
            let new_calls: BTreeSet<_> = all_calls
                .iter()
                .filter(|c| !s.map.contains_key(*c))
                .cloned()
                .collect();
            let mut used = s.constants();
            used.extend(self.fixed.iter().cloned());
            used.extend(facts.constants());
            let sigma_label: Vec<(String, String)> = action
                .params
                .iter()
                .map(|p| (p.clone(), sigma[p].to_string()))
                .collect();
            for h in equality_commitments(&new_calls, &used) {
                let theta = canonical_theta(&h, &used, self.fresh);
                let mut map = s.map.clone();
                map.extend(theta);
                let mut abox = ground(&facts, &map).expect("every call is bound");
                match self.semantics {
                    Semantics::Standard => {
                        if !self.reasoner.is_consistent(&abox) {
                            continue;
                        }
                    }
                    Semantics::Tolerant => {}
                    _ => {
                        abox.insert(marker());
                    }
                }
                let label = EdgeLabel::Action {
                    action: action.name.clone(),
                    sigma: sigma_label.clone(),
                    commitment: h.to_string(),
                };
                out.push((label, TsState { abox, map }));
            }
        }
        out
    }

    fn repair_successors(&self, s: &TsState) -> Vec<(EdgeLabel, TsState)> {
        let mut pre = s.abox.clone();
        pre.remove(&marker());
        let (kind, repairs): (RepairKind, Vec<ABox>) = match self.semantics {
            Semantics::Bold | Semantics::ExtBold => (
                RepairKind::Bold,
                b_repairs_with(&self.reasoner, &pre).into_set().into_iter().collect(),
            ),
            _ => (RepairKind::Certain, vec![c_repair_with(&self.reasoner, &pre)]),
        };
        let viol = if self.semantics.is_extended() {
            self.reasoner.viol(&pre)
        } else {
            BTreeSet::new()
        };
        repairs
            .into_iter()
            .map(|mut abox| {
                for d in &viol {
                    abox.insert(Assertion::concept(VIOL_CONCEPT, d.clone()));
                }
                (
                    EdgeLabel::Repair(kind),
                    TsState {
                        abox,
                        map: s.map.clone(),
                    },
                )
            })
            .collect()
    }
}

fn ctx<'a>(spec: &'a KabSpec, semantics: Semantics, opts: &BuildOptions) -> Ctx<'a> {
    Ctx {
        spec,
        reasoner: Reasoner::new(spec.tbox.clone()),
        semantics,
        mode: opts.query_mode.unwrap_or(semantics.default_query_mode()),
        fixed: spec.fixed_constants(),
        fresh: opts.fresh,
    }
}

/// Action-step successors of `state` (for two-step semantics the results carry the marker).
pub fn action_successors(
    state: &TsState,
    spec: &KabSpec,
    semantics: Semantics,
) -> Vec<(EdgeLabel, TsState)> {
    ctx(spec, semantics, &BuildOptions::default()).action_successors(state)
}

/// Repair-step successors of a marked state.
pub fn repair_successors(
    state: &TsState,
    spec: &KabSpec,
    semantics: Semantics,
) -> Vec<(EdgeLabel, TsState)> {
    ctx(spec, semantics, &BuildOptions::default()).repair_successors(state)
}

pub fn build_ts(
    spec: &KabSpec,
    semantics: Semantics,
    limits: BuildLimits,
) -> Result<TransitionSystem, BuildError> {
    build_ts_with(spec, semantics, &limits.into())
}

pub fn build_ts_with(
    spec: &KabSpec,
    semantics: Semantics,
    opts: &BuildOptions,
) -> Result<TransitionSystem, BuildError> {
    spec.validate()?;
    let cx = ctx(spec, semantics, opts);
    if !cx.reasoner.is_consistent(&spec.a0) {
        return Err(BuildError::InconsistentInitialAbox);
    }
    let limits = opts.limits;
    let a0_consts = spec.a0.constants();
    let exceeded = |kind, bound| Err(BuildError::LimitExceeded { kind, bound });

    let mut states = vec![TsState {
        abox: spec.a0.clone(),
        map: Default::default(),
    }];
    let mut index: HashMap<TsState, usize> = HashMap::new();
    index.insert(states[0].clone(), 0);
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut frontier = vec![0usize];
    let mut depth = 0usize;

    while !frontier.is_empty() {
        let expanded: Vec<Vec<(EdgeLabel, TsState)>> = if opts.parallel {
            frontier.par_iter().map(|&id| cx.successors(&states[id])).collect()
        } else {
            frontier.iter().map(|&id| cx.successors(&states[id])).collect()
        };
        let mut next = Vec::new();
        for (&src, succs) in frontier.iter().zip(expanded) {
            for (label, st) in succs {
                let dst = match index.get(&st) {
                    Some(&d) => d,
                    None => {
                        if let Some(b) = limits.max_depth {
                            if depth + 1 > b {
                                return exceeded(LimitKind::Depth, b);
                            }
                        }
                        if let Some(b) = limits.max_run_domain {
                            let mut dom = a0_consts.clone();
                            dom.extend(st.map.values().cloned());
                            dom.extend(st.abox.constants());
                            if dom.len() > b {
                                return exceeded(LimitKind::RunDomain, b);
                            }
                        }
                        let d = states.len();
                        if let Some(b) = limits.max_states {
                            if d + 1 > b {
                                return exceeded(LimitKind::States, b);
                            }
                        }
                        index.insert(st.clone(), d);
                        states.push(st);
                        next.push(d);
                        d
                    }
                };
                edges.insert(Edge { src, label, dst });
            }
        }
        frontier = next;
        depth += 1;
    }

    Ok(TransitionSystem::from_parts(
        semantics,
        cx.mode,
        spec.tbox.clone(),
        states,
        edges,
        cx.fixed,
        limits,
    ))
}
