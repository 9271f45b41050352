//! Transition systems of a KAB under the six execution semantics, built with
//! equality-commitment pruning and canonical fresh values.

mod build;
pub mod commit;
pub mod export;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dllite::{ABox, GroundTerm, TBox};
use crate::kab::{QueryMode, ServiceCallMap, SpecError};

pub use build::{action_successors, build_ts, build_ts_with, repair_successors, BuildOptions};
pub use commit::{canonical_theta, equality_commitments, EqualityCommitment, FreshPolicy, Placement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Semantics {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "b")]
    Bold,
    #[serde(rename = "c")]
    Certain,
    #[serde(rename = "eb")]
    ExtBold,
    #[serde(rename = "ec")]
    ExtCertain,
    #[serde(rename = "it")]
    Tolerant,
}

impl Semantics {
    pub const ALL: [Semantics; 6] = [
        Semantics::Standard,
        Semantics::Bold,
        Semantics::Certain,
        Semantics::ExtBold,
        Semantics::ExtCertain,
        Semantics::Tolerant,
    ];

    /// Semantics that alternate action steps and repair steps.
    pub fn is_two_step(self) -> bool {
        matches!(
            self,
            Semantics::Bold | Semantics::Certain | Semantics::ExtBold | Semantics::ExtCertain
        )
    }

    pub fn is_extended(self) -> bool {
        matches!(self, Semantics::ExtBold | Semantics::ExtCertain)
    }

    /// Consistent query answering for the inconsistency-tolerant semantics,
    /// certain answers otherwise.
    pub fn default_query_mode(self) -> QueryMode {
        match self {
            Semantics::Tolerant => QueryMode::Cqa,
            _ => QueryMode::Certain,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Standard => "standard",
            Semantics::Bold => "b",
            Semantics::Certain => "c",
            Semantics::ExtBold => "eb",
            Semantics::ExtCertain => "ec",
            Semantics::Tolerant => "it",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Semantics::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown semantics `{s}`"))
    }
}

/// `⟨A, m⟩`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TsState {
    pub abox: ABox,
    pub map: ServiceCallMap,
}

impl TsState {
    /// Constants the state has seen: ABox constants, call values and call arguments.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = self.abox.constants();
        for (call, v) in &self.map {
            out.insert(v.clone());
            out.extend(call.args.iter().cloned());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairKind {
    Bold,
    Certain,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Action {
        action: String,
        sigma: Vec<(String, String)>,
        commitment: String,
    },
    Repair(RepairKind),
}

impl EdgeLabel {
    pub fn action_name(&self) -> Option<&str> {
        match self {
            EdgeLabel::Action { action, .. } => Some(action),
            EdgeLabel::Repair(_) => None,
        }
    }

    pub fn is_repair(&self) -> bool {
        matches!(self, EdgeLabel::Repair(_))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Action {
                action,
                sigma,
                commitment,
            } => {
                let args: Vec<String> = sigma.iter().map(|(p, v)| format!("{p}={v}")).collect();
                write!(f, "{action}({})", args.join(","))?;
                if !commitment.is_empty() {
                    write!(f, "[{commitment}]")?;
                }
                Ok(())
            }
            EdgeLabel::Repair(RepairKind::Bold) => f.write_str("repair:b"),
            EdgeLabel::Repair(RepairKind::Certain) => f.write_str("repair:c"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub label: EdgeLabel,
    pub dst: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BuildLimits {
    pub max_states: Option<usize>,
    pub max_run_domain: Option<usize>,
    pub max_depth: Option<usize>,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits {
            max_states: Some(100_000),
            max_run_domain: Some(64),
            max_depth: Some(256),
        }
    }
}

impl BuildLimits {
    pub fn unbounded() -> Self {
        BuildLimits {
            max_states: None,
            max_run_domain: None,
            max_depth: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    States,
    RunDomain,
    Depth,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::States => "max_states",
            LimitKind::RunDomain => "max_run_domain",
            LimitKind::Depth => "max_depth",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("limit exceeded: {kind} = {bound} (the KAB may not be run-bounded)")]
    LimitExceeded { kind: LimitKind, bound: usize },
    #[error("the initial ABox is inconsistent with the TBox")]
    InconsistentInitialAbox,
    #[error(transparent)]
    InvalidSpec(#[from] SpecError),
}

/// A finite (pruned) transition system.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    pub(crate) semantics: Semantics,
    pub(crate) query_mode: QueryMode,
    pub(crate) tbox: TBox,
    pub(crate) states: Vec<TsState>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) succ: Vec<Vec<usize>>,
    pub(crate) active_domain: BTreeSet<GroundTerm>,
    pub(crate) fixed: BTreeSet<String>,
    pub(crate) limits: BuildLimits,
}

impl TransitionSystem {
    /// Assembles a system from explicit parts; state 0 is initial.
    pub fn from_parts(
        semantics: Semantics,
        query_mode: QueryMode,
        tbox: TBox,
        states: Vec<TsState>,
        edges: impl IntoIterator<Item = Edge>,
        fixed: BTreeSet<String>,
        limits: BuildLimits,
    ) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let mut succ = vec![Vec::new(); states.len()];
        for e in &edges {
            succ[e.src].push(e.dst);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let active_domain = states.iter().flat_map(|s| s.abox.adom()).collect();
        TransitionSystem {
            semantics,
            query_mode,
            tbox,
            states,
            edges: edges.into_iter().collect(),
            succ,
            active_domain,
            fixed,
            limits,
        }
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn query_mode(&self) -> QueryMode {
        self.query_mode
    }

    pub fn tbox(&self) -> &TBox {
        &self.tbox
    }

    pub fn states(&self) -> &[TsState] {
        &self.states
    }

    pub fn state(&self, id: usize) -> &TsState {
        &self.states[id]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn successors(&self, id: usize) -> &[usize] {
        &self.succ[id]
    }

    pub fn out_edges(&self, id: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == id)
    }

    /// Union of the ABox domains of all states.
    pub fn active_domain(&self) -> &BTreeSet<GroundTerm> {
        &self.active_domain
    }

    /// Constants that bisimulations must fix.
    pub fn fixed_constants(&self) -> &BTreeSet<String> {
        &self.fixed
    }

    pub fn limits(&self) -> BuildLimits {
        self.limits
    }

    pub fn find_state(&self, abox: &ABox, map: &ServiceCallMap) -> Option<usize> {
        self.states
            .iter()
            .position(|s| &s.abox == abox && &s.map == map)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.succ[src].binary_search(&dst).is_ok()
    }
}
