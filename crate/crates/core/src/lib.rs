//! Verification of Knowledge and Action Bases over DL-Lite_A.
pub mod analysis;
pub mod dllite;
pub mod kab;
pub mod mucalc;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod parse;
pub mod repair;
pub mod ts;

pub use dllite::{ABox, Assertion, GroundTerm, Reasoner, SkolemCall, TBox};
pub use kab::{KabSpec, QueryMode};
pub use ts::{build_ts, BuildError, BuildLimits, Semantics, TransitionSystem};
pub use mucalc::{model_check, tau, MuFormula};
pub use parse::{parse_abox, parse_kab, parse_properties, parse_property, ParseError};
pub use repair::{b_repairs, c_repair, cqa_answers, viol, RepairSet};
