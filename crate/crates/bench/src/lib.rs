//! Benchmark fixtures shared with the core test suite.

use kab_core::{parse_kab, parse_properties, KabSpec, MuFormula};

pub const RUNNING: &str = include_str!("../../core/tests/fixtures/running.kab");
pub const TICKETS: &str = include_str!("../../core/tests/fixtures/tickets.kab");
pub const OWNS: &str = include_str!("../../core/tests/fixtures/owns.kab");
pub const RUNNING_PROPS: &str = include_str!("../../core/tests/fixtures/running.prop");
pub const TICKETS_PROPS: &str = include_str!("../../core/tests/fixtures/tickets.prop");
pub const OWNS_PROPS: &str = include_str!("../../core/tests/fixtures/owns.prop");

/// `(name, kab, properties)` for every fixture.
pub const FIXTURES: [(&str, &str, &str); 3] = [
    ("running", RUNNING, RUNNING_PROPS),
    ("tickets", TICKETS, TICKETS_PROPS),
    ("owns", OWNS, OWNS_PROPS),
];

pub fn spec(text: &str) -> KabSpec {
    parse_kab(text).expect("fixture parses")
}

pub fn props(text: &str) -> Vec<(String, MuFormula)> {
    parse_properties(text).expect("fixture parses")
}
