//! Equality commitments over new service calls and their canonical representatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dllite::syntax::FRESH_PREFIX;
use crate::dllite::SkolemCall;

/// Where a new service call is placed: with an existing constant, or in a
/// constant-free cell shared with other new calls.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    Constant(String),
    Fresh(usize),
}

/// A partition of constants and new calls with at most one constant per cell.
/// Only the cells holding new calls are stored, since the others do not
/// affect the successor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EqualityCommitment {
    placement: BTreeMap<SkolemCall, Placement>,
}

impl EqualityCommitment {
    pub fn placement(&self) -> &BTreeMap<SkolemCall, Placement> {
        &self.placement
    }

    /// Number of constant-free cells.
    pub fn fresh_cells(&self) -> usize {
        self.placement
            .values()
            .filter_map(|p| match p {
                Placement::Fresh(i) => Some(i + 1),
                Placement::Constant(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// The cells of the commitment that contain new calls, constant-first.
    pub fn cells(&self) -> Vec<(Option<String>, Vec<SkolemCall>)> {
        let mut by_cell: BTreeMap<&Placement, Vec<SkolemCall>> = BTreeMap::new();
        for (call, p) in &self.placement {
            by_cell.entry(p).or_default().push(call.clone());
        }
        by_cell
            .into_iter()
            .map(|(p, calls)| match p {
                Placement::Constant(c) => (Some(c.clone()), calls),
                Placement::Fresh(_) => (None, calls),
            })
            .collect()
    }

    /// Whether `theta` realizes this commitment against `constants`: calls in the same
    /// cell get the same value, calls in fresh cells get values outside `constants`.
    pub fn respected_by(&self, theta: &BTreeMap<SkolemCall, String>, constants: &BTreeSet<String>) -> bool {
        let mut fresh_values: BTreeMap<usize, &str> = BTreeMap::new();
        for (call, p) in &self.placement {
            let Some(v) = theta.get(call) else { return false };
            match p {
                Placement::Constant(c) => {
                    if v != c {
                        return false;
                    }
                }
                Placement::Fresh(i) => {
                    if constants.contains(v) {
                        return false;
                    }
                    if *fresh_values.entry(*i).or_insert(v) != v.as_str() {
                        return false;
                    }
                }
            }
        }
        let distinct: BTreeSet<&str> = fresh_values.values().copied().collect();
        distinct.len() == fresh_values.len()
    }
}

impl fmt::Display for EqualityCommitment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .placement
            .iter()
            .map(|(call, p)| match p {
                Placement::Constant(c) => format!("{call}={c}"),
                Placement::Fresh(i) => format!("{call}=#{i}"),
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// All commitments placing `new_calls` against `constants`, in canonical order.
/// Fresh cells are numbered by first use, so each partition appears once.
pub fn equality_commitments(
    new_calls: &BTreeSet<SkolemCall>,
    constants: &BTreeSet<String>,
) -> Vec<EqualityCommitment> {
    let calls: Vec<&SkolemCall> = new_calls.iter().collect();
    let mut out = Vec::new();
    let mut current: Vec<Placement> = Vec::with_capacity(calls.len());
    enumerate(&calls, constants, 0, &mut current, &mut out);
    out
}

fn enumerate(
    calls: &[&SkolemCall],
    constants: &BTreeSet<String>,
    used_fresh: usize,
    current: &mut Vec<Placement>,
    out: &mut Vec<EqualityCommitment>,
) {
    if current.len() == calls.len() {
        out.push(EqualityCommitment {
            placement: calls.iter().map(|c| (*c).clone()).zip(current.iter().cloned()).collect(),
        });
        return;
    }
    for c in constants {
        current.push(Placement::Constant(c.clone()));
        enumerate(calls, constants, used_fresh, current, out);
        current.pop();
    }
    for i in 0..=used_fresh {
        current.push(Placement::Fresh(i));
        enumerate(calls, constants, used_fresh.max(i + 1), current, out);
        current.pop();
    }
}

/// Order in which constant-free cells receive fresh values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreshPolicy {
    /// Assign values to cells in reverse canonical order.
    pub reverse: bool,
    /// Skip this many available values before assigning.
    pub skip: usize,
}

pub fn fresh_name(i: usize) -> String {
    format!("{FRESH_PREFIX}{i}")
}

/// The representative `θ` of a commitment: constant cells map to their
/// constant; fresh cells take the smallest reserved values not in `used`.
pub fn canonical_theta(
    h: &EqualityCommitment,
    used: &BTreeSet<String>,
    policy: FreshPolicy,
) -> BTreeMap<SkolemCall, String> {
    let n = h.fresh_cells();
    let mut values: Vec<String> = (0..)
        .map(fresh_name)
        .filter(|v| !used.contains(v))
        .skip(policy.skip)
        .take(n)
        .collect();
    if policy.reverse {
        values.reverse();
    }
    h.placement
        .iter()
        .map(|(call, p)| {
            let v = match p {
                Placement::Constant(c) => c.clone(),
                Placement::Fresh(i) => values[*i].clone(),
            };
            (call.clone(), v)
        })
        .collect()
}
