//! Brute-force reference implementations for cross-checking: chase-based
//! reasoning, subset-enumeration repairs, unpruned transition systems and a
//! history-preserving bisimulation checker.

mod bisim;
mod chase;
mod full_ts;

use thiserror::Error;

use crate::dllite::{ABox, TBox};
use crate::repair::RepairSet;

pub use bisim::check_bisimilar;
pub use chase::{oracle_certain_answers, oracle_consistency};
pub use full_ts::oracle_full_ts;

pub const REPAIR_GUARD: usize = 16;
pub const BISIM_GUARD: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("chase depth {depth} is below the {needed} needed for a truncated chase")]
    DepthInsufficient { depth: usize, needed: usize },
    #[error("input of size {size} exceeds the oracle guard {guard}")]
    TooLarge { size: usize, guard: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChaseConfig {
    /// Defaults to `2·|T_p| + 2`.
    pub max_depth: Option<usize>,
}

impl ChaseConfig {
    pub fn depth_for(&self, tbox: &TBox) -> usize {
        self.max_depth.unwrap_or(2 * tbox.positive().len() + 2)
    }
}

/// Maximal consistent subsets, by enumerating every subset from the largest down.
pub fn oracle_b_repairs(abox: &ABox, tbox: &TBox) -> Result<RepairSet, OracleError> {
    let facts: Vec<_> = abox.iter().cloned().collect();
    let n = facts.len();
    if n > REPAIR_GUARD {
        return Err(OracleError::TooLarge {
            size: n,
            guard: REPAIR_GUARD,
        });
    }
    let cfg = ChaseConfig::default();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u32> = Vec::new();
    for m in masks {
        if maximal.iter().any(|big| m & big == m) {
            continue;
        }
        let sub: ABox = (0..n).filter(|i| m >> i & 1 == 1).map(|i| facts[i].clone()).collect();
        if oracle_consistency(tbox, &sub, &cfg)? {
            maximal.push(m);
        }
    }
    Ok(maximal
        .into_iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| facts[i].clone()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dllite::{Assertion, BasicConcept, Constraint, Role};

    #[test]
    fn b_repair_examples() {
        let mut t = TBox::new();
        t.add_constraint(Constraint::Disjoint(BasicConcept::named("C"), BasicConcept::named("D")));
        let a: ABox = [Assertion::concept("C", "a"), Assertion::concept("D", "a")]
            .into_iter()
            .collect();
        let r = oracle_b_repairs(&a, &t).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&[Assertion::concept("C", "a")].into_iter().collect()));

        let single: ABox = [Assertion::concept("C", "a")].into_iter().collect();
        assert_eq!(oracle_b_repairs(&single, &t).unwrap().into_set(), [single].into());
        assert_eq!(oracle_b_repairs(&ABox::new(), &t).unwrap().into_set(), [ABox::new()].into());

        let mut f = TBox::new();
        f.add_constraint(Constraint::Funct(Role::Direct("P".into())));
        let a: ABox = [Assertion::role("P", "a", "b"), Assertion::role("P", "a", "c")]
            .into_iter()
            .collect();
        assert_eq!(oracle_b_repairs(&a, &f).unwrap().len(), 2);

        let big: ABox = (0..17).map(|i| Assertion::concept("C", format!("c{i}"))).collect();
        assert_eq!(
            oracle_b_repairs(&big, &t),
            Err(OracleError::TooLarge { size: 17, guard: 16 })
        );
    }
}
