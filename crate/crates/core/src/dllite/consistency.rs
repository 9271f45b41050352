//! Violation queries for negative inclusions and functionality assertions.

use std::fmt;

use super::eval::Db;
use super::query::{Atom, Cq, QTerm, Ucq};
use super::rewrite::rewrite_ucq;
use super::syntax::{Assertion, BasicConcept, Constraint, GroundTerm, PositiveInclusion, Role};

/// A boolean query that holds exactly when an ABox violates one TBox assertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsatQuery {
    /// `∃x,x1,x2. η(R,x,x1) ∧ η(R,x,x2) ∧ x1 ≠ x2`, evaluated over the ABox alone
    /// with syntactic inequality.
    Funct(Role),
    /// A closed UCQ already rewritten against the positive inclusions.
    Neg(Ucq),
}

/// `η(R, s, o)`
fn eta(r: &Role, s: QTerm, o: QTerm) -> Atom {
    match r {
        Role::Direct(p) => Atom::Role(p.clone(), s, o),
        Role::Inverse(p) => Atom::Role(p.clone(), o, s),
    }
}

/// `γ(B, x)`, with a fresh existential variable for the unnamed role argument.
fn gamma(b: &BasicConcept, x: QTerm, fresh: &str) -> Atom {
    match b {
        BasicConcept::Named(n) => Atom::Concept(n.clone(), x),
        BasicConcept::Exists(r) => eta(r, x, QTerm::var(fresh)),
    }
}

pub fn unsat_query_funct(role: &Role) -> UnsatQuery {
    UnsatQuery::Funct(role.clone())
}

/// Builds the rewritten violation query of a negative inclusion. Returns `None`
/// for functionality assertions.
pub fn unsat_query_neg(c: &Constraint, positive: &[PositiveInclusion]) -> Option<UnsatQuery> {
    let atoms = match c {
        Constraint::Disjoint(b1, b2) => vec![
            gamma(b1, QTerm::var("x"), "y1"),
            gamma(b2, QTerm::var("x"), "y2"),
        ],
        Constraint::RoleDisjoint(r1, r2) => vec![
            eta(r1, QTerm::var("x1"), QTerm::var("x2")),
            eta(r2, QTerm::var("x1"), QTerm::var("x2")),
        ],
        Constraint::Funct(_) => return None,
    };
    let q = Ucq {
        free: Vec::new(),
        cqs: vec![Cq {
            head: Vec::new(),
            atoms,
        }],
    };
    Some(UnsatQuery::Neg(rewrite_ucq(&q, positive)))
}

impl UnsatQuery {
    pub fn for_constraint(c: &Constraint, positive: &[PositiveInclusion]) -> Self {
        match c {
            Constraint::Funct(r) => unsat_query_funct(r),
            _ => unsat_query_neg(c, positive).expect("negative inclusion"),
        }
    }

    pub fn holds(&self, db: &Db<'_>) -> bool {
        let mut found = false;
        self.visit_witnesses(db, |_| {
            found = true;
            false
        });
        found
    }

    /// All sets of assertions on which the query matches. Each witness has at
    /// most two members.
    pub fn witnesses(&self, db: &Db<'_>) -> Vec<Vec<Assertion>> {
        let mut out = Vec::new();
        self.visit_witnesses(db, |w| {
            let mut w: Vec<Assertion> = w.iter().map(|a| (*a).clone()).collect();
            w.sort();
            w.dedup();
            out.push(w);
            true
        });
        out.sort();
        out.dedup();
        out
    }

    fn visit_witnesses<F: FnMut(&[&Assertion]) -> bool>(&self, db: &Db<'_>, mut f: F) {
        match self {
            UnsatQuery::Funct(r) => {
                let facts = db.facts(r.name());
                let key = |a: &Assertion| -> (GroundTerm, GroundTerm) {
                    let Assertion::Role { subject, object, .. } = a else {
                        unreachable!("role index holds role assertions")
                    };
                    match r {
                        Role::Direct(_) => (subject.clone(), object.clone()),
                        Role::Inverse(_) => (object.clone(), subject.clone()),
                    }
                };
                let roles: Vec<(&Assertion, (GroundTerm, GroundTerm))> = facts
                    .iter()
                    .filter(|a| matches!(a, Assertion::Role { .. }))
                    .map(|a| (*a, key(a)))
                    .collect();
                for (i, (a1, (x, y1))) in roles.iter().enumerate() {
                    for (a2, (x2, y2)) in &roles[i + 1..] {
                        if x == x2 && y1 != y2 && !f(&[a1, a2]) {
                            return;
                        }
                    }
                }
            }
            UnsatQuery::Neg(q) => {
                for cq in &q.cqs {
                    let mut stop = false;
                    db.for_each_match(cq, |_, used| {
                        let go = f(used);
                        stop = !go;
                        go
                    });
                    if stop {
                        return;
                    }
                }
            }
        }
    }
}

impl fmt::Display for UnsatQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnsatQuery::Funct(r) => {
                let a1 = eta(r, QTerm::var("x"), QTerm::var("x1"));
                let a2 = eta(r, QTerm::var("x"), QTerm::var("x2"));
                write!(f, "exists x,x1,x2. {a1} & {a2} & x1 != x2")
            }
            UnsatQuery::Neg(q) => q.fmt(f),
        }
    }
}
