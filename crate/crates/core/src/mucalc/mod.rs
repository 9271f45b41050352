//! First-order µ-calculus over ECQs: formulas, the inconsistency-tolerant
//! fragment, the τ translation and fixpoint model checking.

mod check;

use std::collections::BTreeSet;
use std::fmt;

use crate::dllite::syntax::VIOL_CONCEPT;
use crate::dllite::{Atom, Ecq, QTerm, Ucq};

pub use check::{model_check, CheckError, CheckResult};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MuFormula {
    Query(Ecq),
    Not(Box<MuFormula>),
    And(Box<MuFormula>, Box<MuFormula>),
    Or(Box<MuFormula>, Box<MuFormula>),
    Implies(Box<MuFormula>, Box<MuFormula>),
    Exists(String, Box<MuFormula>),
    Forall(String, Box<MuFormula>),
    Diamond(Box<MuFormula>),
    Box(Box<MuFormula>),
    Var(String),
    Mu(String, Box<MuFormula>),
    Nu(String, Box<MuFormula>),
}

use MuFormula as F;

impl MuFormula {
    pub fn query(q: Ecq) -> Self {
        F::Query(q)
    }

    pub fn truth() -> Self {
        F::Query(Ecq::truth())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: MuFormula) -> Self {
        F::Not(Box::new(a))
    }

    pub fn and(a: MuFormula, b: MuFormula) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: MuFormula, b: MuFormula) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: MuFormula, b: MuFormula) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, a: MuFormula) -> Self {
        F::Exists(v.into(), Box::new(a))
    }

    pub fn forall(v: impl Into<String>, a: MuFormula) -> Self {
        F::Forall(v.into(), Box::new(a))
    }

    pub fn diamond(a: MuFormula) -> Self {
        F::Diamond(Box::new(a))
    }

    pub fn boxed(a: MuFormula) -> Self {
        F::Box(Box::new(a))
    }

    pub fn var(z: impl Into<String>) -> Self {
        F::Var(z.into())
    }

    pub fn mu(z: impl Into<String>, a: MuFormula) -> Self {
        F::Mu(z.into(), Box::new(a))
    }

    pub fn nu(z: impl Into<String>, a: MuFormula) -> Self {
        F::Nu(z.into(), Box::new(a))
    }

    pub fn children(&self) -> Vec<&MuFormula> {
        match self {
            F::Query(_) | F::Var(_) => vec![],
            F::Not(a)
            | F::Exists(_, a)
            | F::Forall(_, a)
            | F::Diamond(a)
            | F::Box(a)
            | F::Mu(_, a)
            | F::Nu(_, a) => vec![a],
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) => vec![a, b],
        }
    }

    /// Rebuilds the node with each child replaced by `f(child)`.
    pub fn map_children(&self, mut f: impl FnMut(&MuFormula) -> MuFormula) -> MuFormula {
        let mut b = |a: &MuFormula| Box::new(f(a));
        match self {
            F::Query(_) | F::Var(_) => self.clone(),
            F::Not(a) => F::Not(b(a)),
            F::And(x, y) => {
                let x = b(x);
                F::And(x, b(y))
            }
            F::Or(x, y) => {
                let x = b(x);
                F::Or(x, b(y))
            }
            F::Implies(x, y) => {
                let x = b(x);
                F::Implies(x, b(y))
            }
            F::Exists(v, a) => F::Exists(v.clone(), b(a)),
            F::Forall(v, a) => F::Forall(v.clone(), b(a)),
            F::Diamond(a) => F::Diamond(b(a)),
            F::Box(a) => F::Box(b(a)),
            F::Mu(z, a) => F::Mu(z.clone(), b(a)),
            F::Nu(z, a) => F::Nu(z.clone(), b(a)),
        }
    }

    pub fn free_individual_vars(&self) -> BTreeSet<String> {
        match self {
            F::Query(q) => q.free_vars(),
            F::Exists(v, a) | F::Forall(v, a) => {
                let mut s = a.free_individual_vars();
                s.remove(v);
                s
            }
            _ => self
                .children()
                .into_iter()
                .flat_map(|c| c.free_individual_vars())
                .collect(),
        }
    }

    pub fn free_predicate_vars(&self) -> BTreeSet<String> {
        match self {
            F::Var(z) => [z.clone()].into(),
            F::Mu(z, a) | F::Nu(z, a) => {
                let mut s = a.free_predicate_vars();
                s.remove(z);
                s
            }
            _ => self
                .children()
                .into_iter()
                .flat_map(|c| c.free_predicate_vars())
                .collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_individual_vars().is_empty() && self.free_predicate_vars().is_empty()
    }

    /// The first fixpoint variable occurring under an odd number of negations
    /// in its own body, if any.
    pub fn non_monotone_var(&self) -> Option<String> {
        match self {
            F::Mu(z, a) | F::Nu(z, a) => {
                if occurs_negatively(a, z, false) {
                    return Some(z.clone());
                }
                a.non_monotone_var()
            }
            _ => self.children().into_iter().find_map(|c| c.non_monotone_var()),
        }
    }

    /// Syntactic substitution of `Z` by `with` at its free occurrences.
    pub fn substitute_var(&self, z: &str, with: &MuFormula) -> MuFormula {
        match self {
            F::Var(y) if y == z => with.clone(),
            F::Mu(y, _) | F::Nu(y, _) if y == z => self.clone(),
            _ => self.map_children(|c| c.substitute_var(z, with)),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }
}

fn occurs_negatively(f: &MuFormula, z: &str, negated: bool) -> bool {
    match f {
        F::Var(y) => y == z && negated,
        F::Mu(y, _) | F::Nu(y, _) if y == z => false,
        F::Not(a) => occurs_negatively(a, z, !negated),
        F::Implies(a, b) => occurs_negatively(a, z, !negated) || occurs_negatively(b, z, negated),
        _ => f
            .children()
            .into_iter()
            .any(|c| occurs_negatively(c, z, negated)),
    }
}

fn strip_not(mut f: &MuFormula) -> &MuFormula {
    while let F::Not(a) = f {
        f = a;
    }
    f
}

/// Whether every modal operator is one half of an adjacent pair
/// (`<><>`, `<>[]`, `[]<>`, `[][]`), allowing negations between the two halves.
pub fn is_it_fragment(f: &MuFormula) -> bool {
    match f {
        F::Diamond(a) | F::Box(a) => match strip_not(a) {
            F::Diamond(b) | F::Box(b) => is_it_fragment(b),
            _ => false,
        },
        _ => f.children().into_iter().all(is_it_fragment),
    }
}

/// `¬∃x.Viol(x)`
pub fn no_viol() -> MuFormula {
    F::not(F::exists(
        "x",
        F::Query(Ecq::atom(Ucq::from_atoms(vec![Atom::concept(
            VIOL_CONCEPT,
            QTerm::var("x"),
        )]))),
    ))
}

/// Relativizes each modality to the violation-free states two steps ahead.
pub fn tau(f: &MuFormula) -> MuFormula {
    match f {
        F::Diamond(a) => F::diamond(F::diamond(F::and(no_viol(), tau(a)))),
        F::Box(a) => F::boxed(F::diamond(F::implies(no_viol(), tau(a)))),
        _ => f.map_children(tau),
    }
}

impl fmt::Display for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::Query(Ecq::Atom(u)) => write!(f, "[{u}]"),
            F::Query(q) => write!(f, "{q}"),
            F::Not(a) => write!(f, "!{a}"),
            F::And(a, b) => write!(f, "({a} & {b})"),
            F::Or(a, b) => write!(f, "({a} | {b})"),
            F::Implies(a, b) => write!(f, "({a} -> {b})"),
            F::Exists(v, a) => write!(f, "exists {v}.{a}"),
            F::Forall(v, a) => write!(f, "forall {v}.{a}"),
            F::Diamond(a) => write!(f, "<>{a}"),
            F::Box(a) => write!(f, "[]{a}"),
            F::Var(z) => f.write_str(z),
            F::Mu(z, a) => write!(f, "mu {z}.{a}"),
            F::Nu(z, a) => write!(f, "nu {z}.{a}"),
        }
    }
}
