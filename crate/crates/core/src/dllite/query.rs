//! Conjunctive queries, unions of them, and ECQs (EQL-Lite over UCQ atoms).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::syntax::GroundTerm;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QTerm {
    Var(String),
    Const(GroundTerm),
}

impl QTerm {
    pub fn var(v: impl Into<String>) -> Self {
        QTerm::Var(v.into())
    }

    pub fn constant(c: impl Into<String>) -> Self {
        QTerm::Const(GroundTerm::Constant(c.into()))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            QTerm::Var(v) => Some(v),
            QTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTerm::Var(v) => f.write_str(v),
            QTerm::Const(c) => c.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Concept(String, QTerm),
    Role(String, QTerm, QTerm),
}

impl Atom {
    pub fn concept(name: impl Into<String>, t: QTerm) -> Self {
        Atom::Concept(name.into(), t)
    }

    pub fn role(name: impl Into<String>, s: QTerm, o: QTerm) -> Self {
        Atom::Role(name.into(), s, o)
    }

    pub fn predicate(&self) -> &str {
        match self {
            Atom::Concept(n, _) | Atom::Role(n, _, _) => n,
        }
    }

    pub fn args(&self) -> Vec<&QTerm> {
        match self {
            Atom::Concept(_, t) => vec![t],
            Atom::Role(_, s, o) => vec![s, o],
        }
    }

    pub fn map_terms(&self, mut f: impl FnMut(&QTerm) -> QTerm) -> Atom {
        match self {
            Atom::Concept(n, t) => Atom::Concept(n.clone(), f(t)),
            Atom::Role(n, s, o) => Atom::Role(n.clone(), f(s), f(o)),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args().into_iter().filter_map(QTerm::as_var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept(n, t) => write!(f, "{n}({t})"),
            Atom::Role(n, s, o) => write!(f, "{n}({s},{o})"),
        }
    }
}

/// A conjunctive query. `head` lists the answer terms; rewriting may turn
/// head variables into constants or identify two of them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cq {
    pub head: Vec<QTerm>,
    pub atoms: Vec<Atom>,
}

impl Cq {
    pub fn new(free: &[String], atoms: Vec<Atom>) -> Self {
        Cq {
            head: free.iter().map(|v| QTerm::Var(v.clone())).collect(),
            atoms,
        }
    }

    pub fn head_vars(&self) -> BTreeSet<&str> {
        self.head.iter().filter_map(QTerm::as_var).collect()
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        self.atoms.iter().flat_map(|a| a.vars()).collect()
    }

    /// Variables of the body that are not answer variables.
    pub fn existential_vars(&self) -> BTreeSet<&str> {
        let head = self.head_vars();
        self.vars().into_iter().filter(|v| !head.contains(v)).collect()
    }
}

/// A union of conjunctive queries sharing the free-variable tuple `free`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ucq {
    pub free: Vec<String>,
    pub cqs: Vec<Cq>,
}

impl Ucq {
    pub fn new(free: Vec<String>, bodies: Vec<Vec<Atom>>) -> Self {
        let cqs = bodies.into_iter().map(|b| Cq::new(&free, b)).collect();
        Ucq { free, cqs }
    }

    /// A single CQ whose free variables are all variables of its atoms, in sorted order.
    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        let free: Vec<String> = atoms
            .iter()
            .flat_map(|a| a.vars())
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ucq::new(free, vec![atoms])
    }

    /// The query `true`: one empty conjunction.
    pub fn truth() -> Self {
        Ucq {
            free: Vec::new(),
            cqs: vec![Cq {
                head: Vec::new(),
                atoms: Vec::new(),
            }],
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_truth(&self) -> bool {
        self.free.is_empty() && self.cqs.iter().any(|c| c.atoms.is_empty())
    }

    /// Replaces bound free variables by constants, dropping them from the free tuple.
    pub fn bind(&self, env: &BTreeMap<String, GroundTerm>) -> Ucq {
        if !self.free.iter().any(|v| env.contains_key(v)) {
            return self.clone();
        }
        let free: Vec<String> = self
            .free
            .iter()
            .filter(|v| !env.contains_key(*v))
            .cloned()
            .collect();
        let head_pos: Vec<usize> = self
            .free
            .iter()
            .enumerate()
            .filter(|(_, v)| !env.contains_key(*v))
            .map(|(i, _)| i)
            .collect();
        let cqs = self
            .cqs
            .iter()
            .filter_map(|cq| {
                // A head constant that disagrees with the binding can never match.
                let clash = self.free.iter().zip(&cq.head).any(|(fv, h)| {
                    matches!((env.get(fv), h), (Some(val), QTerm::Const(c)) if val != c)
                });
                if clash {
                    return None;
                }
                // Only answer variables are substituted; existential names are local.
                let mut subst: BTreeMap<&str, &GroundTerm> = BTreeMap::new();
                for (fv, h) in self.free.iter().zip(&cq.head) {
                    if let (Some(val), QTerm::Var(hv)) = (env.get(fv), h) {
                        if subst.insert(hv.as_str(), val).is_some_and(|prev| prev != val) {
                            return None;
                        }
                    }
                }
                let apply = |t: &QTerm| match t {
                    QTerm::Var(v) => match subst.get(v.as_str()) {
                        Some(val) => QTerm::Const((*val).clone()),
                        None => t.clone(),
                    },
                    QTerm::Const(_) => t.clone(),
                };
                Some(Cq {
                    head: head_pos.iter().map(|&i| apply(&cq.head[i])).collect(),
                    atoms: cq.atoms.iter().map(|a| a.map_terms(apply)).collect(),
                })
            })
            .collect();
        Ucq { free, cqs }
    }

    /// Predicate names used anywhere in the query.
    pub fn predicates(&self) -> BTreeSet<&str> {
        self.cqs
            .iter()
            .flat_map(|c| c.atoms.iter().map(Atom::predicate))
            .collect()
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        let ex = self.existential_vars();
        if !ex.is_empty() {
            write!(f, "exists {}. ", ex.into_iter().collect::<Vec<_>>().join(","))?;
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Ucq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, cq) in self.cqs.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{cq}")?;
        }
        Ok(())
    }
}

/// EQL-Lite(UCQ) query: UCQ atoms composed by first-order connectives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ecq {
    Atom(Ucq),
    Not(Box<Ecq>),
    And(Box<Ecq>, Box<Ecq>),
    Exists(String, Box<Ecq>),
}

impl Ecq {
    pub fn atom(q: Ucq) -> Self {
        Ecq::Atom(q)
    }

    pub fn truth() -> Self {
        Ecq::Atom(Ucq::truth())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(q: Ecq) -> Self {
        Ecq::Not(Box::new(q))
    }

    pub fn and(a: Ecq, b: Ecq) -> Self {
        Ecq::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ecq, b: Ecq) -> Self {
        Ecq::not(Ecq::and(Ecq::not(a), Ecq::not(b)))
    }

    pub fn implies(a: Ecq, b: Ecq) -> Self {
        Ecq::not(Ecq::and(a, Ecq::not(b)))
    }

    pub fn exists(v: impl Into<String>, q: Ecq) -> Self {
        Ecq::Exists(v.into(), Box::new(q))
    }

    pub fn forall(v: impl Into<String>, q: Ecq) -> Self {
        Ecq::not(Ecq::exists(v, Ecq::not(q)))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Ecq::Atom(q) => q.free.iter().cloned().collect(),
            Ecq::Not(q) => q.free_vars(),
            Ecq::And(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Ecq::Exists(v, q) => {
                let mut s = q.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every UCQ atom, in syntactic order.
    pub fn ucqs(&self) -> Vec<&Ucq> {
        let mut out = Vec::new();
        self.collect_ucqs(&mut out);
        out
    }

    fn collect_ucqs<'a>(&'a self, out: &mut Vec<&'a Ucq>) {
        match self {
            Ecq::Atom(q) => out.push(q),
            Ecq::Not(q) | Ecq::Exists(_, q) => q.collect_ucqs(out),
            Ecq::And(a, b) => {
                a.collect_ucqs(out);
                b.collect_ucqs(out);
            }
        }
    }

    /// Substitutes constants for free variables.
    pub fn bind(&self, env: &BTreeMap<String, GroundTerm>) -> Ecq {
        if env.is_empty() {
            return self.clone();
        }
        match self {
            Ecq::Atom(q) => Ecq::Atom(q.bind(env)),
            Ecq::Not(q) => Ecq::not(q.bind(env)),
            Ecq::And(a, b) => Ecq::and(a.bind(env), b.bind(env)),
            Ecq::Exists(v, q) => {
                let mut inner = env.clone();
                inner.remove(v);
                Ecq::exists(v.clone(), q.bind(&inner))
            }
        }
    }
}

impl fmt::Display for Ecq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ecq::Atom(q) => write!(f, "[{q}]"),
            Ecq::Not(q) => match **q {
                Ecq::Atom(_) | Ecq::Not(_) => write!(f, "!{q}"),
                _ => write!(f, "!({q})"),
            },
            Ecq::And(a, b) => write!(f, "({a} & {b})"),
            Ecq::Exists(v, q) => match **q {
                Ecq::Atom(_) => write!(f, "exists {v}.{q}"),
                _ => write!(f, "exists {v}.({q})"),
            },
        }
    }
}
