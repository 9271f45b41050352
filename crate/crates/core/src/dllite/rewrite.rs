//! PerfectRef: UCQ reformulation against the positive inclusions of a TBox.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::query::{Atom, Cq, QTerm, Ucq};
use super::syntax::{BasicConcept, PositiveInclusion, Role};

/// Computes `rew(q)` so that plain evaluation over an ABox yields the certain
/// answers of `q` under `positive`.
pub fn rewrite_ucq(q: &Ucq, positive: &[PositiveInclusion]) -> Ucq {
    let mut seen: BTreeSet<Cq> = BTreeSet::new();
    let mut work: Vec<Cq> = Vec::new();
    for cq in &q.cqs {
        let c = canonical(cq);
        if seen.insert(c.clone()) {
            work.push(c);
        }
    }
    if positive.is_empty() {
        return Ucq {
            free: q.free.clone(),
            cqs: seen.into_iter().collect(),
        };
    }
    while let Some(cq) = work.pop() {
        let mut next = Vec::new();
        for (i, atom) in cq.atoms.iter().enumerate() {
            for pi in positive {
                if let Some(replacement) = apply_inclusion(&cq, atom, pi) {
                    let mut atoms = cq.atoms.clone();
                    atoms[i] = replacement;
                    next.push(Cq {
                        head: cq.head.clone(),
                        atoms,
                    });
                }
            }
        }
        for i in 0..cq.atoms.len() {
            for j in (i + 1)..cq.atoms.len() {
                if let Some(reduced) = reduce(&cq, i, j) {
                    next.push(reduced);
                }
            }
        }
        for n in next {
            let c = canonical(&n);
            if seen.insert(c.clone()) {
                work.push(c);
            }
        }
    }
    Ucq {
        free: q.free.clone(),
        cqs: seen.into_iter().collect(),
    }
}

/// A variable is unbound when it is existential and occurs exactly once.
fn is_unbound(cq: &Cq, t: &QTerm) -> bool {
    let QTerm::Var(v) = t else { return false };
    if cq.head.iter().any(|h| h.as_var() == Some(v)) {
        return false;
    }
    cq.atoms.iter().flat_map(|a| a.vars()).filter(|x| *x == v).count() == 1
}

fn fresh_var(cq: &Cq) -> QTerm {
    let used: BTreeSet<&str> = cq
        .atoms
        .iter()
        .flat_map(|a| a.vars())
        .chain(cq.head.iter().filter_map(QTerm::as_var))
        .collect();
    let name = (0..)
        .map(|i| format!("_f{i}"))
        .find(|n| !used.contains(n.as_str()))
        .expect("unbounded");
    QTerm::Var(name)
}

/// The atom form `γ(B, t)` of a basic concept.
fn concept_atom(b: &BasicConcept, t: QTerm, cq: &Cq) -> Atom {
    match b {
        BasicConcept::Named(n) => Atom::Concept(n.clone(), t),
        BasicConcept::Exists(Role::Direct(p)) => Atom::Role(p.clone(), t, fresh_var(cq)),
        BasicConcept::Exists(Role::Inverse(p)) => Atom::Role(p.clone(), fresh_var(cq), t),
    }
}

fn apply_inclusion(cq: &Cq, atom: &Atom, pi: &PositiveInclusion) -> Option<Atom> {
    match (atom, &pi.sup) {
        (Atom::Concept(n, t), BasicConcept::Named(m)) if n == m => {
            Some(concept_atom(&pi.sub, t.clone(), cq))
        }
        (Atom::Role(p, s, o), BasicConcept::Exists(Role::Direct(q))) if p == q && is_unbound(cq, o) => {
            Some(concept_atom(&pi.sub, s.clone(), cq))
        }
        (Atom::Role(p, s, o), BasicConcept::Exists(Role::Inverse(q))) if p == q && is_unbound(cq, s) => {
            Some(concept_atom(&pi.sub, o.clone(), cq))
        }
        _ => None,
    }
}

/// Unifies atoms `i` and `j` and applies the most general unifier to the whole CQ.
fn reduce(cq: &Cq, i: usize, j: usize) -> Option<Cq> {
    let (a, b) = (&cq.atoms[i], &cq.atoms[j]);
    if a.predicate() != b.predicate() || a.args().len() != b.args().len() {
        return None;
    }
    let head: BTreeSet<&str> = cq.head_vars();
    let mut subst: HashMap<String, QTerm> = HashMap::new();
    for (x, y) in a.args().into_iter().zip(b.args()) {
        let x = resolve(&subst, x);
        let y = resolve(&subst, y);
        if x == y {
            continue;
        }
        match (&x, &y) {
            (QTerm::Const(_), QTerm::Const(_)) => return None,
            (QTerm::Var(v), QTerm::Const(_)) => {
                subst.insert(v.clone(), y.clone());
            }
            (QTerm::Const(_), QTerm::Var(v)) => {
                subst.insert(v.clone(), x.clone());
            }
            (QTerm::Var(v), QTerm::Var(w)) => {
                // Keep answer variables as representatives.
                if head.contains(v.as_str()) && !head.contains(w.as_str()) {
                    subst.insert(w.clone(), x.clone());
                } else {
                    subst.insert(v.clone(), y.clone());
                }
            }
        }
    }
    let apply = |t: &QTerm| resolve(&subst, t);
    let mut atoms: Vec<Atom> = Vec::new();
    for atom in &cq.atoms {
        let mapped = atom.map_terms(apply);
        if !atoms.contains(&mapped) {
            atoms.push(mapped);
        }
    }
    Some(Cq {
        head: cq.head.iter().map(apply).collect(),
        atoms,
    })
}

fn resolve(subst: &HashMap<String, QTerm>, t: &QTerm) -> QTerm {
    let mut cur = t.clone();
    while let QTerm::Var(v) = &cur {
        match subst.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

/// Renames existential variables by first occurrence in a sorted atom list
/// and removes duplicate atoms, so that most renamings coincide.
pub(crate) fn canonical(cq: &Cq) -> Cq {
    let head: BTreeSet<String> = cq.head_vars().into_iter().map(str::to_string).collect();
    let mut cur = cq.clone();
    for _ in 0..3 {
        let mut keyed: Vec<(Atom, Atom)> = cur
            .atoms
            .iter()
            .map(|a| {
                let masked = a.map_terms(|t| match t {
                    QTerm::Var(v) if !head.contains(v) => QTerm::Var("?".into()),
                    _ => t.clone(),
                });
                (masked, a.clone())
            })
            .collect();
        keyed.sort();
        let mut names: BTreeMap<String, String> = BTreeMap::new();
        for (_, a) in &keyed {
            for v in a.vars() {
                if !head.contains(v) && !names.contains_key(v) {
                    let n = format!("_{}", names.len());
                    names.insert(v.to_string(), n);
                }
            }
        }
        let rename = |t: &QTerm| match t {
            QTerm::Var(v) => match names.get(v) {
                Some(n) => QTerm::Var(n.clone()),
                None => t.clone(),
            },
            QTerm::Const(_) => t.clone(),
        };
        let mut atoms: Vec<Atom> = keyed.iter().map(|(_, a)| a.map_terms(rename)).collect();
        atoms.sort();
        atoms.dedup();
        let next = Cq {
            head: cur.head.clone(),
            atoms,
        };
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}
