//! Query evaluation over ABoxes viewed as plain databases, and ECQ composition
//! under active-domain semantics.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::query::{Atom, Cq, Ecq, QTerm, Ucq};
use super::syntax::{ABox, Assertion, GroundTerm};

/// A finite relation with named, sorted columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    vars: Vec<String>,
    rows: BTreeSet<Vec<GroundTerm>>,
}

pub type Substitution = BTreeMap<String, GroundTerm>;

impl Relation {
    /// Builds a relation from rows laid out in `vars` order.
    pub fn from_rows(vars: &[String], rows: impl IntoIterator<Item = Vec<GroundTerm>>) -> Self {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        let sorted: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
        let rows = rows
            .into_iter()
            .map(|r| order.iter().map(|&i| r[i].clone()).collect())
            .collect();
        Relation { vars: sorted, rows }
    }

    pub fn empty(vars: &[String]) -> Self {
        Relation::from_rows(vars, std::iter::empty())
    }

    /// The nullary relation holding the empty tuple.
    pub fn truth() -> Self {
        Relation {
            vars: Vec::new(),
            rows: [Vec::new()].into(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &BTreeSet<Vec<GroundTerm>> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// For nullary relations: whether the empty tuple is present.
    pub fn holds(&self) -> bool {
        !self.rows.is_empty()
    }

    pub fn substitutions(&self) -> Vec<Substitution> {
        self.rows
            .iter()
            .map(|r| self.vars.iter().cloned().zip(r.iter().cloned()).collect())
            .collect()
    }

    pub fn contains(&self, s: &Substitution) -> bool {
        let row: Option<Vec<GroundTerm>> = self.vars.iter().map(|v| s.get(v).cloned()).collect();
        row.is_some_and(|r| self.rows.contains(&r))
    }

    pub fn intersect(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.vars, other.vars);
        Relation {
            vars: self.vars.clone(),
            rows: self.rows.intersection(&other.rows).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.vars, other.vars);
        Relation {
            vars: self.vars.clone(),
            rows: self.rows.union(&other.rows).cloned().collect(),
        }
    }

    /// Natural join.
    pub fn join(&self, other: &Relation) -> Relation {
        let mut vars: Vec<String> = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let shared: Vec<(usize, usize)> = self
            .vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| other.vars.iter().position(|w| w == v).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> = (0..other.vars.len())
            .filter(|j| !shared.iter().any(|(_, s)| s == j))
            .collect();
        let mut index: HashMap<Vec<&GroundTerm>, Vec<&Vec<GroundTerm>>> = HashMap::new();
        for r in &other.rows {
            index
                .entry(shared.iter().map(|&(_, j)| &r[j]).collect())
                .or_default()
                .push(r);
        }
        let mut rows = Vec::new();
        for l in &self.rows {
            let key: Vec<&GroundTerm> = shared.iter().map(|&(i, _)| &l[i]).collect();
            if let Some(matches) = index.get(&key) {
                for r in matches {
                    let mut row = l.clone();
                    row.extend(extra.iter().map(|&j| r[j].clone()));
                    rows.push(row);
                }
            }
        }
        Relation::from_rows(&vars, rows)
    }

    /// `domain^k` minus this relation.
    pub fn complement(&self, domain: &[GroundTerm]) -> Relation {
        let k = self.vars.len();
        let mut rows = BTreeSet::new();
        let mut idx = vec![0usize; k];
        if k > 0 && domain.is_empty() {
            return Relation::empty(&self.vars);
        }
        loop {
            let row: Vec<GroundTerm> = idx.iter().map(|&i| domain[i].clone()).collect();
            if !self.rows.contains(&row) {
                rows.insert(row);
            }
            // odometer increment
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Relation {
                        vars: self.vars.clone(),
                        rows,
                    };
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < domain.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn project_out(&self, var: &str) -> Relation {
        let Some(pos) = self.vars.iter().position(|v| v == var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(pos);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.remove(pos);
                r
            })
            .collect();
        Relation { vars, rows }
    }
}

/// An ABox indexed by predicate for matching.
#[derive(Debug)]
pub struct Db<'a> {
    by_pred: HashMap<&'a str, Vec<&'a Assertion>>,
    adom: BTreeSet<GroundTerm>,
}

impl<'a> Db<'a> {
    pub fn new(abox: &'a ABox) -> Self {
        let mut by_pred: HashMap<&str, Vec<&Assertion>> = HashMap::new();
        for a in abox {
            by_pred.entry(a.predicate()).or_default().push(a);
        }
        Db {
            by_pred,
            adom: abox.adom(),
        }
    }

    pub fn adom(&self) -> &BTreeSet<GroundTerm> {
        &self.adom
    }

    pub fn facts(&self, predicate: &str) -> &[&'a Assertion] {
        self.by_pred.get(predicate).map_or(&[], Vec::as_slice)
    }

    /// Enumerates homomorphisms of the body of `cq` into the database. The
    /// callback receives the binding and the matched assertions, and returns
    /// `false` to stop early.
    pub fn for_each_match<F>(&self, cq: &Cq, mut f: F)
    where
        F: FnMut(&HashMap<&str, &GroundTerm>, &[&'a Assertion]) -> bool,
    {
        let mut binding: HashMap<&str, &GroundTerm> = HashMap::new();
        let mut used: Vec<&'a Assertion> = Vec::with_capacity(cq.atoms.len());
        let order = self.atom_order(cq);
        self.search(cq, &order, 0, &mut binding, &mut used, &mut f);
    }

    fn atom_order(&self, cq: &Cq) -> Vec<usize> {
        let mut order: Vec<usize> = (0..cq.atoms.len()).collect();
        order.sort_by_key(|&i| self.facts(cq.atoms[i].predicate()).len());
        order
    }

    fn search<'q, F>(
        &self,
        cq: &'q Cq,
        order: &[usize],
        depth: usize,
        binding: &mut HashMap<&'q str, &'a GroundTerm>,
        used: &mut Vec<&'a Assertion>,
        f: &mut F,
    ) -> bool
    where
        F: FnMut(&HashMap<&str, &GroundTerm>, &[&'a Assertion]) -> bool,
    {
        if depth == order.len() {
            return f(binding, used);
        }
        let atom = &cq.atoms[order[depth]];
        for fact in self.facts(atom.predicate()) {
            let pairs: Vec<(&'q QTerm, &'a GroundTerm)> = match (atom, *fact) {
                (Atom::Concept(_, t), Assertion::Concept { term, .. }) => vec![(t, term)],
                (Atom::Role(_, s, o), Assertion::Role { subject, object, .. }) => {
                    vec![(s, subject), (o, object)]
                }
                _ => continue,
            };
            let mut added: Vec<&'q str> = Vec::new();
            let mut ok = true;
            for (qt, gt) in pairs {
                match qt {
                    QTerm::Const(c) => {
                        if c != gt {
                            ok = false;
                            break;
                        }
                    }
                    QTerm::Var(v) => match binding.get(v.as_str()) {
                        Some(b) => {
                            if *b != gt {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            binding.insert(v.as_str(), gt);
                            added.push(v.as_str());
                        }
                    },
                }
            }
            if ok {
                used.push(fact);
                let go_on = self.search(cq, order, depth + 1, binding, used, f);
                used.pop();
                if !go_on {
                    for v in added {
                        binding.remove(v);
                    }
                    return false;
                }
            }
            for v in added {
                binding.remove(v);
            }
        }
        true
    }

    /// Evaluates a UCQ as a plain database query. Answers range over the active domain.
    pub fn eval_ucq(&self, q: &Ucq) -> Relation {
        let mut rows: BTreeSet<Vec<GroundTerm>> = BTreeSet::new();
        let adom: Vec<&GroundTerm> = self.adom.iter().collect();
        for cq in &q.cqs {
            let boolean = cq.head.is_empty();
            self.for_each_match(cq, |binding, _| {
                // Head variables absent from the body range over the active domain.
                let mut partial: Vec<Vec<GroundTerm>> = vec![Vec::new()];
                for h in &cq.head {
                    let options: Vec<GroundTerm> = match h {
                        QTerm::Const(c) => vec![c.clone()],
                        QTerm::Var(v) => match binding.get(v.as_str()) {
                            Some(g) => vec![(*g).clone()],
                            None => adom.iter().map(|g| (*g).clone()).collect(),
                        },
                    };
                    partial = partial
                        .into_iter()
                        .flat_map(|p| {
                            options.iter().map(move |o| {
                                let mut p = p.clone();
                                p.push(o.clone());
                                p
                            })
                        })
                        .collect();
                }
                for row in partial {
                    if row.iter().all(|g| self.adom.contains(g)) {
                        rows.insert(row);
                    }
                }
                !boolean
            });
            if boolean && !rows.is_empty() {
                break;
            }
        }
        Relation::from_rows(&q.free, rows)
    }
}

/// Answers the UCQ atoms of an ECQ.
pub trait UcqLeaf {
    /// Answers of `q`, whose free variables are all unbound.
    fn answers(&self, q: &Ucq) -> Relation;
    /// The domain over which negation and quantification range.
    fn domain(&self) -> &[GroundTerm];
}

/// Evaluates an ECQ with some free variables pre-bound by `env`. The result
/// ranges over the remaining free variables.
pub fn eval_ecq_with(q: &Ecq, leaf: &dyn UcqLeaf, env: &Substitution) -> Relation {
    match q {
        Ecq::Atom(u) => leaf.answers(&u.bind(env)),
        Ecq::Not(inner) => eval_ecq_with(inner, leaf, env).complement(leaf.domain()),
        Ecq::And(a, b) => {
            let l = eval_ecq_with(a, leaf, env);
            if l.is_empty() {
                let mut vars: Vec<String> = l.vars.clone();
                vars.extend(b.free_vars().into_iter().filter(|v| !env.contains_key(v)));
                vars.sort();
                vars.dedup();
                return Relation::empty(&vars);
            }
            l.join(&eval_ecq_with(b, leaf, env))
        }
        Ecq::Exists(v, inner) => {
            let scoped;
            let env = if env.contains_key(v) {
                let mut e = env.clone();
                e.remove(v);
                scoped = e;
                &scoped
            } else {
                env
            };
            let r = eval_ecq_with(inner, leaf, env);
            if r.vars.iter().any(|x| x == v) {
                r.project_out(v)
            } else if leaf.domain().is_empty() {
                Relation::empty(&r.vars)
            } else {
                r
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_and_complement() {
        let x = vec!["x".to_string()];
        let a = GroundTerm::constant("a");
        let b = GroundTerm::constant("b");
        let r = Relation::from_rows(&x, [vec![a.clone()]]);
        let c = r.complement(&[a.clone(), b.clone()]);
        assert_eq!(c.rows().iter().cloned().collect::<Vec<_>>(), vec![vec![b.clone()]]);
        let xy = vec!["x".to_string(), "y".to_string()];
        let s = Relation::from_rows(&xy, [vec![a.clone(), b.clone()], vec![b.clone(), a.clone()]]);
        let j = r.join(&s);
        assert_eq!(j.len(), 1);
        assert_eq!(j.vars(), &xy[..]);
    }

    #[test]
    fn nullary_complement() {
        assert!(!Relation::truth().complement(&[]).holds());
        assert!(Relation::empty(&[]).complement(&[]).holds());
    }

    #[test]
    fn database_matching_respects_repeated_variables() {
        let abox: ABox = [Assertion::role("P", "a", "a"), Assertion::role("P", "a", "b")]
            .into_iter()
            .collect();
        let db = Db::new(&abox);
        let q = Ucq::from_atoms(vec![Atom::role("P", QTerm::var("x"), QTerm::var("x"))]);
        assert_eq!(db.eval_ucq(&q).len(), 1);
    }
}
