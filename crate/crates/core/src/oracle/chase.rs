//! Restrained chase over a positive TBox, evaluated by plain homomorphism search.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{ChaseConfig, OracleError};
use crate::dllite::{
    ABox, Assertion, Atom, BasicConcept, Constraint, GroundTerm, QTerm, Role, Substitution, TBox,
    Ucq,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Val {
    Named(GroundTerm),
    Null(usize),
}

#[derive(Default)]
struct Model {
    concepts: HashMap<String, BTreeSet<Val>>,
    roles: HashMap<String, BTreeSet<(Val, Val)>>,
    depth: BTreeMap<Val, usize>,
    nulls: usize,
    truncated: bool,
}

impl Model {
    fn has_concept(&self, c: &str, v: &Val) -> bool {
        self.concepts.get(c).is_some_and(|s| s.contains(v))
    }

    fn edges(&self, r: &Role) -> Vec<(Val, Val)> {
        let Some(s) = self.roles.get(r.name()) else { return vec![] };
        match r {
            Role::Direct(_) => s.iter().cloned().collect(),
            Role::Inverse(_) => s.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    fn has_successor(&self, r: &Role, v: &Val) -> bool {
        self.roles.get(r.name()).is_some_and(|s| {
            s.iter().any(|(a, b)| match r {
                Role::Direct(_) => a == v,
                Role::Inverse(_) => b == v,
            })
        })
    }

    fn holds(&self, b: &BasicConcept, v: &Val) -> bool {
        match b {
            BasicConcept::Named(c) => self.has_concept(c, v),
            BasicConcept::Exists(r) => self.has_successor(r, v),
        }
    }

    fn add_edge(&mut self, r: &Role, from: Val, to: Val) -> bool {
        let (a, b) = match r {
            Role::Direct(_) => (from, to),
            Role::Inverse(_) => (to, from),
        };
        self.roles.entry(r.name().to_string()).or_default().insert((a, b))
    }

    fn individuals(&self) -> Vec<Val> {
        self.depth.keys().cloned().collect()
    }
}

fn build(tbox: &TBox, abox: &ABox, max_depth: usize) -> Model {
    let mut m = Model::default();
    for a in abox {
        match a {
            Assertion::Concept { concept, term } => {
                let v = Val::Named(term.clone());
                m.depth.insert(v.clone(), 0);
                m.concepts.entry(concept.clone()).or_default().insert(v);
            }
            Assertion::Role {
                role,
                subject,
                object,
            } => {
                let (s, o) = (Val::Named(subject.clone()), Val::Named(object.clone()));
                m.depth.insert(s.clone(), 0);
                m.depth.insert(o.clone(), 0);
                m.roles.entry(role.clone()).or_default().insert((s, o));
            }
        }
    }
    loop {
        let mut changed = false;
        for v in m.individuals() {
            for pi in tbox.positive() {
                if !m.holds(&pi.sub, &v) || m.holds(&pi.sup, &v) {
                    continue;
                }
                match &pi.sup {
                    BasicConcept::Named(c) => {
                        m.concepts.entry(c.clone()).or_default().insert(v.clone());
                        changed = true;
                    }
                    BasicConcept::Exists(r) => {
                        let d = m.depth[&v];
                        if d >= max_depth {
                            m.truncated = true;
                            continue;
                        }
                        let n = Val::Null(m.nulls);
                        m.nulls += 1;
                        m.depth.insert(n.clone(), d + 1);
                        m.add_edge(r, v.clone(), n);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

fn chase(tbox: &TBox, abox: &ABox, cfg: &ChaseConfig, k: usize) -> Result<Model, OracleError> {
    let depth = cfg.depth_for(tbox);
    let m = build(tbox, abox, depth);
    let needed = tbox.positive().len() + k + 1;
    if m.truncated && depth < needed {
        return Err(OracleError::DepthInsufficient { depth, needed });
    }
    Ok(m)
}

type Binding = HashMap<String, Val>;

/// All extensions of `bind` mapping `atoms[i..]` into the model.
fn matches(m: &Model, atoms: &[Atom], i: usize, bind: &mut Binding, out: &mut Vec<Binding>) {
    let Some(atom) = atoms.get(i) else {
        out.push(bind.clone());
        return;
    };
    let resolve = |t: &QTerm, bind: &Binding| -> Option<Val> {
        match t {
            QTerm::Const(c) => Some(Val::Named(c.clone())),
            QTerm::Var(v) => bind.get(v).cloned(),
        }
    };
    let try_unify = |pairs: Vec<(&QTerm, Val)>, bind: &mut Binding, out: &mut Vec<Binding>| {
        let mut added = Vec::new();
        let mut ok = true;
        for (t, val) in pairs {
            match resolve(t, bind) {
                Some(existing) => {
                    if existing != val {
                        ok = false;
                        break;
                    }
                }
                None => {
                    let QTerm::Var(v) = t else { unreachable!() };
                    bind.insert(v.clone(), val);
                    added.push(v.clone());
                }
            }
        }
        if ok {
            matches(m, atoms, i + 1, bind, out);
        }
        for v in added {
            bind.remove(&v);
        }
    };
    match atom {
        Atom::Concept(c, t) => {
            let vals: Vec<Val> = m.concepts.get(c).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            for v in vals {
                try_unify(vec![(t, v)], bind, out);
            }
        }
        Atom::Role(r, s, o) => {
            let pairs: Vec<(Val, Val)> = m.roles.get(r).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            for (a, b) in pairs {
                try_unify(vec![(s, a), (o, b)], bind, out);
            }
        }
    }
}

/// Certain answers of `q` by chasing `abox` with the positive inclusions of `tbox`.
pub fn oracle_certain_answers(
    q: &Ucq,
    tbox: &TBox,
    abox: &ABox,
    cfg: &ChaseConfig,
) -> Result<BTreeSet<Substitution>, OracleError> {
    let k = q.cqs.iter().map(|c| c.atoms.len()).max().unwrap_or(0);
    let m = chase(tbox, abox, cfg, k)?;
    let adom: BTreeSet<GroundTerm> = abox.adom();
    let mut out = BTreeSet::new();
    for cq in &q.cqs {
        let mut found = Vec::new();
        matches(&m, &cq.atoms, 0, &mut HashMap::new(), &mut found);
        for bind in found {
            // head variables absent from the body range over the active domain
            let mut partial: Vec<Substitution> = vec![Substitution::new()];
            let mut ok = true;
            for (x, h) in q.free.iter().zip(&cq.head) {
                let vals: Vec<GroundTerm> = match h {
                    QTerm::Const(c) => vec![c.clone()],
                    QTerm::Var(v) => match bind.get(v) {
                        Some(Val::Named(g)) => vec![g.clone()],
                        Some(Val::Null(_)) => {
                            ok = false;
                            break;
                        }
                        None => adom.iter().cloned().collect(),
                    },
                };
                partial = partial
                    .into_iter()
                    .flat_map(|s| {
                        vals.iter().filter_map(move |d| match s.get(x) {
                            Some(prev) if prev != d => None,
                            _ => {
                                let mut s = s.clone();
                                s.insert(x.clone(), d.clone());
                                Some(s)
                            }
                        })
                    })
                    .collect();
            }
            if ok {
                out.extend(partial.into_iter().filter(|s| s.values().all(|d| adom.contains(d))));
            }
        }
    }
    Ok(out)
}

/// Consistency by checking every constraint on the chased model.
pub fn oracle_consistency(tbox: &TBox, abox: &ABox, cfg: &ChaseConfig) -> Result<bool, OracleError> {
    let m = chase(tbox, abox, cfg, 2)?;
    for c in tbox.constraints() {
        let violated = match &c.constraint {
            Constraint::Disjoint(a, b) => m.individuals().iter().any(|v| m.holds(a, v) && m.holds(b, v)),
            Constraint::RoleDisjoint(r, s) => {
                let s_edges: BTreeSet<(Val, Val)> = m.edges(s).into_iter().collect();
                m.edges(r).iter().any(|e| s_edges.contains(e))
            }
            Constraint::Funct(r) => {
                let mut succ: HashMap<Val, Val> = HashMap::new();
                m.edges(r)
                    .into_iter()
                    .any(|(a, b)| matches!(succ.insert(a, b.clone()), Some(prev) if prev != b))
            }
        };
        if violated {
            return Ok(false);
        }
    }
    Ok(true)
}
