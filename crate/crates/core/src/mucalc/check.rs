use std::cell::OnceCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use super::MuFormula as F;
use super::MuFormula;
use crate::dllite::{eval_ecq_with, GroundTerm, Reasoner, Substitution, UcqLeaf};
use crate::kab::{make_leaf, QueryMode};
use crate::ts::TransitionSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("formula is not closed: `{0}` is free")]
    OpenFormula(String),
    #[error("fixpoint variable `{0}` occurs under an odd number of negations")]
    NonMonotoneFixpoint(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: bool,
    pub extension: BTreeSet<usize>,
}

type StateSet = Vec<bool>;

struct NodeInfo {
    free_ind: Vec<String>,
    pred_closed: bool,
}

struct Checker<'a> {
    ts: &'a TransitionSystem,
    reasoner: &'a Reasoner,
    mode: QueryMode,
    leaves: Vec<OnceCell<Box<dyn UcqLeaf + Send + Sync + 'a>>>,
    domain: Vec<GroundTerm>,
    adoms: Vec<BTreeSet<GroundTerm>>,
    info: HashMap<*const MuFormula, NodeInfo>,
    memo: HashMap<(*const MuFormula, Vec<GroundTerm>), Rc<StateSet>>,
}

impl<'a> Checker<'a> {
    fn annotate(&mut self, f: &MuFormula) {
        self.info.insert(
            f as *const _,
            NodeInfo {
                free_ind: f.free_individual_vars().into_iter().collect(),
                pred_closed: f.free_predicate_vars().is_empty(),
            },
        );
        for c in f.children() {
            self.annotate(c);
        }
    }

    fn leaf(&self, s: usize) -> &(dyn UcqLeaf + Send + Sync + 'a) {
        self.leaves[s]
            .get_or_init(|| make_leaf(self.reasoner, &self.ts.state(s).abox, self.mode))
            .as_ref()
    }

    fn eval(&mut self, f: &MuFormula, v: &Substitution, pv: &HashMap<String, StateSet>) -> Rc<StateSet> {
        let info = &self.info[&(f as *const _)];
        let key = if info.pred_closed {
            let slice: Vec<GroundTerm> = info.free_ind.iter().map(|x| v[x].clone()).collect();
            let key = (f as *const _, slice);
            if let Some(r) = self.memo.get(&key) {
                return r.clone();
            }
            Some(key)
        } else {
            None
        };
        let r = Rc::new(self.compute(f, v, pv));
        if let Some(k) = key {
            self.memo.insert(k, r.clone());
        }
        r
    }

    fn compute(&mut self, f: &MuFormula, v: &Substitution, pv: &HashMap<String, StateSet>) -> StateSet {
        let n = self.ts.len();
        match f {
            F::Query(q) => {
                let env: Substitution = q
                    .free_vars()
                    .into_iter()
                    .map(|x| {
                        let d = v[&x].clone();
                        (x, d)
                    })
                    .collect();
                (0..n)
                    .map(|s| eval_ecq_with(q, self.leaf(s), &env).holds())
                    .collect()
            }
            F::Not(a) => self.eval(a, v, pv).iter().map(|b| !b).collect(),
            F::And(a, b) => {
                let x = self.eval(a, v, pv);
                let y = self.eval(b, v, pv);
                x.iter().zip(y.iter()).map(|(p, q)| *p && *q).collect()
            }
            F::Or(a, b) => {
                let x = self.eval(a, v, pv);
                let y = self.eval(b, v, pv);
                x.iter().zip(y.iter()).map(|(p, q)| *p || *q).collect()
            }
            F::Implies(a, b) => {
                let x = self.eval(a, v, pv);
                let y = self.eval(b, v, pv);
                x.iter().zip(y.iter()).map(|(p, q)| !*p || *q).collect()
            }
            F::Exists(x, a) | F::Forall(x, a) => {
                let universal = matches!(f, F::Forall(..));
                let mut out = vec![universal; n];
                for d in self.domain.clone() {
                    let mut w = v.clone();
                    w.insert(x.clone(), d.clone());
                    let inner = self.eval(a, &w, pv);
                    for s in 0..n {
                        if !self.adoms[s].contains(&d) {
                            continue;
                        }
                        if universal {
                            out[s] &= inner[s];
                        } else {
                            out[s] |= inner[s];
                        }
                    }
                }
                out
            }
            F::Diamond(a) => {
                let x = self.eval(a, v, pv);
                (0..n)
                    .map(|s| self.ts.successors(s).iter().any(|&t| x[t]))
                    .collect()
            }
            F::Box(a) => {
                let x = self.eval(a, v, pv);
                (0..n)
                    .map(|s| self.ts.successors(s).iter().all(|&t| x[t]))
                    .collect()
            }
            F::Var(z) => pv[z].clone(),
            F::Mu(z, a) | F::Nu(z, a) => {
                let mut current = vec![matches!(f, F::Nu(..)); n];
                let mut env = pv.clone();
                loop {
                    env.insert(z.clone(), current.clone());
                    let next = self.eval(a, v, &env);
                    if *next == current {
                        return current;
                    }
                    current = (*next).clone();
                }
            }
        }
    }
}

/// Extension of a closed formula over `ts`; the verdict is membership of the initial state.
pub fn model_check(
    ts: &TransitionSystem,
    phi: &MuFormula,
    query_mode: QueryMode,
) -> Result<CheckResult, CheckError> {
    if let Some(x) = phi.free_individual_vars().into_iter().next() {
        return Err(CheckError::OpenFormula(x));
    }
    if let Some(z) = phi.free_predicate_vars().into_iter().next() {
        return Err(CheckError::OpenFormula(z));
    }
    if let Some(z) = phi.non_monotone_var() {
        return Err(CheckError::NonMonotoneFixpoint(z));
    }
    let reasoner = Reasoner::new(ts.tbox().clone());
    let mut ck = Checker {
        ts,
        reasoner: &reasoner,
        mode: query_mode,
        leaves: (0..ts.len()).map(|_| OnceCell::new()).collect(),
        domain: ts.active_domain().iter().cloned().collect(),
        adoms: ts.states().iter().map(|s| s.abox.adom()).collect(),
        info: HashMap::new(),
        memo: HashMap::new(),
    };
    ck.annotate(phi);
    let ext = ck.eval(phi, &Substitution::new(), &HashMap::new());
    let extension: BTreeSet<usize> = ext
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(i, _)| i)
        .collect();
    Ok(CheckResult {
        verdict: extension.contains(&ts.initial()),
        extension,
    })
}
