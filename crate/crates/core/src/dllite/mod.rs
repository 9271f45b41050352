//! DL-Lite_A knowledge bases: rewriting-based certain answers, ECQ evaluation
//! and consistency checking.

pub mod consistency;
pub mod eval;
pub mod query;
pub mod rewrite;
pub mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

pub use consistency::{unsat_query_funct, unsat_query_neg, UnsatQuery};
pub use eval::{eval_ecq_with, Db, Relation, Substitution, UcqLeaf};
pub use query::{Atom, Cq, Ecq, QTerm, Ucq};
pub use rewrite::rewrite_ucq;
pub use syntax::{
    ABox, Assertion, BasicConcept, Constraint, GroundTerm, LabeledConstraint, PositiveInclusion,
    Role, SkolemCall, TBox,
};

/// A TBox together with its prepared violation queries and a rewriting cache.
#[derive(Debug)]
pub struct Reasoner {
    tbox: TBox,
    unsat: Vec<(String, UnsatQuery)>,
    cache: Mutex<HashMap<Ucq, Arc<Ucq>>>,
}

impl Clone for Reasoner {
    fn clone(&self) -> Self {
        Reasoner::new(self.tbox.clone())
    }
}

impl Reasoner {
    pub fn new(tbox: TBox) -> Self {
        let unsat = tbox
            .constraints()
            .iter()
            .map(|c| {
                (
                    c.label.clone(),
                    UnsatQuery::for_constraint(&c.constraint, tbox.positive()),
                )
            })
            .collect();
        Reasoner {
            tbox,
            unsat,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn tbox(&self) -> &TBox {
        &self.tbox
    }

    /// Labeled violation queries, in declaration order.
    pub fn unsat_queries(&self) -> &[(String, UnsatQuery)] {
        &self.unsat
    }

    pub fn rewrite(&self, q: &Ucq) -> Arc<Ucq> {
        if let Some(r) = self.cache.lock().expect("cache poisoned").get(q) {
            return r.clone();
        }
        let r = Arc::new(rewrite_ucq(q, self.tbox.positive()));
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(q.clone(), r.clone());
        r
    }

    pub fn certain_answers(&self, q: &Ucq, abox: &ABox) -> Relation {
        Db::new(abox).eval_ucq(&self.rewrite(q))
    }

    pub fn leaf<'a>(&'a self, abox: &'a ABox) -> DbLeaf<'a> {
        DbLeaf::new(self, abox)
    }

    pub fn eval_ecq(&self, q: &Ecq, abox: &ABox) -> Relation {
        eval_ecq_with(q, &self.leaf(abox), &Substitution::new())
    }

    pub fn is_consistent(&self, abox: &ABox) -> bool {
        if self.unsat.is_empty() {
            return true;
        }
        let db = Db::new(abox);
        !self.unsat.iter().any(|(_, q)| q.holds(&db))
    }

    /// Labels of the violated negative inclusions and functionality assertions.
    pub fn viol(&self, abox: &ABox) -> BTreeSet<String> {
        let db = Db::new(abox);
        self.unsat
            .iter()
            .filter(|(_, q)| q.holds(&db))
            .map(|(l, _)| l.clone())
            .collect()
    }
}

/// Certain-answer leaf evaluation over one ABox.
pub struct DbLeaf<'a> {
    reasoner: &'a Reasoner,
    db: Db<'a>,
    domain: Vec<GroundTerm>,
}

impl<'a> DbLeaf<'a> {
    pub fn new(reasoner: &'a Reasoner, abox: &'a ABox) -> Self {
        let db = Db::new(abox);
        let domain = db.adom().iter().cloned().collect();
        DbLeaf {
            reasoner,
            db,
            domain,
        }
    }
}

impl UcqLeaf for DbLeaf<'_> {
    fn answers(&self, q: &Ucq) -> Relation {
        self.db.eval_ucq(&self.reasoner.rewrite(q))
    }

    fn domain(&self) -> &[GroundTerm] {
        &self.domain
    }
}

pub fn certain_answers(q: &Ucq, tbox: &TBox, abox: &ABox) -> Relation {
    Db::new(abox).eval_ucq(&rewrite_ucq(q, tbox.positive()))
}

pub fn eval_ecq(q: &Ecq, tbox: &TBox, abox: &ABox) -> Relation {
    Reasoner::new(tbox.clone()).eval_ecq(q, abox)
}

pub fn is_consistent(tbox: &TBox, abox: &ABox) -> bool {
    Reasoner::new(tbox.clone()).is_consistent(abox)
}
