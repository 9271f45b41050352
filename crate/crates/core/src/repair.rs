//! ABox repairs (bold and certain), violation labels, and consistent query answering.

use std::collections::{BTreeMap, BTreeSet};

use crate::dllite::{
    eval_ecq_with, ABox, Assertion, Db, Ecq, GroundTerm, Reasoner, Relation, Substitution, TBox,
    Ucq, UcqLeaf,
};

/// Below this size repairs are found by plain subset enumeration.
const SUBSET_LIMIT: usize = 12;

/// The set of b-repairs of an ABox, canonically sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepairSet(BTreeSet<ABox>);

impl RepairSet {
    pub fn iter(&self) -> impl Iterator<Item = &ABox> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &ABox) -> bool {
        self.0.contains(a)
    }

    pub fn into_set(self) -> BTreeSet<ABox> {
        self.0
    }

    /// Intersection of all members.
    pub fn intersection(&self) -> ABox {
        let mut it = self.0.iter();
        let first = it.next().cloned().unwrap_or_default();
        it.fold(first, |acc, r| acc.intersection(r))
    }
}

impl FromIterator<ABox> for RepairSet {
    fn from_iter<I: IntoIterator<Item = ABox>>(iter: I) -> Self {
        RepairSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a RepairSet {
    type Item = &'a ABox;
    type IntoIter = std::collections::btree_set::Iter<'a, ABox>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn b_repairs(abox: &ABox, tbox: &TBox) -> RepairSet {
    b_repairs_with(&Reasoner::new(tbox.clone()), abox)
}

pub fn c_repair(abox: &ABox, tbox: &TBox) -> ABox {
    c_repair_with(&Reasoner::new(tbox.clone()), abox)
}

pub fn viol(abox: &ABox, tbox: &TBox) -> BTreeSet<String> {
    Reasoner::new(tbox.clone()).viol(abox)
}

pub fn cqa_answers(q: &Ucq, tbox: &TBox, abox: &ABox) -> Relation {
    let r = Reasoner::new(tbox.clone());
    CqaLeaf::new(&r, abox).answers(q)
}

pub fn cqa_eval_ecq(q: &Ecq, tbox: &TBox, abox: &ABox) -> Relation {
    let r = Reasoner::new(tbox.clone());
    eval_ecq_with(q, &CqaLeaf::new(&r, abox), &Substitution::new())
}

pub fn c_repair_with(reasoner: &Reasoner, abox: &ABox) -> ABox {
    if reasoner.is_consistent(abox) {
        return abox.clone();
    }
    b_repairs_with(reasoner, abox).intersection()
}

pub fn b_repairs_with(reasoner: &Reasoner, abox: &ABox) -> RepairSet {
    if reasoner.is_consistent(abox) {
        return [abox.clone()].into_iter().collect();
    }
    if abox.len() < SUBSET_LIMIT {
        subset_repairs(reasoner, abox)
    } else {
        conflict_repairs(reasoner, abox)
    }
}

/// Maximal consistent subsets by enumeration, largest first.
fn subset_repairs(reasoner: &Reasoner, abox: &ABox) -> RepairSet {
    let facts: Vec<&Assertion> = abox.iter().collect();
    let n = facts.len();
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|f| f & m == m) {
            continue;
        }
        let sub: ABox = (0..n).filter(|i| m >> i & 1 == 1).map(|i| facts[i].clone()).collect();
        if reasoner.is_consistent(&sub) {
            found.push(m);
        }
    }
    found
        .into_iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| facts[i].clone()).collect())
        .collect()
}

/// Maximal independent sets of the conflict hypergraph. Every minimal conflict
/// is the image of a violation-query match, hence has at most two members.
fn conflict_repairs(reasoner: &Reasoner, abox: &ABox) -> RepairSet {
    let db = Db::new(abox);
    let mut conflicts: BTreeSet<Vec<Assertion>> = BTreeSet::new();
    for (_, q) in reasoner.unsat_queries() {
        conflicts.extend(q.witnesses(&db));
    }
    let self_conflicting: BTreeSet<&Assertion> = conflicts
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| &c[0])
        .collect();
    let vertices: Vec<&Assertion> = abox
        .iter()
        .filter(|a| !self_conflicting.contains(a))
        .collect();
    let index: BTreeMap<&Assertion, usize> =
        vertices.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let n = vertices.len();
    let mut adj = vec![vec![false; n]; n];
    for c in &conflicts {
        if let [a, b] = c.as_slice() {
            if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let mut out = Vec::new();
    // Maximal independent sets are the maximal cliques of the compatibility graph.
    bron_kerbosch(
        &adj,
        Vec::new(),
        (0..n).collect(),
        Vec::new(),
        &mut out,
    );
    out.into_iter()
        .map(|set| set.into_iter().map(|i| vertices[i].clone()).collect())
        .collect()
}

fn bron_kerbosch(
    conflict: &[Vec<bool>],
    r: Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let compatible = |a: usize, b: usize| a != b && !conflict[a][b];
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| compatible(u, v)).count())
        .expect("nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !compatible(pivot, v)).collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| compatible(v, u)).collect();
        let x2 = x.iter().copied().filter(|&u| compatible(v, u)).collect();
        bron_kerbosch(conflict, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Consistent query answering: UCQ answers that hold in every b-repair.
pub struct CqaLeaf<'a> {
    reasoner: &'a Reasoner,
    repairs: Vec<ABox>,
    domain: Vec<GroundTerm>,
}

impl<'a> CqaLeaf<'a> {
    pub fn new(reasoner: &'a Reasoner, abox: &ABox) -> Self {
        CqaLeaf {
            reasoner,
            repairs: b_repairs_with(reasoner, abox).into_set().into_iter().collect(),
            domain: abox.adom().into_iter().collect(),
        }
    }
}

impl UcqLeaf for CqaLeaf<'_> {
    fn answers(&self, q: &Ucq) -> Relation {
        let mut acc: Option<Relation> = None;
        for r in &self.repairs {
            let ans = self.reasoner.certain_answers(q, r);
            acc = Some(match acc {
                None => ans,
                Some(prev) => prev.intersect(&ans),
            });
            if acc.as_ref().is_some_and(Relation::is_empty) {
                break;
            }
        }
        acc.expect("at least one repair")
    }

    fn domain(&self) -> &[GroundTerm] {
        &self.domain
    }
}
