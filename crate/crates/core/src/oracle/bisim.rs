//! History-preserving bisimulation between two finite transition systems.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{OracleError, BISIM_GUARD};
use crate::dllite::{GroundTerm, SkolemCall};
use crate::ts::{TransitionSystem, TsState};

type Bijection = BTreeMap<String, String>;

fn bind(h: &mut Bijection, image: &mut BTreeSet<String>, fixed: &BTreeSet<String>, a: &str, b: &str) -> bool {
    if fixed.contains(a) || fixed.contains(b) {
        return a == b;
    }
    match h.get(a) {
        Some(x) => x == b,
        None => {
            if image.contains(b) {
                return false;
            }
            h.insert(a.to_string(), b.to_string());
            image.insert(b.to_string());
            true
        }
    }
}

fn apply(h: &Bijection, c: &str) -> String {
    h.get(c).cloned().unwrap_or_else(|| c.to_string())
}

/// Bijections over non-fixed values that carry the call map of `s1` onto that
/// of `s2` and the ABox of `s1` onto that of `s2`.
fn candidates(s1: &TsState, s2: &TsState, fixed: &BTreeSet<String>) -> Vec<Bijection> {
    if s1.map.len() != s2.map.len() || s1.abox.len() != s2.abox.len() {
        return vec![];
    }
    let e1: Vec<(&SkolemCall, &String)> = s1.map.iter().collect();
    let e2: Vec<(&SkolemCall, &String)> = s2.map.iter().collect();
    let mut found = BTreeSet::new();
    let mut used = vec![false; e2.len()];
    search(&e1, &e2, 0, &mut used, &mut Bijection::new(), &mut BTreeSet::new(), fixed, &mut found);
    found
        .into_iter()
        .filter(|h| {
            let mapped = s1.abox.map_terms(|t| match t {
                GroundTerm::Constant(c) => GroundTerm::Constant(apply(h, c)),
                GroundTerm::Call(_) => t.clone(),
            });
            let closed = s1
                .abox
                .constants()
                .iter()
                .all(|c| fixed.contains(c) || h.contains_key(c));
            closed && mapped == s2.abox
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn search(
    e1: &[(&SkolemCall, &String)],
    e2: &[(&SkolemCall, &String)],
    i: usize,
    used: &mut Vec<bool>,
    h: &mut Bijection,
    image: &mut BTreeSet<String>,
    fixed: &BTreeSet<String>,
    out: &mut BTreeSet<Bijection>,
) {
    let Some((c1, v1)) = e1.get(i) else {
        out.insert(h.clone());
        return;
    };
    for j in 0..e2.len() {
        let (c2, v2) = e2[j];
        if used[j] || c1.function != c2.function || c1.args.len() != c2.args.len() {
            continue;
        }
        let (saved_h, saved_img) = (h.clone(), image.clone());
        let ok = c1
            .args
            .iter()
            .zip(&c2.args)
            .chain(std::iter::once((*v1, v2)))
            .all(|(a, b)| bind(h, image, fixed, a, b));
        if ok {
            used[j] = true;
            search(e1, e2, i + 1, used, h, image, fixed, out);
            used[j] = false;
        }
        *h = saved_h;
        *image = saved_img;
    }
}

fn extends(big: &Bijection, small: &Bijection) -> bool {
    small.iter().all(|(k, v)| big.get(k) == Some(v))
}

/// Greatest fixpoint of the forth/back conditions over candidate triples;
/// true iff the initial states are related by the empty bijection.
pub fn check_bisimilar(ts1: &TransitionSystem, ts2: &TransitionSystem) -> Result<bool, OracleError> {
    for ts in [ts1, ts2] {
        if ts.len() > BISIM_GUARD {
            return Err(OracleError::TooLarge {
                size: ts.len(),
                guard: BISIM_GUARD,
            });
        }
    }
    let fixed: BTreeSet<String> = ts1
        .fixed_constants()
        .union(ts2.fixed_constants())
        .cloned()
        .collect();
    let mut rel: HashMap<(usize, usize), Vec<Bijection>> = HashMap::new();
    for (i, s1) in ts1.states().iter().enumerate() {
        for (j, s2) in ts2.states().iter().enumerate() {
            let hs = candidates(s1, s2, &fixed);
            if !hs.is_empty() {
                rel.insert((i, j), hs);
            }
        }
    }
    let related = |rel: &HashMap<(usize, usize), Vec<Bijection>>, a: usize, b: usize, h: &Bijection| {
        rel.get(&(a, b))
            .is_some_and(|hs| hs.iter().any(|h2| extends(h2, h)))
    };
    loop {
        let mut removed = false;
        let keys: Vec<(usize, usize)> = rel.keys().copied().collect();
        for (i, j) in keys {
            let hs = rel[&(i, j)].clone();
            let keep: Vec<Bijection> = hs
                .iter()
                .filter(|h| {
                    let forth = ts1
                        .successors(i)
                        .iter()
                        .all(|&a| ts2.successors(j).iter().any(|&b| related(&rel, a, b, h)));
                    let back = ts2
                        .successors(j)
                        .iter()
                        .all(|&b| ts1.successors(i).iter().any(|&a| related(&rel, a, b, h)));
                    forth && back
                })
                .cloned()
                .collect();
            if keep.len() != hs.len() {
                removed = true;
                if keep.is_empty() {
                    rel.remove(&(i, j));
                } else {
                    rel.insert((i, j), keep);
                }
            }
        }
        if !removed {
            break;
        }
    }
    Ok(related(&rel, ts1.initial(), ts2.initial(), &Bijection::new()))
}
