//! Weak acyclicity of the dependency graph, and the consistent approximant and
//! positive dominant of a KAB.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::dllite::syntax::VIOL_CONCEPT;
use crate::dllite::{rewrite_ucq, Assertion, Atom, Ecq, QTerm, Ucq};
use crate::kab::{Action, AtomTemplate, Effect, KabSpec, ProcessRule, TermTemplate};

/// A predicate position: concepts have position 1, roles 1 and 2.
pub type Node = (String, u8);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<Node>,
    pub ordinary: BTreeSet<(Node, Node)>,
    pub special: BTreeSet<(Node, Node)>,
}

impl DependencyGraph {
    fn add_concept(&mut self, n: &str) {
        self.nodes.insert((n.to_string(), 1));
    }

    fn add_role(&mut self, n: &str) {
        self.nodes.insert((n.to_string(), 1));
        self.nodes.insert((n.to_string(), 2));
    }

    fn add_atom(&mut self, a: &Atom) {
        match a {
            Atom::Concept(n, _) => self.add_concept(n),
            Atom::Role(n, _, _) => self.add_role(n),
        }
    }

    fn add_ucq(&mut self, q: &Ucq) {
        for cq in &q.cqs {
            for a in &cq.atoms {
                self.add_atom(a);
            }
        }
    }

    /// The graph with every node of `predicate` and its incident edges removed.
    pub fn without_predicate(&self, predicate: &str) -> DependencyGraph {
        let keep = |n: &Node| n.0 != predicate;
        let keep_edge = |(a, b): &(Node, Node)| keep(a) && keep(b);
        DependencyGraph {
            nodes: self.nodes.iter().filter(|n| keep(n)).cloned().collect(),
            ordinary: self.ordinary.iter().filter(|e| keep_edge(e)).cloned().collect(),
            special: self.special.iter().filter(|e| keep_edge(e)).cloned().collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let name = |n: &Node| format!("\"{},{}\"", n.0, n.1);
        let mut out = String::from("digraph dependencies {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {};", name(n));
        }
        for (a, b) in &self.ordinary {
            let _ = writeln!(out, "  {} -> {};", name(a), name(b));
        }
        for (a, b) in &self.special {
            let _ = writeln!(out, "  {} -> {} [label=\"*\", style=bold];", name(a), name(b));
        }
        out.push_str("}\n");
        out
    }
}

fn query_atoms(q: &Ecq) -> Vec<&Atom> {
    q.ucqs()
        .into_iter()
        .flat_map(|u| u.cqs.iter().flat_map(|cq| cq.atoms.iter()))
        .collect()
}

/// Positions at which each free variable of `q` occurs in the disjuncts of `rew(q, T_p)`.
fn source_positions(spec: &KabSpec, q: &Ucq) -> BTreeMap<String, BTreeSet<Node>> {
    let rew = rewrite_ucq(q, spec.tbox.positive());
    let mut out: BTreeMap<String, BTreeSet<Node>> = BTreeMap::new();
    for cq in &rew.cqs {
        for (free, h) in q.free.iter().zip(&cq.head) {
            let QTerm::Var(hv) = h else { continue };
            let entry = out.entry(free.clone()).or_default();
            for a in &cq.atoms {
                for (i, t) in a.args().into_iter().enumerate() {
                    if t.as_var() == Some(hv.as_str()) {
                        entry.insert((a.predicate().to_string(), i as u8 + 1));
                    }
                }
            }
        }
    }
    out
}

pub fn dependency_graph(spec: &KabSpec) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    let (concepts, roles) = spec.tbox.signature();
    concepts.iter().for_each(|c| g.add_concept(c));
    roles.iter().for_each(|r| g.add_role(r));
    for a in &spec.a0 {
        match a {
            Assertion::Concept { concept, .. } => g.add_concept(concept),
            Assertion::Role { role, .. } => g.add_role(role),
        }
    }
    for r in &spec.process {
        for a in query_atoms(&r.condition) {
            g.add_atom(a);
        }
    }
    for action in &spec.actions {
        for e in &action.effects {
            g.add_ucq(&e.qplus);
            if let Some(m) = &e.qminus {
                for a in query_atoms(m) {
                    g.add_atom(a);
                }
            }
            let sources = source_positions(spec, &e.qplus);
            for h in &e.head {
                match h {
                    AtomTemplate::Concept(n, _) => g.add_concept(n),
                    AtomTemplate::Role(n, _, _) => g.add_role(n),
                }
                for (j, t) in h.terms().into_iter().enumerate() {
                    let target: Node = (h.predicate().to_string(), j as u8 + 1);
                    let special = matches!(t, TermTemplate::Skolem { .. });
                    for v in t.vars() {
                        for src in sources.get(v).into_iter().flatten() {
                            let edge = (src.clone(), target.clone());
                            if special {
                                g.special.insert(edge);
                            } else {
                                g.ordinary.insert(edge);
                            }
                        }
                    }
                }
            }
        }
    }
    g
}

/// True iff no cycle of the dependency graph goes through a special edge.
pub fn is_weakly_acyclic(g: &DependencyGraph) -> bool {
    let mut pg: DiGraph<(), ()> = DiGraph::new();
    let idx: BTreeMap<&Node, NodeIndex> = g.nodes.iter().map(|n| (n, pg.add_node(()))).collect();
    let id = |n: &Node| idx[n];
    for (a, b) in g.ordinary.iter().chain(&g.special) {
        pg.add_edge(id(a), id(b), ());
    }
    let mut component = vec![0usize; pg.node_count()];
    for (c, scc) in tarjan_scc(&pg).into_iter().enumerate() {
        for n in scc {
            component[n.index()] = c;
        }
    }
    g.special
        .iter()
        .all(|(a, b)| component[id(a).index()] != component[id(b).index()])
}

/// `[Viol(x)] ~> {Viol(x)}`
fn viol_copy() -> Effect {
    Effect {
        qplus: Ucq::from_atoms(vec![Atom::concept(VIOL_CONCEPT, QTerm::var("x"))]),
        qminus: None,
        head: vec![AtomTemplate::Concept(
            VIOL_CONCEPT.into(),
            TermTemplate::Term(QTerm::var("x")),
        )],
    }
}

/// `K^p`: positive TBox, initial ABox saturated with every violation, and a
/// copy effect for `Viol` in every action.
pub fn consistent_approximant(spec: &KabSpec) -> KabSpec {
    let mut a0 = spec.a0.clone();
    for l in spec.tbox.labels() {
        a0.insert(Assertion::concept(VIOL_CONCEPT, l));
    }
    let actions = spec
        .actions
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.effects.push(viol_copy());
            a
        })
        .collect();
    KabSpec {
        tbox: spec.tbox.positive_part(),
        a0,
        actions,
        process: spec.process.clone(),
        delta0: spec.delta0.clone(),
    }
}

/// `K^+`: built from `K^p` with parameters and negative filters dropped and
/// every rule condition replaced by `true`.
pub fn positive_dominant(spec: &KabSpec) -> KabSpec {
    let p = consistent_approximant(spec);
    let actions = p
        .actions
        .iter()
        .map(|a| Action {
            name: a.name.clone(),
            params: Vec::new(),
            effects: a
                .effects
                .iter()
                .map(|e| Effect {
                    qplus: e.qplus.clone(),
                    qminus: None,
                    head: e.head.clone(),
                })
                .collect(),
        })
        .collect();
    let mut seen = BTreeSet::new();
    let process = p
        .process
        .iter()
        .filter(|r| seen.insert(r.action.clone()))
        .map(|r| ProcessRule {
            condition: Ecq::truth(),
            action: r.action.clone(),
            args: Vec::new(),
        })
        .collect();
    KabSpec {
        actions,
        process,
        ..p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dllite::{BasicConcept, TBox};
    use crate::kab::tests::running;

    fn node(n: &str, i: u8) -> Node {
        (n.to_string(), i)
    }

    fn edge(a: &str, b: &str) -> (Node, Node) {
        (node(a, 1), node(b, 1))
    }

    /// The running example plus `[G(y)] -> g3(y)` with `g3(p): [G(p)] ~> {C(g(p))}`.
    fn g_cycle() -> KabSpec {
        let mut spec = running();
        spec.actions.push(Action {
            name: "g3".into(),
            params: vec!["p".into()],
            effects: vec![Effect {
                qplus: Ucq::from_atoms(vec![Atom::concept("G", QTerm::var("p"))]),
                qminus: None,
                head: vec![AtomTemplate::Concept(
                    "C".into(),
                    TermTemplate::Skolem {
                        function: "g".into(),
                        args: vec![QTerm::var("p")],
                    },
                )],
            }],
        });
        spec.process.push(ProcessRule {
            condition: Ecq::atom(Ucq::from_atoms(vec![Atom::concept("G", QTerm::var("y"))])),
            action: "g3".into(),
            args: vec!["y".into()],
        });
        spec
    }

    #[test]
    fn running_example_graph() {
        let g = dependency_graph(&running());
        assert_eq!(g.ordinary, [edge("C", "C"), edge("C", "D")].into());
        assert_eq!(g.special, [edge("C", "G")].into());
        assert!(is_weakly_acyclic(&g));
        assert!(g.to_dot().contains("label=\"*\""));
    }

    #[test]
    fn g_cycle_is_not_weakly_acyclic() {
        let spec = g_cycle();
        spec.validate().unwrap();
        let g = dependency_graph(&spec);
        assert!(g.special.contains(&edge("G", "C")));
        assert!(!is_weakly_acyclic(&g));
    }

    #[test]
    fn rewriting_adds_sources() {
        let mut t = TBox::new();
        t.add_inclusion(BasicConcept::named("A"), BasicConcept::named("C"));
        let spec = KabSpec::new(
            t,
            Default::default(),
            vec![Action {
                name: "a".into(),
                params: vec![],
                effects: vec![Effect {
                    qplus: Ucq::from_atoms(vec![Atom::concept("C", QTerm::var("x"))]),
                    qminus: None,
                    head: vec![AtomTemplate::Concept("D".into(), TermTemplate::Term(QTerm::var("x")))],
                }],
            }],
            vec![],
        );
        let g = dependency_graph(&spec);
        assert_eq!(g.ordinary, [edge("A", "D"), edge("C", "D")].into());
        assert!(g.special.is_empty());
    }

    #[test]
    fn constant_head_has_no_edges() {
        let mut spec = running();
        spec.actions[0].effects[0].head = vec![AtomTemplate::Concept(
            "D".into(),
            TermTemplate::Term(QTerm::constant("a")),
        )];
        spec.actions.truncate(1);
        spec.process.truncate(1);
        let g = dependency_graph(&spec);
        assert!(g.ordinary.is_empty() && g.special.is_empty());
        assert!(is_weakly_acyclic(&DependencyGraph::default()));
    }

    #[test]
    fn approximant_and_dominant() {
        let spec = running();
        let p = consistent_approximant(&spec);
        p.validate().unwrap();
        let label = spec.tbox.labels().next().unwrap().to_string();
        assert_eq!(
            p.a0,
            [Assertion::concept("C", "a"), Assertion::concept(VIOL_CONCEPT, label)]
                .into_iter()
                .collect()
        );
        assert!(p.tbox.constraints().is_empty());
        assert!(p.actions.iter().all(|a| a.effects.last() == Some(&viol_copy())));

        let d = positive_dominant(&spec);
        d.validate().unwrap();
        assert!(d.actions.iter().all(|a| a.params.is_empty()));
        assert!(d.process.iter().all(|r| r.condition == Ecq::truth() && r.args.is_empty()));
        let g2 = d.action("g2").unwrap();
        assert_eq!(g2.effects[0].qplus.free, vec!["p".to_string()]);
    }

    #[test]
    fn graphs_coincide_modulo_viol() {
        for spec in [running(), g_cycle()] {
            let g = dependency_graph(&spec);
            let gp = dependency_graph(&consistent_approximant(&spec)).without_predicate(VIOL_CONCEPT);
            let gd = dependency_graph(&positive_dominant(&spec)).without_predicate(VIOL_CONCEPT);
            assert_eq!(g, gp);
            assert_eq!(g, gd);
        }
    }
}
