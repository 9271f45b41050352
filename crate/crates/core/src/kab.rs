//! Knowledge and Action Bases: actions with conditional effects, process rules,
//! and the single-step machinery (legal parameters, `do`, service calls, grounding).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::dllite::syntax::{FRESH_PREFIX, LABEL_PREFIX, STATE_CONCEPT, TEMP_CONSTANT, VIOL_CONCEPT};
use crate::dllite::{
    eval_ecq_with, ABox, Assertion, DbLeaf, Ecq, GroundTerm, QTerm, Reasoner, Relation,
    SkolemCall, Substitution, TBox, Ucq, UcqLeaf,
};
use crate::repair::CqaLeaf;

/// Results of the service calls issued so far: `m: SC -> C`.
pub type ServiceCallMap = BTreeMap<SkolemCall, String>;

/// How embedded UCQs are answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryMode {
    Certain,
    Cqa,
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryMode::Certain => "certain",
            QueryMode::Cqa => "cqa",
        })
    }
}

impl std::str::FromStr for QueryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certain" => Ok(QueryMode::Certain),
            "cqa" => Ok(QueryMode::Cqa),
            other => Err(format!("unknown query mode `{other}`")),
        }
    }
}

/// Builds the UCQ answering strategy for one ABox.
pub fn make_leaf<'a>(
    reasoner: &'a Reasoner,
    abox: &'a ABox,
    mode: QueryMode,
) -> Box<dyn UcqLeaf + Send + Sync + 'a> {
    match mode {
        QueryMode::Certain => Box::new(DbLeaf::new(reasoner, abox)),
        QueryMode::Cqa => Box::new(CqaLeaf::new(reasoner, abox)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermTemplate {
    Term(QTerm),
    Skolem { function: String, args: Vec<QTerm> },
}

impl TermTemplate {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            TermTemplate::Term(t) => t.as_var().into_iter().collect(),
            TermTemplate::Skolem { args, .. } => args.iter().filter_map(QTerm::as_var).collect(),
        }
    }

    pub fn constants(&self) -> Vec<&GroundTerm> {
        let terms: Vec<&QTerm> = match self {
            TermTemplate::Term(t) => vec![t],
            TermTemplate::Skolem { args, .. } => args.iter().collect(),
        };
        terms
            .into_iter()
            .filter_map(|t| match t {
                QTerm::Const(c) => Some(c),
                QTerm::Var(_) => None,
            })
            .collect()
    }

    fn instantiate(&self, binding: &Substitution) -> GroundTerm {
        let value = |t: &QTerm| -> GroundTerm {
            match t {
                QTerm::Const(c) => c.clone(),
                QTerm::Var(v) => binding
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| panic!("unbound head variable {v}")),
            }
        };
        match self {
            TermTemplate::Term(t) => value(t),
            TermTemplate::Skolem { function, args } => GroundTerm::Call(SkolemCall {
                function: function.clone(),
                args: args
                    .iter()
                    .map(|a| match value(a) {
                        GroundTerm::Constant(c) => c,
                        GroundTerm::Call(call) => panic!("nested service call {call}"),
                    })
                    .collect(),
            }),
        }
    }
}

impl fmt::Display for TermTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermTemplate::Term(t) => t.fmt(f),
            TermTemplate::Skolem { function, args } => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{function}({})", args.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomTemplate {
    Concept(String, TermTemplate),
    Role(String, TermTemplate, TermTemplate),
}

impl AtomTemplate {
    pub fn predicate(&self) -> &str {
        match self {
            AtomTemplate::Concept(n, _) | AtomTemplate::Role(n, _, _) => n,
        }
    }

    pub fn terms(&self) -> Vec<&TermTemplate> {
        match self {
            AtomTemplate::Concept(_, t) => vec![t],
            AtomTemplate::Role(_, s, o) => vec![s, o],
        }
    }

    fn instantiate(&self, binding: &Substitution) -> Assertion {
        match self {
            AtomTemplate::Concept(n, t) => Assertion::Concept {
                concept: n.clone(),
                term: t.instantiate(binding),
            },
            AtomTemplate::Role(n, s, o) => Assertion::Role {
                role: n.clone(),
                subject: s.instantiate(binding),
                object: o.instantiate(binding),
            },
        }
    }
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomTemplate::Concept(n, t) => write!(f, "{n}({t})"),
            AtomTemplate::Role(n, s, o) => write!(f, "{n}({s},{o})"),
        }
    }
}

/// `[q+] ∧ Q- ~> head`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Effect {
    pub qplus: Ucq,
    pub qminus: Option<Ecq>,
    pub head: Vec<AtomTemplate>,
}

impl Effect {
    /// The condition `[q+] ∧ Q-` as one ECQ.
    pub fn condition(&self) -> Ecq {
        let plus = Ecq::atom(self.qplus.clone());
        match &self.qminus {
            Some(minus) => Ecq::and(plus, minus.clone()),
            None => plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub name: String,
    pub params: Vec<String>,
    pub effects: Vec<Effect>,
}

/// `Q ↦ α(args)`; the free variables of `Q` are exactly `args`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProcessRule {
    pub condition: Ecq,
    pub action: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KabSpec {
    pub tbox: TBox,
    pub a0: ABox,
    pub actions: Vec<Action>,
    pub process: Vec<ProcessRule>,
    /// Distinguished constants; always contains `temp` and every axiom label.
    pub delta0: BTreeSet<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("initial ABox contains service call {0}")]
    ImpureInitialAbox(String),
    #[error("reserved name `{0}` used in {1}")]
    Reserved(String, &'static str),
    #[error("action `{action}`: duplicate parameter `{param}`")]
    DuplicateParam { action: String, param: String },
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("action `{action}`: head variable `{var}` is not a free variable of the effect query")]
    UnscopedHeadVariable { action: String, var: String },
    #[error("action `{action}`: filter variable `{var}` is not a free variable of the effect query")]
    UnscopedFilterVariable { action: String, var: String },
    #[error("action `{action}`: head constant `{constant}` is neither in the initial ABox nor distinguished")]
    ForeignHeadConstant { action: String, constant: String },
    #[error("action `{action}`: query disjuncts disagree on free variables")]
    UnsafeQuery { action: String },
    #[error("process rule for unknown action `{0}`")]
    UnknownAction(String),
    #[error("process rule for `{action}` passes {given} arguments, expected {expected}")]
    Arity {
        action: String,
        given: usize,
        expected: usize,
    },
    #[error("process rule for `{action}`: condition free variables {found:?} differ from arguments {args:?}")]
    RuleVariables {
        action: String,
        found: Vec<String>,
        args: Vec<String>,
    },
    #[error("axiom label `{0}` missing from the distinguished constants")]
    MissingLabel(String),
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "effect [{}]", self.qplus)?;
        if let Some(m) = &self.qminus {
            write!(f, " and {m}")?;
        }
        let head: Vec<String> = self.head.iter().map(|h| h.to_string()).collect();
        if head.is_empty() {
            write!(f, " ~> {{ }};")
        } else {
            write!(f, " ~> {{ {} }};", head.join(", "))
        }
    }
}

impl fmt::Display for KabSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.tbox)?;
        writeln!(f, "ABOX {{")?;
        for a in &self.a0 {
            writeln!(f, "  {a};")?;
        }
        writeln!(f, "}}")?;
        let labels: BTreeSet<&str> = self.tbox.labels().collect();
        let extra: Vec<&String> = self
            .delta0
            .iter()
            .filter(|c| c.as_str() != TEMP_CONSTANT && !labels.contains(c.as_str()))
            .collect();
        if !extra.is_empty() {
            writeln!(f, "CONSTANTS {{")?;
            for c in extra {
                writeln!(f, "  {c};")?;
            }
            writeln!(f, "}}")?;
        }
        for a in &self.actions {
            writeln!(f, "ACTION {}({}) {{", a.name, a.params.join(", "))?;
            for e in &a.effects {
                writeln!(f, "  {e}")?;
            }
            writeln!(f, "}}")?;
        }
        writeln!(f, "PROCESS {{")?;
        for r in &self.process {
            writeln!(f, "  {} -> {}({});", r.condition, r.action, r.args.join(", "))?;
        }
        writeln!(f, "}}")
    }
}

/// A service call left unresolved by `ground`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no value for service call {0}")]
pub struct MissingCallBinding(pub SkolemCall);

fn is_reserved_constant(c: &str) -> bool {
    c == TEMP_CONSTANT || c.starts_with(FRESH_PREFIX) || c.starts_with(LABEL_PREFIX)
}

/// Every variable of every disjunct occurs in the body, and all disjuncts share the free tuple.
fn ucq_is_safe(q: &Ucq) -> bool {
    q.cqs.iter().all(|cq| {
        cq.head.len() == q.free.len() && {
            let body = cq.vars();
            cq.head_vars().iter().all(|v| body.contains(v))
        }
    })
}

impl KabSpec {
    /// A KAB with `delta0 = {temp} ∪ labels`.
    pub fn new(tbox: TBox, a0: ABox, actions: Vec<Action>, process: Vec<ProcessRule>) -> Self {
        let mut delta0: BTreeSet<String> = tbox.labels().map(str::to_string).collect();
        delta0.insert(TEMP_CONSTANT.to_string());
        KabSpec {
            tbox,
            a0,
            actions,
            process,
            delta0,
        }
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Constants whose identity is observable: the distinguished constants, the
    /// initial ABox, and every constant written in actions and rules.
    pub fn fixed_constants(&self) -> BTreeSet<String> {
        let mut out = self.delta0.clone();
        out.insert(TEMP_CONSTANT.to_string());
        out.extend(self.tbox.labels().map(str::to_string));
        out.extend(self.a0.constants());
        let from_ucq = |q: &Ucq, out: &mut BTreeSet<String>| {
            for cq in &q.cqs {
                for t in cq.atoms.iter().flat_map(|a| a.args()).chain(&cq.head) {
                    if let QTerm::Const(GroundTerm::Constant(c)) = t {
                        out.insert(c.clone());
                    }
                }
            }
        };
        for a in &self.actions {
            for e in &a.effects {
                from_ucq(&e.qplus, &mut out);
                if let Some(m) = &e.qminus {
                    for q in m.ucqs() {
                        from_ucq(q, &mut out);
                    }
                }
                for h in &e.head {
                    for t in h.terms() {
                        for c in t.constants() {
                            if let GroundTerm::Constant(c) = c {
                                out.insert(c.clone());
                            }
                        }
                    }
                }
            }
        }
        for r in &self.process {
            for q in r.condition.ucqs() {
                from_ucq(q, &mut out);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if let Some(a) = self.a0.iter().find(|a| !a.is_ground_constant_only()) {
            return Err(SpecError::ImpureInitialAbox(a.to_string()));
        }
        for a in &self.a0 {
            // Viol(label) facts are allowed so that saturated approximants stay valid
            let label_viol = matches!(a, Assertion::Concept { concept, term }
                if concept == VIOL_CONCEPT
                    && term.as_constant().is_some_and(|c| c.starts_with(LABEL_PREFIX) && self.delta0.contains(c)));
            if label_viol {
                continue;
            }
            if a.predicate() == STATE_CONCEPT || a.predicate() == VIOL_CONCEPT {
                return Err(SpecError::Reserved(a.predicate().into(), "the initial ABox"));
            }
            let mut consts = a.terms().filter_map(GroundTerm::as_constant);
            if let Some(c) = consts.find(|c| is_reserved_constant(c)) {
                return Err(SpecError::Reserved(c.into(), "the initial ABox"));
            }
        }
        for l in self.tbox.labels() {
            if !self.delta0.contains(l) {
                return Err(SpecError::MissingLabel(l.into()));
            }
        }
        let (concepts, roles) = self.tbox.signature();
        for n in [STATE_CONCEPT, VIOL_CONCEPT] {
            if concepts.contains(n) || roles.contains(n) {
                return Err(SpecError::Reserved(n.into(), "the TBox"));
            }
        }
        let allowed_head: BTreeSet<String> = self
            .a0
            .constants()
            .into_iter()
            .chain(self.delta0.iter().cloned())
            .collect();
        let mut names = BTreeSet::new();
        for a in &self.actions {
            if !names.insert(a.name.as_str()) {
                return Err(SpecError::DuplicateAction(a.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for p in &a.params {
                if !seen.insert(p) {
                    return Err(SpecError::DuplicateParam {
                        action: a.name.clone(),
                        param: p.clone(),
                    });
                }
            }
            for e in &a.effects {
                if !ucq_is_safe(&e.qplus) {
                    return Err(SpecError::UnsafeQuery {
                        action: a.name.clone(),
                    });
                }
                let free: BTreeSet<&str> = e.qplus.free.iter().map(String::as_str).collect();
                if let Some(m) = &e.qminus {
                    if let Some(v) = m.free_vars().into_iter().find(|v| !free.contains(v.as_str())) {
                        return Err(SpecError::UnscopedFilterVariable {
                            action: a.name.clone(),
                            var: v,
                        });
                    }
                }
                for h in &e.head {
                    if h.predicate() == STATE_CONCEPT {
                        return Err(SpecError::Reserved(STATE_CONCEPT.into(), "an effect head"));
                    }
                    for t in h.terms() {
                        if let Some(v) = t.vars().into_iter().find(|v| !free.contains(v)) {
                            return Err(SpecError::UnscopedHeadVariable {
                                action: a.name.clone(),
                                var: v.to_string(),
                            });
                        }
                        for c in t.constants() {
                            let name = c.to_string();
                            if !allowed_head.contains(&name) {
                                return Err(SpecError::ForeignHeadConstant {
                                    action: a.name.clone(),
                                    constant: name,
                                });
                            }
                        }
                    }
                }
            }
        }
        for r in &self.process {
            let Some(a) = self.action(&r.action) else {
                return Err(SpecError::UnknownAction(r.action.clone()));
            };
            if a.params.len() != r.args.len() {
                return Err(SpecError::Arity {
                    action: r.action.clone(),
                    given: r.args.len(),
                    expected: a.params.len(),
                });
            }
            let found: BTreeSet<String> = r.condition.free_vars();
            let args: BTreeSet<String> = r.args.iter().cloned().collect();
            if found != args {
                return Err(SpecError::RuleVariables {
                    action: r.action.clone(),
                    found: found.into_iter().collect(),
                    args: r.args.clone(),
                });
            }
        }
        Ok(())
    }
}

/// A legal action instance: the index of the action in the KAB and its parameter assignment.
pub type ActionInstance = (usize, Substitution);

/// All `(α, σ)` enabled by some process rule in the given ABox.
pub fn legal_assignments(
    spec: &KabSpec,
    reasoner: &Reasoner,
    abox: &ABox,
    mode: QueryMode,
) -> Vec<ActionInstance> {
    let leaf = make_leaf(reasoner, abox, mode);
    legal_assignments_with(spec, leaf.as_ref())
}

pub fn legal_assignments_with(spec: &KabSpec, leaf: &dyn UcqLeaf) -> Vec<ActionInstance> {
    let mut out: BTreeSet<(usize, Substitution)> = BTreeSet::new();
    for rule in &spec.process {
        let Some(idx) = spec.actions.iter().position(|a| a.name == rule.action) else {
            continue;
        };
        let action = &spec.actions[idx];
        let rel = eval_ecq_with(&rule.condition, leaf, &Substitution::new());
        for row in rel.substitutions() {
            let sigma: Substitution = action
                .params
                .iter()
                .zip(&rule.args)
                .map(|(p, a)| (p.clone(), row[a].clone()))
                .collect();
            out.insert((idx, sigma));
        }
    }
    out.into_iter().collect()
}

/// `do(T, A, ασ)`: the union over effects of the instantiated heads. The result
/// may contain service calls.
pub fn do_effects(
    reasoner: &Reasoner,
    abox: &ABox,
    action: &Action,
    sigma: &Substitution,
    mode: QueryMode,
) -> ABox {
    let leaf = make_leaf(reasoner, abox, mode);
    do_effects_with(leaf.as_ref(), action, sigma)
}

pub fn do_effects_with(leaf: &dyn UcqLeaf, action: &Action, sigma: &Substitution) -> ABox {
    let mut out = ABox::new();
    for e in &action.effects {
        let rel: Relation = eval_ecq_with(&e.condition(), leaf, sigma);
        for rho in rel.substitutions() {
            let mut binding = sigma.clone();
            binding.extend(rho);
            for h in &e.head {
                out.insert(h.instantiate(&binding));
            }
        }
    }
    out
}

/// `CALLS(E)`
pub fn calls(facts: &ABox) -> BTreeSet<SkolemCall> {
    facts
        .iter()
        .flat_map(|a| a.terms())
        .filter_map(|t| match t {
            GroundTerm::Call(c) => Some(c.clone()),
            GroundTerm::Constant(_) => None,
        })
        .collect()
}

/// Replaces every service call by its value under `theta`.
pub fn ground(
    facts: &ABox,
    theta: &BTreeMap<SkolemCall, String>,
) -> Result<ABox, MissingCallBinding> {
    if let Some(missing) = calls(facts).into_iter().find(|c| !theta.contains_key(c)) {
        return Err(MissingCallBinding(missing));
    }
    Ok(facts.map_terms(|t| match t {
        GroundTerm::Call(c) => GroundTerm::Constant(theta[c].clone()),
        GroundTerm::Constant(_) => t.clone(),
    }))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dllite::{Atom, BasicConcept, Constraint};

    /// The running example, built by hand.
    pub(crate) fn running() -> KabSpec {
        let mut t = TBox::new();
        t.add_constraint(Constraint::Disjoint(
            BasicConcept::named("C"),
            BasicConcept::named("D"),
        ));
        let x = || QTerm::var("x");
        let p = || QTerm::var("p");
        let g1 = Action {
            name: "g1".into(),
            params: vec![],
            effects: vec![Effect {
                qplus: Ucq::from_atoms(vec![Atom::concept("C", x())]),
                qminus: None,
                head: vec![
                    AtomTemplate::Concept("D".into(), TermTemplate::Term(x())),
                    AtomTemplate::Concept("C".into(), TermTemplate::Term(x())),
                ],
            }],
        };
        let g2 = Action {
            name: "g2".into(),
            params: vec!["p".into()],
            effects: vec![Effect {
                qplus: Ucq::from_atoms(vec![Atom::concept("C", p())]),
                qminus: None,
                head: vec![AtomTemplate::Concept(
                    "G".into(),
                    TermTemplate::Skolem {
                        function: "f".into(),
                        args: vec![p()],
                    },
                )],
            }],
        };
        let rules = vec![
            ProcessRule {
                condition: Ecq::truth(),
                action: "g1".into(),
                args: vec![],
            },
            ProcessRule {
                condition: Ecq::atom(Ucq::from_atoms(vec![Atom::concept("C", QTerm::var("y"))])),
                action: "g2".into(),
                args: vec!["y".into()],
            },
        ];
        KabSpec::new(t, [Assertion::concept("C", "a")].into_iter().collect(), vec![g1, g2], rules)
    }

    fn sub(pairs: &[(&str, &str)]) -> Substitution {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), GroundTerm::constant(*v)))
            .collect()
    }

    #[test]
    fn running_example_is_valid() {
        let k = running();
        k.validate().unwrap();
        assert!(k.fixed_constants().contains("a"));
        assert!(k.fixed_constants().contains("@ax1"));
    }

    #[test]
    fn legal_parameters_in_initial_state() {
        let k = running();
        let r = Reasoner::new(k.tbox.clone());
        let legal = legal_assignments(&k, &r, &k.a0, QueryMode::Certain);
        assert_eq!(legal, vec![(0, sub(&[])), (1, sub(&[("p", "a")]))]);

        let mut empty = k.clone();
        empty.process.clear();
        assert!(legal_assignments(&empty, &r, &k.a0, QueryMode::Certain).is_empty());

        let bad: ABox = [Assertion::concept("C", "a"), Assertion::concept("D", "a")]
            .into_iter()
            .collect();
        let cqa = legal_assignments(&k, &r, &bad, QueryMode::Cqa);
        assert_eq!(cqa, vec![(0, sub(&[]))]);
    }

    #[test]
    fn effects_and_calls() {
        let k = running();
        let r = Reasoner::new(k.tbox.clone());
        let e1 = do_effects(&r, &k.a0, &k.actions[0], &sub(&[]), QueryMode::Certain);
        let expected: ABox = [Assertion::concept("D", "a"), Assertion::concept("C", "a")]
            .into_iter()
            .collect();
        assert_eq!(e1, expected);
        assert!(calls(&e1).is_empty());

        let e2 = do_effects(&r, &k.a0, &k.actions[1], &sub(&[("p", "a")]), QueryMode::Certain);
        let fa = SkolemCall::new("f", &["a"]);
        assert_eq!(e2.to_string(), "{G(f(a))}");
        assert_eq!(calls(&e2), [fa.clone()].into());

        let theta: BTreeMap<SkolemCall, String> = [(fa.clone(), "c".to_string())].into();
        assert_eq!(ground(&e2, &theta).unwrap().to_string(), "{G(c)}");
        assert_eq!(ground(&e2, &BTreeMap::new()), Err(MissingCallBinding(fa)));

        let g: ABox = [Assertion::concept("G", "c")].into_iter().collect();
        assert!(do_effects(&r, &g, &k.actions[0], &sub(&[]), QueryMode::Certain).is_empty());
    }

    #[test]
    fn calls_scan_both_positions() {
        let e: ABox = [Assertion::Role {
            role: "P".into(),
            subject: GroundTerm::Call(SkolemCall::new("f", &["a"])),
            object: GroundTerm::Call(SkolemCall::new("g", &["a", "b"])),
        }]
        .into_iter()
        .collect();
        assert_eq!(calls(&e).len(), 2);
        let theta: BTreeMap<SkolemCall, String> = [
            (SkolemCall::new("f", &["a"]), "a".to_string()),
            (SkolemCall::new("g", &["a", "b"]), "a".to_string()),
        ]
        .into();
        assert_eq!(ground(&e, &theta).unwrap().to_string(), "{P(a,a)}");
    }

    #[test]
    fn head_variable_outside_query_is_rejected() {
        let mut k = running();
        k.actions[0].effects[0]
            .head
            .push(AtomTemplate::Concept("D".into(), TermTemplate::Term(QTerm::var("z"))));
        assert!(matches!(k.validate(), Err(SpecError::UnscopedHeadVariable { .. })));
    }
}
