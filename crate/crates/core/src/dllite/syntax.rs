//! Terms, membership assertions, TBox axioms and ABoxes.

use std::collections::BTreeSet;
use std::fmt;

/// Prefix reserved for values minted by the transition-system builder.
pub const FRESH_PREFIX: &str = "$v";
/// Prefix reserved for TBox axiom labels.
pub const LABEL_PREFIX: &str = "@ax";
/// Concept marking states produced by an action step.
pub const STATE_CONCEPT: &str = "State";
/// Concept recording the labels of violated TBox assertions.
pub const VIOL_CONCEPT: &str = "Viol";
/// Distinguished constant carried by the `State` marker.
pub const TEMP_CONSTANT: &str = "temp";

/// A ground service call `f(c1, ..., cn)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkolemCall {
    pub function: String,
    pub args: Vec<String>,
}

impl SkolemCall {
    pub fn new(function: impl Into<String>, args: &[&str]) -> Self {
        SkolemCall {
            function: function.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for SkolemCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.function, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundTerm {
    Constant(String),
    Call(SkolemCall),
}

impl GroundTerm {
    pub fn constant(name: impl Into<String>) -> Self {
        GroundTerm::Constant(name.into())
    }

    pub fn as_constant(&self) -> Option<&str> {
        match self {
            GroundTerm::Constant(c) => Some(c),
            GroundTerm::Call(_) => None,
        }
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Constant(c) => f.write_str(c),
            GroundTerm::Call(call) => call.fmt(f),
        }
    }
}

/// An ABox membership assertion `N(t)` or `P(t1, t2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Concept {
        concept: String,
        term: GroundTerm,
    },
    Role {
        role: String,
        subject: GroundTerm,
        object: GroundTerm,
    },
}

impl Assertion {
    pub fn concept(concept: impl Into<String>, c: impl Into<String>) -> Self {
        Assertion::Concept {
            concept: concept.into(),
            term: GroundTerm::Constant(c.into()),
        }
    }

    pub fn role(role: impl Into<String>, s: impl Into<String>, o: impl Into<String>) -> Self {
        Assertion::Role {
            role: role.into(),
            subject: GroundTerm::Constant(s.into()),
            object: GroundTerm::Constant(o.into()),
        }
    }

    pub fn predicate(&self) -> &str {
        match self {
            Assertion::Concept { concept, .. } => concept,
            Assertion::Role { role, .. } => role,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &GroundTerm> {
        let (a, b) = match self {
            Assertion::Concept { term, .. } => (term, None),
            Assertion::Role {
                subject, object, ..
            } => (subject, Some(object)),
        };
        std::iter::once(a).chain(b)
    }

    /// Applies `f` to every term.
    pub fn map_terms(&self, mut f: impl FnMut(&GroundTerm) -> GroundTerm) -> Assertion {
        match self {
            Assertion::Concept { concept, term } => Assertion::Concept {
                concept: concept.clone(),
                term: f(term),
            },
            Assertion::Role {
                role,
                subject,
                object,
            } => Assertion::Role {
                role: role.clone(),
                subject: f(subject),
                object: f(object),
            },
        }
    }

    pub fn is_ground_constant_only(&self) -> bool {
        self.terms().all(|t| matches!(t, GroundTerm::Constant(_)))
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Concept { concept, term } => write!(f, "{concept}({term})"),
            Assertion::Role {
                role,
                subject,
                object,
            } => write!(f, "{role}({subject},{object})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Direct(String),
    Inverse(String),
}

impl Role {
    pub fn name(&self) -> &str {
        match self {
            Role::Direct(p) | Role::Inverse(p) => p,
        }
    }

    pub fn inverse(&self) -> Role {
        match self {
            Role::Direct(p) => Role::Inverse(p.clone()),
            Role::Inverse(p) => Role::Direct(p.clone()),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Direct(p) => f.write_str(p),
            Role::Inverse(p) => write!(f, "inv {p}"),
        }
    }
}

/// `B -> N | exists R`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicConcept {
    Named(String),
    Exists(Role),
}

impl BasicConcept {
    pub fn named(n: impl Into<String>) -> Self {
        BasicConcept::Named(n.into())
    }

    pub fn exists(p: impl Into<String>) -> Self {
        BasicConcept::Exists(Role::Direct(p.into()))
    }

    pub fn exists_inv(p: impl Into<String>) -> Self {
        BasicConcept::Exists(Role::Inverse(p.into()))
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Named(n) => f.write_str(n),
            BasicConcept::Exists(r) => write!(f, "exists {r}"),
        }
    }
}

/// Positive inclusion `B1 ⊑ B2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositiveInclusion {
    pub sub: BasicConcept,
    pub sup: BasicConcept,
}

/// Negative inclusions and functionality assertions, i.e. the axioms that can be violated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    /// `B1 ⊑ ¬B2`
    Disjoint(BasicConcept, BasicConcept),
    /// `R1 ⊑ ¬R2`
    RoleDisjoint(Role, Role),
    /// `(funct R)`
    Funct(Role),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Disjoint(a, b) => write!(f, "{a} disjoint {b}"),
            Constraint::RoleDisjoint(a, b) => write!(f, "{a} roledisjoint {b}"),
            Constraint::Funct(r) => write!(f, "funct {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledConstraint {
    pub constraint: Constraint,
    pub label: String,
}

/// `T = T_p ⊎ T_n ⊎ T_f`, with every member of `T_n ∪ T_f` carrying a distinct label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TBox {
    positive: Vec<PositiveInclusion>,
    constraints: Vec<LabeledConstraint>,
}

impl TBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn positive(&self) -> &[PositiveInclusion] {
        &self.positive
    }

    pub fn constraints(&self) -> &[LabeledConstraint] {
        &self.constraints
    }

    pub fn add_inclusion(&mut self, sub: BasicConcept, sup: BasicConcept) {
        let pi = PositiveInclusion { sub, sup };
        if !self.positive.contains(&pi) {
            self.positive.push(pi);
        }
    }

    /// Adds a labeled axiom and returns its label. Labels are minted in
    /// declaration order as `@ax1`, `@ax2`, ...
    pub fn add_constraint(&mut self, constraint: Constraint) -> String {
        if let Some(existing) = self.constraints.iter().find(|c| c.constraint == constraint) {
            return existing.label.clone();
        }
        let label = format!("{LABEL_PREFIX}{}", self.constraints.len() + 1);
        self.constraints.push(LabeledConstraint {
            constraint,
            label: label.clone(),
        });
        label
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.constraints.iter().map(|c| c.label.as_str())
    }

    pub fn label_of(&self, constraint: &Constraint) -> Option<&str> {
        self.constraints
            .iter()
            .find(|c| &c.constraint == constraint)
            .map(|c| c.label.as_str())
    }

    /// The TBox restricted to its positive inclusions.
    pub fn positive_part(&self) -> TBox {
        TBox {
            positive: self.positive.clone(),
            constraints: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.constraints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.constraints.len()
    }

    /// Concept and role names mentioned by the axioms.
    pub fn signature(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        let mut basic = |b: &BasicConcept| match b {
            BasicConcept::Named(n) => {
                concepts.insert(n.clone());
            }
            BasicConcept::Exists(r) => {
                roles.insert(r.name().to_string());
            }
        };
        for pi in &self.positive {
            basic(&pi.sub);
            basic(&pi.sup);
        }
        let mut role_names = Vec::new();
        for c in &self.constraints {
            match &c.constraint {
                Constraint::Disjoint(a, b) => {
                    basic(a);
                    basic(b);
                }
                Constraint::RoleDisjoint(a, b) => {
                    role_names.push(a.name().to_string());
                    role_names.push(b.name().to_string());
                }
                Constraint::Funct(r) => role_names.push(r.name().to_string()),
            }
        }
        roles.extend(role_names);
        (concepts, roles)
    }
}

impl fmt::Display for TBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TBOX {{")?;
        for pi in &self.positive {
            writeln!(f, "  {} isa {};", pi.sub, pi.sup)?;
        }
        for c in &self.constraints {
            writeln!(f, "  {};", c.constraint)?;
        }
        write!(f, "}}")
    }
}

/// A finite, canonically sorted set of assertions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ABox(BTreeSet<Assertion>);

impl ABox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Assertion) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: &Assertion) -> bool {
        self.0.remove(a)
    }

    pub fn contains(&self, a: &Assertion) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assertion> {
        self.0.iter()
    }

    pub fn assertions(&self) -> &BTreeSet<Assertion> {
        &self.0
    }

    pub fn is_subset(&self, other: &ABox) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &ABox) -> ABox {
        ABox(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn union(&self, other: &ABox) -> ABox {
        ABox(self.0.union(&other.0).cloned().collect())
    }

    /// `adom(A)`: every term occurring in some assertion.
    pub fn adom(&self) -> BTreeSet<GroundTerm> {
        self.0.iter().flat_map(|a| a.terms().cloned()).collect()
    }

    /// Constants occurring in the ABox, including arguments of service calls.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.0.iter().flat_map(|a| a.terms()) {
            match t {
                GroundTerm::Constant(c) => {
                    out.insert(c.clone());
                }
                GroundTerm::Call(call) => out.extend(call.args.iter().cloned()),
            }
        }
        out
    }

    /// True when no assertion mentions a service call.
    pub fn is_pure(&self) -> bool {
        self.0.iter().all(Assertion::is_ground_constant_only)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&GroundTerm) -> GroundTerm) -> ABox {
        self.0.iter().map(|a| a.map_terms(&mut f)).collect()
    }

    /// Removes every assertion over the given concept name.
    pub fn without_concept(&self, concept: &str) -> ABox {
        self.0
            .iter()
            .filter(|a| !matches!(a, Assertion::Concept { concept: c, .. } if c == concept))
            .cloned()
            .collect()
    }
}

impl FromIterator<Assertion> for ABox {
    fn from_iter<I: IntoIterator<Item = Assertion>>(iter: I) -> Self {
        ABox(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ABox {
    type Item = &'a Assertion;
    type IntoIter = std::collections::btree_set::Iter<'a, Assertion>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ABox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}
