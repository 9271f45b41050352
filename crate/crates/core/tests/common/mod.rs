#![allow(dead_code)]

use std::path::PathBuf;

use kab_core::dllite::{Atom, BasicConcept, Constraint, QTerm, Role, Ucq};
use kab_core::{parse_kab, parse_properties, ABox, Assertion, KabSpec, MuFormula, TBox};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn kab(name: &str) -> KabSpec {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.kab"))).unwrap();
    parse_kab(&text).unwrap_or_else(|e| panic!("{name}.kab: {e}"))
}

pub fn suite(name: &str) -> Vec<(String, MuFormula)> {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.prop"))).unwrap();
    parse_properties(&text).unwrap_or_else(|e| panic!("{name}.prop: {e}"))
}

/// Fixtures with a property suite; all are weakly acyclic.
pub const FIXTURES: [&str; 3] = ["running", "tickets", "owns"];

const CONCEPTS: [&str; 3] = ["A", "B", "C"];
const ROLES: [&str; 2] = ["P", "Q"];
const INDIVIDUALS: [&str; 3] = ["a", "b", "c"];

#[derive(Clone, Debug)]
pub struct Instance {
    pub tbox: TBox,
    pub abox: ABox,
    pub query: Ucq,
}

fn role(rng: &mut ChaCha8Rng) -> Role {
    let p = ROLES.choose(rng).unwrap().to_string();
    if rng.gen_bool(0.3) {
        Role::Inverse(p)
    } else {
        Role::Direct(p)
    }
}

fn basic(rng: &mut ChaCha8Rng) -> BasicConcept {
    if rng.gen_bool(0.6) {
        BasicConcept::named(*CONCEPTS.choose(rng).unwrap())
    } else {
        BasicConcept::Exists(role(rng))
    }
}

fn term(rng: &mut ChaCha8Rng, vars: &[&str]) -> QTerm {
    if rng.gen_bool(0.2) {
        QTerm::constant(*INDIVIDUALS.choose(rng).unwrap())
    } else {
        QTerm::var(*vars.choose(rng).unwrap())
    }
}

fn atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> Atom {
    if rng.gen_bool(0.5) {
        Atom::concept(*CONCEPTS.choose(rng).unwrap(), term(rng, vars))
    } else {
        Atom::role(*ROLES.choose(rng).unwrap(), term(rng, vars), term(rng, vars))
    }
}

/// At most 4 axioms, 6 assertions and a 2-atom query.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let mut tbox = TBox::new();
    for _ in 0..rng.gen_range(0..=4) {
        match rng.gen_range(0..10) {
            0..=4 => tbox.add_inclusion(basic(rng), basic(rng)),
            5..=7 => {
                tbox.add_constraint(Constraint::Disjoint(basic(rng), basic(rng)));
            }
            8 => {
                tbox.add_constraint(Constraint::RoleDisjoint(role(rng), role(rng)));
            }
            _ => {
                tbox.add_constraint(Constraint::Funct(role(rng)));
            }
        }
    }
    let mut abox = ABox::new();
    for _ in 0..rng.gen_range(0..=6) {
        let a = *INDIVIDUALS.choose(rng).unwrap();
        if rng.gen_bool(0.5) {
            abox.insert(Assertion::concept(*CONCEPTS.choose(rng).unwrap(), a));
        } else {
            let b = *INDIVIDUALS.choose(rng).unwrap();
            abox.insert(Assertion::role(*ROLES.choose(rng).unwrap(), a, b));
        }
    }
    let vars = ["x", "y"];
    let n = rng.gen_range(1..=2);
    let atoms: Vec<Atom> = (0..n).map(|_| atom(rng, &vars)).collect();
    let mentioned: Vec<String> = vars
        .iter()
        .filter(|v| atoms.iter().any(|a| a.vars().any(|w| w == **v)))
        .map(|v| v.to_string())
        .collect();
    let free: Vec<String> = mentioned.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
    let query = Ucq::new(free, vec![atoms]);
    Instance { tbox, abox, query }
}
