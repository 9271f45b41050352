//! Concrete syntax for KABs (`.kab`) and µ-calculus properties (`.prop`).

mod kab;
mod lexer;
mod prop;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dllite::{Atom, Cq, Ecq, GroundTerm, QTerm, Ucq};
use crate::kab::SpecError;
use lexer::{Cursor, Tok};

pub use kab::{parse_abox, parse_kab};
pub use prop::{parse_properties, parse_property};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
}

impl From<SpecError> for ParseError {
    fn from(e: SpecError) -> Self {
        ParseError::Semantic(e.to_string())
    }
}

/// Decides whether a name in a query position is a variable.
type IsVar<'a> = &'a dyn Fn(&str) -> bool;

fn term(name: String, is_var: IsVar) -> QTerm {
    if is_var(&name) {
        QTerm::Var(name)
    } else {
        QTerm::Const(GroundTerm::Constant(name))
    }
}

/// `P(t)` or `P(t, t)`
fn atom(cur: &mut Cursor, is_var: IsVar) -> Result<Atom, ParseError> {
    let pred = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let args = cur.names_until(&Tok::RParen)?;
    cur.expect(&Tok::RParen)?;
    let mut args = args.into_iter().map(|a| term(a, is_var));
    match (args.next(), args.next(), args.next()) {
        (Some(t), None, None) => Ok(Atom::Concept(pred, t)),
        (Some(s), Some(o), None) => Ok(Atom::Role(pred, s, o)),
        _ => Err(cur.error(format!("`{pred}` must have one or two arguments"))),
    }
}

/// The body of `[...]`: `cq (| cq)*` with `cq := true | (exists xs.)? atom (& atom)*`.
fn ucq(cur: &mut Cursor, is_var: IsVar) -> Result<Ucq, ParseError> {
    let mut bodies: Vec<(BTreeSet<String>, Vec<Atom>)> = Vec::new();
    loop {
        if cur.eat_keyword("true") {
            bodies.push((BTreeSet::new(), Vec::new()));
        } else {
            let mut ex = BTreeSet::new();
            if cur.eat_keyword("exists") {
                ex.extend(cur.names_until(&Tok::Dot)?);
                cur.expect(&Tok::Dot)?;
            }
            let local = |n: &str| ex.contains(n) || is_var(n);
            let mut atoms = vec![atom(cur, &local)?];
            while cur.eat(&Tok::Amp) {
                atoms.push(atom(cur, &local)?);
            }
            bodies.push((ex, atoms));
        }
        if !cur.eat(&Tok::Bar) {
            break;
        }
    }
    let free: BTreeSet<String> = bodies
        .iter()
        .flat_map(|(ex, atoms)| {
            atoms
                .iter()
                .flat_map(|a| a.vars())
                .filter(|v| !ex.contains(*v))
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .collect();
    let free: Vec<String> = free.into_iter().collect();
    let mut cqs = Vec::new();
    for (_, atoms) in bodies {
        let cq = Cq::new(&free, atoms);
        if let Some(v) = free.iter().find(|v| !cq.vars().contains(v.as_str())) {
            return Err(cur.error(format!("every disjunct must mention free variable `{v}`")));
        }
        cqs.push(cq);
    }
    Ok(Ucq { free, cqs })
}

/// `or := and (| and)*`, `and := unary (& unary)*`.
fn ecq(cur: &mut Cursor, is_var: IsVar) -> Result<Ecq, ParseError> {
    let mut left = ecq_and(cur, is_var)?;
    while cur.eat(&Tok::Bar) {
        left = Ecq::or(left, ecq_and(cur, is_var)?);
    }
    Ok(left)
}

fn ecq_and(cur: &mut Cursor, is_var: IsVar) -> Result<Ecq, ParseError> {
    let mut left = ecq_unary(cur, is_var)?;
    while cur.eat(&Tok::Amp) {
        left = Ecq::and(left, ecq_unary(cur, is_var)?);
    }
    Ok(left)
}

fn ecq_unary(cur: &mut Cursor, is_var: IsVar) -> Result<Ecq, ParseError> {
    match cur.peek().clone() {
        Tok::Bang => {
            cur.bump();
            Ok(Ecq::not(ecq_unary(cur, is_var)?))
        }
        Tok::LBracket => {
            cur.bump();
            let q = ucq(cur, is_var)?;
            cur.expect(&Tok::RBracket)?;
            Ok(Ecq::atom(q))
        }
        Tok::LParen => {
            cur.bump();
            let q = ecq(cur, is_var)?;
            cur.expect(&Tok::RParen)?;
            Ok(q)
        }
        Tok::Ident(kw) if kw == "true" => {
            cur.bump();
            Ok(Ecq::truth())
        }
        Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
            cur.bump();
            let vars = cur.names_until(&Tok::Dot)?;
            if vars.is_empty() {
                return Err(cur.unexpected("a variable"));
            }
            cur.expect(&Tok::Dot)?;
            let mut body = ecq_unary(cur, is_var)?;
            for v in vars.into_iter().rev() {
                body = if kw == "exists" {
                    Ecq::exists(v, body)
                } else {
                    Ecq::forall(v, body)
                };
            }
            Ok(body)
        }
        _ => Err(cur.unexpected("a query")),
    }
}
