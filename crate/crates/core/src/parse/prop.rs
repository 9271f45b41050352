use super::lexer::{Cursor, Tok};
use super::{ucq, ParseError};
use crate::dllite::Ecq;
use crate::mucalc::MuFormula;

/// Names bound by enclosing quantifiers and fixpoints.
#[derive(Default)]
struct Scope {
    individuals: Vec<String>,
    predicates: Vec<String>,
}

fn formula(cur: &mut Cursor, sc: &mut Scope) -> Result<MuFormula, ParseError> {
    let left = or(cur, sc)?;
    if cur.eat(&Tok::Arrow) {
        return Ok(MuFormula::implies(left, formula(cur, sc)?));
    }
    Ok(left)
}

fn or(cur: &mut Cursor, sc: &mut Scope) -> Result<MuFormula, ParseError> {
    let mut left = and(cur, sc)?;
    while cur.eat(&Tok::Bar) {
        left = MuFormula::or(left, and(cur, sc)?);
    }
    Ok(left)
}

fn and(cur: &mut Cursor, sc: &mut Scope) -> Result<MuFormula, ParseError> {
    let mut left = unary(cur, sc)?;
    while cur.eat(&Tok::Amp) {
        left = MuFormula::and(left, unary(cur, sc)?);
    }
    Ok(left)
}

fn unary(cur: &mut Cursor, sc: &mut Scope) -> Result<MuFormula, ParseError> {
    match cur.peek().clone() {
        Tok::Bang => {
            cur.bump();
            Ok(MuFormula::not(unary(cur, sc)?))
        }
        Tok::Diamond => {
            cur.bump();
            Ok(MuFormula::diamond(unary(cur, sc)?))
        }
        Tok::LBracket if cur.peek_at(1) == &Tok::RBracket => {
            cur.bump();
            cur.bump();
            Ok(MuFormula::boxed(unary(cur, sc)?))
        }
        Tok::LBracket => {
            cur.bump();
            let bound = &sc.individuals;
            let q = ucq(cur, &|n: &str| bound.iter().any(|b| b == n))?;
            cur.expect(&Tok::RBracket)?;
            Ok(MuFormula::Query(Ecq::atom(q)))
        }
        Tok::LParen => {
            cur.bump();
            let f = formula(cur, sc)?;
            cur.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(kw) if kw == "true" => {
            cur.bump();
            Ok(MuFormula::truth())
        }
        Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
            cur.bump();
            let vars = cur.names_until(&Tok::Dot)?;
            if vars.is_empty() {
                return Err(cur.unexpected("a variable"));
            }
            cur.expect(&Tok::Dot)?;
            let n = sc.individuals.len();
            sc.individuals.extend(vars.iter().cloned());
            let body = unary(cur, sc);
            sc.individuals.truncate(n);
            let mut body = body?;
            for v in vars.into_iter().rev() {
                body = if kw == "exists" {
                    MuFormula::exists(v, body)
                } else {
                    MuFormula::forall(v, body)
                };
            }
            Ok(body)
        }
        Tok::Ident(kw) if kw == "mu" || kw == "nu" => {
            cur.bump();
            let z = cur.ident()?;
            cur.expect(&Tok::Dot)?;
            sc.predicates.push(z.clone());
            let body = unary(cur, sc);
            sc.predicates.pop();
            let body = body?;
            Ok(if kw == "mu" {
                MuFormula::mu(z, body)
            } else {
                MuFormula::nu(z, body)
            })
        }
        Tok::Ident(z) => {
            if !sc.predicates.contains(&z) {
                return Err(cur.error(format!("unbound fixpoint variable `{z}`")));
            }
            cur.bump();
            Ok(MuFormula::Var(z))
        }
        _ => Err(cur.unexpected("a formula")),
    }
}

fn check(f: &MuFormula) -> Result<(), ParseError> {
    if let Some(x) = f.free_individual_vars().into_iter().next() {
        return Err(ParseError::Semantic(format!("formula is not closed: `{x}` is free")));
    }
    if let Some(z) = f.non_monotone_var() {
        return Err(ParseError::Semantic(format!(
            "fixpoint variable `{z}` occurs under an odd number of negations"
        )));
    }
    Ok(())
}

/// Parses one closed, monotone formula. Inside `[...]` only names bound by an
/// enclosing `exists`/`forall` (or a query-level `exists`) are variables.
pub fn parse_property(text: &str) -> Result<MuFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = formula(&mut cur, &mut Scope::default())?;
    if cur.peek() != &Tok::Eof {
        return Err(cur.unexpected("end of input"));
    }
    check(&f)?;
    Ok(f)
}

/// A property file: `name = formula ;` entries.
pub fn parse_properties(text: &str) -> Result<Vec<(String, MuFormula)>, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut out = Vec::new();
    while cur.peek() != &Tok::Eof {
        let name = cur.ident()?;
        cur.expect(&Tok::Eq)?;
        let f = formula(&mut cur, &mut Scope::default())?;
        cur.expect(&Tok::Semi)?;
        check(&f).map_err(|e| ParseError::Semantic(format!("{name}: {e}")))?;
        out.push((name, f));
    }
    Ok(out)
}
