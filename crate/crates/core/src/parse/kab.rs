use std::collections::BTreeSet;

use super::lexer::{Cursor, Tok};
use super::{atom, ecq, term, ucq, IsVar, ParseError};
use crate::dllite::syntax::{FRESH_PREFIX, LABEL_PREFIX, TEMP_CONSTANT};
use crate::dllite::{ABox, Assertion, Atom, BasicConcept, Constraint, QTerm, Role, TBox};
use crate::kab::{Action, AtomTemplate, Effect, KabSpec, ProcessRule, TermTemplate};

fn role(cur: &mut Cursor) -> Result<Role, ParseError> {
    if cur.eat_keyword("inv") {
        Ok(Role::Inverse(cur.ident()?))
    } else {
        Ok(Role::Direct(cur.ident()?))
    }
}

fn basic(cur: &mut Cursor) -> Result<BasicConcept, ParseError> {
    if cur.eat_keyword("exists") {
        Ok(BasicConcept::Exists(role(cur)?))
    } else {
        Ok(BasicConcept::Named(cur.ident()?))
    }
}

fn tbox(cur: &mut Cursor) -> Result<TBox, ParseError> {
    let mut t = TBox::new();
    cur.expect_keyword("TBOX")?;
    cur.expect(&Tok::LBrace)?;
    while !cur.eat(&Tok::RBrace) {
        if cur.eat_keyword("funct") {
            t.add_constraint(Constraint::Funct(role(cur)?));
        } else if matches!(cur.peek_at(1), Tok::Ident(k) if k == "roledisjoint")
            || matches!((cur.peek(), cur.peek_at(2)), (Tok::Ident(i), Tok::Ident(k)) if i == "inv" && k == "roledisjoint")
        {
            let a = role(cur)?;
            cur.expect_keyword("roledisjoint")?;
            t.add_constraint(Constraint::RoleDisjoint(a, role(cur)?));
        } else {
            let a = basic(cur)?;
            if cur.eat_keyword("isa") {
                t.add_inclusion(a, basic(cur)?);
            } else if cur.eat_keyword("disjoint") {
                t.add_constraint(Constraint::Disjoint(a, basic(cur)?));
            } else {
                return Err(cur.unexpected("`isa` or `disjoint`"));
            }
        }
        cur.expect(&Tok::Semi)?;
    }
    Ok(t)
}

fn fact(cur: &mut Cursor) -> Result<Assertion, ParseError> {
    let never = |_: &str| false;
    let fact = match atom(cur, &never)? {
        Atom::Concept(c, QTerm::Const(t)) => Assertion::Concept { concept: c, term: t },
        Atom::Role(r, QTerm::Const(s), QTerm::Const(o)) => Assertion::Role {
            role: r,
            subject: s,
            object: o,
        },
        _ => unreachable!("ABox names are constants"),
    };
    cur.expect(&Tok::Semi)?;
    Ok(fact)
}

fn abox(cur: &mut Cursor) -> Result<ABox, ParseError> {
    cur.expect_keyword("ABOX")?;
    cur.expect(&Tok::LBrace)?;
    let mut a = ABox::new();
    while !cur.eat(&Tok::RBrace) {
        a.insert(fact(cur)?);
    }
    Ok(a)
}

/// A standalone ABox: an `ABOX { ... }` block or bare `fact;` entries.
pub fn parse_abox(text: &str) -> Result<ABox, ParseError> {
    let mut cur = Cursor::new(text)?;
    let a = if cur.is_keyword("ABOX") {
        abox(&mut cur)?
    } else {
        let mut a = ABox::new();
        while cur.peek() != &Tok::Eof {
            a.insert(fact(&mut cur)?);
        }
        a
    };
    if cur.peek() != &Tok::Eof {
        return Err(cur.unexpected("end of input"));
    }
    Ok(a)
}

fn constants(cur: &mut Cursor) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    if cur.eat_keyword("CONSTANTS") {
        cur.expect(&Tok::LBrace)?;
        while !cur.eat(&Tok::RBrace) {
            out.push(cur.ident()?);
            cur.expect(&Tok::Semi)?;
        }
    }
    Ok(out)
}

/// `name` or `f(name, ...)`
fn term_template(cur: &mut Cursor, is_var: IsVar) -> Result<TermTemplate, ParseError> {
    let name = cur.ident()?;
    if cur.eat(&Tok::LParen) {
        let args = cur.names_until(&Tok::RParen)?;
        cur.expect(&Tok::RParen)?;
        Ok(TermTemplate::Skolem {
            function: name,
            args: args.into_iter().map(|a| term(a, is_var)).collect(),
        })
    } else {
        Ok(TermTemplate::Term(term(name, is_var)))
    }
}

fn atom_template(cur: &mut Cursor, is_var: IsVar) -> Result<AtomTemplate, ParseError> {
    let pred = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let first = term_template(cur, is_var)?;
    let t = if cur.eat(&Tok::Comma) {
        AtomTemplate::Role(pred, first, term_template(cur, is_var)?)
    } else {
        AtomTemplate::Concept(pred, first)
    };
    cur.expect(&Tok::RParen)?;
    Ok(t)
}

fn action(cur: &mut Cursor, is_var: IsVar) -> Result<Action, ParseError> {
    cur.expect_keyword("ACTION")?;
    let name = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let params = cur.names_until(&Tok::RParen)?;
    cur.expect(&Tok::RParen)?;
    cur.expect(&Tok::LBrace)?;
    let mut effects = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        cur.expect_keyword("effect")?;
        cur.expect(&Tok::LBracket)?;
        let qplus = ucq(cur, is_var)?;
        cur.expect(&Tok::RBracket)?;
        let qminus = if cur.eat_keyword("and") {
            Some(ecq(cur, is_var)?)
        } else {
            None
        };
        cur.expect(&Tok::Leadsto)?;
        cur.expect(&Tok::LBrace)?;
        let mut head = Vec::new();
        if cur.peek() != &Tok::RBrace {
            loop {
                head.push(atom_template(cur, is_var)?);
                if !cur.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        cur.expect(&Tok::RBrace)?;
        cur.expect(&Tok::Semi)?;
        effects.push(Effect {
            qplus,
            qminus,
            head,
        });
    }
    Ok(Action {
        name,
        params,
        effects,
    })
}

fn process(cur: &mut Cursor, is_var: IsVar) -> Result<Vec<ProcessRule>, ParseError> {
    cur.expect_keyword("PROCESS")?;
    cur.expect(&Tok::LBrace)?;
    let mut rules = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let condition = ecq(cur, is_var)?;
        cur.expect(&Tok::Arrow)?;
        let action = cur.ident()?;
        cur.expect(&Tok::LParen)?;
        let args = cur.names_until(&Tok::RParen)?;
        cur.expect(&Tok::RParen)?;
        cur.expect(&Tok::Semi)?;
        rules.push(ProcessRule {
            condition,
            action,
            args,
        });
    }
    Ok(rules)
}

/// Parses and validates a KAB. In actions and rules, a name is a constant when it
/// occurs in the initial ABox or the `CONSTANTS` section, is `temp`, or carries a
/// reserved prefix; every other name is a variable.
pub fn parse_kab(text: &str) -> Result<KabSpec, ParseError> {
    let mut cur = Cursor::new(text)?;
    let t = tbox(&mut cur)?;
    let a0 = abox(&mut cur)?;
    let extra = constants(&mut cur)?;
    let mut known: BTreeSet<String> = a0.constants();
    known.extend(extra.iter().cloned());
    let is_var = |n: &str| {
        !(known.contains(n)
            || n == TEMP_CONSTANT
            || n.starts_with(FRESH_PREFIX)
            || n.starts_with(LABEL_PREFIX))
    };
    let mut actions = Vec::new();
    while cur.is_keyword("ACTION") {
        actions.push(action(&mut cur, &is_var)?);
    }
    let rules = process(&mut cur, &is_var)?;
    if cur.peek() != &Tok::Eof {
        return Err(cur.unexpected("end of input"));
    }
    let mut spec = KabSpec::new(t, a0, actions, rules);
    spec.delta0.extend(extra);
    spec.validate()?;
    Ok(spec)
}
