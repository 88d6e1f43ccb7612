//! Reader for the s-expression syntax produced by `Display`.

use super::formula::Formula;
use super::term::{Term, Var};
use super::PresburgerError;

#[derive(Debug, Clone)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn err(msg: impl Into<String>) -> PresburgerError {
    PresburgerError::Parse(msg.into())
}

fn tokenize(src: &str) -> Vec<String> {
    src.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sx, PresburgerError> {
    let tok = tokens.get(*pos).ok_or_else(|| err("unexpected end of input"))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(err("unclosed parenthesis")),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(err("unexpected `)`")),
        _ => Ok(Sx::Atom(tok.clone())),
    }
}

fn term(sx: &Sx) -> Result<Term, PresburgerError> {
    match sx {
        Sx::Atom(a) => Ok(match a.parse::<i128>() {
            Ok(c) => Term::constant(c),
            Err(_) => Term::var(Var::named(a)),
        }),
        Sx::List(items) => {
            let (head, args) = split_head(items)?;
            let args = args.iter().map(term).collect::<Result<Vec<_>, _>>()?;
            match (head, args.len()) {
                ("+", _) => Ok(args.iter().fold(Term::constant(0), |acc, t| acc.add(t))),
                ("-", 1) => Ok(args[0].scale(-1)),
                ("-", 2) => Ok(args[0].sub(&args[1])),
                ("*", 2) => {
                    if args[0].is_constant() {
                        Ok(args[1].scale(args[0].constant))
                    } else if args[1].is_constant() {
                        Ok(args[0].scale(args[1].constant))
                    } else {
                        Err(err("nonlinear product"))
                    }
                }
                _ => Err(err(format!("unknown term operator `{head}`"))),
            }
        }
    }
}

fn split_head(items: &[Sx]) -> Result<(&str, &[Sx]), PresburgerError> {
    match items.split_first() {
        Some((Sx::Atom(h), rest)) => Ok((h.as_str(), rest)),
        _ => Err(err("expected an operator")),
    }
}

fn formula(sx: &Sx) -> Result<Formula, PresburgerError> {
    let items = match sx {
        Sx::Atom(a) if a == "true" => return Ok(Formula::True),
        Sx::Atom(a) if a == "false" => return Ok(Formula::False),
        Sx::Atom(a) => return Err(err(format!("unexpected atom `{a}`"))),
        Sx::List(items) => items,
    };
    let (head, args) = split_head(items)?;
    let binary = |f: fn(&Term, &Term) -> Formula| -> Result<Formula, PresburgerError> {
        match args {
            [a, b] => Ok(f(&term(a)?, &term(b)?)),
            _ => Err(err(format!("`{head}` takes two terms"))),
        }
    };
    match head {
        "<=" => binary(Formula::le),
        "<" => binary(Formula::lt),
        ">=" => binary(Formula::ge),
        ">" => binary(Formula::gt),
        "=" => binary(Formula::eq),
        "divides" => match args {
            [Sx::Atom(d), t] => {
                let d: i128 = d.parse().map_err(|_| err("divisor must be an integer"))?;
                if d <= 0 {
                    return Err(err("divisor must be positive"));
                }
                Ok(Formula::divides(d, term(t)?))
            }
            _ => Err(err("`divides` takes a divisor and a term")),
        },
        "not" => match args {
            [g] => Ok(Formula::not(formula(g)?)),
            _ => Err(err("`not` takes one formula")),
        },
        "and" | "or" => {
            let parts = args.iter().map(formula).collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            })
        }
        "=>" => match args {
            [a, b] => Ok(Formula::implies(formula(a)?, formula(b)?)),
            _ => Err(err("`=>` takes two formulas")),
        },
        "exists" | "forall" => match args {
            [Sx::List(vars), body] => {
                let mut f = formula(body)?;
                for v in vars.iter().rev() {
                    let Sx::Atom(name) = v else {
                        return Err(err("bound variables must be names"));
                    };
                    let v = Var::named(name);
                    f = if head == "exists" {
                        Formula::exists(v, f)
                    } else {
                        Formula::forall(v, f)
                    };
                }
                Ok(f)
            }
            _ => Err(err(format!("`{head}` takes a variable list and a body"))),
        },
        _ => Err(err(format!("unknown connective `{head}`"))),
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, PresburgerError> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let sx = read(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(err("trailing input"));
    }
    formula(&sx)
}
