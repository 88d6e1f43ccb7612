//! Presburger formula AST over the integers.
//!
//! Atoms are kept in a normal form: `t ≤ 0` and `t = 0` with coprime
//! coefficients, and `d | t` with coefficients reduced modulo `d`. The smart
//! constructors fold ground atoms and flatten connectives, so structurally
//! equal formulas compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{gcd, Term, Var};
use super::PresburgerError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// `t ≤ 0`
    Le(Term),
    /// `t = 0`
    Eq(Term),
    /// `d | t`, `d ≥ 2`
    Div(i128, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

fn div_ceil(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

impl Formula {
    pub fn bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    /// `t ≤ 0`, normalized.
    pub fn le_zero(t: Term) -> Formula {
        if t.is_constant() {
            return Formula::bool(t.constant <= 0);
        }
        let g = t.content();
        if g == 1 {
            return Formula::Le(t);
        }
        let c = div_ceil(t.constant, g);
        Formula::Le(Term::from_parts(c, t.coeffs().iter().map(|&(v, a)| (v, a / g))))
    }

    /// `t = 0`, normalized with a positive leading coefficient.
    pub fn eq_zero(t: Term) -> Formula {
        if t.is_constant() {
            return Formula::bool(t.constant == 0);
        }
        let g = t.content();
        if t.constant % g != 0 {
            return Formula::False;
        }
        let sign = if t.coeffs()[0].1 < 0 { -1 } else { 1 };
        let k = g * sign;
        Formula::Eq(Term::from_parts(
            t.constant / k,
            t.coeffs().iter().map(|&(v, a)| (v, a / k)),
        ))
    }

    /// `d | t`, normalized; `d` may be any nonzero integer.
    pub fn divides(d: i128, t: Term) -> Formula {
        let d = d.abs();
        assert!(d != 0, "divisibility by zero");
        if d == 1 {
            return Formula::True;
        }
        let reduced = Term::from_parts(
            t.constant.rem_euclid(d),
            t.coeffs().iter().map(|&(v, a)| (v, a.rem_euclid(d))),
        );
        if reduced.is_constant() {
            return Formula::bool(reduced.constant == 0);
        }
        let g = gcd(gcd(d, reduced.content()), reduced.constant);
        if g > 1 {
            return Formula::divides(
                d / g,
                Term::from_parts(reduced.constant / g, reduced.coeffs().iter().map(|&(v, a)| (v, a / g))),
            );
        }
        Formula::Div(d, reduced)
    }

    pub fn le(a: &Term, b: &Term) -> Formula {
        Formula::le_zero(a.sub(b))
    }

    pub fn lt(a: &Term, b: &Term) -> Formula {
        Formula::le_zero(a.sub(b).plus(1))
    }

    pub fn ge(a: &Term, b: &Term) -> Formula {
        Formula::le(b, a)
    }

    pub fn gt(a: &Term, b: &Term) -> Formula {
        Formula::lt(b, a)
    }

    pub fn eq(a: &Term, b: &Term) -> Formula {
        Formula::eq_zero(a.sub(b))
    }

    /// `lo ≤ t ≤ hi`
    pub fn between(lo: &Term, t: &Term, hi: &Term) -> Formula {
        Formula::and(vec![Formula::le(lo, t), Formula::le(t, hi)])
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        match f {
            Formula::True | Formula::False => f,
            f if !f.mentions(v) => f,
            f => Formula::Exists(v, Box::new(f)),
        }
    }

    pub fn exists_many(vars: impl IntoIterator<Item = Var>, f: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        match f {
            Formula::True | Formula::False => f,
            f if !f.mentions(v) => f,
            f => Formula::Forall(v, Box::new(f)),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Le(_) | Formula::Eq(_) | Formula::Div(_, _))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            _ => true,
        }
    }

    /// Whether `v` occurs free.
    pub fn mentions(&self, v: Var) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Le(t) | Formula::Eq(t) | Formula::Div(_, t) => t.coeff(v) != 0,
            Formula::Not(f) => f.mentions(v),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.mentions(v)),
            Formula::Exists(w, f) | Formula::Forall(w, f) => *w != v && f.mentions(v),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Le(t) | Formula::Eq(t) | Formula::Div(_, t) => {
                out.extend(t.vars().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Rebuild every atom through `g`, re-running the smart constructors.
    pub fn map_atoms(&self, g: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Le(_) | Formula::Eq(_) | Formula::Div(..) => g(self),
            Formula::Not(f) => Formula::not(f.map_atoms(g)),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Exists(v, f) => Formula::exists(*v, f.map_atoms(g)),
            Formula::Forall(v, f) => Formula::forall(*v, f.map_atoms(g)),
        }
    }

    /// Replace free occurrences of `v` by `t`. Bound variables are assumed
    /// distinct from the variables of `t` (builders always bind fresh variables).
    pub fn substitute(&self, v: Var, t: &Term) -> Formula {
        if !self.mentions(v) {
            return self.clone();
        }
        match self {
            Formula::Le(a) => Formula::le_zero(a.substitute(v, t)),
            Formula::Eq(a) => Formula::eq_zero(a.substitute(v, t)),
            Formula::Div(d, a) => Formula::divides(*d, a.substitute(v, t)),
            Formula::Not(f) => Formula::not(f.substitute(v, t)),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.substitute(v, t)).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.substitute(v, t)).collect()),
            Formula::Exists(w, f) => Formula::exists(*w, f.substitute(v, t)),
            Formula::Forall(w, f) => Formula::forall(*w, f.substitute(v, t)),
            Formula::True | Formula::False => self.clone(),
        }
    }

    pub fn substitute_all(&self, map: &[(Var, Term)]) -> Formula {
        map.iter().fold(self.clone(), |f, (v, t)| f.substitute(*v, t))
    }

    /// Rename a free variable.
    pub fn rename(&self, from: Var, to: Var) -> Formula {
        self.substitute(from, &Term::var(to))
    }

    /// Replace `v` under the equation `a·v = t` (`a > 0`): each atom mentioning
    /// `v` is multiplied by `a` and `a·v` is rewritten to `t`.
    pub fn substitute_scaled(&self, v: Var, a: i128, t: &Term) -> Formula {
        debug_assert!(a > 0);
        if a == 1 {
            return self.substitute(v, t);
        }
        let rewrite = |term: &Term| -> Term {
            let b = term.coeff(v);
            term.without(v).scale(a).add(&t.scale(b))
        };
        self.map_atoms(&mut |atom| match atom {
            Formula::Le(x) if x.coeff(v) != 0 => Formula::le_zero(rewrite(x)),
            Formula::Eq(x) if x.coeff(v) != 0 => Formula::eq_zero(rewrite(x)),
            Formula::Div(d, x) if x.coeff(v) != 0 => Formula::divides(d * a, rewrite(x)),
            other => other.clone(),
        })
    }

    /// Negation pushed through connectives; quantifiers are left under `Not`.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Le(t) => Formula::le_zero(t.scale(-1).plus(1)),
            Formula::Eq(t) => Formula::or(vec![Formula::le_zero(t.plus(1)), Formula::le_zero(t.scale(-1).plus(1))]),
            Formula::Div(..) => Formula::Not(Box::new(self.clone())),
            Formula::Not(f) => (**f).clone(),
            Formula::And(fs) => Formula::or(fs.iter().map(Formula::negate).collect()),
            Formula::Or(fs) => Formula::and(fs.iter().map(Formula::negate).collect()),
            Formula::Exists(..) | Formula::Forall(..) => Formula::Not(Box::new(self.clone())),
        }
    }

    /// Truth value with quantifiers ranging over `[-bound, bound]`.
    pub fn evaluate(&self, assignment: &BTreeMap<Var, i128>, bound: i128) -> Result<bool, PresburgerError> {
        let mut env = assignment.clone();
        self.eval_in(&mut env, bound)
    }

    fn eval_in(&self, env: &mut BTreeMap<Var, i128>, bound: i128) -> Result<bool, PresburgerError> {
        let term = |t: &Term, env: &BTreeMap<Var, i128>| -> Result<i128, PresburgerError> {
            t.eval(&|v| env.get(&v).copied()).ok_or_else(|| {
                let missing = t.vars().find(|v| !env.contains_key(v)).unwrap();
                PresburgerError::UnboundVariable(missing.name())
            })
        };
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Le(t) => term(t, env)? <= 0,
            Formula::Eq(t) => term(t, env)? == 0,
            Formula::Div(d, t) => term(t, env)?.rem_euclid(*d) == 0,
            Formula::Not(f) => !f.eval_in(env, bound)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_in(env, bound)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_in(env, bound)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let want = matches!(self, Formula::Exists(..));
                let saved = env.get(v).copied();
                let mut result = !want;
                for x in -bound..=bound {
                    env.insert(*v, x);
                    if f.eval_in(env, bound)? == want {
                        result = want;
                        break;
                    }
                }
                match saved {
                    Some(x) => env.insert(*v, x),
                    None => env.remove(v),
                };
                result
            }
        })
    }

    /// Evaluation of a quantifier-free formula; panics on quantifiers or unbound variables.
    pub fn holds(&self, lookup: &impl Fn(Var) -> Option<i128>) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Le(t) => t.eval(lookup).expect("unbound variable") <= 0,
            Formula::Eq(t) => t.eval(lookup).expect("unbound variable") == 0,
            Formula::Div(d, t) => t.eval(lookup).expect("unbound variable").rem_euclid(*d) == 0,
            Formula::Not(f) => !f.holds(lookup),
            Formula::And(fs) => fs.iter().all(|f| f.holds(lookup)),
            Formula::Or(fs) => fs.iter().any(|f| f.holds(lookup)),
            Formula::Exists(..) | Formula::Forall(..) => panic!("holds() on a quantified formula"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Le(t) => write!(f, "(<= {t} 0)"),
            Formula::Eq(t) => write!(f, "(= {t} 0)"),
            Formula::Div(d, t) => write!(f, "(divides {d} {t})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) | Formula::Or(gs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            Formula::Exists(v, g) => write!(f, "(exists ({v}) {g})"),
            Formula::Forall(v, g) => write!(f, "(forall ({v}) {g})"),
        }
    }
}
