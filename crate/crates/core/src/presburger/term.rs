//! Linear integer terms and interned variables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Interned integer variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

struct Interner {
    names: Vec<String>,
    by_name: HashMap<String, u32>,
}

fn interner() -> &'static Mutex<Interner> {
    static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        Mutex::new(Interner {
            names: Vec::new(),
            by_name: HashMap::new(),
        })
    })
}

impl Var {
    /// The variable with this exact name; the same name always yields the same variable.
    pub fn named(name: &str) -> Var {
        let mut int = interner().lock().unwrap();
        if let Some(&id) = int.by_name.get(name) {
            return Var(id);
        }
        let id = int.names.len() as u32;
        int.names.push(name.to_string());
        int.by_name.insert(name.to_string(), id);
        Var(id)
    }

    /// A variable distinct from every other variable, displayed as `<hint>#<id>`.
    pub fn fresh(hint: &str) -> Var {
        let mut int = interner().lock().unwrap();
        let id = int.names.len() as u32;
        let name = format!("{hint}#{id}");
        int.names.push(name.clone());
        int.by_name.insert(name, id);
        Var(id)
    }

    pub fn name(self) -> String {
        interner().lock().unwrap().names[self.0 as usize].clone()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// `constant + Σ coeff·var`, coefficients sorted by variable and never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Term {
    pub constant: i128,
    coeffs: Vec<(Var, i128)>,
}

impl Term {
    pub fn constant(c: i128) -> Term {
        Term {
            constant: c,
            coeffs: Vec::new(),
        }
    }

    pub fn var(v: Var) -> Term {
        Term::scaled_var(1, v)
    }

    pub fn scaled_var(a: i128, v: Var) -> Term {
        let coeffs = if a == 0 { Vec::new() } else { vec![(v, a)] };
        Term { constant: 0, coeffs }
    }

    pub fn from_parts(constant: i128, parts: impl IntoIterator<Item = (Var, i128)>) -> Term {
        let mut t = Term::constant(constant);
        for (v, a) in parts {
            t.add_var(v, a);
        }
        t
    }

    pub fn coeffs(&self) -> &[(Var, i128)] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: Var) -> i128 {
        match self.coeffs.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.coeffs[i].1,
            Err(_) => 0,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.iter().map(|&(v, _)| v)
    }

    pub fn add_var(&mut self, v: Var, a: i128) {
        if a == 0 {
            return;
        }
        match self.coeffs.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => {
                self.coeffs[i].1 += a;
                if self.coeffs[i].1 == 0 {
                    self.coeffs.remove(i);
                }
            }
            Err(i) => self.coeffs.insert(i, (v, a)),
        }
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut out = self.clone();
        out.constant += other.constant;
        for &(v, a) in &other.coeffs {
            out.add_var(v, a);
        }
        out
    }

    pub fn sub(&self, other: &Term) -> Term {
        self.add(&other.scale(-1))
    }

    pub fn plus(&self, c: i128) -> Term {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    pub fn scale(&self, k: i128) -> Term {
        if k == 0 {
            return Term::constant(0);
        }
        Term {
            constant: self.constant * k,
            coeffs: self.coeffs.iter().map(|&(v, a)| (v, a * k)).collect(),
        }
    }

    /// Term with `v` removed, i.e. `self - coeff(v)·v`.
    pub fn without(&self, v: Var) -> Term {
        let mut out = self.clone();
        out.coeffs.retain(|&(w, _)| w != v);
        out
    }

    /// Replace `v` by `replacement`.
    pub fn substitute(&self, v: Var, replacement: &Term) -> Term {
        let a = self.coeff(v);
        if a == 0 {
            return self.clone();
        }
        self.without(v).add(&replacement.scale(a))
    }

    /// gcd of all variable coefficients (0 for a constant term).
    pub fn content(&self) -> i128 {
        self.coeffs.iter().fold(0, |g, &(_, a)| gcd(g, a))
    }

    pub fn eval(&self, lookup: &impl Fn(Var) -> Option<i128>) -> Option<i128> {
        let mut acc = self.constant;
        for &(v, a) in &self.coeffs {
            acc += a * lookup(v)?;
        }
        Some(acc)
    }
}

impl fmt::Display for Term {
    /// `(+ c (* a x) ...)`, collapsed to a bare atom when there is a single summand.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|&(v, a)| {
                if a == 1 {
                    v.name()
                } else {
                    format!("(* {a} {})", v.name())
                }
            })
            .collect();
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        if parts.len() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "(+ {})", parts.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_cancels_zero_coefficients() {
        let x = Var::named("x");
        let y = Var::named("y");
        let t = Term::from_parts(3, [(x, 2), (y, -1)]);
        let u = Term::from_parts(-3, [(x, -2)]);
        let s = t.add(&u);
        assert_eq!(s.coeffs(), &[(y, -1)]);
        assert_eq!(s.constant, 0);
    }

    #[test]
    fn substitution_scales_replacement() {
        let x = Var::named("x");
        let y = Var::named("y");
        let t = Term::from_parts(1, [(x, 3)]);
        let r = t.substitute(x, &Term::from_parts(2, [(y, 1)]));
        assert_eq!(r, Term::from_parts(7, [(y, 3)]));
    }

    #[test]
    fn fresh_vars_are_distinct() {
        assert_ne!(Var::fresh("h"), Var::fresh("h"));
        assert_eq!(Var::named("N"), Var::named("N"));
    }
}
