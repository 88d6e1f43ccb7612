//! Seeded random formulas whose quantified variables are boxed around zero or
//! a free variable, so bounded evaluation with `EVAL_BOUND` is exact on the grid.

use multiauto::presburger::{Formula, Term, Var};
use rand::seq::SliceRandom;
use rand::Rng;

pub const BOX: i128 = 6;
pub const GRID: i128 = 8;
pub const EVAL_BOUND: i128 = GRID + BOX;

pub fn free_vars() -> [Var; 2] {
    [Var::named("x"), Var::named("y")]
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    quantifiers: usize,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn term(&mut self, scope: &[Var]) -> Term {
        let mut t = Term::constant(self.rng.gen_range(-8..=8));
        for (i, &v) in scope.iter().enumerate() {
            let innermost = i + 1 == scope.len();
            if self.rng.gen_bool(if innermost { 0.9 } else { 0.5 }) {
                let a = self.rng.gen_range(1..=4);
                t.add_var(v, if self.rng.gen_bool(0.5) { a } else { -a });
            }
        }
        t
    }

    fn atom(&mut self, scope: &[Var]) -> Formula {
        let t = self.term(scope);
        let f = match self.rng.gen_range(0..5) {
            0 | 1 => Formula::le_zero(t),
            2 => Formula::eq_zero(t),
            _ => Formula::divides(self.rng.gen_range(2..=4), t),
        };
        if self.rng.gen_bool(0.25) {
            f.negate()
        } else {
            f
        }
    }

    fn formula(&mut self, scope: &mut Vec<Var>, depth: usize) -> Formula {
        if self.quantifiers > 0 && self.rng.gen_bool(if depth == 0 { 0.8 } else { 0.5 }) {
            self.quantifiers -= 1;
            self.fresh += 1;
            let v = Var::named(&format!("b{}", self.fresh));
            let lo = self.rng.gen_range(-BOX..=0);
            let hi = self.rng.gen_range(0..=BOX);
            let anchors: Vec<Var> = scope.iter().copied().filter(|w| free_vars().contains(w)).collect();
            let centre = match anchors.choose(self.rng) {
                Some(&w) if self.rng.gen_bool(0.5) => Term::var(w),
                _ => Term::constant(0),
            };
            let scale = if self.rng.gen_bool(0.5) {
                1
            } else {
                self.rng.gen_range(2..=3)
            };
            let boxed = Formula::between(&centre.plus(lo), &Term::scaled_var(scale, v), &centre.plus(hi));
            scope.push(v);
            let body = self.formula(scope, depth + 1);
            scope.pop();
            return if self.rng.gen_bool(0.5) {
                Formula::exists(v, Formula::and(vec![boxed, body]))
            } else {
                Formula::forall(v, Formula::implies(boxed, body))
            };
        }
        if depth >= 4 || self.rng.gen_bool(0.2) {
            return self.atom(scope);
        }
        let width = self.rng.gen_range(2..=3);
        let parts: Vec<Formula> = (0..width).map(|_| self.formula(scope, depth + 1)).collect();
        match self.rng.gen_range(0..5) {
            0 => Formula::not(Formula::and(parts)),
            1 | 2 => Formula::and(parts),
            _ => Formula::or(parts),
        }
    }
}

/// A formula with at most three quantifiers over at most two of `free_vars()`.
pub fn random_formula(rng: &mut impl Rng) -> Formula {
    let mut scope: Vec<Var> = free_vars().to_vec();
    scope.shuffle(rng);
    scope.truncate([0, 1, 1, 2, 2, 2][rng.gen_range(0..6)]);
    let mut gen = Gen {
        quantifiers: [0, 1, 2, 2, 3, 3][rng.gen_range(0..6)],
        rng,
        fresh: 0,
    };
    gen.formula(&mut scope, 0)
}

/// Every assignment of `[-GRID, GRID]` to the free variables of `f`.
pub fn grid(f: &Formula) -> Vec<std::collections::BTreeMap<Var, i128>> {
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    let mut out = vec![std::collections::BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                (-GRID..=GRID).map(move |x| {
                    let mut m = m.clone();
                    m.insert(v, x);
                    m
                })
            })
            .collect();
    }
    out
}
