//! Cooper-style quantifier elimination.
//!
//! Existential blocks are processed top-down: equalities are used first
//! (one-point rule, with divisibility side conditions for non-unit
//! coefficients), independent conjuncts are mini-scoped, disjunctions are
//! distributed, and only then does Cooper's test-point expansion run on a
//! conjunction of literals.

use std::cell::Cell;
use std::collections::BTreeSet;

use super::formula::Formula;
use super::term::{lcm, Term, Var};
use super::univariate::univariate_normalize;
use super::PresburgerError;

/// Default cap on the number of formula nodes produced during one elimination.
pub const DEFAULT_BUDGET: usize = 1_000_000;

pub struct Eliminator {
    budget: usize,
    spent: Cell<usize>,
    windows: bool,
}

impl Default for Eliminator {
    fn default() -> Self {
        Eliminator::new(DEFAULT_BUDGET)
    }
}

type QeResult = Result<Formula, PresburgerError>;

impl Eliminator {
    pub fn new(budget: usize) -> Eliminator {
        Eliminator {
            budget,
            spent: Cell::new(0),
            windows: true,
        }
    }

    /// Whether variables confined to a short window are eliminated by
    /// enumerating it instead of by Cooper's test points.
    pub fn with_windows(mut self, on: bool) -> Eliminator {
        self.windows = on;
        self
    }

    fn window(&self, cs: &[Formula], x: Var) -> Option<Window> {
        if self.windows {
            bounded_range(cs, x)
        } else {
            None
        }
    }

    fn charge(&self, f: &Formula) -> Result<(), PresburgerError> {
        let total = self.spent.get() + f.size();
        self.spent.set(total);
        if total > self.budget {
            Err(PresburgerError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// Fail before building `copies` instances of `f` that would exceed the budget.
    fn precharge(&self, copies: i128, f: &Formula) -> Result<(), PresburgerError> {
        let estimate = copies.saturating_mul(f.size() as i128);
        if estimate > (self.budget - self.spent.get().min(self.budget)) as i128 {
            Err(PresburgerError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// An equivalent quantifier-free formula.
    pub fn eliminate(&self, f: &Formula) -> QeResult {
        self.spent.set(0);
        let out = self.qe(f)?;
        Ok(finish(out))
    }

    fn qe(&self, f: &Formula) -> QeResult {
        let out = match f {
            Formula::True | Formula::False | Formula::Le(_) | Formula::Eq(_) | Formula::Div(..) => f.clone(),
            Formula::Not(g) => {
                let inner = self.qe(g)?;
                compact(inner).negate()
            }
            Formula::And(gs) => {
                let mut parts = Vec::with_capacity(gs.len());
                for g in gs {
                    let q = self.qe(g)?;
                    if q == Formula::False {
                        return Ok(Formula::False);
                    }
                    parts.push(q);
                }
                simplify_and(parts)
            }
            Formula::Or(gs) => {
                let mut parts = Vec::with_capacity(gs.len());
                for g in gs {
                    let q = self.qe(g)?;
                    if q == Formula::True {
                        return Ok(Formula::True);
                    }
                    parts.push(q);
                }
                Formula::or(parts)
            }
            Formula::Exists(v, g) => self.exists_block(vec![*v], g)?,
            Formula::Forall(v, g) => {
                let inner = self.exists_block(vec![*v], &Formula::not((**g).clone()))?;
                compact(inner).negate()
            }
        };
        self.charge(&out)?;
        Ok(out)
    }

    fn exists_block(&self, mut vars: Vec<Var>, mut g: &Formula) -> QeResult {
        while let Formula::Exists(w, h) = g {
            vars.push(*w);
            g = h;
        }
        vars.retain(|v| g.mentions(*v));
        vars.sort();
        vars.dedup();
        if vars.is_empty() {
            return self.qe(g);
        }
        match g {
            Formula::Or(ds) => {
                let mut parts = Vec::with_capacity(ds.len());
                for d in ds {
                    let q = self.exists_block(vars.clone(), d)?;
                    if q == Formula::True {
                        return Ok(Formula::True);
                    }
                    parts.push(q);
                }
                Ok(Formula::or(parts))
            }
            Formula::And(cs) => self.exists_conj(vars, cs.clone()),
            other => self.exists_conj(vars, vec![other.clone()]),
        }
    }

    fn exists_conj(&self, mut vars: Vec<Var>, conjuncts: Vec<Formula>) -> QeResult {
        let mut cs = Vec::new();
        flatten_into(conjuncts, &mut vars, &mut cs);
        loop {
            if cs.contains(&Formula::False) {
                return Ok(Formula::False);
            }
            vars.retain(|v| cs.iter().any(|c| c.mentions(*v)));
            if vars.is_empty() {
                return self.qe(&Formula::and(cs));
            }
            if let Some((idx, v)) = find_pivot(&cs, &vars) {
                let eq = cs.swap_remove(idx);
                let Formula::Eq(t) = eq else { unreachable!() };
                let a = t.coeff(v);
                let rest = t.without(v);
                let (scale, rhs) = if a > 0 { (a, rest.scale(-1)) } else { (-a, rest) };
                let mut next = Vec::with_capacity(cs.len() + 1);
                for c in cs.drain(..) {
                    next.push(c.substitute_scaled(v, scale, &rhs));
                }
                if scale > 1 {
                    next.push(Formula::divides(scale, rhs));
                }
                vars.retain(|w| *w != v);
                cs.clear();
                flatten_into(next, &mut vars, &mut cs);
                continue;
            }
            break;
        }

        // Mini-scoping: split into components linked by shared quantified variables.
        let (outside, components) = components(&cs, &vars);
        let mut parts: Vec<Formula> = outside;
        for (cvars, ccs) in components {
            let q = self.component(cvars, ccs)?;
            if q == Formula::False {
                return Ok(Formula::False);
            }
            parts.push(q);
        }
        let outside_qf: Result<Vec<_>, _> = parts.iter().map(|p| self.qe(p)).collect();
        Ok(simplify_and(outside_qf?))
    }

    fn component(&self, vars: Vec<Var>, mut cs: Vec<Formula>) -> QeResult {
        if cs.len() == 1 && !matches!(cs[0], Formula::And(_)) {
            let only = cs.pop().unwrap();
            return match only {
                Formula::Or(_) => self.exists_block(vars, &only),
                f if f.is_atom() || matches!(f, Formula::Not(ref g) if matches!(**g, Formula::Div(..))) => {
                    self.cooper_conj(vars, vec![f])
                }
                f => {
                    let q = self.qe(&f)?;
                    self.exists_block(vars, &q)
                }
            };
        }
        // Prefer distributing a disjunction that exposes an equality on a bound variable.
        if let Some(i) = best_or(&cs, &vars, true) {
            return self.distribute(vars, cs, i);
        }
        // Make the remaining conjuncts quantifier-free.
        if let Some(i) = cs
            .iter()
            .position(|c| !c.is_quantifier_free() || matches!(c, Formula::Not(g) if !matches!(**g, Formula::Div(..))))
        {
            let c = cs.swap_remove(i);
            let q = self.qe(&c)?;
            cs.push(compact(q));
            return self.exists_conj(vars, cs);
        }
        let ors = cs.iter().filter(|c| matches!(c, Formula::Or(_))).count();
        if ors == 1 {
            if let Some(i) = best_or(&cs, &vars, false) {
                return self.distribute(vars, cs, i);
            }
        }
        if ors > 1 {
            return self.cooper_formula(vars, Formula::and(cs));
        }
        self.cooper_conj(vars, cs)
    }

    /// Cooper's test-point expansion applied to a whole quantifier-free formula.
    fn cooper_formula(&self, mut vars: Vec<Var>, f: Formula) -> QeResult {
        let f = to_nnf(&f);
        let (pos, _) = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (lo, hi) = nnf_bounds(&f, *v);
                (i, lo.min(hi))
            })
            .min_by_key(|&(_, n)| n)
            .unwrap();
        let x = vars.remove(pos);
        let top: &[Formula] = match &f {
            Formula::And(cs) => cs,
            other => std::slice::from_ref(other),
        };
        let expanded = match self.window(top, x) {
            Some(range) if range.width <= cooper_cost(&f, x) => {
                self.precharge(range.width, &f)?;
                compact(expand_range(x, &range, &f))
            }
            _ => {
                self.precharge(cooper_cost(&f, x), &f)?;
                compact(cooper_nnf(x, &f))
            }
        };
        self.charge(&expanded)?;
        if vars.is_empty() {
            return Ok(expanded);
        }
        self.exists_block(vars, &expanded)
    }

    fn distribute(&self, vars: Vec<Var>, mut cs: Vec<Formula>, i: usize) -> QeResult {
        let Formula::Or(ds) = cs.swap_remove(i) else {
            unreachable!()
        };
        let mut parts = Vec::with_capacity(ds.len());
        for d in ds {
            let mut branch = cs.clone();
            branch.push(d);
            let q = self.exists_conj(vars.clone(), branch)?;
            if q == Formula::True {
                return Ok(Formula::True);
            }
            if q != Formula::False {
                self.charge(&q)?;
                parts.push(q);
            }
        }
        Ok(Formula::or(parts))
    }

    /// Cooper's expansion for a conjunction of literals, one variable at a time.
    fn cooper_conj(&self, mut vars: Vec<Var>, cs: Vec<Formula>) -> QeResult {
        let cs = match simplify_and(cs) {
            Formula::False => return Ok(Formula::False),
            Formula::True => return Ok(Formula::True),
            Formula::And(v) => v,
            other => vec![other],
        };
        vars.retain(|v| cs.iter().any(|c| c.mentions(*v)));
        if vars.is_empty() {
            return Ok(Formula::and(cs));
        }
        if cs
            .iter()
            .any(|c| matches!(c, Formula::Or(_)) || !c.is_quantifier_free())
        {
            return self.exists_conj(vars, cs);
        }
        if cs
            .iter()
            .any(|c| matches!(c, Formula::Eq(t) if vars.iter().any(|v| t.coeff(*v) != 0)))
        {
            return self.exists_conj(vars, cs);
        }
        // Enumerate a small constant range when that beats Cooper's test points.
        let conj = Formula::and(cs.clone());
        let ranged = vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| self.window(&cs, *v).map(|r| (i, r)))
            .filter(|(i, r)| r.width <= cooper_cost(&conj, vars[*i]))
            .min_by_key(|(_, r)| r.width);
        let expanded = if let Some((pos, range)) = ranged {
            let x = vars.remove(pos);
            self.precharge(range.width, &conj)?;
            expand_range(x, &range, &conj)
        } else {
            // Eliminate the variable with the fewest bounds first.
            let (pos, _) = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (i, bound_count(&cs, *v)))
                .min_by_key(|&(_, n)| n)
                .unwrap();
            let x = vars.remove(pos);
            self.precharge(cooper_cost(&conj, x), &conj)?;
            cooper_one(x, cs)
        };
        self.charge(&expanded)?;
        if vars.is_empty() {
            return Ok(expanded);
        }
        self.exists_block(vars, &expanded)
    }
}

/// Split `And`s and pull positive existentials up (renamed fresh) into the block.
fn flatten_into(items: Vec<Formula>, vars: &mut Vec<Var>, out: &mut Vec<Formula>) {
    for item in items {
        match item {
            Formula::True => {}
            Formula::And(inner) => flatten_into(inner, vars, out),
            Formula::Exists(w, body) => {
                let fresh = Var::fresh("q");
                vars.push(fresh);
                flatten_into(vec![body.rename(w, fresh)], vars, out);
            }
            other => out.push(other),
        }
    }
}

fn find_pivot(cs: &[Formula], vars: &[Var]) -> Option<(usize, Var)> {
    let mut best: Option<(usize, Var, i128)> = None;
    for (i, c) in cs.iter().enumerate() {
        if let Formula::Eq(t) = c {
            for &v in vars {
                let a = t.coeff(v).abs();
                if a != 0 && best.is_none_or(|(_, _, b)| a < b) {
                    best = Some((i, v, a));
                }
            }
        }
    }
    best.map(|(i, v, _)| (i, v))
}

type Component = (Vec<Var>, Vec<Formula>);

fn components(cs: &[Formula], vars: &[Var]) -> (Vec<Formula>, Vec<Component>) {
    let mut outside = Vec::new();
    let mut groups: Vec<(BTreeSet<Var>, Vec<Formula>)> = Vec::new();
    for c in cs {
        let mine: BTreeSet<Var> = vars.iter().copied().filter(|v| c.mentions(*v)).collect();
        if mine.is_empty() {
            outside.push(c.clone());
            continue;
        }
        let mut merged = (mine, vec![c.clone()]);
        let mut i = 0;
        while i < groups.len() {
            if !groups[i].0.is_disjoint(&merged.0) {
                let (gv, gc) = groups.swap_remove(i);
                merged.0.extend(gv);
                merged.1.extend(gc);
            } else {
                i += 1;
            }
        }
        groups.push(merged);
    }
    let comps = groups.into_iter().map(|(v, c)| (v.into_iter().collect(), c)).collect();
    (outside, comps)
}

fn exposes_equality(f: &Formula, vars: &[Var]) -> bool {
    match f {
        Formula::Eq(t) => vars.iter().any(|v| t.coeff(*v) != 0),
        Formula::And(cs) => cs.iter().any(|c| exposes_equality(c, vars)),
        Formula::Exists(_, g) => exposes_equality(g, vars),
        _ => false,
    }
}

fn best_or(cs: &[Formula], vars: &[Var], need_equality: bool) -> Option<usize> {
    cs.iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            Formula::Or(ds) if vars.iter().any(|v| c.mentions(*v)) => {
                if need_equality && !ds.iter().all(|d| exposes_equality(d, vars)) {
                    None
                } else {
                    Some((i, ds.len()))
                }
            }
            _ => None,
        })
        .min_by_key(|&(_, n)| n)
        .map(|(i, _)| i)
}

/// Push negations down to atoms; `Not` survives only around `Div`.
fn to_nnf(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Div(..) => f.clone(),
            Formula::And(_) | Formula::Or(_) | Formula::Not(_) => to_nnf(&g.negate()),
            other => other.negate(),
        },
        Formula::And(gs) => Formula::and(gs.iter().map(to_nnf).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(to_nnf).collect()),
        other => other.clone(),
    }
}

/// Number of lower and upper bound atoms on `x` (an equality counts as both).
fn nnf_bounds(f: &Formula, x: Var) -> (usize, usize) {
    match f {
        Formula::Le(t) => match t.coeff(x).signum() {
            1 => (0, 1),
            -1 => (1, 0),
            _ => (0, 0),
        },
        Formula::Eq(t) if t.coeff(x) != 0 => (1, 1),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().fold((0, 0), |(a, b), g| {
            let (c, d) = nnf_bounds(g, x);
            (a + c, b + d)
        }),
        _ => (0, 0),
    }
}

/// `∃x f` for a quantifier-free NNF formula `f`.
fn cooper_nnf(x: Var, f: &Formula) -> Formula {
    let mut l = 1;
    collect_coeffs(f, x, &mut l);
    // Scale every atom so that x has coefficient ±1 (x now stands for l·x).
    let scaled = f.map_atoms(&mut |atom| {
        let t = literal_term(atom);
        let a = t.coeff(x);
        if a == 0 {
            return atom.clone();
        }
        let k = l / a.abs();
        let unit = t.without(x).scale(k).add(&Term::scaled_var(a.signum(), x));
        match atom {
            Formula::Le(_) => Formula::Le(unit),
            Formula::Eq(_) => Formula::eq_zero(unit),
            Formula::Div(d, _) => Formula::Div(d * k, unit),
            _ => unreachable!(),
        }
    });
    let body = if l > 1 {
        Formula::and(vec![scaled, Formula::divides(l, Term::var(x))])
    } else {
        scaled
    };
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    let mut delta = 1;
    scan_bounds(&body, x, &mut lowers, &mut uppers, &mut delta);
    dedup_terms(&mut lowers);
    dedup_terms(&mut uppers);
    let use_lower = lowers.len() <= uppers.len();
    // Behaviour of the formula for x far below (or above) every bound.
    let infinite = body.map_atoms(&mut |atom| match atom {
        Formula::Le(t) if t.coeff(x) != 0 => Formula::bool((t.coeff(x) > 0) == use_lower),
        Formula::Eq(t) if t.coeff(x) != 0 => Formula::False,
        other => other.clone(),
    });
    let mut disjuncts = Vec::new();
    for j in 0..delta {
        disjuncts.push(infinite.substitute(x, &Term::constant(j)));
    }
    let points = if use_lower { &lowers } else { &uppers };
    for p in points {
        for j in 0..delta {
            let value = if use_lower { p.plus(j) } else { p.plus(-j) };
            disjuncts.push(body.substitute(x, &value));
        }
    }
    Formula::or(disjuncts)
}

fn collect_coeffs(f: &Formula, x: Var, l: &mut i128) {
    match f {
        Formula::Le(t) | Formula::Eq(t) | Formula::Div(_, t) => {
            let a = t.coeff(x).abs();
            if a != 0 {
                *l = lcm(*l, a);
            }
        }
        Formula::Not(g) => collect_coeffs(g, x, l),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_coeffs(g, x, l)),
        _ => {}
    }
}

fn scan_bounds(f: &Formula, x: Var, lowers: &mut Vec<Term>, uppers: &mut Vec<Term>, delta: &mut i128) {
    match f {
        Formula::Le(t) => match t.coeff(x) {
            1 => uppers.push(t.without(x).scale(-1)),
            -1 => lowers.push(t.without(x)),
            _ => {}
        },
        Formula::Eq(t) if t.coeff(x) != 0 => {
            let v = t.without(x).scale(-t.coeff(x));
            lowers.push(v.clone());
            uppers.push(v);
        }
        Formula::Div(d, t) if t.coeff(x) != 0 => *delta = lcm(*delta, *d),
        Formula::Not(g) => scan_bounds(g, x, lowers, uppers, delta),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| scan_bounds(g, x, lowers, uppers, delta)),
        _ => {}
    }
}

/// A window `a·x ∈ [base, base + width - 1]` forced by top-level bounds in
/// `cs`: constant bounds, or bounds on the same multiple of `x` a constant apart.
fn bounded_range(cs: &[Formula], x: Var) -> Option<Window> {
    let (mut lowers, mut uppers) = (Vec::new(), Vec::new());
    for c in cs {
        let Formula::Le(t) = c else { continue };
        let a = t.coeff(x);
        if a == 0 {
            continue;
        }
        if t.coeffs().len() == 1 {
            if a > 0 {
                uppers.push((1, Term::constant((-t.constant).div_euclid(a))));
            } else {
                lowers.push((1, Term::constant(-(-t.constant).div_euclid(-a))));
            }
        }
        if a > 0 {
            uppers.push((a, t.without(x).scale(-1)));
        } else {
            lowers.push((-a, t.without(x)));
        }
    }
    let mut best: Option<Window> = None;
    for (a, l) in &lowers {
        for (b, u) in &uppers {
            let d = u.sub(l);
            if a == b && d.is_constant() && best.as_ref().is_none_or(|w| d.constant + 1 < w.width) {
                best = Some(Window {
                    scale: *a,
                    base: l.clone(),
                    width: (d.constant + 1).max(0),
                });
            }
        }
    }
    best
}

struct Window {
    scale: i128,
    base: Term,
    width: i128,
}

/// Number of disjuncts Cooper's expansion of `∃x f` would produce.
fn cooper_cost(f: &Formula, x: Var) -> i128 {
    let mut l = 1;
    collect_coeffs(f, x, &mut l);
    let mut delta = l;
    scaled_moduli(f, x, l, &mut delta);
    let (lo, hi) = nnf_bounds(f, x);
    delta.saturating_mul(lo.min(hi) as i128 + 1)
}

fn scaled_moduli(f: &Formula, x: Var, l: i128, delta: &mut i128) {
    match f {
        Formula::Div(d, t) if t.coeff(x) != 0 => *delta = lcm(*delta, d * (l / t.coeff(x).abs())),
        Formula::Not(g) => scaled_moduli(g, x, l, delta),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| scaled_moduli(g, x, l, delta)),
        _ => {}
    }
}

/// `∃x f` when `f` forces `a·x` into `w`.
fn expand_range(x: Var, w: &Window, f: &Formula) -> Formula {
    let mut disjuncts = Vec::new();
    for j in 0..w.width {
        let value = w.base.plus(j);
        let g = Formula::and(vec![
            Formula::divides(w.scale, value.clone()),
            f.substitute_scaled(x, w.scale, &value),
        ]);
        if g == Formula::True {
            return g;
        }
        disjuncts.push(g);
    }
    Formula::or(disjuncts)
}

fn bound_count(cs: &[Formula], v: Var) -> usize {
    let (mut lo, mut hi) = (0, 0);
    for c in cs {
        if let Formula::Le(t) = c {
            match t.coeff(v).signum() {
                1 => hi += 1,
                -1 => lo += 1,
                _ => {}
            }
        }
    }
    lo.min(hi)
}

/// `∃x ⋀cs` for literals `cs` (no equality on `x`).
fn cooper_one(x: Var, cs: Vec<Formula>) -> Formula {
    let (with_x, without_x): (Vec<Formula>, Vec<Formula>) = cs.into_iter().partition(|c| c.mentions(x));
    // Normalize the coefficient of x to ±l and replace l·x by x.
    let l = with_x.iter().fold(1, |acc, c| lcm(acc, literal_term(c).coeff(x).abs()));
    let mut lits: Vec<Formula> = with_x
        .iter()
        .map(|c| {
            let t = literal_term(c);
            let a = t.coeff(x);
            let k = l / a.abs();
            let rest = t.without(x).scale(k);
            let scaled = rest.add(&Term::scaled_var(a.signum(), x));
            match c {
                Formula::Le(_) => Formula::Le(scaled),
                Formula::Div(d, _) => Formula::Div(d * k, scaled),
                Formula::Not(_) => {
                    let Formula::Not(inner) = c else { unreachable!() };
                    let Formula::Div(d, _) = **inner else { unreachable!() };
                    Formula::Not(Box::new(Formula::Div(d * k, scaled)))
                }
                _ => unreachable!("equality left for cooper"),
            }
        })
        .collect();
    if l > 1 {
        lits.push(Formula::Div(l, Term::var(x)));
    }
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    let mut delta = 1;
    for c in &lits {
        match c {
            Formula::Le(t) => {
                let rest = t.without(x);
                if t.coeff(x) > 0 {
                    uppers.push(rest.scale(-1));
                } else {
                    lowers.push(rest);
                }
            }
            Formula::Div(d, _) => delta = lcm(delta, *d),
            Formula::Not(inner) => {
                if let Formula::Div(d, _) = **inner {
                    delta = lcm(delta, d)
                }
            }
            _ => unreachable!(),
        }
    }
    dedup_terms(&mut lowers);
    dedup_terms(&mut uppers);
    let instantiate = |value: &Term| -> Formula {
        let mut parts = without_x.clone();
        for c in &lits {
            parts.push(c.substitute(x, value));
        }
        simplify_and(parts)
    };
    let mut disjuncts = Vec::new();
    let use_lower = lowers.len() <= uppers.len();
    let points = if use_lower { &lowers } else { &uppers };
    if points.is_empty() {
        // Unbounded in the chosen direction: only divisibility constraints matter.
        let div_only: Vec<Formula> = lits.iter().filter(|c| !matches!(c, Formula::Le(_))).cloned().collect();
        for j in 0..delta {
            let mut parts = without_x.clone();
            for c in &div_only {
                parts.push(c.substitute(x, &Term::constant(j)));
            }
            disjuncts.push(simplify_and(parts));
        }
    } else {
        for p in points {
            for j in 0..delta {
                let value = if use_lower { p.plus(j) } else { p.plus(-j) };
                disjuncts.push(instantiate(&value));
            }
        }
    }
    Formula::or(disjuncts)
}

fn dedup_terms(ts: &mut Vec<Term>) {
    ts.sort();
    ts.dedup();
}

fn literal_term(c: &Formula) -> &Term {
    match c {
        Formula::Le(t) | Formula::Eq(t) | Formula::Div(_, t) => t,
        Formula::Not(inner) => literal_term(inner),
        _ => panic!("not a literal: {c}"),
    }
}

/// Normalize one-variable and closed formulas to compact canonical forms.
pub(crate) fn compact(f: Formula) -> Formula {
    let fv = f.free_vars();
    match fv.len() {
        0 => Formula::bool(f.holds(&|_| None)),
        1 if f.size() > 3 => univariate_normalize(&f, *fv.iter().next().unwrap()),
        _ => f,
    }
}

fn finish(f: Formula) -> Formula {
    compact(f)
}

/// Conjunction with light propagation: unit equalities are substituted into
/// sibling literals and parallel bounds are merged.
pub fn simplify_and(parts: Vec<Formula>) -> Formula {
    let f = Formula::and(parts);
    let Formula::And(cs) = f else { return f };
    let mut cs = cs;
    // Substitute unit-coefficient equalities into the other literals.
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 4 {
        changed = false;
        rounds += 1;
        let eqs: Vec<(usize, Var, Term)> = cs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Formula::Eq(t) => t
                    .coeffs()
                    .iter()
                    .rev()
                    .find(|&&(_, a)| a.abs() == 1)
                    .map(|&(v, a)| (i, v, t.without(v).scale(-a))),
                _ => None,
            })
            .collect();
        for (i, v, rhs) in eqs {
            for (j, c) in cs.iter_mut().enumerate() {
                if j != i && c.is_quantifier_free() && c.mentions(v) {
                    let s = c.substitute(v, &rhs);
                    if s != *c {
                        *c = s;
                        changed = true;
                    }
                }
            }
            if changed {
                break;
            }
        }
        if changed {
            match Formula::and(cs.clone()) {
                Formula::And(next) => cs = next,
                other => return other,
            }
        }
    }
    merge_bounds(cs)
}

fn merge_bounds(cs: Vec<Formula>) -> Formula {
    use std::collections::BTreeMap;
    // Linear part -> tightest constant for `lin + c ≤ 0` (largest c).
    let mut bounds: BTreeMap<Term, i128> = BTreeMap::new();
    let mut others = Vec::new();
    for c in cs {
        if let Formula::Le(t) = &c {
            let lin = t.plus(-t.constant);
            let e = bounds.entry(lin).or_insert(t.constant);
            *e = (*e).max(t.constant);
        } else {
            others.push(c);
        }
    }
    let mut out = others;
    let keys: Vec<Term> = bounds.keys().cloned().collect();
    for lin in keys {
        let Some(&c) = bounds.get(&lin) else { continue };
        let neg = lin.scale(-1);
        if let Some(&c2) = bounds.get(&neg) {
            // c2 ≤ lin ≤ -c
            if c2 > -c {
                return Formula::False;
            }
            if c2 == -c {
                out.push(Formula::eq_zero(lin.plus(c)));
                bounds.remove(&neg);
                bounds.remove(&lin);
                continue;
            }
        }
        out.push(Formula::Le(lin.plus(c)));
    }
    Formula::and(out)
}


#[cfg(test)]
mod prop {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn atom(kind: u8, a: i128, b: i128, c: i128, d: i128) -> Formula {
        let t = Term::from_parts(c, [(Var::named("px"), a), (Var::named("py"), b)]);
        match kind % 4 {
            0 | 3 => Formula::le_zero(t),
            1 => Formula::eq_zero(t),
            _ => Formula::divides(d, t),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn elimination_matches_bounded_search(
            atoms in proptest::collection::vec((0u8..4, -3i128..=3, -3i128..=3, -8i128..=8, 2i128..=4, any::<bool>()), 1..5),
            split in 0usize..5,
        ) {
            let (x, y) = (Var::named("px"), Var::named("py"));
            let lits: Vec<Formula> = atoms.iter().map(|&(k, a, b, c, d, neg)| {
                let f = atom(k, a, b, c, d);
                if neg { f.negate() } else { f }
            }).collect();
            let cut = split.min(lits.len());
            let body = Formula::or(vec![
                Formula::and(lits[..cut].to_vec()),
                Formula::and(lits[cut..].to_vec()),
            ]);
            let boxed = Formula::and(vec![
                Formula::between(&Term::constant(-15), &Term::var(x), &Term::constant(15)),
                body,
            ]);
            let f = Formula::exists(x, boxed);
            let g = Eliminator::default().eliminate(&f).unwrap();
            prop_assert!(g.is_quantifier_free());
            for val in -12..=12 {
                let env = BTreeMap::from([(y, val)]);
                prop_assert_eq!(f.evaluate(&env, 15).unwrap(), g.evaluate(&env, 0).unwrap(), "at {}: {} vs {}", val, f, g);
            }
        }

        #[test]
        fn alternation_matches_bounded_search(
            atoms in proptest::collection::vec((0u8..4, -2i128..=2, -2i128..=2, -6i128..=6, 2i128..=3, any::<bool>()), 1..4),
        ) {
            let (x, y, z) = (Var::named("px"), Var::named("py"), Var::named("pz"));
            let lits: Vec<Formula> = atoms.iter().map(|&(k, a, b, c, d, neg)| {
                let f = atom(k, a, b, c, d).substitute(y, &Term::var(z).add(&Term::var(y)));
                if neg { f.negate() } else { f }
            }).collect();
            let xbox = Formula::between(&Term::constant(-6), &Term::var(x), &Term::constant(6));
            let zbox = Formula::between(&Term::constant(-6), &Term::var(z), &Term::constant(6));
            let inner = Formula::forall(x, Formula::implies(xbox, Formula::or(lits)));
            let f = Formula::exists(z, Formula::and(vec![zbox, inner]));
            let g = Eliminator::default().eliminate(&f).unwrap();
            for val in -8..=8 {
                let env = BTreeMap::from([(y, val)]);
                prop_assert_eq!(f.evaluate(&env, 6).unwrap(), g.evaluate(&env, 0).unwrap(), "at {}: {} vs {}", val, f, g);
            }
        }
    }
}
