//! Canonical rewriting of quantifier-free formulas in a single variable.
//!
//! Such a formula is periodic outside the interval spanned by its atom
//! breakpoints. We evaluate it once per residue on each side and once per
//! point inside, then rebuild a small equivalent formula.

use super::formula::Formula;
use super::term::{lcm, Term, Var};

/// Breakpoint window `[lo, hi]` and period of a one-variable formula.
pub(crate) fn profile(f: &Formula, x: Var) -> (i128, i128, i128) {
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    let mut period = 1;
    scan(f, x, &mut lo, &mut hi, &mut period);
    if lo > hi {
        (0, 0, period)
    } else {
        (lo - 1, hi + 1, period)
    }
}

fn scan(f: &Formula, x: Var, lo: &mut i128, hi: &mut i128, period: &mut i128) {
    match f {
        Formula::Le(t) | Formula::Eq(t) => {
            let a = t.coeff(x);
            if a != 0 {
                let c = t.constant;
                let root_floor = (-c).div_euclid(a);
                *lo = (*lo).min(root_floor - 1);
                *hi = (*hi).max(root_floor + 1);
            }
        }
        Formula::Div(d, _) => *period = lcm(*period, *d),
        Formula::Not(g) => scan(g, x, lo, hi, period),
        Formula::And(gs) | Formula::Or(gs) => {
            for g in gs {
                scan(g, x, lo, hi, period);
            }
        }
        _ => {}
    }
}

/// Smallest `q` dividing `p` such that `bits` (indexed by residue mod `p`) is `q`-periodic.
pub(crate) fn minimal_period(bits: &[bool]) -> usize {
    let p = bits.len();
    (1..=p)
        .filter(|q| p.is_multiple_of(*q))
        .find(|&q| (0..p).all(|i| bits[i] == bits[i % q]))
        .unwrap_or(p)
}

fn residue_formula(x: Var, anchor: i128, bits: &[bool]) -> Formula {
    // bits[i] is the truth at values ≡ anchor + i (mod len)
    let q = minimal_period(bits);
    let bits = &bits[..q];
    if bits.iter().all(|&b| b) {
        return Formula::True;
    }
    let ones = bits.iter().filter(|&&b| b).count();
    let pick = |want: bool| -> Vec<Formula> {
        bits.iter()
            .enumerate()
            .filter(|&(_, &b)| b == want)
            .map(|(i, _)| Formula::divides(q as i128, Term::var(x).plus(-(anchor + i as i128))))
            .collect()
    };
    if ones * 2 <= q {
        Formula::or(pick(true))
    } else {
        Formula::and(pick(false).into_iter().map(Formula::not).collect())
    }
}

/// Equivalent compact form of a quantifier-free formula whose only free variable is `x`.
pub fn univariate_normalize(f: &Formula, x: Var) -> Formula {
    let (lo, hi, period) = profile(f, x);
    let truth = |v: i128| f.holds(&|w| if w == x { Some(v) } else { None });
    let p = period as usize;
    let upper: Vec<bool> = (0..period).map(|i| truth(hi + i)).collect();
    let lower: Vec<bool> = (0..period).map(|i| truth(lo - i)).collect();
    let mut parts = Vec::new();
    let xt = Term::var(x);

    if upper.iter().any(|&b| b) {
        parts.push(Formula::and(vec![
            Formula::ge(&xt, &Term::constant(hi)),
            residue_formula(x, hi, &upper),
        ]));
    }
    if lower.iter().any(|&b| b) {
        // lower[i] is the truth at lo - i; re-index to ascending residues from lo - (p-1)
        let base = lo - (period - 1);
        let asc: Vec<bool> = (0..p).map(|i| lower[p - 1 - i]).collect();
        parts.push(Formula::and(vec![
            Formula::le(&xt, &Term::constant(lo)),
            residue_formula(x, base, &asc),
        ]));
    }
    // Inside (lo, hi): maximal runs per residue class.
    for r in 0..period {
        let mut v = lo + 1 + r;
        let mut run_start: Option<i128> = None;
        let mut last = v;
        while v < hi {
            if truth(v) {
                if run_start.is_none() {
                    run_start = Some(v);
                }
                last = v;
            } else if let Some(s) = run_start.take() {
                parts.push(stride_run(x, s, last, period));
            }
            v += period;
        }
        if let Some(s) = run_start {
            parts.push(stride_run(x, s, last, period));
        }
    }
    Formula::or(parts)
}

fn stride_run(x: Var, from: i128, to: i128, period: i128) -> Formula {
    let xt = Term::var(x);
    if from == to {
        return Formula::eq(&xt, &Term::constant(from));
    }
    Formula::and(vec![
        Formula::between(&Term::constant(from), &xt, &Term::constant(to)),
        Formula::divides(period, xt.plus(-from)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Var {
        Var::named("u")
    }

    fn atom(kind: u8, a: i128, c: i128, d: i128) -> Formula {
        let t = Term::from_parts(c, [(x(), a)]);
        match kind % 3 {
            0 => Formula::le_zero(t),
            1 => Formula::eq_zero(t),
            _ => Formula::divides(d, t),
        }
    }

    proptest! {
        #[test]
        fn normalization_is_equivalent(
            atoms in proptest::collection::vec((0u8..3, -3i128..=3, -12i128..=12, 2i128..=5, any::<bool>()), 1..5),
            conj in any::<bool>(),
        ) {
            let lits: Vec<Formula> = atoms.iter().map(|&(k, a, c, d, neg)| {
                let f = atom(k, a, c, d);
                if neg { f.negate() } else { f }
            }).collect();
            let f = if conj { Formula::and(lits) } else { Formula::or(lits) };
            let g = univariate_normalize(&f, x());
            for v in -60..60 {
                let env = |w: Var| if w == x() { Some(v) } else { None };
                prop_assert_eq!(f.holds(&env), g.holds(&env), "at {}: {} vs {}", v, f, g);
            }
        }
    }
}
