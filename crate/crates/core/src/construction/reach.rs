//! Runs that touch no endmarker and no stop state strictly between their
//! first and last configuration.

use crate::dynamics::{basic_sequence, BasicSequenceProfile};
use crate::model::{Automaton, State, Symbol};
use crate::presburger::{Formula, Term};

/// Per-automaton data reused by every builder.
pub struct AutomatonInfo<'a> {
    pub automaton: &'a Automaton,
    pub profiles: Vec<BasicSequenceProfile>,
}

impl<'a> AutomatonInfo<'a> {
    pub fn new(automaton: &'a Automaton) -> Self {
        AutomatonInfo {
            automaton,
            profiles: automaton.states().map(|s| basic_sequence(automaton, s)).collect(),
        }
    }
}

fn c(v: i64) -> Term {
    Term::constant(v as i128)
}

/// Formula for: from `(s, p)` at time 0 the isolated automaton is in
/// a target state at `p2` at time `t`, and at every time in `[1, t)` its head is
/// strictly inside the tape and its state is not a stop state.
#[allow(clippy::too_many_arguments)]
pub fn reach(
    info: &AutomatonInfo,
    stop: &dyn Fn(State) -> bool,
    s: State,
    target: &dyn Fn(State) -> bool,
    n: &Term,
    p: &Term,
    p2: &Term,
    t: &Term,
) -> Formula {
    let a = info.automaton;
    let right_end = n.plus(1);
    let mut cases = Vec::new();
    if target(s) {
        cases.push(Formula::and(vec![Formula::eq(t, &c(0)), Formula::eq(p2, p)]));
    }
    let moving = Formula::ge(t, &c(1));

    let m = a.step(s, Symbol::Left);
    let left = match m.delta {
        0 => Formula::and(vec![
            Formula::eq(t, &c(1)),
            Formula::bool(target(m.next)),
            Formula::eq(p2, &c(0)),
        ]),
        1 => Formula::or(vec![
            Formula::and(vec![
                Formula::eq(t, &c(1)),
                Formula::bool(target(m.next)),
                Formula::eq(p2, &c(1)),
            ]),
            Formula::and(vec![
                Formula::ge(t, &c(2)),
                Formula::bool(!stop(m.next)),
                interior(info, stop, m.next, target, n, &c(1), p2, &t.plus(-1)),
            ]),
        ]),
        _ => Formula::False,
    };
    cases.push(Formula::and(vec![Formula::eq(p, &c(0)), moving.clone(), left]));

    let m = a.step(s, Symbol::Right);
    let right = match m.delta {
        0 => Formula::and(vec![
            Formula::eq(t, &c(1)),
            Formula::bool(target(m.next)),
            Formula::eq(p2, &right_end),
        ]),
        -1 => Formula::or(vec![
            Formula::and(vec![
                Formula::eq(t, &c(1)),
                Formula::bool(target(m.next)),
                Formula::eq(p2, n),
            ]),
            Formula::and(vec![
                Formula::ge(t, &c(2)),
                Formula::bool(!stop(m.next)),
                interior(info, stop, m.next, target, n, n, p2, &t.plus(-1)),
            ]),
        ]),
        _ => Formula::False,
    };
    cases.push(Formula::and(vec![Formula::eq(p, &right_end), moving.clone(), right]));

    cases.push(Formula::and(vec![moving, interior(info, stop, s, target, n, p, p2, t)]));
    Formula::and(vec![Formula::between(&c(0), p, &right_end), Formula::or(cases)])
}

/// The case `1 ≤ p ≤ N`, `t ≥ 1`: the head follows the basic sequence of `s`.
#[allow(clippy::too_many_arguments)]
fn interior(
    info: &AutomatonInfo,
    stop: &dyn Fn(State) -> bool,
    s: State,
    target: &dyn Fn(State) -> bool,
    n: &Term,
    p: &Term,
    p2: &Term,
    t: &Term,
) -> Formula {
    let prof = &info.profiles[s];
    let (k, l, per, cyc) = (prof.k(), prof.l(), prof.period() as i64, prof.c());
    let seq = &prof.sequence;
    let lam = &prof.lambda;
    let mut out = Vec::new();

    // Window over times [1, j): lowest and highest displacement, and whether a stop state occurs.
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut clean = true;
    let window = |lo: i64, hi: i64| -> Vec<Formula> {
        if lo > hi {
            return Vec::new();
        }
        vec![
            Formula::ge(&p.plus(lo as i128), &c(1)),
            Formula::le(&p.plus(hi as i128), n),
        ]
    };
    for j in 1..k {
        if clean && target(seq[j]) {
            let mut parts = window(lo, hi);
            parts.push(Formula::eq(t, &c(j as i64)));
            parts.push(Formula::eq(p2, &p.plus(lam[j] as i128)));
            out.push(Formula::and(parts));
        }
        lo = lo.min(lam[j]);
        hi = hi.max(lam[j]);
        clean &= !stop(seq[j]);
    }
    if clean {
        let per_i = per as i128;
        let cyc_i = cyc as i128;
        for j in 0..per as usize {
            if !target(seq[l + j]) {
                continue;
            }
            // t = l + H·per + j with H ≥ 1; `since` is H·per.
            let since = t.plus(-((l + j) as i128));
            let mut parts = window(lo, hi);
            parts.push(Formula::ge(t, &c((l + per as usize + j) as i64)));
            parts.push(Formula::divides(per_i, since.clone()));
            if l == 0 && stop(s) {
                parts.push(Formula::le(t, &c(per)));
            }
            if cyc != 0 {
                // Last visit of each cycle slot before time t.
                for jj in 0..per as usize {
                    let back = if jj >= j { cyc_i * per_i } else { 0 };
                    let scaled_pos = p
                        .scale(per_i)
                        .plus(per_i * lam[l + jj] as i128 - back)
                        .add(&since.scale(cyc_i));
                    if cyc > 0 {
                        parts.push(Formula::le(&scaled_pos, &n.scale(per_i)));
                    } else {
                        parts.push(Formula::ge(&scaled_pos, &c(per)));
                    }
                }
            }
            let end = p.scale(per_i).plus(per_i * lam[l + j] as i128).add(&since.scale(cyc_i));
            parts.push(Formula::eq(&p2.scale(per_i), &end));
            out.push(Formula::and(parts));
        }
    }
    Formula::and(vec![Formula::between(&c(1), p, n), Formula::or(out)])
}
