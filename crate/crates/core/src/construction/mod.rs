//! Presburger definitions of runs, broadcast phases and the recognized set.

mod phase;
mod reach;
mod recognize;
mod run;

use std::collections::BTreeSet;
use std::fmt;

use crate::dynamics::{automaton_min_length, End};
use crate::model::{bounds_profile, Automaton, BoundsProfile, MultiSystem, State};
use crate::presburger::{Formula, PresburgerError, Term, Var};

pub use phase::{automaton_infos, Engine, PhaseFrontier, Theta};
pub use reach::{reach, AutomatonInfo};
pub use recognize::{
    acceptance_condition, class_modulus, class_setting, recognized_set, recognized_set_observed, ConstructionError,
    Observer,
};
pub use run::{qe_budget, rebound_chain, witness_length, ChainEnd, ReboundChain, RunBuilder, RunLimits, Setting};

/// A formula together with the names of the parameters it may mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFormula {
    pub formula: Formula,
    pub signature: Vec<Var>,
}

impl ParamFormula {
    /// Panics if `formula` has a free variable outside `signature`.
    pub fn new(formula: Formula, signature: Vec<Var>) -> Self {
        let free = formula.free_vars();
        let allowed: BTreeSet<Var> = signature.iter().copied().collect();
        assert!(
            free.is_subset(&allowed),
            "free variables {:?} outside signature",
            free.difference(&allowed).map(|v| v.name()).collect::<Vec<_>>()
        );
        ParamFormula { formula, signature }
    }
}

impl fmt::Display for ParamFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.signature.iter().map(|v| v.name()).collect();
        write!(f, "(lambda ({}) {})", names.join(" "), self.formula)
    }
}

/// Parameter names used in signatures.
pub fn var_n() -> Var {
    Var::named("N")
}

pub fn var_p() -> Var {
    Var::named("p")
}

pub fn var_p2() -> Var {
    Var::named("p'")
}

pub fn var_t() -> Var {
    Var::named("T")
}

pub fn var_pi(i: usize) -> Var {
    Var::named(&format!("pi{}", i + 1))
}

pub fn var_pi2(i: usize) -> Var {
    Var::named(&format!("pi'{}", i + 1))
}

fn stop_set(set: &BTreeSet<State>) -> impl Fn(State) -> bool + '_ {
    move |x| set.contains(&x)
}

/// `Reach_S(N, p, p', T)`: from `(s, p)` to `(s', p')` in exactly `T` steps,
/// strictly inside the tape and outside `S` at every intermediate time.
pub fn reach_formula(a: &Automaton, stop: &BTreeSet<State>, s: State, s2: State) -> ParamFormula {
    let info = AutomatonInfo::new(a);
    let f = reach(
        &info,
        &stop_set(stop),
        s,
        &|x| x == s2,
        &Term::var(var_n()),
        &Term::var(var_p()),
        &Term::var(var_p2()),
        &Term::var(var_t()),
    );
    ParamFormula::new(f, vec![var_n(), var_p(), var_p2(), var_t()])
}

fn mask(a: &Automaton, set: &BTreeSet<State>) -> Vec<bool> {
    a.states().map(|s| set.contains(&s)).collect()
}

/// Direction of a traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Right,
    Left,
}

impl Dir {
    fn source(self) -> End {
        match self {
            Dir::Right => End::Left,
            Dir::Left => End::Right,
        }
    }

    fn flip(self) -> Dir {
        match self {
            Dir::Right => Dir::Left,
            Dir::Left => Dir::Right,
        }
    }
}

/// `(N, T)`: starting on the source endmarker in `s`, the automaton rebounds
/// there a fixed number of times, then crosses and arrives in `s2`, `T` steps
/// later. Restricted to `N ≥ N_min`.
pub fn traversal_formula(a: &Automaton, stop: &BTreeSet<State>, s: State, s2: State, dir: Dir) -> ParamFormula {
    let info = AutomatonInfo::new(a);
    let n_min = automaton_min_length(a);
    let setting = Setting::plain(n_min);
    let b = RunBuilder::new(&info, mask(a, stop), &setting, n_min);
    let f = Formula::and(vec![
        setting.guard.clone(),
        b.traversal(s, s2, dir.source(), &Term::var(var_t())),
    ]);
    ParamFormula::new(f, vec![var_n(), var_t()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BounceKind {
    RR,
    RL,
    LR,
    LL,
}

/// Alternating traversals through `chain`: first and last directions are
/// given by `kind`, and there are `2r + 1` (same letters) or `2r + 2`
/// (different letters) of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BouncePattern {
    pub kind: BounceKind,
    pub chain: Vec<State>,
    pub r: usize,
}

impl BouncePattern {
    pub fn traversals(&self) -> usize {
        match self.kind {
            BounceKind::RR | BounceKind::LL => 2 * self.r + 1,
            BounceKind::RL | BounceKind::LR => 2 * self.r + 2,
        }
    }

    fn first(&self) -> Dir {
        match self.kind {
            BounceKind::RR | BounceKind::RL => Dir::Right,
            BounceKind::LR | BounceKind::LL => Dir::Left,
        }
    }

    /// Chain length matches the traversal count and the count fits under `k`.
    pub fn is_valid(&self, k: usize) -> bool {
        self.chain.len() == self.traversals() + 1 && self.traversals() - 1 <= k
    }
}

/// `(N, T)`: the traversals of `pattern` in sequence, `T` their total time.
pub fn bounce_formula(a: &Automaton, stop: &BTreeSet<State>, pattern: &BouncePattern) -> ParamFormula {
    let info = AutomatonInfo::new(a);
    let n_min = automaton_min_length(a);
    let setting = Setting::plain(n_min);
    let b = RunBuilder::new(&info, mask(a, stop), &setting, n_min);
    let mut parts = vec![setting.guard.clone()];
    let mut total = Term::constant(0);
    let mut vars = Vec::new();
    let mut dir = pattern.first();
    for w in pattern.chain.windows(2) {
        let v = Var::fresh("T");
        parts.push(b.traversal(w[0], w[1], dir.source(), &Term::var(v)));
        total = total.add(&Term::var(v));
        vars.push(v);
        dir = dir.flip();
    }
    parts.push(Formula::eq(&Term::var(var_t()), &total));
    let f = Formula::exists_many(vars, Formula::and(parts));
    ParamFormula::new(f, vec![var_n(), var_t()])
}

/// `Run_S(N, p, p', T)` with at most `k` crossings, restricted to `N ≥ N_min`.
pub fn run_formula(
    a: &Automaton,
    stop: &BTreeSet<State>,
    s: State,
    s2: State,
    k: usize,
) -> Result<ParamFormula, PresburgerError> {
    let info = AutomatonInfo::new(a);
    let n_min = automaton_min_length(a);
    let setting = Setting::plain(n_min);
    let b = RunBuilder::new(&info, mask(a, stop), &setting, n_min);
    let limits = RunLimits {
        crossings: k,
        simple: false,
    };
    let f = b.run(
        s,
        &|x| x == s2,
        &Term::var(var_p()),
        &Term::var(var_p2()),
        &Term::var(var_t()),
        limits,
        None,
    )?;
    Ok(ParamFormula::new(
        Formula::and(vec![setting.guard.clone(), f]),
        vec![var_n(), var_p(), var_p2(), var_t()],
    ))
}

/// `(N, p, T)`: `T` is the first time at which the automaton, started in
/// `(s, p)`, is in a broadcasting state.
pub fn race_formula(a: &Automaton, s: State, k: usize) -> Result<ParamFormula, PresburgerError> {
    let info = AutomatonInfo::new(a);
    let n_min = automaton_min_length(a);
    let setting = Setting::plain(n_min);
    let f = race(&info, &setting, n_min, s, &Term::var(var_p()), &Term::var(var_t()), k)?;
    Ok(ParamFormula::new(
        Formula::and(vec![setting.guard.clone(), f]),
        vec![var_n(), var_p(), var_t()],
    ))
}

fn race(
    info: &AutomatonInfo,
    setting: &Setting,
    n_min: usize,
    s: State,
    p: &Term,
    t: &Term,
    k: usize,
) -> Result<Formula, PresburgerError> {
    let a = info.automaton;
    let n = &setting.n;
    let on_tape = Formula::between(&Term::constant(0), p, &n.plus(1));
    if a.is_broadcasting(s) {
        return Ok(Formula::and(vec![on_tape, Formula::eq(t, &Term::constant(0))]));
    }
    let b = RunBuilder::new(info, a.states().map(|x| a.is_broadcasting(x)).collect(), setting, n_min);
    let v = Var::fresh("p");
    let limits = RunLimits {
        crossings: k,
        simple: true,
    };
    let f = b.run(s, &|x| a.is_broadcasting(x), p, &Term::var(v), t, limits, None)?;
    Ok(Formula::exists(v, f))
}

/// `(N, p)`: started in `(s, p)`, the automaton is never in a broadcasting state.
pub fn mute_formula(a: &Automaton, s: State, k: usize) -> Result<ParamFormula, PresburgerError> {
    let info = AutomatonInfo::new(a);
    let n_min = automaton_min_length(a);
    let setting = Setting::plain(n_min);
    let p = Term::var(var_p());
    let t = Var::fresh("T");
    let r = race(&info, &setting, n_min, s, &p, &Term::var(t), k)?;
    let f = Formula::and(vec![
        setting.guard.clone(),
        Formula::between(&Term::constant(0), &p, &setting.n.plus(1)),
        Formula::not(Formula::exists(t, r)),
    ]);
    Ok(ParamFormula::new(f, vec![var_n(), var_p()]))
}

/// Frontier of the initial configuration: every head on the left endmarker.
pub fn initial_frontier(system: &MultiSystem) -> PhaseFrontier {
    let bounds = bounds_profile(system);
    let infos = automaton_infos(system);
    let setting = Setting::plain(bounds.n_min);
    Engine::new(system, &infos, &setting, bounds).initial_frontier()
}

fn check_theta(system: &MultiSystem, theta: &Theta) -> Result<(), ConstructionError> {
    let ok = !theta.broadcasters.is_empty()
        && theta.sigma.len() == system.len()
        && theta.broadcasters.iter().all(|&i| i < system.len())
        && (0..system.len()).all(|i| {
            let a = system.automaton(i);
            theta.sigma[i] < a.len() && a.is_broadcasting(theta.sigma[i]) == theta.broadcasters.contains(&i)
        });
    if ok {
        Ok(())
    } else {
        Err(ConstructionError::Precondition(format!("{theta:?} is not an outcome")))
    }
}

/// `Φ(N, π, π')`: from `sigma` at positions `π`, the next broadcast is made by
/// exactly `theta.broadcasters`, in global state `theta.sigma` at positions `π'`.
/// `from_start` marks the phase that begins at time 0, where a broadcast may
/// be immediate.
pub fn phase_formula(
    system: &MultiSystem,
    sigma: &[State],
    theta: &Theta,
    from_start: bool,
    bounds: BoundsProfile,
) -> Result<ParamFormula, ConstructionError> {
    check_theta(system, theta)?;
    let infos = automaton_infos(system);
    let setting = Setting::plain(bounds.n_min);
    let engine = Engine::new(system, &infos, &setting, bounds);
    let f = engine.phase_formula(sigma, theta, from_start)?;
    let mut sig = vec![var_n()];
    sig.extend((0..system.len()).map(var_pi));
    sig.extend((0..system.len()).map(var_pi2));
    Ok(ParamFormula::new(f, sig))
}

/// Successor frontiers of `frontier`, one per outcome that some `N` allows.
pub fn advance_frontier(
    system: &MultiSystem,
    frontier: &PhaseFrontier,
    bounds: BoundsProfile,
) -> Result<Vec<(Theta, PhaseFrontier)>, ConstructionError> {
    if frontier.messages_spent >= system.message_bound() {
        return Err(ConstructionError::Precondition("no message left".into()));
    }
    let infos = automaton_infos(system);
    let setting = Setting::plain(bounds.n_min);
    Ok(Engine::new(system, &infos, &setting, bounds).advance(frontier)?)
}

/// Condition on `N` under which automaton 1 accepts during the phase that
/// starts at `frontier`, before its closing broadcast unless `final_phase`.
pub fn accept_formula(
    system: &MultiSystem,
    frontier: &PhaseFrontier,
    final_phase: bool,
) -> Result<Formula, ConstructionError> {
    let bounds = bounds_profile(system);
    let infos = automaton_infos(system);
    let setting = Setting::plain(bounds.n_min);
    Ok(Engine::new(system, &infos, &setting, bounds).accept(frontier, final_phase)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::bounds_profile;
    use crate::presburger::eliminate;

    fn fix(f: &Formula, vals: &[(Var, i64)]) -> Formula {
        let map: Vec<(Var, Term)> = vals.iter().map(|&(v, x)| (v, Term::constant(x as i128))).collect();
        eliminate(&f.substitute_all(&map)).unwrap()
    }

    fn holds(f: &Formula, vals: &[(Var, i64)]) -> bool {
        f.holds(&|v| vals.iter().find(|(w, _)| *w == v).map(|&(_, x)| x as i128))
    }

    #[test]
    fn recognized_sets_match_the_simulator() {
        for (name, _) in fixtures::ALL {
            let sys = fixtures::by_name(name);
            let start = std::time::Instant::now();
            let set = recognized_set(&sys).unwrap();
            let brute = crate::sim::brute_force_spectrum(&sys, 300).unwrap();
            for (n, &want) in brute.iter().enumerate() {
                assert_eq!(set.contains(n), want, "{name} N={n} set={set}");
            }
            eprintln!("{name}: {set} in {:?}", start.elapsed());
        }
    }

    #[test]
    fn runs_follow_the_simulator() {
        for (name, _) in fixtures::ALL {
            let sys = fixtures::by_name(name);
            let k = bounds_profile(&sys).k;
            for a in sys.automata() {
                let n_min = automaton_min_length(a) as i64;
                for s in a.states() {
                    for s2 in a.states() {
                        let f = run_formula(a, &BTreeSet::new(), s, s2, k).unwrap().formula;
                        for n in [n_min, n_min + 1, n_min + 3] {
                            for p in 0..=n + 1 {
                                let g = fix(&f, &[(var_n(), n), (var_p(), p)]);
                                let (mut st, mut pos) = (s, p);
                                let (mut last_end, mut crossings) = (None, 0);
                                for t in 0..40 {
                                    if t > 0 && (pos == 0 || pos == n + 1) {
                                        if last_end.is_some_and(|e| e != pos) {
                                            crossings += 1;
                                        }
                                        last_end = Some(pos);
                                    }
                                    if crossings > k {
                                        break;
                                    }
                                    for q in 0..=n + 1 {
                                        let want = st == s2 && pos == q;
                                        let got = holds(&g, &[(var_p2(), q), (var_t(), t)]);
                                        assert_eq!(
                                            got,
                                            want,
                                            "{name}/{} s={s} s'={s2} N={n} p={p} p'={q} T={t}",
                                            a.name()
                                        );
                                    }
                                    (st, pos) = crate::sim::isolated_step(a, st, pos, n).unwrap();
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn first_broadcast(a: &Automaton, s: State, p: i64, n: i64) -> Option<i64> {
        let (mut st, mut pos) = (s, p);
        let mut seen = std::collections::HashSet::new();
        for t in 0.. {
            if a.is_broadcasting(st) {
                return Some(t);
            }
            if !seen.insert((st, pos)) {
                return None;
            }
            (st, pos) = crate::sim::isolated_step(a, st, pos, n).unwrap();
        }
        unreachable!()
    }

    #[test]
    fn races_and_mutes_follow_the_simulator() {
        for (name, _) in fixtures::ALL {
            let sys = fixtures::by_name(name);
            let k = bounds_profile(&sys).k;
            for a in sys.automata() {
                let n_min = automaton_min_length(a) as i64;
                for s in a.states() {
                    let race = race_formula(a, s, k).unwrap().formula;
                    let mute = eliminate(&mute_formula(a, s, k).unwrap().formula).unwrap();
                    for n in [n_min, n_min + 1, n_min + 2, n_min + 5] {
                        for p in 0..=n + 1 {
                            let want = first_broadcast(a, s, p, n);
                            let g = fix(&race, &[(var_n(), n), (var_p(), p)]);
                            for t in 0..6 * (n + 2) {
                                assert_eq!(
                                    holds(&g, &[(var_t(), t)]),
                                    want == Some(t),
                                    "{name} s={s} N={n} p={p} T={t}"
                                );
                            }
                            assert_eq!(
                                holds(&mute, &[(var_n(), n), (var_p(), p)]),
                                want.is_none(),
                                "{name} mute s={s} N={n} p={p}"
                            );
                        }
                    }
                }
            }
        }
    }
}
