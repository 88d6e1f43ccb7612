//! Runs that may touch the endmarkers: hitting chains, traversals and the
//! general run formula.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::dynamics::End;
use crate::model::State;
use crate::presburger::{Eliminator, Formula, PresburgerError, Term, Var};
use crate::sim::isolated_step;

use super::reach::{reach, AutomatonInfo};

/// What happens after a hit on an endmarker, for any long enough tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainEnd {
    /// The last node takes off and reaches the opposite endmarker.
    Cross,
    /// The last node never hits again, or is cut by a stop state.
    Halt,
    /// The last node rebounds into `nodes[entry]`; one turn takes `length` steps.
    Cycle { entry: usize, length: i64 },
}

/// Successive hits on one endmarker: `(state, time since the first hit)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReboundChain {
    pub nodes: Vec<(State, i64)>,
    pub end: ChainEnd,
}

enum Takeoff {
    Back { state: State, time: i64, clean: bool },
    Across,
    Never,
}

fn end_pos(e: End, n: i64) -> i64 {
    match e {
        End::Left => 0,
        End::Right => n + 1,
    }
}

pub(crate) fn end_term(e: End, n: &Term) -> Term {
    match e {
        End::Left => Term::constant(0),
        End::Right => n.plus(1),
    }
}

pub(crate) fn opposite(e: End) -> End {
    match e {
        End::Left => End::Right,
        End::Right => End::Left,
    }
}

fn takeoff_hit(info: &AutomatonInfo, stop: &dyn Fn(State) -> bool, x: State, e: End, n: i64) -> Takeoff {
    let a = info.automaton;
    let start = end_pos(e, n);
    let (mut s, mut p) = (x, start);
    let mut clean = true;
    let mut seen = std::collections::HashSet::new();
    for time in 1.. {
        match isolated_step(a, s, p, n) {
            Ok(next) => (s, p) = next,
            Err(_) => return Takeoff::Never,
        }
        if p == start {
            return Takeoff::Back {
                state: s,
                time,
                clean: clean && !stop(s),
            };
        }
        if p == n + 1 - start {
            return Takeoff::Across;
        }
        if !seen.insert((s, p)) {
            return Takeoff::Never;
        }
        clean &= !stop(s);
    }
    unreachable!()
}

/// Rebounds from `(x, e)` as observed on a tape of length `n`.
pub fn rebound_chain(info: &AutomatonInfo, stop: &dyn Fn(State) -> bool, x: State, e: End, n: i64) -> ReboundChain {
    let mut nodes = vec![(x, 0)];
    loop {
        let &(cur, at) = nodes.last().unwrap();
        match takeoff_hit(info, stop, cur, e, n) {
            Takeoff::Back { state, time, clean } => {
                if !clean {
                    return ReboundChain {
                        nodes,
                        end: ChainEnd::Halt,
                    };
                }
                if let Some(entry) = nodes.iter().position(|&(s, _)| s == state) {
                    let length = at + time - nodes[entry].1;
                    return ReboundChain {
                        nodes,
                        end: ChainEnd::Cycle { entry, length },
                    };
                }
                nodes.push((state, at + time));
            }
            Takeoff::Across => {
                return ReboundChain {
                    nodes,
                    end: ChainEnd::Cross,
                }
            }
            Takeoff::Never => {
                return ReboundChain {
                    nodes,
                    end: ChainEnd::Halt,
                }
            }
        }
    }
}

/// Tape length at which hitting chains are read off.
pub fn witness_length(info: &AutomatonInfo, n_min: usize) -> i64 {
    let amp = info.profiles.iter().map(|p| p.amplitude).max().unwrap_or(0);
    (n_min as i64).max(2 * amp + 2)
}

/// Budget for one elimination, overridable through `MULTIAUTO_QE_BUDGET`.
pub fn qe_budget() -> usize {
    std::env::var("MULTIAUTO_QE_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(crate::presburger::DEFAULT_BUDGET)
}

/// Where the tape length lives: `n` is a term over parameters constrained by `guard`.
#[derive(Debug, Clone)]
pub struct Setting {
    pub n: Term,
    pub guard: Formula,
    pub budget: usize,
}

impl Setting {
    /// `N` itself, restricted to `N ≥ n_min`.
    pub fn plain(n_min: usize) -> Setting {
        let n = Term::var(super::var_n());
        Setting {
            guard: Formula::ge(&n, &Term::constant(n_min as i128)),
            n,
            budget: qe_budget(),
        }
    }

    pub fn eliminate(&self, f: &Formula) -> Result<Formula, PresburgerError> {
        Eliminator::new(self.budget).eliminate(f)
    }

    /// Whether `guard ∧ f` has a solution.
    pub fn satisfiable(&self, f: &Formula) -> Result<bool, PresburgerError> {
        let body = Formula::and(vec![self.guard.clone(), f.clone()]);
        match body {
            Formula::False => return Ok(false),
            Formula::True => return Ok(true),
            _ => {}
        }
        let closed = Formula::exists_many(body.free_vars(), body);
        Ok(self.eliminate(&closed)? == Formula::True)
    }
}

/// Run shapes requested from [`RunBuilder::run`].
#[derive(Debug, Clone, Copy)]
pub struct RunLimits {
    /// Most crossings from one endmarker to the other.
    pub crossings: usize,
    /// Drop runs that revisit a hit; enough when the target is a first arrival.
    pub simple: bool,
}

pub struct RunBuilder<'a> {
    pub info: &'a AutomatonInfo<'a>,
    pub stop: Vec<bool>,
    pub setting: &'a Setting,
    n_w: i64,
    chains: RefCell<HashMap<(State, End), ReboundChain>>,
    arrivals: RefCell<HashMap<(State, End), Vec<State>>>,
}

type Res = Result<Formula, PresburgerError>;

struct Walk<'f> {
    target: &'f dyn Fn(State) -> bool,
    p2: Term,
    t: Term,
    limits: RunLimits,
    horizon: Option<Formula>,
    path: Vec<Formula>,
    visited: Vec<(State, End)>,
}

impl<'a> RunBuilder<'a> {
    pub fn new(info: &'a AutomatonInfo<'a>, stop: Vec<bool>, setting: &'a Setting, n_min: usize) -> Self {
        RunBuilder {
            n_w: witness_length(info, n_min),
            info,
            stop,
            setting,
            chains: RefCell::default(),
            arrivals: RefCell::default(),
        }
    }

    fn stopped(&self, s: State) -> bool {
        self.stop[s]
    }

    pub fn reach(&self, s: State, target: &dyn Fn(State) -> bool, p: &Term, p2: &Term, t: &Term) -> Formula {
        reach(self.info, &|x| self.stopped(x), s, target, &self.setting.n, p, p2, t)
    }

    pub fn chain(&self, x: State, e: End) -> ReboundChain {
        self.chains
            .borrow_mut()
            .entry((x, e))
            .or_insert_with(|| {
                let c = rebound_chain(self.info, &|s| self.stopped(s), x, e, self.n_w);
                debug_assert_eq!(c, rebound_chain(self.info, &|s| self.stopped(s), x, e, self.n_w + 1));
                c
            })
            .clone()
    }

    fn crossing(&self, x: State, e: End, y: State, tau: &Term) -> Formula {
        let n = &self.setting.n;
        Formula::and(vec![
            Formula::ge(tau, &Term::constant(1)),
            self.reach(x, &|z| z == y, &end_term(e, n), &end_term(opposite(e), n), tau),
        ])
    }

    /// States in which a crossing from `(x, e)` can arrive, and that may be hit.
    pub fn arrivals(&self, x: State, e: End) -> Result<Vec<State>, PresburgerError> {
        if let Some(v) = self.arrivals.borrow().get(&(x, e)) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        for y in self.info.automaton.states() {
            if self.stopped(y) {
                continue;
            }
            let tau = Term::var(Var::fresh("tau"));
            if self.setting.satisfiable(&self.crossing(x, e, y, &tau))? {
                out.push(y);
            }
        }
        self.arrivals.borrow_mut().insert((x, e), out.clone());
        Ok(out)
    }

    /// Traversal from `(s, from)`: same-end rebounds, then one crossing
    /// arriving in `s2`, taking `t` steps in all.
    pub fn traversal(&self, s: State, s2: State, from: End, t: &Term) -> Formula {
        let chain = self.chain(s, from);
        if chain.end != ChainEnd::Cross {
            return Formula::False;
        }
        let &(x, d) = chain.nodes.last().unwrap();
        self.crossing(x, from, s2, &t.plus(-(d as i128)))
    }

    /// From `(s, p)` at time 0 to a target state at `p2` at time `t`, with no
    /// stop state at any time in `[1, t)`.
    #[allow(clippy::too_many_arguments)]
    pub fn run(
        &self,
        s: State,
        target: &dyn Fn(State) -> bool,
        p: &Term,
        p2: &Term,
        t: &Term,
        limits: RunLimits,
        horizon: Option<&Formula>,
    ) -> Res {
        let mut walk = Walk {
            target,
            p2: p2.clone(),
            t: t.clone(),
            limits,
            horizon: horizon.cloned(),
            path: Vec::new(),
            visited: Vec::new(),
        };
        let n = self.setting.n.clone();
        let mut parts = vec![self.reach(s, target, p, p2, t)];
        for x in self.info.automaton.states() {
            if self.stopped(x) {
                continue;
            }
            for e in [End::Left, End::Right] {
                let v = Var::fresh("t");
                let t1 = Term::var(v);
                let hit = Formula::and(vec![
                    Formula::ge(&t1, &Term::constant(1)),
                    Formula::ge(&t.sub(&t1), &Term::constant(1)),
                    self.reach(s, &|z| z == x, p, &end_term(e, &n), &t1),
                ]);
                if !self.feasible(&walk, &hit)? {
                    continue;
                }
                walk.path.push(hit.clone());
                let rest = self.cont(&mut walk, x, e, &t1, limits.crossings)?;
                walk.path.pop();
                parts.push(Formula::exists(v, Formula::and(vec![hit, rest])));
            }
        }
        Ok(Formula::or(parts))
    }

    fn feasible(&self, walk: &Walk, step: &Formula) -> Result<bool, PresburgerError> {
        let mut all = walk.path.clone();
        all.push(step.clone());
        if let Some(h) = &walk.horizon {
            all.push(h.clone());
        }
        self.setting.satisfiable(&Formula::and(all))
    }

    /// Continuation after a hit on `(x, e)` at time `at`.
    fn cont(&self, walk: &mut Walk, x: State, e: End, at: &Term, crossings: usize) -> Res {
        let n = self.setting.n.clone();
        let chain = self.chain(x, e);
        let mut nodes = chain.nodes.clone();
        let mut end = chain.end.clone();
        if walk.limits.simple {
            if let Some(cut) = nodes.iter().position(|&(z, _)| walk.visited.contains(&(z, e))) {
                nodes.truncate(cut);
                end = ChainEnd::Halt;
            } else if matches!(end, ChainEnd::Cycle { .. }) {
                end = ChainEnd::Halt;
            }
        }
        let mut parts = Vec::new();
        let tail = |z: State, since: &Term| -> Formula {
            let left = walk.t.sub(since);
            Formula::and(vec![
                Formula::ge(&left, &Term::constant(1)),
                self.reach(z, walk.target, &end_term(e, &n), &walk.p2, &left),
            ])
        };
        for &(z, d) in &nodes {
            parts.push(tail(z, &at.plus(d as i128)));
        }
        if let ChainEnd::Cycle { entry, length } = end {
            for &(z, d) in &nodes[entry..] {
                let h = Var::fresh("H");
                let since = at.plus(d as i128).add(&Term::scaled_var(length as i128, h));
                parts.push(Formula::exists(
                    h,
                    Formula::and(vec![Formula::ge(&Term::var(h), &Term::constant(1)), tail(z, &since)]),
                ));
            }
        }
        if end == ChainEnd::Cross && crossings > 0 {
            let depth = walk.visited.len();
            walk.visited.extend(nodes.iter().map(|&(z, _)| (z, e)));
            let &(xq, dq) = nodes.last().unwrap();
            let other = opposite(e);
            for y in self.arrivals(xq, e)? {
                if walk.limits.simple && walk.visited.contains(&(y, other)) {
                    continue;
                }
                let v = Var::fresh("tau");
                let tau = Term::var(v);
                let landed = at.plus(dq as i128).add(&tau);
                let step = Formula::and(vec![
                    self.crossing(xq, e, y, &tau),
                    Formula::ge(&walk.t.sub(&landed), &Term::constant(1)),
                ]);
                if walk.horizon.is_some() && !self.feasible(walk, &step)? {
                    continue;
                }
                walk.path.push(step.clone());
                let rest = self.cont(walk, y, other, &landed, crossings - 1)?;
                walk.path.pop();
                parts.push(Formula::exists(v, Formula::and(vec![step, rest])));
            }
            walk.visited.truncate(depth);
        }
        Ok(Formula::or(parts))
    }
}
