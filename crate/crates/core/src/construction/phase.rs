//! Broadcast phases: the phase formula, frontier advancement, acceptance and
//! the recognized set.

use std::collections::BTreeSet;

use crate::model::{BoundsProfile, MultiSystem, State};
use crate::presburger::{simplify_dnf, Formula, PresburgerError, Term, Var};

use super::reach::AutomatonInfo;
use super::run::{RunBuilder, RunLimits, Setting};
use super::{var_pi, var_pi2, ParamFormula};

/// Label of a phase outcome: who broadcasts, and the global state at that moment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Theta {
    pub broadcasters: BTreeSet<usize>,
    pub sigma: Vec<State>,
}

/// A broadcasting configuration: global state, head positions as a function
/// of the tape length, and messages spent so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseFrontier {
    pub sigma: Vec<State>,
    pub position_graph: ParamFormula,
    pub messages_spent: usize,
}

/// Formula builders for one system under one [`Setting`].
pub struct Engine<'a> {
    pub system: &'a MultiSystem,
    pub bounds: BoundsProfile,
    pub setting: &'a Setting,
    params: Vec<Var>,
    /// Per automaton: stop at broadcasting states, and stop nowhere.
    builders: Vec<[RunBuilder<'a>; 2]>,
}

type Res<T> = Result<T, PresburgerError>;

const DNF_CAP: usize = 4096;

pub fn automaton_infos(system: &MultiSystem) -> Vec<AutomatonInfo<'_>> {
    system.automata().iter().map(AutomatonInfo::new).collect()
}

impl<'a> Engine<'a> {
    pub fn new(
        system: &'a MultiSystem,
        infos: &'a [AutomatonInfo<'a>],
        setting: &'a Setting,
        bounds: BoundsProfile,
    ) -> Self {
        let builders = infos
            .iter()
            .map(|info| {
                let a = info.automaton;
                let b = a.states().map(|s| a.is_broadcasting(s)).collect();
                [
                    RunBuilder::new(info, b, setting, bounds.n_min),
                    RunBuilder::new(info, vec![false; a.len()], setting, bounds.n_min),
                ]
            })
            .collect();
        let params = setting.guard.free_vars().into_iter().collect();
        Engine {
            system,
            bounds,
            setting,
            params,
            builders,
        }
    }

    fn signature(&self) -> Vec<Var> {
        let mut sig = self.params.clone();
        sig.extend((0..self.system.len()).map(var_pi));
        sig
    }

    fn short(&self) -> RunLimits {
        RunLimits {
            crossings: self.bounds.k,
            simple: true,
        }
    }

    /// Enough crossings for any automaton during another's first arrival.
    fn long(&self) -> RunLimits {
        let q = self.system.automata().iter().map(|a| a.len()).max().unwrap_or(1);
        RunLimits {
            crossings: (self.bounds.k + 2) * (self.bounds.g + q * q + 2 * q + 1) + 2,
            simple: false,
        }
    }

    pub fn initial_frontier(&self) -> PhaseFrontier {
        let mut parts = vec![self.setting.guard.clone()];
        for i in 0..self.system.len() {
            parts.push(Formula::eq(&Term::var(var_pi(i)), &Term::constant(0)));
        }
        PhaseFrontier {
            sigma: self.system.automata().iter().map(|a| a.initial()).collect(),
            position_graph: ParamFormula::new(Formula::and(parts), self.signature()),
            messages_spent: 0,
        }
    }

    /// Constraint on the phase duration `t`.
    fn start(&self, sigma: &[State], from_start: bool, t: &Term) -> Formula {
        let now = sigma
            .iter()
            .enumerate()
            .any(|(i, &s)| self.system.automaton(i).is_broadcasting(s));
        if from_start && now {
            Formula::eq(t, &Term::constant(0))
        } else {
            Formula::ge(t, &Term::constant(1))
        }
    }

    fn phase_run(
        &self,
        i: usize,
        s: State,
        s2: State,
        t: &Term,
        racer: bool,
        horizon: Option<&Formula>,
    ) -> Res<Formula> {
        let limits = if racer { self.short() } else { self.long() };
        self.builders[i][0].run(
            s,
            &|x| x == s2,
            &Term::var(var_pi(i)),
            &Term::var(var_pi2(i)),
            t,
            limits,
            if racer { None } else { horizon },
        )
    }

    /// All outcomes `θ` of the phase starting at `sigma` that are consistent
    /// with `context`, each with the body of `Φ` (free: parameters, `π`, `π'`, `t`).
    fn outcomes(&self, sigma: &[State], from_start: bool, context: &Formula, t: &Term) -> Res<Vec<(Theta, Formula)>> {
        let n = self.system.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let racers: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if racers
                .iter()
                .any(|&i| self.system.automaton(i).broadcasting().is_empty())
            {
                continue;
            }
            let order: Vec<usize> = racers
                .iter()
                .copied()
                .chain((0..n).filter(|i| !racers.contains(i)))
                .collect();
            let base = vec![context.clone(), self.start(sigma, from_start, t)];
            let mut chosen = vec![0; n];
            self.extend(sigma, &racers, &order, 0, base, &mut chosen, t, &mut out)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        sigma: &[State],
        racers: &BTreeSet<usize>,
        order: &[usize],
        depth: usize,
        parts: Vec<Formula>,
        chosen: &mut Vec<State>,
        t: &Term,
        out: &mut Vec<(Theta, Formula)>,
    ) -> Res<()> {
        if depth == order.len() {
            out.push((
                Theta {
                    broadcasters: racers.clone(),
                    sigma: chosen.clone(),
                },
                Formula::and(parts),
            ));
            return Ok(());
        }
        let i = order[depth];
        let a = self.system.automaton(i);
        let racer = racers.contains(&i);
        let horizon = Formula::and(parts.clone());
        for s2 in a.states().filter(|&s| a.is_broadcasting(s) == racer) {
            let run = self.phase_run(i, sigma[i], s2, t, racer, Some(&horizon))?;
            let mut next = parts.clone();
            next.push(run);
            if !self.setting.satisfiable(&Formula::and(next.clone()))? {
                continue;
            }
            chosen[i] = s2;
            self.extend(sigma, racers, order, depth + 1, next, chosen, t, out)?;
        }
        Ok(())
    }

    /// `Φ(σ, σ', π, π')` for outcome `(racers, sigma2)`; free: parameters, `π`, `π'`.
    pub fn phase_formula(&self, sigma: &[State], theta: &Theta, from_start: bool) -> Res<Formula> {
        let tv = Var::fresh("T");
        let t = Term::var(tv);
        let mut parts = vec![self.setting.guard.clone(), self.start(sigma, from_start, &t)];
        let mut racers = Vec::new();
        for &i in &theta.broadcasters {
            racers.push(self.phase_run(i, sigma[i], theta.sigma[i], &t, true, None)?);
        }
        let horizon = Formula::and(racers.iter().cloned().chain(parts.iter().cloned()).collect());
        parts.extend(racers);
        for i in (0..self.system.len()).filter(|i| !theta.broadcasters.contains(i)) {
            parts.push(self.phase_run(i, sigma[i], theta.sigma[i], &t, false, Some(&horizon))?);
        }
        Ok(Formula::exists(tv, Formula::and(parts)))
    }

    /// Successor frontiers, one per satisfiable outcome.
    pub fn advance(&self, frontier: &PhaseFrontier) -> Res<Vec<(Theta, PhaseFrontier)>> {
        let n = self.system.len();
        let tv = Var::fresh("T");
        let f = &frontier.position_graph.formula;
        let mut out = Vec::new();
        for (theta, body) in self.outcomes(&frontier.sigma, frontier.messages_spent == 0, f, &Term::var(tv))? {
            let mut bound: Vec<Var> = (0..n).map(var_pi).collect();
            bound.push(tv);
            let g = self.setting.eliminate(&Formula::exists_many(bound, body))?;
            let renames: Vec<(Var, Term)> = (0..n).map(|i| (var_pi2(i), Term::var(var_pi(i)))).collect();
            let g = g.substitute_all(&renames);
            let g = simplify_dnf(&g, std::slice::from_ref(&self.setting.guard), DNF_CAP).unwrap_or(g);
            let g = Formula::and(vec![self.setting.guard.clone(), g]);
            if !self.setting.satisfiable(&g)? {
                continue;
            }
            out.push((
                theta.clone(),
                PhaseFrontier {
                    sigma: theta.sigma,
                    position_graph: ParamFormula::new(g, self.signature()),
                    messages_spent: frontier.messages_spent + 1,
                },
            ));
        }
        Ok(out)
    }

    /// Quantifier-free condition on the parameters: automaton 1 accepts
    /// before the next broadcast of the phase starting at `frontier`, or at
    /// any time once no broadcast remains.
    pub fn accept(&self, frontier: &PhaseFrontier, final_phase: bool) -> Res<Formula> {
        let sys = self.system;
        let acceptor = sys.acceptor();
        if acceptor.finals().is_empty() {
            return Ok(Formula::False);
        }
        let n = &self.setting.n;
        let tv = Var::fresh("t");
        let t = Term::var(tv);
        let f = frontier.position_graph.formula.clone();
        let pi0 = Term::var(var_pi(0));
        let goal = |x: State| acceptor.is_final(x);
        let mut bound: Vec<Var> = (0..sys.len()).map(var_pi).collect();
        bound.push(tv);
        let body = if final_phase {
            let run = self.builders[0][1].run(frontier.sigma[0], &goal, &pi0, &n.plus(1), &t, self.short(), None)?;
            Formula::and(vec![f, run])
        } else {
            let from_start = frontier.messages_spent == 0;
            let at_once = Formula::and(vec![
                Formula::eq(&t, &Term::constant(0)),
                Formula::bool(acceptor.is_final(frontier.sigma[0])),
                Formula::eq(&pi0, &n.plus(1)),
            ]);
            let quiet_start = !from_start
                || frontier
                    .sigma
                    .iter()
                    .enumerate()
                    .all(|(i, &s)| !sys.automaton(i).is_broadcasting(s));
            let mut parts = vec![
                f.clone(),
                Formula::ge(&t, &Term::constant(1)),
                Formula::bool(quiet_start),
                self.builders[0][0].run(frontier.sigma[0], &goal, &pi0, &n.plus(1), &t, self.short(), None)?,
            ];
            let horizon = Formula::and(parts.clone());
            for i in 1..sys.len() {
                let pv = Var::fresh("q");
                let run = self.builders[i][0].run(
                    frontier.sigma[i],
                    &|_| true,
                    &Term::var(var_pi(i)),
                    &Term::var(pv),
                    &t,
                    self.long(),
                    Some(&horizon),
                )?;
                parts.push(Formula::exists(pv, run));
            }
            Formula::or(vec![Formula::and(vec![f, at_once]), Formula::and(parts)])
        };
        let g = self.setting.eliminate(&Formula::exists_many(bound, body))?;
        Ok(simplify_dnf(&g, std::slice::from_ref(&self.setting.guard), DNF_CAP).unwrap_or(g))
    }
}
