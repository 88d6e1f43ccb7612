//! The recognized set, assembled per residue class of the tape length.

use thiserror::Error;

use crate::dynamics::basic_sequence;
use crate::model::{bounds_profile, MultiSystem};
use crate::presburger::{lcm, qf_solution_set, Formula, PresburgerError, Term, UltimatelyPeriodicSet, Var};
use crate::sim::{accepts, SimError};

use super::phase::{automaton_infos, Engine};
use super::run::{qe_budget, Setting};
use super::ParamFormula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Presburger(#[from] PresburgerError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: PresburgerError,
    },
}

impl ConstructionError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            ConstructionError::Presburger(PresburgerError::BudgetExceeded { .. })
                | ConstructionError::Stage {
                    source: PresburgerError::BudgetExceeded { .. },
                    ..
                }
        )
    }

    /// Extraction stage that failed, when known.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            ConstructionError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

/// Receives intermediate formulas: stage name, a label and the formula.
pub type Observer<'a> = dyn FnMut(&str, &str, &ParamFormula) + 'a;

fn at_stage(stage: &'static str) -> impl Fn(PresburgerError) -> ConstructionError {
    move |source| ConstructionError::Stage { stage, source }
}

/// Modulus of the residue classes: every drift divides it, so crossing
/// outcomes depend on the class only.
pub fn class_modulus(system: &MultiSystem) -> i128 {
    let mut m = 1;
    for a in system.automata() {
        for s in a.states() {
            let c = basic_sequence(a, s).c().unsigned_abs() as i128;
            if c > 0 {
                m = lcm(m, c);
            }
        }
    }
    m
}

/// `N = modulus·u + residue` with `N ≥ n_min` and `u ≥ 0`.
pub fn class_setting(modulus: i128, residue: i128, n_min: usize) -> Setting {
    let u = Term::var(Var::named("u"));
    let n = u.scale(modulus).plus(residue);
    Setting {
        guard: Formula::and(vec![
            Formula::ge(&u, &Term::constant(0)),
            Formula::ge(&n, &Term::constant(n_min as i128)),
        ]),
        n,
        budget: qe_budget(),
    }
}

/// Condition on the setting's parameters under which the system accepts,
/// collected over every frontier reachable within the message bound.
pub fn acceptance_condition(engine: &Engine, observe: &mut Observer) -> Result<Formula, ConstructionError> {
    let m = engine.system.message_bound();
    let params: Vec<Var> = engine.setting.guard.free_vars().into_iter().collect();
    let mut layer = vec![(String::from("start"), engine.initial_frontier())];
    let mut conds = Vec::new();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (label, frontier) in &layer {
            observe("frontier", label, &frontier.position_graph);
            let final_phase = frontier.messages_spent >= m;
            let cond = engine.accept(frontier, final_phase).map_err(at_stage("accept"))?;
            observe("accept", label, &ParamFormula::new(cond.clone(), params.clone()));
            conds.push(cond);
            if !final_phase {
                for (theta, f) in engine.advance(frontier).map_err(at_stage("advance"))? {
                    let who: Vec<String> = theta.broadcasters.iter().map(|i| (i + 1).to_string()).collect();
                    let states: Vec<&str> = theta
                        .sigma
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| engine.system.automaton(i).state_name(s))
                        .collect();
                    next.push((format!("{label} / [{}] {}", who.join(","), states.join(",")), f));
                }
            }
        }
        layer = next;
    }
    Ok(Formula::or(conds))
}

/// Lengths accepted by the system, as an ultimately periodic set.
pub fn recognized_set(system: &MultiSystem) -> Result<UltimatelyPeriodicSet, ConstructionError> {
    recognized_set_observed(system, &mut |_, _, _| {})
}

/// [`recognized_set`], reporting intermediate formulas to `observe`.
pub fn recognized_set_observed(
    system: &MultiSystem,
    observe: &mut Observer,
) -> Result<UltimatelyPeriodicSet, ConstructionError> {
    let bounds = bounds_profile(system);
    let infos = automaton_infos(system);
    let modulus = class_modulus(system);
    let u = Var::named("u");
    let mut classes = Vec::new();
    for residue in 0..modulus {
        let setting = class_setting(modulus, residue, bounds.n_min);
        let engine = Engine::new(system, &infos, &setting, bounds);
        let mut tagged = |stage: &str, label: &str, f: &ParamFormula| {
            observe(stage, &format!("N={modulus}u+{residue} {label}"), f);
        };
        let cond = acceptance_condition(&engine, &mut tagged)?;
        tagged("condition", "", &ParamFormula::new(cond.clone(), vec![u]));
        classes.push(qf_solution_set(&cond, u));
    }
    let m = modulus as usize;
    let threshold = bounds.n_min + m * (classes.iter().map(|c| c.threshold()).max().unwrap_or(0) + 1);
    let period = m * classes
        .iter()
        .fold(1, |acc, c| lcm(acc as i128, c.period() as i128) as usize);
    let mut low = Vec::with_capacity(bounds.n_min);
    for n in 0..bounds.n_min {
        low.push(accepts(system, n)?);
    }
    Ok(UltimatelyPeriodicSet::from_fn(threshold, period, |n| {
        if n < bounds.n_min {
            low[n]
        } else {
            classes[n % m].contains(n / m)
        }
    }))
}
