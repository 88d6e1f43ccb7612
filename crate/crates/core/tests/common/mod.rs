#![allow(dead_code)]

pub mod formulas;
pub mod masks;

use std::collections::HashSet;

use multiauto::construction::{
    accept_formula, advance_frontier, initial_frontier, var_n, var_pi, PhaseFrontier, Theta,
};
use multiauto::model::{bounds_profile, MultiSystem};
use multiauto::presburger::{eliminate, Formula, Term, Var};
use multiauto::sim::{global_step, GlobalConfiguration};

pub fn at(f: &Formula, vals: &[(Var, i64)]) -> Formula {
    let map: Vec<(Var, Term)> = vals.iter().map(|&(v, x)| (v, Term::constant(x as i128))).collect();
    eliminate(&f.substitute_all(&map)).unwrap()
}

pub fn closed_true(f: &Formula) -> bool {
    let vars = f.free_vars();
    eliminate(&Formula::exists_many(vars, f.clone())).unwrap() == Formula::True
}

/// Broadcasting configurations of the run on length `n`, continued past
/// acceptance, until the message bound is spent or a configuration repeats.
pub fn broadcasts(sys: &MultiSystem, n: usize) -> Vec<GlobalConfiguration> {
    let mut c = GlobalConfiguration::initial(sys);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < sys.message_bound() && seen.insert(c.clone()) {
        if !c.broadcasters(sys).is_empty() {
            out.push(c.clone());
        }
        c = global_step(sys, &c, n).unwrap();
    }
    out
}

/// Every frontier reachable within the message bound, by depth.
pub fn frontier_layers(sys: &MultiSystem) -> Vec<Vec<(Option<Theta>, PhaseFrontier)>> {
    let bounds = bounds_profile(sys);
    let mut layers = vec![vec![(None, initial_frontier(sys))]];
    while layers.len() <= sys.message_bound() {
        let mut next = Vec::new();
        for (_, f) in layers.last().unwrap() {
            for (theta, g) in advance_frontier(sys, f, bounds).unwrap() {
                next.push((Some(theta), g));
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    layers
}

/// Sample lengths in `[n_min, 200]`.
pub fn samples(n_min: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (n_min..n_min + 8)
        .chain([50, 97, 128, 199, 200])
        .filter(|&n| n <= 200)
        .collect();
    v.sort();
    v.dedup();
    v
}

/// At length `n`, each layer has exactly one frontier that the run reaches,
/// with the simulated outcome and a unique position vector equal to the
/// simulated one; layers beyond the last broadcast have none.
pub fn check_frontiers(
    sys: &MultiSystem,
    layers: &[Vec<(Option<Theta>, PhaseFrontier)>],
    n: usize,
) -> Result<(), String> {
    let events = broadcasts(sys, n);
    let k = sys.len();
    for (depth, layer) in layers.iter().enumerate() {
        let live: Vec<&(Option<Theta>, PhaseFrontier)> = layer
            .iter()
            .filter(|(_, f)| closed_true(&at(&f.position_graph.formula, &[(var_n(), n as i64)])))
            .collect();
        let want = if depth == 0 {
            Some(GlobalConfiguration::initial(sys))
        } else {
            events.get(depth - 1).cloned()
        };
        let Some(config) = want else {
            if !live.is_empty() {
                return Err(format!("N={n} depth {depth}: {} branches, expected none", live.len()));
            }
            continue;
        };
        if live.len() != 1 {
            return Err(format!("N={n} depth {depth}: {} branches, expected one", live.len()));
        }
        let (theta, frontier) = live[0];
        if let Some(theta) = theta {
            let who: Vec<usize> = theta.broadcasters.iter().copied().collect();
            if theta.sigma != config.sigma || who != config.broadcasters(sys) {
                return Err(format!("N={n} depth {depth}: outcome {theta:?}, simulated {config:?}"));
            }
        }
        let g = at(&frontier.position_graph.formula, &[(var_n(), n as i64)]);
        let exact: Vec<(Var, i64)> = (0..k).map(|i| (var_pi(i), config.pi[i])).collect();
        if at(&g, &exact) != Formula::True {
            return Err(format!(
                "N={n} depth {depth}: simulated positions {:?} rejected",
                config.pi
            ));
        }
        let other = Formula::or(
            (0..k)
                .map(|i| {
                    let p = Term::var(var_pi(i));
                    let v = Term::constant(config.pi[i] as i128);
                    Formula::or(vec![Formula::lt(&p, &v), Formula::gt(&p, &v)])
                })
                .collect(),
        );
        if closed_true(&Formula::and(vec![g, other])) {
            return Err(format!("N={n} depth {depth}: positions not unique"));
        }
    }
    Ok(())
}

/// The disjunction of every frontier's acceptance condition at length `n`.
pub fn accepts_by_frontiers(sys: &MultiSystem, layers: &[Vec<(Option<Theta>, PhaseFrontier)>], n: usize) -> bool {
    layers.iter().flatten().any(|(_, f)| {
        let last = f.messages_spent >= sys.message_bound();
        let cond = accept_formula(sys, f, last).unwrap();
        at(&cond, &[(var_n(), n as i64)]) == Formula::True
    })
}
