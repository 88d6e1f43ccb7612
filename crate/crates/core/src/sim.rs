//! Reference simulator: step-by-step execution with broadcast counting,
//! acceptance and loop detection.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Automaton, MultiSystem, State, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalConfiguration {
    pub sigma: Vec<State>,
    pub pi: Vec<i64>,
    pub messages_used: usize,
}

impl GlobalConfiguration {
    pub fn initial(system: &MultiSystem) -> Self {
        GlobalConfiguration {
            sigma: system.automata().iter().map(Automaton::initial).collect(),
            pi: vec![0; system.len()],
            messages_used: 0,
        }
    }

    /// Automata whose broadcast is emitted from this configuration.
    pub fn broadcasters(&self, system: &MultiSystem) -> Vec<usize> {
        if self.messages_used >= system.message_bound() {
            return Vec::new();
        }
        (0..system.len())
            .filter(|&i| system.automaton(i).is_broadcasting(self.sigma[i]))
            .collect()
    }

    pub fn is_accepting(&self, system: &MultiSystem, n: i64) -> bool {
        system.acceptor().is_final(self.sigma[0]) && self.pi[0] == n + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("automaton `{automaton}` left the tape: position {position} with N={n}")]
    HeadFellOff { automaton: String, position: i64, n: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted(usize),
    RejectedLoop(usize),
}

impl Outcome {
    pub fn is_accepted(self) -> bool {
        matches!(self, Outcome::Accepted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastEvent {
    pub time: usize,
    pub broadcasters: Vec<usize>,
    pub sigma: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub input_length: usize,
    pub steps: Vec<GlobalConfiguration>,
    pub broadcast_events: Vec<BroadcastEvent>,
    pub outcome: Outcome,
}

/// One move of a single automaton, in isolation.
pub fn isolated_step(a: &Automaton, s: State, p: i64, n: i64) -> Result<(State, i64), SimError> {
    let m = a.step(s, Symbol::at(p, n));
    let q = p + m.delta;
    if q < 0 || q > n + 1 {
        return Err(SimError::HeadFellOff {
            automaton: a.name().to_string(),
            position: q,
            n,
        });
    }
    Ok((m.next, q))
}

pub fn global_step(
    system: &MultiSystem,
    config: &GlobalConfiguration,
    n: usize,
) -> Result<GlobalConfiguration, SimError> {
    let n = n as i64;
    let mut next = GlobalConfiguration {
        sigma: Vec::with_capacity(system.len()),
        pi: Vec::with_capacity(system.len()),
        messages_used: config.messages_used,
    };
    for (i, a) in system.automata().iter().enumerate() {
        let (s, p) = isolated_step(a, config.sigma[i], config.pi[i], n)?;
        next.sigma.push(s);
        next.pi.push(p);
    }
    if !config.broadcasters(system).is_empty() {
        next.messages_used += 1;
    }
    Ok(next)
}

fn execute(system: &MultiSystem, n: usize, record: bool) -> Result<Trace, SimError> {
    let mut config = GlobalConfiguration::initial(system);
    let mut seen = HashSet::new();
    let mut steps = Vec::new();
    let mut events = Vec::new();
    let mut time = 0;
    let outcome = loop {
        if config.is_accepting(system, n as i64) {
            break Outcome::Accepted(time);
        }
        if !seen.insert(config.clone()) {
            break Outcome::RejectedLoop(time);
        }
        let b = config.broadcasters(system);
        if !b.is_empty() {
            events.push(BroadcastEvent {
                time,
                broadcasters: b,
                sigma: config.sigma.clone(),
            });
        }
        let next = global_step(system, &config, n)?;
        if record {
            steps.push(std::mem::replace(&mut config, next));
        } else {
            config = next;
        }
        time += 1;
    };
    steps.push(config);
    Ok(Trace {
        input_length: n,
        steps,
        broadcast_events: events,
        outcome,
    })
}

pub fn run(system: &MultiSystem, n: usize) -> Result<Trace, SimError> {
    execute(system, n, true)
}

pub fn accepts(system: &MultiSystem, n: usize) -> Result<bool, SimError> {
    Ok(execute(system, n, false)?.outcome.is_accepted())
}

pub fn brute_force_spectrum(system: &MultiSystem, n_max: usize) -> Result<Vec<bool>, SimError> {
    (0..=n_max).map(|n| accepts(system, n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Stopped { state: State, pos: i64, time: usize },
    NoStopWithinBudget { state: State, pos: i64 },
}

/// Walk one automaton alone from `(s, p)` until, at some time ≥ 1, its state
/// is in `stop` or its head is on an endmarker.
pub fn segment_run(
    a: &Automaton,
    s: State,
    p: i64,
    n: usize,
    stop: &dyn Fn(State) -> bool,
    budget: usize,
) -> Result<Segment, SimError> {
    let n = n as i64;
    let (mut state, mut pos) = (s, p);
    for time in 1..=budget {
        (state, pos) = isolated_step(a, state, pos, n)?;
        if stop(state) || pos == 0 || pos == n + 1 {
            return Ok(Segment::Stopped { state, pos, time });
        }
    }
    Ok(Segment::NoStopWithinBudget { state, pos })
}

impl Trace {
    /// Text log: a header, one line per configuration, and the outcome.
    pub fn to_log(&self, system: &MultiSystem) -> String {
        let mut out = format!("N {}\n", self.input_length);
        let flagged: HashSet<usize> = self.broadcast_events.iter().map(|e| e.time).collect();
        for (t, c) in self.steps.iter().enumerate() {
            let sigma: Vec<&str> = c
                .sigma
                .iter()
                .enumerate()
                .map(|(i, &s)| system.automaton(i).state_name(s))
                .collect();
            let pi: Vec<String> = c.pi.iter().map(i64::to_string).collect();
            let _ = write!(out, "{t} {} {}", sigma.join(","), pi.join(","));
            if flagged.contains(&t) {
                out.push_str(" B");
            }
            out.push('\n');
        }
        match self.outcome {
            Outcome::Accepted(t) => {
                let _ = writeln!(out, "accepted {t}");
            }
            Outcome::RejectedLoop(t) => {
                let _ = writeln!(out, "rejected-loop {t}");
            }
        }
        out
    }
}
