//! Trajectories of a single automaton on the unary tape.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Automaton, MultiSystem, State, Symbol};
use crate::sim::{isolated_step, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Right,
    Left,
    Motionless,
}

/// The inner-letter orbit `s_0, …, s_k` of a state with `s_k = s_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSequenceProfile {
    pub state: State,
    pub sequence: Vec<State>,
    pub loop_entry: usize,
    pub cycle_end: usize,
    /// `lambda[i]` is the displacement after `i` inner moves.
    pub lambda: Vec<i64>,
    pub net_cycle_displacement: i64,
    pub direction: Direction,
    pub amplitude: i64,
}

impl BasicSequenceProfile {
    pub fn k(&self) -> usize {
        self.cycle_end
    }

    pub fn l(&self) -> usize {
        self.loop_entry
    }

    pub fn period(&self) -> usize {
        self.cycle_end - self.loop_entry
    }

    pub fn c(&self) -> i64 {
        self.net_cycle_displacement
    }

    /// State after `t` inner moves.
    pub fn state_at(&self, t: usize) -> State {
        self.sequence[self.index_at(t)]
    }

    /// Displacement after `t` inner moves.
    pub fn lambda_at(&self, t: usize) -> i64 {
        if t <= self.cycle_end {
            return self.lambda[t];
        }
        let per = self.period();
        let h = (t - self.loop_entry) / per;
        let j = (t - self.loop_entry) % per;
        self.lambda[self.loop_entry + j] + h as i64 * self.net_cycle_displacement
    }

    fn index_at(&self, t: usize) -> usize {
        if t < self.cycle_end {
            t
        } else {
            self.loop_entry + (t - self.loop_entry) % self.period()
        }
    }
}

pub fn basic_sequence(a: &Automaton, s: State) -> BasicSequenceProfile {
    let mut sequence = vec![s];
    let mut lambda = vec![0];
    let mut first_seen = HashMap::from([(s, 0usize)]);
    let mut cur = s;
    let loop_entry = loop {
        let m = a.step(cur, Symbol::Inner);
        cur = m.next;
        sequence.push(cur);
        lambda.push(lambda.last().unwrap() + m.delta);
        let idx = sequence.len() - 1;
        if let Some(&l) = first_seen.get(&cur) {
            break l;
        }
        first_seen.insert(cur, idx);
    };
    let k = sequence.len() - 1;
    let c = lambda[k] - lambda[loop_entry];
    let direction = match c.signum() {
        1 => Direction::Right,
        -1 => Direction::Left,
        _ => Direction::Motionless,
    };
    let amplitude = lambda.iter().max().unwrap() - lambda.iter().min().unwrap();
    BasicSequenceProfile {
        state: s,
        sequence,
        loop_entry,
        cycle_end: k,
        lambda,
        net_cycle_displacement: c,
        direction,
        amplitude,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum End {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TakeoffOutcome {
    /// Back on the starting endmarker at time `T`.
    Return(usize),
    /// Trapped in the interior: the cycle is entered at time `t1` at position `p` and has period `t2`.
    Oscillate { p: i64, t1: usize, t2: usize },
    /// Reaches the opposite endmarker without coming back.
    Traverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("input length {n} is below the sufficient length {n_min}")]
    InputTooShort { n: usize, n_min: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Least input length exceeding every amplitude of this automaton.
pub fn automaton_min_length(a: &Automaton) -> usize {
    1 + a.states().map(|s| basic_sequence(a, s).amplitude).max().unwrap_or(0) as usize
}

pub fn min_sufficient_length(system: &MultiSystem) -> usize {
    system.automata().iter().map(automaton_min_length).max().unwrap_or(1)
}

/// Classify the isolated run from state `s` on endmarker `end`.
pub fn takeoff(a: &Automaton, s: State, end: End, n: usize) -> Result<TakeoffOutcome, DynamicsError> {
    let n_min = automaton_min_length(a);
    if n < n_min {
        return Err(DynamicsError::InputTooShort { n, n_min });
    }
    let ni = n as i64;
    let (start, opposite) = match end {
        End::Left => (0, ni + 1),
        End::Right => (ni + 1, 0),
    };
    let (mut state, mut pos) = (s, start);
    let mut seen = HashMap::new();
    let mut time = 0;
    loop {
        (state, pos) = isolated_step(a, state, pos, ni)?;
        time += 1;
        if pos == start {
            return Ok(TakeoffOutcome::Return(time));
        }
        if pos == opposite {
            return Ok(TakeoffOutcome::Traverse);
        }
        if let Some(&t1) = seen.get(&(state, pos)) {
            return Ok(TakeoffOutcome::Oscillate {
                p: entry_position(a, s, start, ni, t1)?,
                t1,
                t2: time - t1,
            });
        }
        seen.insert((state, pos), time);
    }
}

fn entry_position(a: &Automaton, s: State, start: i64, n: i64, t1: usize) -> Result<i64, SimError> {
    let (mut state, mut pos) = (s, start);
    for _ in 0..t1 {
        (state, pos) = isolated_step(a, state, pos, n)?;
    }
    Ok(pos)
}

/// Constant `G` such that a traversal (endmarker to opposite endmarker,
/// touching neither in between) of a tape of length `N ≥ N_min` takes at
/// most `G·(N+1)` steps. Rebounds are separate hits, not part of a traversal.
pub fn traversal_slope(a: &Automaton) -> usize {
    a.states()
        .map(|s| basic_sequence(a, s))
        .filter(|p| p.c() != 0)
        .map(|p| p.k().div_ceil(p.c().unsigned_abs() as usize) * p.k())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn walker_profile() {
        let w = fixtures::walker();
        let p = basic_sequence(w.automaton(0), 0);
        assert_eq!((p.k(), p.l(), p.c(), p.amplitude), (1, 0, 1, 1));
        assert_eq!(p.direction, Direction::Right);
        assert_eq!(traversal_slope(w.automaton(0)), 1);
        assert_eq!(min_sufficient_length(&w), 2);
    }

    #[test]
    fn pingpong_profile() {
        let pp = fixtures::pingpong();
        let a = pp.automaton(0);
        let p = basic_sequence(a, 0);
        assert_eq!(p.sequence, vec![0, 1, 0]);
        assert_eq!((p.k(), p.l(), p.c(), p.amplitude), (2, 0, 0, 1));
        assert_eq!(p.direction, Direction::Motionless);
        assert_eq!(traversal_slope(a), 0);
        assert_eq!(
            takeoff(a, 0, End::Left, 10).unwrap(),
            TakeoffOutcome::Oscillate { p: 1, t1: 1, t2: 2 }
        );
    }

    #[test]
    fn drift3_profile() {
        let d = fixtures::drift3();
        let p = basic_sequence(d.automaton(0), 0);
        assert_eq!((p.k(), p.c(), p.amplitude), (3, 1, 2));
        assert_eq!(min_sufficient_length(&d), 3);
        assert!(traversal_slope(d.automaton(0)) <= 9);
    }

    #[test]
    fn lambda_extends_periodically() {
        let d = fixtures::drift3();
        let p = basic_sequence(d.automaton(0), 0);
        let mut s = 0;
        let mut x = 0;
        for t in 0..20 {
            assert_eq!((p.state_at(t), p.lambda_at(t)), (s, x));
            let m = d.automaton(0).step(s, Symbol::Inner);
            s = m.next;
            x += m.delta;
        }
    }

    #[test]
    fn short_inputs_are_refused() {
        let d = fixtures::drift3();
        assert_eq!(
            takeoff(d.automaton(0), 0, End::Left, 2),
            Err(DynamicsError::InputTooShort { n: 2, n_min: 3 })
        );
    }
}
