//! Deterministic two-way unary automata and multiautomaton systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::dynamics;
use crate::spec_file::{RawAutomaton, RawSystem, RawTransition};

/// What the head is scanning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// The unary letter `a`.
    Inner,
    /// The left endmarker.
    Left,
    /// The right endmarker.
    Right,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Inner, Symbol::Left, Symbol::Right];

    /// Symbol under a head at `pos` on an input of length `n`.
    pub fn at(pos: i64, n: i64) -> Symbol {
        if pos == 0 {
            Symbol::Left
        } else if pos == n + 1 {
            Symbol::Right
        } else {
            Symbol::Inner
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Symbol::Inner => "a",
            Symbol::Left => "L",
            Symbol::Right => "R",
        }
    }

    pub fn from_code(code: &str) -> Option<Symbol> {
        match code {
            "a" => Some(Symbol::Inner),
            "L" => Some(Symbol::Left),
            "R" => Some(Symbol::Right),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Index of a state inside its automaton.
pub type State = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub next: State,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    states: Vec<String>,
    initial: State,
    finals: Vec<bool>,
    broadcasting: Vec<bool>,
    delta: [Vec<Move>; 3],
}

impl Automaton {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        0..self.states.len()
    }

    pub fn state_name(&self, s: State) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<State> {
        self.states.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_final(&self, s: State) -> bool {
        self.finals[s]
    }

    pub fn is_broadcasting(&self, s: State) -> bool {
        self.broadcasting[s]
    }

    pub fn step(&self, s: State, sym: Symbol) -> Move {
        self.delta[sym.slot()][s]
    }

    pub fn finals(&self) -> BTreeSet<State> {
        self.states().filter(|&s| self.finals[s]).collect()
    }

    pub fn broadcasting(&self) -> BTreeSet<State> {
        self.states().filter(|&s| self.broadcasting[s]).collect()
    }

    pub fn to_raw(&self) -> RawAutomaton {
        let mut delta = Vec::new();
        for s in self.states() {
            for sym in Symbol::ALL {
                let m = self.step(s, sym);
                delta.push(RawTransition {
                    state: self.states[s].clone(),
                    symbol: sym.code().to_string(),
                    next: self.states[m.next].clone(),
                    r#move: m.delta,
                });
            }
        }
        let names = |flags: &[bool]| -> Vec<String> {
            self.states()
                .filter(|&s| flags[s])
                .map(|s| self.states[s].clone())
                .collect()
        };
        RawAutomaton {
            name: self.name.clone(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            finals: names(&self.finals),
            broadcasting: names(&self.broadcasting),
            delta,
        }
    }
}

/// An ordered tuple of automata; automaton 0 is the acceptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSystem {
    automata: Vec<Automaton>,
    message_bound: usize,
}

impl MultiSystem {
    pub fn automata(&self) -> &[Automaton] {
        &self.automata
    }

    pub fn automaton(&self, i: usize) -> &Automaton {
        &self.automata[i]
    }

    pub fn len(&self) -> usize {
        self.automata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.automata.is_empty()
    }

    pub fn message_bound(&self) -> usize {
        self.message_bound
    }

    pub fn acceptor(&self) -> &Automaton {
        &self.automata[0]
    }

    pub fn to_raw(&self) -> RawSystem {
        RawSystem {
            version: crate::spec_file::FORMAT_VERSION,
            automata: self.automata.iter().map(Automaton::to_raw).collect(),
            message_bound: self.message_bound as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("automaton `{automaton}`: no transition for state `{state}` on symbol {symbol}")]
    MissingTransition {
        automaton: String,
        state: String,
        symbol: Symbol,
    },
    #[error("automaton `{automaton}`: two transitions for state `{state}` on symbol {symbol}")]
    DuplicateTransition {
        automaton: String,
        state: String,
        symbol: Symbol,
    },
    #[error("state id `{0}` is declared more than once")]
    DuplicateStateId(String),
    #[error("automaton `{automaton}`: move {value} for state `{state}` is not -1, 0 or 1")]
    BadMove {
        automaton: String,
        state: String,
        value: i64,
    },
    #[error("message bound must be at least 1, got {0}")]
    BadBound(i64),
    #[error("automaton `{automaton}`: unknown state `{state}` in field `{field}`")]
    UnknownState {
        automaton: String,
        state: String,
        field: &'static str,
    },
    #[error("automaton `{automaton}`: unknown symbol `{symbol}`")]
    UnknownSymbol { automaton: String, symbol: String },
    #[error("a system needs at least one automaton")]
    NoAutomata,
    #[error("automaton `{0}` has no states")]
    NoStates(String),
    #[error("unsupported format version {0}")]
    BadVersion(i64),
}

pub fn validate_system(raw: &RawSystem) -> Result<MultiSystem, ModelError> {
    if raw.version != crate::spec_file::FORMAT_VERSION {
        return Err(ModelError::BadVersion(raw.version));
    }
    if raw.automata.is_empty() {
        return Err(ModelError::NoAutomata);
    }
    if raw.message_bound < 1 {
        return Err(ModelError::BadBound(raw.message_bound));
    }
    let mut seen = BTreeSet::new();
    for a in &raw.automata {
        for s in &a.states {
            if !seen.insert(s.as_str()) {
                return Err(ModelError::DuplicateStateId(s.clone()));
            }
        }
    }
    let automata = raw.automata.iter().map(validate_automaton).collect::<Result<_, _>>()?;
    Ok(MultiSystem {
        automata,
        message_bound: raw.message_bound as usize,
    })
}

fn validate_automaton(raw: &RawAutomaton) -> Result<Automaton, ModelError> {
    if raw.states.is_empty() {
        return Err(ModelError::NoStates(raw.name.clone()));
    }
    let index: BTreeMap<&str, State> = raw.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |name: &str, field: &'static str| -> Result<State, ModelError> {
        index.get(name).copied().ok_or_else(|| ModelError::UnknownState {
            automaton: raw.name.clone(),
            state: name.to_string(),
            field,
        })
    };
    let flags = |names: &[String], field: &'static str| -> Result<Vec<bool>, ModelError> {
        let mut v = vec![false; raw.states.len()];
        for n in names {
            v[lookup(n, field)?] = true;
        }
        Ok(v)
    };
    let initial = lookup(&raw.initial, "initial")?;
    let finals = flags(&raw.finals, "finals")?;
    let broadcasting = flags(&raw.broadcasting, "broadcasting")?;

    let mut table: [Vec<Option<Move>>; 3] = std::array::from_fn(|_| vec![None; raw.states.len()]);
    for t in &raw.delta {
        let s = lookup(&t.state, "delta.state")?;
        let next = lookup(&t.next, "delta.next")?;
        let sym = Symbol::from_code(&t.symbol).ok_or_else(|| ModelError::UnknownSymbol {
            automaton: raw.name.clone(),
            symbol: t.symbol.clone(),
        })?;
        if !(-1..=1).contains(&t.r#move) {
            return Err(ModelError::BadMove {
                automaton: raw.name.clone(),
                state: t.state.clone(),
                value: t.r#move,
            });
        }
        let slot = &mut table[sym.slot()][s];
        if slot.is_some() {
            return Err(ModelError::DuplicateTransition {
                automaton: raw.name.clone(),
                state: t.state.clone(),
                symbol: sym,
            });
        }
        *slot = Some(Move { next, delta: t.r#move });
    }
    let mut delta: [Vec<Move>; 3] = Default::default();
    for sym in Symbol::ALL {
        for (s, m) in table[sym.slot()].iter().enumerate() {
            let m = m.ok_or_else(|| ModelError::MissingTransition {
                automaton: raw.name.clone(),
                state: raw.states[s].clone(),
                symbol: sym,
            })?;
            delta[sym.slot()].push(m);
        }
    }
    Ok(Automaton {
        name: raw.name.clone(),
        states: raw.states.clone(),
        initial,
        finals,
        broadcasting,
        delta,
    })
}

/// Constants used by the construction: traversal cap `k`, traversal-time
/// slope `g` and the least input length `n_min` treated as long.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsProfile {
    pub k: usize,
    pub g: usize,
    pub n_min: usize,
}

pub fn bounds_profile(system: &MultiSystem) -> BoundsProfile {
    let max_states = system.automata().iter().map(Automaton::len).max().unwrap_or(0);
    BoundsProfile {
        k: 2 * max_states,
        g: system
            .automata()
            .iter()
            .map(dynamics::traversal_slope)
            .max()
            .unwrap_or(0),
        n_min: dynamics::min_sufficient_length(system),
    }
}
