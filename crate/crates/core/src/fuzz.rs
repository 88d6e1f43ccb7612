//! Seeded generator of random valid systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate_system, MultiSystem};
use crate::spec_file::{RawAutomaton, RawSystem, RawTransition, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub max_states: usize,
    pub max_automata: usize,
    pub max_messages: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_states: 4,
            max_automata: 3,
            max_messages: 3,
        }
    }
}

fn automaton(rng: &mut ChaCha8Rng, index: usize, cfg: &FuzzConfig) -> RawAutomaton {
    let name = format!("A{}", index + 1);
    let states: Vec<String> = (0..rng.gen_range(1..=cfg.max_states))
        .map(|j| format!("{name}.q{j}"))
        .collect();
    let pick = |rng: &mut ChaCha8Rng| states.choose(rng).unwrap().clone();
    let mut delta = Vec::new();
    for s in &states {
        for (symbol, moves) in [("a", &[-1, 0, 1][..]), ("L", &[0, 1][..]), ("R", &[-1, 0][..])] {
            delta.push(RawTransition {
                state: s.clone(),
                symbol: symbol.to_string(),
                next: pick(rng),
                r#move: *moves.choose(rng).unwrap(),
            });
        }
    }
    let finals = states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    let broadcasting = states.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    RawAutomaton {
        initial: pick(rng),
        name,
        states,
        finals,
        broadcasting,
        delta,
    }
}

/// One random system drawn from `rng`.
pub fn random_system(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> MultiSystem {
    let n = rng.gen_range(1..=cfg.max_automata);
    let automata = (0..n).map(|i| automaton(rng, i, cfg)).collect();
    let raw = RawSystem {
        version: FORMAT_VERSION,
        automata,
        message_bound: rng.gen_range(1..=cfg.max_messages) as i64,
    };
    validate_system(&raw).expect("generated systems are valid")
}

/// `count` systems from `seed`; the same arguments always give the same systems.
pub fn random_systems(seed: u64, count: usize, cfg: &FuzzConfig) -> Vec<MultiSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_system(&mut rng, cfg)).collect()
}
