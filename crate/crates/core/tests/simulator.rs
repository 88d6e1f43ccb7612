use std::collections::BTreeSet;

use multiauto::construction::{reach_formula, var_n, var_p, var_p2, var_t};
use multiauto::fixtures;
use multiauto::fuzz::{random_systems, FuzzConfig};
use multiauto::sim::{
    accepts, brute_force_spectrum, global_step, run, segment_run, GlobalConfiguration, Outcome, Segment,
};
use proptest::prelude::*;

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[test]
fn global_step_examples() {
    let w = fixtures::walker();
    let c = global_step(&w, &GlobalConfiguration::initial(&w), 3).unwrap();
    assert_eq!((c.sigma.clone(), c.pi.clone(), c.messages_used), (vec![0], vec![1], 1));
    let capped = GlobalConfiguration {
        sigma: vec![0],
        pi: vec![0],
        messages_used: 1,
    };
    let c = global_step(&w, &capped, 3).unwrap();
    assert_eq!((c.pi[0], c.messages_used), (1, 1));
    let pp = fixtures::pingpong_noaccept();
    let start = GlobalConfiguration {
        sigma: vec![0],
        pi: vec![2],
        messages_used: 0,
    };
    let c1 = global_step(&pp, &start, 5).unwrap();
    assert_eq!((c1.sigma[0], c1.pi[0]), (1, 3));
    let c2 = global_step(&pp, &c1, 5).unwrap();
    assert_eq!((c2.sigma[0], c2.pi[0]), (0, 2));
}

#[test]
fn run_examples() {
    assert_eq!(run(&fixtures::walker(), 4).unwrap().outcome, Outcome::Accepted(5));
    assert!(matches!(
        run(&fixtures::pingpong_noaccept(), 5).unwrap().outcome,
        Outcome::RejectedLoop(_)
    ));
    let even = fixtures::even();
    assert!(run(&even, 6).unwrap().outcome.is_accepted());
    assert!(matches!(run(&even, 7).unwrap().outcome, Outcome::RejectedLoop(_)));
}

#[test]
fn acceptance_examples() {
    assert!(accepts(&fixtures::walker(), 0).unwrap());
    let even = fixtures::even();
    for n in [0, 2, 4] {
        assert!(accepts(&even, n).unwrap());
    }
    for n in [1, 3, 5] {
        assert!(!accepts(&even, n).unwrap());
    }
    let pp = fixtures::pingpong_noaccept();
    assert!((0..=50).all(|n| !accepts(&pp, n).unwrap()));
    assert_eq!(bits(&brute_force_spectrum(&fixtures::walker(), 4).unwrap()), "11111");
    assert_eq!(bits(&brute_force_spectrum(&even, 6).unwrap()), "1010101");
    assert_eq!(bits(&brute_force_spectrum(&pp, 3).unwrap()), "0000");
}

#[test]
fn segment_examples() {
    let w = fixtures::walker();
    assert_eq!(
        segment_run(w.automaton(0), 0, 1, 5, &|_| false, 100).unwrap(),
        Segment::Stopped {
            state: 0,
            pos: 6,
            time: 5
        }
    );
    let pp = fixtures::pingpong();
    let a = pp.automaton(0);
    let l = a.state_index("A1.l").unwrap();
    let r = a.state_index("A1.r").unwrap();
    assert_eq!(
        segment_run(a, r, 2, 9, &|s| s == l, 100).unwrap(),
        Segment::Stopped {
            state: l,
            pos: 3,
            time: 1
        }
    );
}

#[test]
fn fixtures_halt_within_the_configuration_bound() {
    for (name, sys) in fixtures::all() {
        let q: usize = sys.automata().iter().map(|a| a.len()).product();
        for n in 0..=300usize {
            let t = run(&sys, n).unwrap();
            let bound = q * (n + 2).pow(sys.len() as u32) * (sys.message_bound() + 1);
            assert!(t.steps.len() <= bound + 1, "{name} N={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn runs_are_repeatable_and_capped(seed in any::<u64>(), n in 0usize..40) {
        let sys = random_systems(seed, 1, &FuzzConfig::default()).remove(0);
        let t = run(&sys, n).unwrap();
        prop_assert_eq!(&t, &run(&sys, n).unwrap());
        prop_assert!(t.broadcast_events.len() <= sys.message_bound());
        prop_assert_eq!(t.steps.last().unwrap().messages_used, t.broadcast_events.len());
        for w in t.steps.windows(2) {
            prop_assert_eq!(&global_step(&sys, &w[0], n).unwrap(), &w[1]);
            prop_assert!(w[0].messages_used <= w[1].messages_used);
        }
        for c in &t.steps {
            prop_assert!(c.pi.iter().all(|&p| (0..=n as i64 + 1).contains(&p)));
        }
        let last = t.steps.last().unwrap();
        match t.outcome {
            Outcome::Accepted(time) => {
                prop_assert_eq!(time + 1, t.steps.len());
                prop_assert!(last.is_accepting(&sys, n as i64));
                prop_assert!(t.steps[..time].iter().all(|c| !c.is_accepting(&sys, n as i64)));
            }
            Outcome::RejectedLoop(_) => {
                prop_assert!(t.steps.iter().all(|c| !c.is_accepting(&sys, n as i64)));
                prop_assert!(t.steps[..t.steps.len() - 1].contains(&global_step(&sys, last, n).unwrap()));
            }
        }
    }

    #[test]
    fn segment_runs_satisfy_reach(seed in any::<u64>(), n in 0usize..9, p in 0i64..11, stop_mask in 0u32..16) {
        let cfg = FuzzConfig { max_states: 4, max_automata: 1, max_messages: 1 };
        let sys = random_systems(seed, 1, &cfg).remove(0);
        let a = sys.automaton(0);
        let p = p.min(n as i64 + 1);
        let stop: BTreeSet<usize> = a.states().filter(|&s| stop_mask >> s & 1 == 1).collect();
        for s in a.states() {
            // Configurations at times 0..=stop, each from a walk with that budget.
            let mut path = vec![(s, p)];
            let mut stopped = false;
            for budget in 1..=60 {
                match segment_run(a, s, p, n, &|x| stop.contains(&x), budget).unwrap() {
                    Segment::NoStopWithinBudget { state, pos } => path.push((state, pos)),
                    Segment::Stopped { state, pos, time } => {
                        prop_assert_eq!(time, budget);
                        path.push((state, pos));
                        stopped = true;
                        break;
                    }
                }
            }
            for s2 in a.states() {
                let f = reach_formula(a, &stop, s, s2).formula;
                prop_assert!(f.is_quantifier_free());
                let horizon = if stopped { path.len() + 20 } else { path.len() };
                for t in 0..horizon as i64 {
                    for q in 0..=n as i64 + 1 {
                        let want = path.get(t as usize) == Some(&(s2, q));
                        let vals = [(var_n(), n as i64), (var_p(), p), (var_p2(), q), (var_t(), t)];
                        let got = f.holds(&|v| vals.iter().find(|(w, _)| *w == v).map(|&(_, x)| x as i128));
                        prop_assert_eq!(got, want, "s={} s'={} N={} p={} p'={} T={}", s, s2, n, p, q, t);
                    }
                }
            }
        }
    }
}
