//! Disjunctive normal form with contradiction pruning.

use std::collections::BTreeSet;

use super::formula::Formula;
use super::qe::simplify_and;

type Dnf = Vec<BTreeSet<Formula>>;

fn consistent(context: &[Formula], lits: &BTreeSet<Formula>) -> bool {
    let mut all = context.to_vec();
    all.extend(lits.iter().cloned());
    simplify_and(all) != Formula::False
}

fn dnf(f: &Formula, context: &[Formula], cap: usize) -> Option<Dnf> {
    Some(match f {
        Formula::True => vec![BTreeSet::new()],
        Formula::False => Vec::new(),
        Formula::And(parts) => {
            let mut acc: Dnf = vec![BTreeSet::new()];
            for p in parts {
                let d = dnf(p, context, cap)?;
                let mut next = Vec::new();
                for a in &acc {
                    for b in &d {
                        let merged: BTreeSet<Formula> = a.union(b).cloned().collect();
                        if consistent(context, &merged) && !next.contains(&merged) {
                            next.push(merged);
                        }
                    }
                }
                if next.len() > cap {
                    return None;
                }
                acc = next;
            }
            acc
        }
        Formula::Or(parts) => {
            let mut acc: Dnf = Vec::new();
            for p in parts {
                for c in dnf(p, context, cap)? {
                    if !acc.contains(&c) {
                        acc.push(c);
                    }
                }
                if acc.len() > cap {
                    return None;
                }
            }
            acc
        }
        other => {
            let lit = BTreeSet::from([other.clone()]);
            if consistent(context, &lit) {
                vec![lit]
            } else {
                Vec::new()
            }
        }
    })
}

/// An equivalent formula under `context`: a disjunction of simplified
/// conjunctions, with conjunctions refuted by `context` or subsumed by
/// another one removed. `None` when more than `cap` conjunctions arise.
pub fn simplify_dnf(f: &Formula, context: &[Formula], cap: usize) -> Option<Formula> {
    let mut terms = dnf(f, context, cap)?;
    terms.sort_by_key(|c| c.len());
    let mut kept: Dnf = Vec::new();
    for c in terms {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    let mut out: Vec<Formula> = kept
        .into_iter()
        .map(|c| simplify_and(c.into_iter().collect()))
        .filter(|c| *c != Formula::False)
        .collect();
    out.sort();
    out.dedup();
    Some(Formula::or(out))
}
