//! Linear integer arithmetic: formulas, quantifier elimination and
//! extraction of one-variable solution sets.

mod dnf;
mod formula;
mod qe;
mod sexpr;
mod term;
mod univariate;
mod ups;

use std::collections::BTreeMap;

use thiserror::Error;

pub use dnf::simplify_dnf;
pub use formula::Formula;
pub use qe::{simplify_and, Eliminator, DEFAULT_BUDGET};
pub use sexpr::parse_formula;
pub use term::{gcd, lcm, Term, Var};
pub use univariate::univariate_normalize;
pub use ups::{ups_equal, ups_member, UltimatelyPeriodicSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresburgerError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("formula size budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: usize },
    #[error("expected at most the single free variable `{expected}`, found {found:?}")]
    UnexpectedFreeVariables { expected: String, found: Vec<String> },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Truth value with quantifiers ranging over `[-domain_bound, domain_bound]`.
pub fn evaluate(f: &Formula, assignment: &BTreeMap<Var, i128>, domain_bound: i128) -> Result<bool, PresburgerError> {
    f.evaluate(assignment, domain_bound)
}

pub fn eliminate(f: &Formula) -> Result<Formula, PresburgerError> {
    Eliminator::default().eliminate(f)
}

/// Solution set over ℕ of a formula whose only free variable is `var`.
pub fn solution_set(f: &Formula, var: Var) -> Result<UltimatelyPeriodicSet, PresburgerError> {
    solution_set_with(&Eliminator::default(), f, var)
}

pub fn solution_set_with(qe: &Eliminator, f: &Formula, var: Var) -> Result<UltimatelyPeriodicSet, PresburgerError> {
    let others: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| *v != var)
        .map(|v| v.name())
        .collect();
    if !others.is_empty() {
        return Err(PresburgerError::UnexpectedFreeVariables {
            expected: var.name(),
            found: others,
        });
    }
    let qf = qe.eliminate(f)?;
    Ok(qf_solution_set(&qf, var))
}

/// Solution set over ℕ of a quantifier-free formula in `var`.
pub fn qf_solution_set(qf: &Formula, var: Var) -> UltimatelyPeriodicSet {
    let (_, hi, period) = univariate::profile(qf, var);
    let t = hi.max(0) as usize;
    UltimatelyPeriodicSet::from_fn(t, period as usize, |n| {
        qf.holds(&|w| if w == var { Some(n as i128) } else { None })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solution_sets_of_simple_formulas() {
        let n = Var::named("N");
        let even = solution_set(&Formula::divides(2, Term::var(n)), n).unwrap();
        assert_eq!(even.to_string(), "t=0 p=2 low= residues={0}");
        let f = Formula::and(vec![
            Formula::ge(&Term::var(n), &Term::constant(3)),
            Formula::divides(3, Term::var(n)),
        ]);
        assert_eq!(solution_set(&f, n).unwrap().to_string(), "t=1 p=3 low=0 residues={0}");
    }

    #[test]
    fn evaluate_examples() {
        let (x, y, z) = (Var::named("x"), Var::named("y"), Var::named("z"));
        let f = Formula::eq(&Term::var(x), &Term::var(y));
        assert!(evaluate(&f, &BTreeMap::from([(x, 3), (y, 3)]), 0).unwrap());
        let g = Formula::divides(2, Term::var(x));
        assert!(!evaluate(&g, &BTreeMap::from([(x, 7)]), 0).unwrap());
        let h = Formula::exists(z, Formula::eq(&Term::scaled_var(2, z), &Term::var(x)));
        assert!(evaluate(&h, &BTreeMap::from([(x, 10)]), 20).unwrap());
        assert_eq!(
            evaluate(&g, &BTreeMap::new(), 0),
            Err(PresburgerError::UnboundVariable("x".into()))
        );
    }
}
