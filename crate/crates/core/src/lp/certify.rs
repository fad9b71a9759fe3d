use super::{LinearProgram, LpSolution, LpStatus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Summary of a successful certification.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport<T> {
    pub primal_objective: T,
    pub dual_objective: T,
    /// Complementary slackness implications that were exercised (a nonzero
    /// variable or multiplier whose partner had to be tight).
    pub slackness_pairs_checked: usize,
}

/// Verifies an optimal primal/dual pair against `primal` and a dual program
/// laid out like [`LinearProgram::dual`]: dual variable `i` pairs with primal
/// constraint `i`, dual constraint `j` with primal variable `j`.
///
/// Checks primal feasibility, dual feasibility, equal objectives and both
/// directions of complementary slackness.
pub fn certify<T: Scalar>(
    solution: &LpSolution<T>,
    primal: &LinearProgram<T>,
    dual: &LinearProgram<T>,
) -> Result<CertificationReport<T>> {
    let fail = |what: String| Err(Error::CertificationFailure(what));
    if solution.status != LpStatus::Optimal {
        return fail(format!(
            "solution status is {:?}, not optimal",
            solution.status
        ));
    }
    if dual.num_variables() != primal.num_constraints()
        || dual.num_constraints() != primal.num_variables()
    {
        return fail("dual program is not laid out against the primal".into());
    }
    let x = &solution.primal;
    let y = &solution.dual;
    if let Some(v) = primal.first_violation(x) {
        return fail(format!("primal infeasible: {v}"));
    }
    if let Some(v) = dual.first_violation(y) {
        return fail(format!("dual infeasible: {v}"));
    }
    let primal_objective = primal.objective_value(x);
    let dual_objective = dual.objective_value(y);
    if !primal_objective.approx_eq(&dual_objective) {
        return fail(format!(
            "objective equality fails: primal {primal_objective} vs dual {dual_objective}"
        ));
    }
    let mut checked = 0;
    for (j, xj) in x.iter().enumerate() {
        if xj.is_negligible() {
            continue;
        }
        checked += 1;
        if !dual.constraints[j].is_tight(y) {
            return fail(format!(
                "complementary slackness: {} = {} > 0 but dual constraint {} is slack",
                primal.variables[j].name, xj, dual.constraints[j].name
            ));
        }
    }
    for (i, yi) in y.iter().enumerate() {
        if yi.is_negligible() {
            continue;
        }
        checked += 1;
        if !primal.constraints[i].is_tight(x) {
            return fail(format!(
                "complementary slackness: multiplier {} = {} but constraint {} is slack",
                dual.variables[i].name, yi, primal.constraints[i].name
            ));
        }
    }
    Ok(CertificationReport {
        primal_objective,
        dual_objective,
        slackness_pairs_checked: checked,
    })
}
