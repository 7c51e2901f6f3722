//! Independent re-verification of a returned solution.

use serde::{Deserialize, Serialize};

use super::{SdpProblem, SdpSolution, SolverSettings};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub equality_residual: f64,
    pub min_eigenvalue: f64,
    pub primal_value: f64,
    /// Smallest eigenvalue of `sum_j w_j A_j - O`.
    pub dual_slack_min_eigenvalue: f64,
    /// `b'w` recomputed from the multipliers.
    pub dual_objective: f64,
    /// `dual_objective` plus the slack correction; always a valid bound.
    pub dual_bound: f64,
}

/// Recompute residuals and the dual bound of `solution` from scratch.
///
/// Fails with [`Error::Certification`] naming every check that did not pass:
/// primal equality residuals, positivity of `rho`, dual feasibility of the
/// multipliers, agreement of the reported dual value, and weak duality.
pub fn certify(
    solution: &SdpSolution,
    problem: &SdpProblem,
    settings: &SolverSettings,
) -> Result<CertificationReport> {
    if solution.multipliers.len() != problem.constraints().len() {
        return Err(Error::DimensionMismatch {
            expected: problem.constraints().len(),
            found: solution.multipliers.len(),
        });
    }
    let rho = &solution.rho;
    let w = &solution.multipliers;
    let dual_objective: f64 = problem.constraints().iter().zip(w).map(|((_, b), w)| b * w).sum();
    let slack_min = problem.dual_slack(w).min_eigenvalue();
    let report = CertificationReport {
        equality_residual: problem.equality_residual(rho),
        min_eigenvalue: rho.min_eigenvalue(),
        primal_value: problem.objective().expectation(rho),
        dual_slack_min_eigenvalue: slack_min,
        dual_objective,
        dual_bound: dual_objective + problem.trace_value() * (-slack_min).max(0.0),
    };

    let feas = settings.feas_tolerance;
    let gap = settings.gap_tolerance;
    let mut failures = Vec::new();
    if !(report.equality_residual <= feas) {
        failures.push(format!("equality residual {:e} exceeds {:e}", report.equality_residual, feas));
    }
    if !(report.min_eigenvalue >= -feas) {
        failures.push(format!("rho has eigenvalue {:e} below -{:e}", report.min_eigenvalue, feas));
    }
    let slack_tol = feas * problem.objective().matrix().norm().max(1.0);
    if !(slack_min >= -slack_tol) {
        failures.push(format!("dual feasibility: slack eigenvalue {:e} below -{:e}", slack_min, slack_tol));
    }
    if !((report.dual_bound - solution.dual_value).abs() <= gap) {
        failures.push(format!(
            "reported dual value {} differs from recomputed {}",
            solution.dual_value, report.dual_bound
        ));
    }
    if !(report.dual_bound >= report.primal_value - gap) {
        failures.push(format!(
            "weak duality: dual {} below primal {}",
            report.dual_bound, report.primal_value
        ));
    }
    if !(report.dual_bound - report.primal_value <= gap) {
        failures.push(format!(
            "duality gap {:e} exceeds {:e}",
            report.dual_bound - report.primal_value,
            gap
        ));
    }

    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::Certification(failures))
    }
}
