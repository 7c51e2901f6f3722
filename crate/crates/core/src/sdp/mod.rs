//! Dense SDP solver for complex Hermitian problems of the form
//!
//! ```text
//! maximize Tr(O rho)  s.t.  Tr(A_j rho) = b_j,  rho >= 0
//! ```
//!
//! The problem is presolved (redundant rows removed), embedded into a real
//! symmetric cone and handed to a primal-dual interior-point method. The
//! reported upper bound is recomputed from the dual multipliers on the
//! original constraints, with any residual dual infeasibility charged through
//! the trace constraint, so it is valid regardless of how the iteration ended.

mod certify;
mod embed;
mod ipm;
mod presolve;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::operators::ConstraintSet;

pub use certify::{certify, CertificationReport};
pub use embed::{compress, embed_real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub gap_tolerance: f64,
    pub feas_tolerance: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-8,
            feas_tolerance: 1e-8,
            max_iter: 200,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.gap_tolerance) || !ok(self.feas_tolerance) || self.max_iter == 0 {
            return Err(Error::InvalidConfig(format!(
                "solver tolerances must be positive and max_iter nonzero (got {:?})",
                self
            )));
        }
        Ok(())
    }
}

/// `maximize Tr(objective rho)` subject to `Tr(A rho) = b` for each
/// `(A, b)` in `constraints` and `rho >= 0`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    dim: usize,
    objective: HermitianOperator,
    constraints: Vec<(HermitianOperator, f64)>,
    /// Value of `Tr(rho)` fixed by the constraints.
    trace: f64,
}

impl SdpProblem {
    /// Requires a constraint of the form `c I` with `c > 0` so that the
    /// trace of any feasible point is known.
    pub fn new(objective: HermitianOperator, constraints: Vec<(HermitianOperator, f64)>) -> Result<Self> {
        let dim = objective.dim();
        if constraints.is_empty() {
            return Err(Error::InvalidProblem("no constraints".into()));
        }
        for (a, b) in &constraints {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
            }
            if !b.is_finite() {
                return Err(Error::InvalidProblem(format!("non-finite right-hand side {b}")));
            }
        }
        let trace = constraints
            .iter()
            .find_map(|(a, b)| match a.as_scaled_identity(1e-12) {
                Some(c) if c > 0.0 => Some(b / c),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidProblem("missing trace constraint".into()))?;
        Ok(Self { dim, objective, constraints, trace })
    }

    pub fn from_constraint_set(set: &ConstraintSet) -> Result<Self> {
        Self::new(
            set.objective.clone(),
            set.constraints.iter().map(|k| (k.operator.clone(), k.value)).collect(),
        )
    }

    /// Same constraints with the objective multiplied by `factor`.
    pub fn scaled_objective(&self, factor: f64) -> Self {
        Self { objective: self.objective.scale(factor), ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn objective(&self) -> &HermitianOperator {
        &self.objective
    }

    pub fn constraints(&self) -> &[(HermitianOperator, f64)] {
        &self.constraints
    }

    pub fn trace_value(&self) -> f64 {
        self.trace
    }

    /// Largest `|Tr(A_j rho) - b_j|`.
    pub fn equality_residual(&self, rho: &HermitianOperator) -> f64 {
        self.constraints
            .iter()
            .map(|(a, b)| (a.expectation(rho) - b).abs())
            .fold(0.0, f64::max)
    }

    /// `sum_j w_j A_j - O`; positive semidefinite for a dual-feasible `w`.
    pub fn dual_slack(&self, multipliers: &[f64]) -> HermitianOperator {
        let mut s = self.objective.scale(-1.0);
        for ((a, _), &w) in self.constraints.iter().zip(multipliers) {
            s = s.add_scaled(a, w);
        }
        s
    }

    /// Upper bound on the optimum implied by any multiplier vector:
    /// `b'w + Tr(rho) * max(0, -lambda_min(slack))`.
    pub fn dual_bound(&self, multipliers: &[f64]) -> f64 {
        let bw: f64 = self.constraints.iter().zip(multipliers).map(|((_, b), w)| b * w).sum();
        let lmin = self.dual_slack(multipliers).min_eigenvalue();
        bw + self.trace * (-lmin).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest equality violation `|Tr(A_j rho) - b_j|`.
    pub equality: f64,
    /// Smallest eigenvalue of `rho`.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_value: f64,
    /// Certified upper bound on the optimum.
    pub dual_value: f64,
    pub rho: HermitianOperator,
    pub status: SolverStatus,
    pub gap: f64,
    pub residuals: Residuals,
    /// Dual multipliers for the original (unreduced) constraints.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

impl SdpSolution {
    fn infeasible(dim: usize, m: usize, iterations: usize) -> Self {
        Self {
            primal_value: f64::NAN,
            dual_value: f64::NAN,
            rho: HermitianOperator::zeros(dim),
            status: SolverStatus::Infeasible,
            gap: f64::NAN,
            residuals: Residuals { equality: f64::NAN, min_eigenvalue: f64::NAN },
            multipliers: vec![f64::NAN; m],
            iterations,
        }
    }

    /// The certified bound, or a solver error if the status is not optimal.
    pub fn optimal_value(&self) -> Result<f64> {
        match self.status {
            SolverStatus::Optimal => Ok(self.dual_value),
            status => Err(Error::Solver {
                status,
                detail: format!(
                    "gap {:e}, equality residual {:e}, min eigenvalue {:e} after {} iterations",
                    self.gap, self.residuals.equality, self.residuals.min_eigenvalue, self.iterations
                ),
            }),
        }
    }
}

/// Solve `problem` to the given tolerances.
///
/// Returns `Ok` with a non-optimal status when the iteration fails or the
/// constraints are inconsistent; `Err` only for malformed input.
pub fn solve_max(problem: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    settings.validate()?;
    let n = problem.dim;
    let m = problem.constraints.len();

    let coords: Vec<Vec<f64>> = problem.constraints.iter().map(|(a, _)| a.real_coordinates()).collect();
    let b: Vec<f64> = problem.constraints.iter().map(|(_, b)| *b).collect();
    let Ok(red) = presolve::reduce(&coords, &b) else {
        return Ok(SdpSolution::infeasible(n, m, 0));
    };

    let r2 = std::f64::consts::SQRT_2;
    let scale = problem.objective.matrix().norm().max(1.0);
    let data = ipm::ConicData {
        a: red
            .rows
            .iter()
            .map(|row| embed_real(&HermitianOperator::from_real_coordinates(n, row)) / r2)
            .collect(),
        b: DVector::from_iterator(red.rhs.len(), red.rhs.iter().map(|v| v * r2)),
        c: embed_real(&problem.objective) * (-0.5 / scale),
    };
    let targets = ipm::Targets {
        primal_feas: 0.1 * settings.feas_tolerance * r2 / red.sigma_max.max(1.0),
        dual_feas: 0.02 * settings.gap_tolerance / scale,
        gap: 0.05 * settings.gap_tolerance / scale,
        max_iter: settings.max_iter,
    };
    let it = ipm::solve(&data, targets);
    if it.outcome == ipm::Outcome::PrimalInfeasible {
        return Ok(SdpSolution::infeasible(n, m, it.iterations));
    }

    let reduced_w = DVector::from_iterator(it.y.len(), it.y.iter().map(|y| -r2 * scale * y));
    let w: DVector<f64> = &red.back * reduced_w;
    let multipliers: Vec<f64> = w.iter().copied().collect();

    let rho = compress(&it.x);
    let primal_value = problem.objective.expectation(&rho);
    let dual_value = problem.dual_bound(&multipliers);
    let residuals = Residuals {
        equality: problem.equality_residual(&rho),
        min_eigenvalue: rho.min_eigenvalue(),
    };
    let gap = dual_value - primal_value;

    let certified = gap.abs() <= settings.gap_tolerance
        && residuals.equality <= settings.feas_tolerance
        && residuals.min_eigenvalue >= -settings.feas_tolerance;
    let status = if certified {
        SolverStatus::Optimal
    } else if it.outcome == ipm::Outcome::MaxIterations {
        SolverStatus::MaxIterations
    } else {
        SolverStatus::NumericalFailure
    };

    Ok(SdpSolution {
        primal_value,
        dual_value,
        rho,
        status,
        gap,
        residuals,
        multipliers,
        iterations: it.iterations,
    })
}
