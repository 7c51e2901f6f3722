//! Infeasible-start primal-dual path following for real symmetric SDPs in
//! standard form:
//!
//! ```text
//! min <C, X>  s.t. <A_k, X> = b_k,  X >= 0
//! max b'y     s.t. sum_k y_k A_k + S = C,  S >= 0
//! ```
//!
//! Search directions are HKM with a Mehrotra predictor-corrector. The Schur
//! complement is assembled densely; columns are computed in parallel.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

pub(crate) struct ConicData {
    pub a: Vec<DMatrix<f64>>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Targets {
    pub primal_feas: f64,
    pub dual_feas: f64,
    pub gap: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Converged,
    MaxIterations,
    Stalled,
    PrimalInfeasible,
}

pub(crate) struct Iterate {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub iterations: usize,
    pub outcome: Outcome,
}

const STEP_FRACTION: f64 = 0.98;
const DIVERGENCE: f64 = 1e9;

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

fn apply_a(a: &[DMatrix<f64>], x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len(), a.iter().map(|ak| ak.dot(x)))
}

fn apply_at(a: &[DMatrix<f64>], y: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    for (ak, &yk) in a.iter().zip(y.iter()) {
        if yk != 0.0 {
            out.zip_apply(ak, |o, a| *o += yk * a);
        }
    }
    out
}

/// Largest `alpha` with `x + alpha dx` positive semidefinite (infinite if none).
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(t) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(w) = l.solve_lower_triangular(&t.transpose()) else {
        return 0.0;
    };
    let lmin = sym(w).symmetric_eigenvalues().min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn factor_schur(mut m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let diag_max = m.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(ch);
        }
        let bump = if reg == 0.0 { 1e-14 * diag_max } else { reg * 100.0 };
        for i in 0..m.nrows() {
            m[(i, i)] += bump - reg;
        }
        reg = bump;
    }
    None
}

pub(crate) fn solve(data: &ConicData, targets: Targets) -> Iterate {
    let n = data.c.nrows();
    let m = data.a.len();
    let nf = n as f64;

    let b_norm = data.b.norm();
    let c_norm = data.c.norm();
    let a_norm_max = data.a.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let xi = (0..m)
        .map(|k| nf * (1.0 + data.b[k].abs()) / (1.0 + data.a[k].norm()))
        .fold(nf.sqrt().max(10.0), f64::max);
    let eta = nf.sqrt().max(10.0).max(c_norm).max(a_norm_max);

    let mut x = DMatrix::<f64>::identity(n, n) * xi;
    let mut s = DMatrix::<f64>::identity(n, n) * eta;
    let mut y = DVector::<f64>::zeros(m);

    let mut stalls = 0usize;
    let mut iter = 0usize;
    loop {
        let rp = &data.b - apply_a(&data.a, &x);
        let rd = &data.c - apply_at(&data.a, &y, n) - &s;
        let pobj = data.c.dot(&x);
        let dobj = data.b.dot(&y);
        let mu = x.dot(&s) / nf;

        let relp = rp.norm() / (1.0 + b_norm);
        let reld = rd.norm() / (1.0 + c_norm);
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let relgap = (pobj - dobj).abs() / denom;
        let relcompl = (mu * nf) / denom;
        if relp <= targets.primal_feas
            && reld <= targets.dual_feas
            && relgap <= targets.gap
            && relcompl <= targets.gap
        {
            return Iterate { x, y, iterations: iter, outcome: Outcome::Converged };
        }

        // Farkas-type evidence: b'y unbounded while sum y_k A_k stays below C.
        let y_norm = y.norm();
        if dobj > DIVERGENCE * (1.0 + pobj.abs().min(DIVERGENCE)) && y_norm > 0.0 {
            let yhat = &y / y_norm;
            let lmax = apply_at(&data.a, &yhat, n).symmetric_eigenvalues().max();
            if lmax <= 1e-6 && data.b.dot(&yhat) > 0.0 {
                return Iterate { x, y, iterations: iter, outcome: Outcome::PrimalInfeasible };
            }
        }

        if iter >= targets.max_iter {
            return Iterate { x, y, iterations: iter, outcome: Outcome::MaxIterations };
        }
        iter += 1;

        let Some(s_chol) = Cholesky::new(s.clone()) else {
            return Iterate { x, y, iterations: iter, outcome: Outcome::Stalled };
        };
        let s_inv = sym(s_chol.inverse());

        // Schur complement M_ij = <A_i, X A_j S^-1>.
        let cols: Vec<DVector<f64>> = data
            .a
            .par_iter()
            .map(|aj| {
                let g = &x * aj * &s_inv;
                DVector::from_iterator(m, data.a.iter().map(|ai| ai.dot(&g)))
            })
            .collect();
        let mut schur = DMatrix::from_columns(&cols);
        schur = sym(schur);
        let Some(schur_chol) = factor_schur(schur) else {
            return Iterate { x, y, iterations: iter, outcome: Outcome::Stalled };
        };

        let a_x_rd_sinv = apply_a(&data.a, &(&x * &rd * &s_inv));
        let direction = |target: &DMatrix<f64>| {
            let rhs = &rp - apply_a(&data.a, target) + &a_x_rd_sinv;
            let dy = schur_chol.solve(&rhs);
            let ds = &rd - apply_at(&data.a, &dy, n);
            let dx = sym(target - &x * &ds * &s_inv);
            (dx, dy, ds)
        };

        // predictor
        let neg_x = -&x;
        let (dx_a, _, ds_a) = direction(&neg_x);
        let ap = max_step(&x, &dx_a).min(1.0);
        let ad = max_step(&s, &ds_a).min(1.0);
        let mu_aff = (&x + &dx_a * ap).dot(&(&s + &ds_a * ad)) / nf;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        // corrector
        let target = &s_inv * (sigma * mu) - &x - &dx_a * &ds_a * &s_inv;
        let (dx, dy, ds) = direction(&target);
        let ap = (STEP_FRACTION * max_step(&x, &dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&s, &ds)).min(1.0);

        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                return Iterate { x, y, iterations: iter, outcome: Outcome::Stalled };
            }
        } else {
            stalls = 0;
        }

        x = sym(x + dx * ap);
        y += dy * ad;
        s = sym(s + ds * ad);
    }
}
