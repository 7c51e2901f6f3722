//! Shared oracles for integration tests.
#![allow(dead_code)]

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use qkd_phase_bound::{ComplexMatrix, HermitianOperator, SdpProblem};

/// xorshift64*, enough for reproducible test fixtures.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in [-1, 1).
    pub fn symmetric(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

pub fn random_hermitian(n: usize, rng: &mut Rng) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.symmetric(), rng.symmetric()));
    HermitianOperator::symmetrized(&g + g.adjoint())
}

/// Random full-rank density matrix.
pub fn random_state(n: usize, rng: &mut Rng) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.symmetric(), rng.symmetric()));
    let p = &g * g.adjoint() + ComplexMatrix::identity(n, n) * Complex64::new(0.1, 0.0);
    let tr = p.trace().re;
    HermitianOperator::symmetrized(p / Complex64::new(tr, 0.0))
}

/// Trace constraint plus `m` random constraints whose right-hand sides come
/// from a random interior state, so the problem is strictly feasible.
pub fn random_problem(n: usize, m: usize, seed: u64) -> SdpProblem {
    let mut rng = Rng::new(seed);
    let rho0 = random_state(n, &mut rng);
    let mut cons = vec![(HermitianOperator::identity(n), 1.0)];
    for _ in 0..m {
        let a = random_hermitian(n, &mut rng);
        let b = a.expectation(&rho0);
        cons.push((a, b));
    }
    SdpProblem::new(random_hermitian(n, &mut rng), cons).unwrap()
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Split a Hermitian matrix into positive and negative parts.
fn psd_parts(v: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let eig = SymmetricEigen::new(v.clone());
    let n = v.nrows();
    let mut pos = ComplexMatrix::zeros(n, n);
    let mut neg = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let u = eig.eigenvectors.column(k);
        let l = eig.eigenvalues[k];
        let outer = u * u.adjoint();
        if l > 0.0 {
            pos += outer * Complex64::new(l, 0.0);
        } else {
            neg += outer * Complex64::new(-l, 0.0);
        }
    }
    (pos, neg)
}

/// Alternating-direction augmented Lagrangian on the dual (boundary-point
/// method) for `max Tr(O X)` s.t. `Tr(A_j X) = b_j`, `X >= 0`.
///
/// Constraints are orthonormalised with modified Gram-Schmidt first so the
/// `y` update is a plain projection. Returns the primal objective.
pub fn admm_max(problem: &SdpProblem, iterations: usize) -> f64 {
    let n = problem.dim();
    // orthonormalise constraint operators under the trace inner product
    let mut basis: Vec<(ComplexMatrix, f64)> = Vec::new();
    for (a, b) in problem.constraints() {
        let mut a = a.matrix().clone();
        let mut b = *b;
        for (q, qb) in &basis {
            let c = inner(q, &a);
            a -= q * Complex64::new(c, 0.0);
            b -= c * qb;
        }
        let norm = inner(&a, &a).sqrt();
        if norm > 1e-9 {
            basis.push((a / Complex64::new(norm, 0.0), b / norm));
        }
    }
    let at = |y: &[f64]| {
        let mut out = ComplexMatrix::zeros(n, n);
        for ((q, _), &yk) in basis.iter().zip(y) {
            out += q * Complex64::new(yk, 0.0);
        }
        out
    };

    // minimise <C, X> with C = -O
    let c = -problem.objective().matrix().clone();
    let mut x = ComplexMatrix::identity(n, n) / Complex64::new(n as f64, 0.0);
    let mut s = ComplexMatrix::zeros(n, n);
    let mu = 1.0;
    for _ in 0..iterations {
        let y: Vec<f64> = basis
            .iter()
            .map(|(q, qb)| -(mu * (inner(q, &x) - qb) + inner(q, &(&s - &c))))
            .collect();
        let v = &c - at(&y) - &x * Complex64::new(mu, 0.0);
        let (pos, neg) = psd_parts(&v);
        s = pos;
        x = neg / Complex64::new(mu, 0.0);
    }
    inner(problem.objective().matrix(), &x)
}

/// `P(n photons | mean k)`.
pub fn poisson(k: f64, n: u32) -> f64 {
    let mut p = (-k).exp();
    for i in 1..=n {
        p *= k / i as f64;
    }
    p
}

/// Channel gain summed photon number by photon number:
/// `sum_n P(n) [1 - (1 - eta)^n + P_d / d]`, truncated at 60 photons.
pub fn oracle_gain(eta: f64, dark: f64, d: usize, k: f64) -> f64 {
    (0..60)
        .map(|n| poisson(k, n) * (1.0 - (1.0 - eta).powi(n as i32) + dark / d as f64))
        .sum()
}

/// Erroneous-click probability summed photon number by photon number.
pub fn oracle_error_gain(eta: f64, dark: f64, d: usize, k: f64, e_d: f64) -> f64 {
    (0..60)
        .map(|n| poisson(k, n) * (e_d * (1.0 - (1.0 - eta).powi(n as i32)) + (d as f64 - 1.0) * dark / d as f64))
        .sum()
}

pub fn true_single_photon_yield(eta: f64, dark: f64, d: usize) -> f64 {
    eta + dark / d as f64
}

pub fn true_single_photon_error(eta: f64, dark: f64, d: usize, e_d: f64) -> f64 {
    (e_d * eta + (d as f64 - 1.0) * dark / d as f64) / true_single_photon_yield(eta, dark, d)
}
