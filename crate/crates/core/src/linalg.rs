//! Dense complex matrices and the Hermitian operator newtype.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Entrywise tolerance on `|H - H^dagger|` accepted by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise deviation `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// A square complex matrix equal to its conjugate transpose.
///
/// The stored matrix is exactly Hermitian: construction checks the deviation
/// against [`HERMITIAN_TOL`] and then replaces the input by `(M + M^dagger)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    /// Hermitian part `(M + M^dagger)/2` without a tolerance check.
    pub fn symmetrized(m: ComplexMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj).scale(0.5))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                Complex64::ZERO
            }
        }))
    }

    /// Rank-one projector `|v><v|` (not normalised).
    pub fn projector(v: &ComplexVector) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(kron(&self.0, &other.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        Self(&self.0 + other.0.scale(s))
    }

    /// `Re Tr(self * rho)`; exact for Hermitian arguments.
    pub fn expectation(&self, rho: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.0[(i, j)];
                let r = rho.0[(j, i)];
                acc += a.re * r.re - a.im * r.im;
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// If the operator is `s * I` for some real `s`, return `s`.
    pub fn as_scaled_identity(&self, tol: f64) -> Option<f64> {
        let s = self.0[(0, 0)].re;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { s } else { 0.0 };
                if (self.0[(i, j)] - c(expect, 0.0)).norm() > tol {
                    return None;
                }
            }
        }
        Some(s)
    }

    /// Orthonormal real coordinates: diagonal entries, then `sqrt(2) Re` and
    /// `sqrt(2) Im` of the strict upper triangle. `Tr(A B)` equals the dot
    /// product of the coordinate vectors.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            out.push(self.0[(i, i)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(r2 * self.0[(i, j)].re);
                out.push(r2 * self.0[(i, j)].im);
            }
        }
        out
    }

    /// Inverse of [`real_coordinates`](Self::real_coordinates).
    pub fn from_real_coordinates(n: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), n * n);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(coords[i], 0.0);
        }
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = c(coords[k] * inv, coords[k + 1] * inv);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        Self(m)
    }
}
