//! Complex Hermitian <-> real symmetric embedding.

use nalgebra::DMatrix;

use crate::linalg::{c, ComplexMatrix, HermitianOperator};

/// `H = X + iY` maps to `[[X, -Y], [Y, X]]`.
///
/// The spectrum of the embedding is that of `H` with every eigenvalue doubled
/// in multiplicity, and `<embed(A), embed(B)> = 2 Tr(A B)`.
pub fn embed_real(h: &HermitianOperator) -> DMatrix<f64> {
    let n = h.dim();
    let m = h.matrix();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Left inverse of [`embed_real`] that averages the redundant blocks.
///
/// Maps positive semidefinite matrices to positive semidefinite matrices.
pub fn compress(z: &DMatrix<f64>) -> HermitianOperator {
    let n = z.nrows() / 2;
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (z[(i, j)] + z[(i + n, j + n)]);
        let im = 0.5 * (z[(i + n, j)] - z[(i, j + n)]);
        c(re, im)
    });
    HermitianOperator::symmetrized(m)
}
