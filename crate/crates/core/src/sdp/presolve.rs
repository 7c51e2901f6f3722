//! Elimination of linearly dependent equality constraints.
//!
//! Constraint operators are compared through their real coordinates. An
//! eigendecomposition of the Gram matrix yields an orthonormal basis of the
//! constraint row space; dropped directions must have consistent right-hand
//! sides or the system is reported inconsistent.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative eigenvalue cutoff on the Gram matrix for rank determination.
const RANK_TOL: f64 = 1e-9;
/// Absolute tolerance on the right-hand side of eliminated rows.
pub(crate) const CONSISTENCY_TOL: f64 = 1e-10;

pub(crate) struct Reduction {
    /// Coordinates of the orthonormal reduced constraint operators.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// `m x r` map from reduced to original multipliers.
    pub back: DMatrix<f64>,
    /// Largest singular value of the original constraint matrix.
    pub sigma_max: f64,
}

pub(crate) fn reduce(coords: &[Vec<f64>], b: &[f64]) -> Result<Reduction, f64> {
    let m = coords.len();
    let len = coords[0].len();
    let v = DMatrix::from_fn(m, len, |i, k| coords[i][k]);
    let gram = &v * v.transpose();
    let eig = SymmetricEigen::new(gram);
    let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);

    let keep: Vec<usize> = (0..m)
        .filter(|&k| eig.eigenvalues[k] > RANK_TOL * lambda_max)
        .collect();

    let bvec = DVector::from_column_slice(b);
    let mut projected = DVector::zeros(m);
    for &k in &keep {
        let u = eig.eigenvectors.column(k);
        projected += u * u.dot(&bvec);
    }
    let inconsistency = (&bvec - projected).amax();
    let scale = bvec.amax().max(1.0);
    if inconsistency > CONSISTENCY_TOL * scale {
        return Err(inconsistency);
    }

    let mut rows = Vec::with_capacity(keep.len());
    let mut rhs = Vec::with_capacity(keep.len());
    let mut back = DMatrix::zeros(m, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        let u = eig.eigenvectors.column(k);
        let inv = 1.0 / eig.eigenvalues[k].sqrt();
        let row = (v.transpose() * u) * inv;
        rows.push(row.iter().copied().collect());
        rhs.push(u.dot(&bvec) * inv);
        back.set_column(col, &(u * inv));
    }
    Ok(Reduction {
        rows,
        rhs,
        back,
        sigma_max: lambda_max.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_rows_collapse() {
        let coords = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]];
        let red = reduce(&coords, &[1.0, 2.0, 0.5]).unwrap();
        assert_eq!(red.rows.len(), 2);
        for (i, r) in red.rows.iter().enumerate() {
            for (j, s) in red.rows.iter().enumerate() {
                let dot: f64 = r.iter().zip(s).map(|(a, b)| a * b).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contradictory_rows_rejected() {
        let coords = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let err = reduce(&coords, &[1.0, 0.5]).err().unwrap();
        assert!(err > 0.1);
    }
}
