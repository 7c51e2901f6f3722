//! Basis states, projectors, error operators and the SDP constraint system.
//!
//! Conventions: the tensor basis of the bipartite space is `|l>_A (x) |m>_B`
//! with flat index `l * d + m`. Phase states carry `exp(+2 pi i n m / d)`.
//! Bob measures the phase basis in the conjugate basis `F*`, so the maximally
//! entangled state `sum_k |k k> / sqrt(d)` yields perfectly correlated outcomes
//! in both bases.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, ComplexVector, HermitianOperator};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

fn check_index(d: usize, n: usize) -> Result<()> {
    check_dim(d)?;
    if n >= d {
        Err(Error::IndexOutOfRange { index: n, dim: d })
    } else {
        Ok(())
    }
}

/// `d x d` discrete Fourier matrix whose column `n` is `|f_n>` in the time basis.
pub fn fourier_matrix(d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |m, n| {
        let phase = 2.0 * PI * ((n * m) % d) as f64 / d as f64;
        c(phase.cos() * norm, phase.sin() * norm)
    }))
}

pub fn time_state(d: usize, n: usize) -> Result<ComplexVector> {
    check_index(d, n)?;
    let mut v = ComplexVector::zeros(d);
    v[n] = c(1.0, 0.0);
    Ok(v)
}

/// Alice's phase state `|f_n>`.
pub fn phase_state(d: usize, n: usize) -> Result<ComplexVector> {
    check_index(d, n)?;
    Ok(fourier_matrix(d)?.column(n).into_owned())
}

/// Bob's phase measurement vector `|f_n*>`.
pub fn bob_phase_state(d: usize, n: usize) -> Result<ComplexVector> {
    Ok(phase_state(d, n)?.map(|z| z.conj()))
}

/// Maximally entangled state `sum_k |k>|k> / sqrt(d)`.
pub fn ideal_state(d: usize) -> Result<ComplexVector> {
    check_dim(d)?;
    let mut v = ComplexVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        v[k * d + k] = c(amp, 0.0);
    }
    Ok(v)
}

/// Error operator of the time basis: identity minus `sum_l |l,l><l,l|`.
pub fn error_operator_t(d: usize) -> Result<HermitianOperator> {
    check_dim(d)?;
    let diag: Vec<f64> = (0..d * d)
        .map(|idx| if idx / d == idx % d { 0.0 } else { 1.0 })
        .collect();
    Ok(HermitianOperator::from_real_diagonal(&diag))
}

/// Error operator of the phase basis, `(H^dagger (x) H) E_T (H (x) H^dagger)`
/// where `H` is the conjugate Fourier matrix (negative exponent).
pub fn error_operator_f(d: usize) -> Result<HermitianOperator> {
    let e_t = error_operator_t(d)?;
    let h = fourier_matrix(d)?.map(|z| z.conj());
    let left = crate::linalg::kron(&h.adjoint(), &h);
    let right = crate::linalg::kron(&h, &h.adjoint());
    Ok(HermitianOperator::symmetrized(left * e_t.matrix() * right))
}

/// Weyl operator `U_nm = sum_k exp(2 pi i k n / d) |k><k+m|`.
pub fn weyl_operator(d: usize, n: usize, m: usize) -> Result<ComplexMatrix> {
    check_index(d, n)?;
    check_index(d, m)?;
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * PI * ((k * n) % d) as f64 / d as f64;
        u[(k, (k + m) % d)] = c(phase.cos(), phase.sin());
    }
    Ok(u)
}

/// All `d^2` Weyl operators, `U_nm` at position `n * d + m`.
pub fn weyl_operators(d: usize) -> Result<Vec<ComplexMatrix>> {
    check_dim(d)?;
    let mut out = Vec::with_capacity(d * d);
    for n in 0..d {
        for m in 0..d {
            out.push(weyl_operator(d, n, m)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Time (key-generating) basis.
    T,
    /// Fourier (monitoring) basis.
    F,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::T => f.write_str("T"),
            Basis::F => f.write_str("F"),
        }
    }
}

fn alice_vector(d: usize, basis: Basis, n: usize) -> Result<ComplexVector> {
    match basis {
        Basis::T => time_state(d, n),
        Basis::F => phase_state(d, n),
    }
}

fn bob_vector(d: usize, basis: Basis, n: usize) -> Result<ComplexVector> {
    match basis {
        Basis::T => time_state(d, n),
        Basis::F => bob_phase_state(d, n),
    }
}

/// `Pi^a_i (x) Pi^b_j` with Bob's phase projectors in the `F*` basis.
pub fn joint_projector(d: usize, alice: (Basis, usize), bob: (Basis, usize)) -> Result<HermitianOperator> {
    let a = HermitianOperator::projector(&alice_vector(d, alice.0, alice.1)?);
    let b = HermitianOperator::projector(&bob_vector(d, bob.0, bob.1)?);
    Ok(a.kron(&b))
}

/// Set of phase-basis indices Alice transmits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Subset(BTreeSet<usize>);

impl Subset {
    pub fn new(indices: impl IntoIterator<Item = usize>, d: usize) -> Result<Self> {
        check_dim(d)?;
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidConfig("monitoring subset is empty".into()));
        }
        if let Some(&bad) = set.iter().find(|&&i| i >= d) {
            return Err(Error::IndexOutOfRange { index: bad, dim: d });
        }
        Ok(Self(set))
    }

    pub fn full(d: usize) -> Self {
        Self((0..d).collect())
    }

    /// The first `k` indices `{0, .., k-1}`.
    pub fn first(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("monitoring subset is empty".into()));
        }
        Ok(Self((0..k).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max_index(&self) -> usize {
        *self.0.iter().next_back().expect("subset is nonempty")
    }

    /// True when the monitoring statistics pin down the phase error exactly
    /// (`d` or `d - 1` states transmitted).
    pub fn is_complete(&self, d: usize) -> bool {
        self.len() + 1 >= d
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = String;

    fn try_from(v: Vec<usize>) -> std::result::Result<Self, String> {
        if v.is_empty() {
            return Err("monitoring subset is empty".into());
        }
        Ok(Self(v.into_iter().collect()))
    }
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.0.into_iter().collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Optional tightenings beyond the default constraint blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintOptions {
    /// Impose the full T-T joint distribution instead of only `Tr(E_T rho)`.
    pub time_joint: bool,
    /// Impose Alice's reduced state `rho_A = I/d`.
    pub alice_marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub d: usize,
    pub subset: Subset,
    pub qber_t: f64,
    pub qber_f: f64,
    #[serde(default)]
    pub options: ConstraintOptions,
}

impl ProtocolConfig {
    /// Symmetric-error configuration (`qber_f = qber_t`).
    pub fn new(d: usize, subset: Subset, qber_t: f64) -> Result<Self> {
        Self::asymmetric(d, subset, qber_t, qber_t)
    }

    pub fn asymmetric(d: usize, subset: Subset, qber_t: f64, qber_f: f64) -> Result<Self> {
        let cfg = Self {
            d,
            subset,
            qber_t,
            qber_f,
            options: ConstraintOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_options(mut self, options: ConstraintOptions) -> Self {
        self.options = options;
        self
    }

    pub fn max_error(&self) -> f64 {
        (self.d as f64 - 1.0) / self.d as f64
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.d)?;
        if self.subset.is_empty() {
            return Err(Error::InvalidConfig("monitoring subset is empty".into()));
        }
        if self.subset.max_index() >= self.d {
            return Err(Error::IndexOutOfRange {
                index: self.subset.max_index(),
                dim: self.d,
            });
        }
        let hi = self.max_error();
        for (what, v) in [("qber_t", self.qber_t), ("qber_f", self.qber_f)] {
            if !(0.0..=hi).contains(&v) {
                return Err(Error::OutOfDomain { what, value: v, lo: 0.0, hi });
            }
        }
        Ok(())
    }
}

/// What a constraint row measures; informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    Trace,
    ErrorT,
    Joint {
        alice: (Basis, usize),
        bob: (Basis, usize),
    },
    AliceMarginal,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub operator: HermitianOperator,
    pub value: f64,
    pub kind: ConstraintKind,
}

/// Objective `E_F` plus ordered equality constraints on `rho_AB`.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub dim: usize,
    pub objective: HermitianOperator,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Largest `|Tr(A_i rho) - b_i|` over all constraints.
    pub fn max_violation(&self, rho: &HermitianOperator) -> f64 {
        self.constraints
            .iter()
            .map(|k| (k.operator.expectation(rho) - k.value).abs())
            .fold(0.0, f64::max)
    }
}

/// Expected value of `Pi^F_i (x) Pi^{F*}_j` under a uniform error model.
fn same_basis_value(d: usize, i: usize, j: usize, e: f64) -> f64 {
    let d = d as f64;
    if i == j {
        (1.0 - e) / d
    } else {
        e / (d * (d - 1.0))
    }
}

/// Build the objective and equality constraints for `config`.
///
/// Order: trace, `E_T`, the full T->F block, the F->T block for Alice indices
/// in the subset, the F->F block for the same indices, then any optional rows.
pub fn build_constraints(config: &ProtocolConfig) -> Result<ConstraintSet> {
    config.validate()?;
    let d = config.d;
    let dim = d * d;
    let cross = 1.0 / (dim as f64);
    let mut rows = Vec::with_capacity(2 + dim + 2 * d * config.subset.len());

    rows.push(Constraint {
        operator: HermitianOperator::identity(dim),
        value: 1.0,
        kind: ConstraintKind::Trace,
    });
    rows.push(Constraint {
        operator: error_operator_t(d)?,
        value: config.qber_t,
        kind: ConstraintKind::ErrorT,
    });

    let mut joint = |alice: (Basis, usize), bob: (Basis, usize), value: f64| -> Result<()> {
        rows.push(Constraint {
            operator: joint_projector(d, alice, bob)?,
            value,
            kind: ConstraintKind::Joint { alice, bob },
        });
        Ok(())
    };

    for i in 0..d {
        for j in 0..d {
            joint((Basis::T, i), (Basis::F, j), cross)?;
        }
    }
    for i in config.subset.iter() {
        for j in 0..d {
            joint((Basis::F, i), (Basis::T, j), cross)?;
        }
    }
    for i in config.subset.iter() {
        for j in 0..d {
            joint((Basis::F, i), (Basis::F, j), same_basis_value(d, i, j, config.qber_f))?;
        }
    }
    if config.options.time_joint {
        for i in 0..d {
            for j in 0..d {
                joint((Basis::T, i), (Basis::T, j), same_basis_value(d, i, j, config.qber_t))?;
            }
        }
    }
    if config.options.alice_marginal {
        let id_b = HermitianOperator::identity(d);
        for i in 0..d {
            for j in i..d {
                let mut re = ComplexMatrix::zeros(d, d);
                re[(i, j)] = c(1.0, 0.0);
                re[(j, i)] = c(1.0, 0.0);
                rows.push(Constraint {
                    operator: HermitianOperator::symmetrized(re).kron(&id_b),
                    value: if i == j { 1.0 / d as f64 } else { 0.0 },
                    kind: ConstraintKind::AliceMarginal,
                });
                if i != j {
                    let mut im = ComplexMatrix::zeros(d, d);
                    im[(i, j)] = c(0.0, 1.0);
                    im[(j, i)] = c(0.0, -1.0);
                    rows.push(Constraint {
                        operator: HermitianOperator::symmetrized(im).kron(&id_b),
                        value: 0.0,
                        kind: ConstraintKind::AliceMarginal,
                    });
                }
            }
        }
    }

    Ok(ConstraintSet {
        dim,
        objective: error_operator_f(d)?,
        constraints: rows,
    })
}

/// Joint outcome probabilities `p^{a,b}_{n,m}` of the ideal entangled state.
#[derive(Debug, Clone)]
pub struct IdealStatistics {
    pub d: usize,
    /// Indexed `[alice basis][bob basis]`, each a `d x d` table `[n][m]`.
    blocks: [[Vec<Vec<f64>>; 2]; 2],
}

impl IdealStatistics {
    pub fn block(&self, alice: Basis, bob: Basis) -> &[Vec<f64>] {
        &self.blocks[alice as usize][bob as usize]
    }

    pub fn get(&self, alice: (Basis, usize), bob: (Basis, usize)) -> f64 {
        self.block(alice.0, bob.0)[alice.1][bob.1]
    }
}

pub fn ideal_statistics(d: usize) -> Result<IdealStatistics> {
    let phi = ideal_state(d)?;
    let rho = HermitianOperator::projector(&phi);
    let table = |a: Basis, b: Basis| -> Result<Vec<Vec<f64>>> {
        (0..d)
            .map(|n| {
                (0..d)
                    .map(|m| Ok(joint_projector(d, (a, n), (b, m))?.expectation(&rho)))
                    .collect()
            })
            .collect()
    };
    Ok(IdealStatistics {
        d,
        blocks: [
            [table(Basis::T, Basis::T)?, table(Basis::T, Basis::F)?],
            [table(Basis::F, Basis::T)?, table(Basis::F, Basis::F)?],
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_deviation;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hadamard_for_qubits() {
        let h = fourier_matrix(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[s, s], [s, -s]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(i, j)] - c(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn four_dimensional_phase_states() {
        let f1 = phase_state(4, 1).unwrap();
        let want = [c(0.5, 0.), c(0., 0.5), c(-0.5, 0.), c(0., -0.5)];
        for k in 0..4 {
            assert!((f1[k] - want[k]).norm() < 1e-15, "f1[{k}] = {}", f1[k]);
        }
        let f2 = phase_state(4, 2).unwrap();
        let want = [0.5, -0.5, 0.5, -0.5];
        for k in 0..4 {
            assert!((f2[k] - c(want[k], 0.)).norm() < 1e-15);
        }
    }

    #[test]
    fn fourier_is_unitary_for_seven() {
        let h = fourier_matrix(7).unwrap();
        let prod = &h * h.adjoint();
        let dev = (prod - ComplexMatrix::identity(7, 7)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn zeroth_phase_state_is_uniform() {
        for d in 2..=7 {
            let f0 = phase_state(d, 0).unwrap();
            let amp = 1.0 / (d as f64).sqrt();
            assert!(f0.iter().all(|z| (z - c(amp, 0.)).norm() < 1e-15));
        }
    }

    #[test]
    fn phase_states_orthonormal_for_five() {
        for m in 0..5 {
            for n in 0..5 {
                let ip = phase_state(5, m).unwrap().dotc(&phase_state(5, n).unwrap());
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bob_state_is_conjugate() {
        let f = phase_state(3, 1).unwrap();
        let g = bob_phase_state(3, 1).unwrap();
        for k in 0..3 {
            assert_eq!(g[k], f[k].conj());
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(fourier_matrix(1), Err(Error::InvalidDimension(1))));
        assert!(matches!(
            phase_state(4, 4),
            Err(Error::IndexOutOfRange { index: 4, dim: 4 })
        ));
        assert!(Subset::new(Vec::<usize>::new(), 4).is_err());
        assert!(Subset::new([0, 5], 4).is_err());
    }

    #[test]
    fn error_operator_t_small_cases() {
        let e2 = error_operator_t(2).unwrap();
        assert_eq!(e2, HermitianOperator::from_real_diagonal(&[0., 1., 1., 0.]));
        let e4 = error_operator_t(4).unwrap();
        for idx in 0..16 {
            let want = if [0, 5, 10, 15].contains(&idx) { 0.0 } else { 1.0 };
            assert_eq!(e4.matrix()[(idx, idx)], c(want, 0.));
        }
        for d in 2..=7 {
            let t = error_operator_t(d).unwrap().trace();
            assert_eq!(t, (d * d - d) as f64);
        }
    }

    #[test]
    fn error_operator_f_properties() {
        for d in 2..=7 {
            let ef = error_operator_f(d).unwrap();
            let phi = HermitianOperator::projector(&ideal_state(d).unwrap());
            assert!(ef.expectation(&phi).abs() < 1e-12, "d = {d}");
            assert!(close(ef.trace(), (d * d - d) as f64, 1e-10));
            let sq = HermitianOperator::symmetrized(ef.matrix() * ef.matrix());
            assert!(sq.max_abs_diff(&ef) < 1e-10);

            // identity minus the correlated F (x) F* projectors
            let mut alt = HermitianOperator::identity(d * d);
            for l in 0..d {
                alt = alt.add_scaled(&joint_projector(d, (Basis::F, l), (Basis::F, l)).unwrap(), -1.0);
            }
            assert!(alt.max_abs_diff(&ef) < 1e-10);
        }
    }

    #[test]
    fn error_operator_f_spectrum_for_four() {
        // a unitary conjugate of a 0/1 projector: eigenvalue 1 with multiplicity d^2 - d
        let ev = error_operator_f(4).unwrap().eigenvalues();
        let ones = ev.iter().filter(|&&x| close(x, 1.0, 1e-9)).count();
        let zeros = ev.iter().filter(|&&x| close(x, 0.0, 1e-9)).count();
        assert_eq!((zeros, ones), (4, 12));
    }

    #[test]
    fn weyl_qubit_case() {
        let u = weyl_operators(2).unwrap();
        assert_eq!(u[0], ComplexMatrix::identity(2, 2));
        let z = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let x = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert!((&u[2] - z).norm() < 1e-15);
        assert!((&u[1] - x).norm() < 1e-15);
    }

    #[test]
    fn weyl_traceless_and_orthogonal() {
        for u in weyl_operators(5).unwrap().iter().skip(1) {
            assert!(u.trace().norm() < 1e-12);
        }
        // trace(U_a^dagger U_b) = d delta_ab, checked by direct summation over all pairs
        let u = weyl_operators(3).unwrap();
        for (a, ua) in u.iter().enumerate() {
            for (b, ub) in u.iter().enumerate() {
                let mut t = c(0., 0.);
                for i in 0..3 {
                    for k in 0..3 {
                        t += ua[(k, i)].conj() * ub[(k, i)];
                    }
                }
                let want = if a == b { 3.0 } else { 0.0 };
                assert!((t - c(want, 0.)).norm() < 1e-12, "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn projector_completeness() {
        for d in 2..=7 {
            for basis in [Basis::T, Basis::F] {
                let mut sa = ComplexMatrix::zeros(d, d);
                let mut sb = ComplexMatrix::zeros(d, d);
                for n in 0..d {
                    sa += HermitianOperator::projector(&alice_vector(d, basis, n).unwrap()).into_matrix();
                    sb += HermitianOperator::projector(&bob_vector(d, basis, n).unwrap()).into_matrix();
                }
                let id = ComplexMatrix::identity(d, d);
                assert!((sa - &id).iter().all(|z| z.norm() < 1e-12));
                assert!((sb - &id).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn constraint_counts_and_values() {
        let q = 0.06;
        let full = build_constraints(&ProtocolConfig::new(4, Subset::full(4), q).unwrap()).unwrap();
        assert_eq!(full.len(), 50);
        let one = build_constraints(&ProtocolConfig::new(4, Subset::first(1).unwrap(), q).unwrap()).unwrap();
        assert_eq!(one.len(), 26);

        for k in &full.constraints {
            assert!((0.0..=1.0).contains(&k.value));
            assert_eq!(k.operator.dim(), 16);
            assert!(hermitian_deviation(k.operator.matrix()) <= 1e-12);
            if let ConstraintKind::Joint { alice: (Basis::F, i), bob: (Basis::F, j) } = k.kind {
                let want = if i == j { 0.25 * (1.0 - q) } else { q / 12.0 };
                assert!(close(k.value, want, 1e-15));
            }
        }
        assert!(matches!(full.constraints[0].kind, ConstraintKind::Trace));
        assert!(full.constraints[0].operator.as_scaled_identity(0.0) == Some(1.0));
    }

    #[test]
    fn ideal_state_satisfies_zero_error_constraints() {
        for d in 2..=6 {
            let set = build_constraints(&ProtocolConfig::new(d, Subset::full(d), 0.0).unwrap()).unwrap();
            let phi = HermitianOperator::projector(&ideal_state(d).unwrap());
            assert!(set.max_violation(&phi) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn depolarized_state_is_feasible() {
        // (1 - p) |phi><phi| + p I/d^2 has e_T = e_F = p (d - 1)/d
        for d in [2, 3, 4, 5] {
            let p = 0.2;
            let q = p * (d as f64 - 1.0) / d as f64;
            let phi = HermitianOperator::projector(&ideal_state(d).unwrap());
            let rho = phi.scale(1.0 - p).add_scaled(&HermitianOperator::identity(d * d), p / (d * d) as f64);
            let cfg = ProtocolConfig::new(d, Subset::full(d), q)
                .unwrap()
                .with_options(ConstraintOptions { time_joint: true, alice_marginal: true });
            let set = build_constraints(&cfg).unwrap();
            assert!(set.max_violation(&rho) < 1e-12, "d = {d}");
            assert!(close(set.objective.expectation(&rho), q, 1e-12));
        }
    }

    #[test]
    fn ideal_statistics_tables() {
        let s = ideal_statistics(4).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                assert!(close(s.get((Basis::T, n), (Basis::F, m)), 1.0 / 16.0, 1e-14));
                assert!(close(s.get((Basis::F, n), (Basis::T, m)), 1.0 / 16.0, 1e-14));
                let same = if n == m { 0.25 } else { 0.0 };
                assert!(close(s.get((Basis::T, n), (Basis::T, m)), same, 1e-14));
                assert!(close(s.get((Basis::F, n), (Basis::F, m)), same, 1e-14));
            }
        }
        let s6 = ideal_statistics(6).unwrap();
        for a in [Basis::T, Basis::F] {
            for b in [Basis::T, Basis::F] {
                let total: f64 = s6.block(a, b).iter().flatten().sum();
                assert!(close(total, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn weyl_shift_relabels_single_state_subsets() {
        // Z (x) conj(Z) maps f_i -> f_{i+1} on Alice and f_i* -> f_{i+1}* on Bob
        let d = 4;
        let z = weyl_operator(d, 1, 0).unwrap();
        let u = crate::linalg::kron(&z, &z.map(|w| w.conj()));
        let s0 = build_constraints(&ProtocolConfig::new(d, Subset::new([0], d).unwrap(), 0.05).unwrap()).unwrap();
        let s1 = build_constraints(&ProtocolConfig::new(d, Subset::new([1], d).unwrap(), 0.05).unwrap()).unwrap();
        let conj = |h: &HermitianOperator| HermitianOperator::symmetrized(&u * h.matrix() * u.adjoint());
        assert!(conj(&s0.objective).max_abs_diff(&s1.objective) < 1e-12);
        assert_eq!(s0.len(), s1.len());
        for row in &s0.constraints {
            let mapped = conj(&row.operator);
            let hit = s1
                .constraints
                .iter()
                .any(|r| r.operator.max_abs_diff(&mapped) < 1e-12 && close(r.value, row.value, 1e-15));
            assert!(hit, "no image for {:?}", row.kind);
        }
    }
}
