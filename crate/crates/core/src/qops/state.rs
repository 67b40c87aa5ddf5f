use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Tolerances for the density-matrix invariants.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Trace interval outside which an integration step is declared diverged.
pub const TRACE_GUARD: (f64, f64) = (0.5, 2.0);

/// Conditioned (or unconditioned) state on the qubit ⊗ Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Invariant measurements of a state, as checked at recorded samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.trace_error < TRACE_TOL
            && self.hermiticity_deviation < HERMITICITY_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }
}

impl DensityMatrix {
    /// Wraps `matrix` after checking shape, Hermiticity and trace.
    /// Positivity is not checked here; see [`DensityMatrix::diagnostics`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(Error::Domain(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Domain(format!("trace {tr} differs from 1")));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for hot-loop internals that maintain the
    /// invariants themselves.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ><ψ|` for the normalized `amplitudes`.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let n = amplitudes.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / (norm * norm));
        Ok(Self { matrix: m })
    }

    /// Qubit state with Bloch vector `s` (|s| <= 1).
    pub fn qubit(s: [f64; 3]) -> Result<Self> {
        let len = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("Bloch vector length {len} exceeds 1")));
        }
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new((1.0 + s[2]) / 2.0, 0.0), Complex64::new(s[0], -s[1]) / 2.0],
            vec![Complex64::new(s[0], s[1]) / 2.0, Complex64::new((1.0 - s[2]) / 2.0, 0.0)],
        ])?;
        Ok(Self { matrix: m })
    }

    pub fn fock(n: usize, fock_dim: usize) -> Result<Self> {
        if n >= fock_dim {
            return Err(Error::InvalidDimension(format!("Fock level {n} outside dimension {fock_dim}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); fock_dim];
        v[n] = Complex64::new(1.0, 0.0);
        Self::from_pure(&v)
    }

    /// Product state, qubit factor first.
    pub fn product(qubit: &Self, resonator: &Self) -> Result<Self> {
        if qubit.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: "2-level qubit state".into(),
                found: format!("dimension {}", qubit.dim()),
            });
        }
        Ok(Self {
            matrix: qubit.matrix.kron(&resonator.matrix),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(ρ²)`, using Hermiticity.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues()[0]
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics {
            trace_error: (self.matrix.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_deviation: self.matrix.hermiticity_deviation(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// Reduced qubit Bloch vector `(<σx>, <σy>, <σz>)`, for a state on the
    /// product space (qubit factor first).
    pub fn bloch_vector(&self) -> [f64; 3] {
        let n = self.dim() / 2;
        let m = &self.matrix;
        let mut tr_a = 0.0;
        let mut tr_d = 0.0;
        let mut tr_b = Complex64::new(0.0, 0.0);
        for k in 0..n {
            tr_a += m[(k, k)].re;
            tr_d += m[(n + k, n + k)].re;
            tr_b += m[(k, n + k)];
        }
        [2.0 * tr_b.re, -2.0 * tr_b.im, tr_a - tr_d]
    }

    /// Population of the `σz = +1` qubit eigenstate.
    pub fn p_plus(&self) -> f64 {
        let n = self.dim() / 2;
        (0..n).map(|k| self.matrix[(k, k)].re).sum()
    }

    /// Partial trace over the qubit.
    pub fn resonator_state(&self) -> Self {
        let n = self.dim() / 2;
        let m = ComplexMatrix::from_fn(n, n, |i, j| self.matrix[(i, j)] + self.matrix[(n + i, n + j)]);
        Self { matrix: m }
    }
}

/// Coherent state `|α><α|` on `fock_dim` levels, renormalized after
/// truncation. Logs a warning when the truncation is too tight
/// (`|α|² + 5|α| >= fock_dim`).
pub fn coherent_state(alpha: Complex64, fock_dim: usize) -> Result<DensityMatrix> {
    if fock_dim < 1 {
        return Err(Error::InvalidDimension("fock_dim must be positive".into()));
    }
    if !coherent_truncation_ok(alpha, fock_dim) {
        log::warn!(
            "coherent state with |alpha| = {:.3} is poorly resolved by {fock_dim} Fock levels",
            alpha.norm()
        );
    }
    let mut amps = Vec::with_capacity(fock_dim);
    // c_m = e^{-|α|²/2} α^m / sqrt(m!), built recursively.
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for m in 0..fock_dim {
        amps.push(c);
        c = c * alpha / ((m + 1) as f64).sqrt();
    }
    DensityMatrix::from_pure(&amps)
}

pub fn coherent_truncation_ok(alpha: Complex64, fock_dim: usize) -> bool {
    let r = alpha.norm();
    r * r + 5.0 * r < fock_dim as f64
}

/// `Tr(op ρ)`.
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<Complex64> {
    let d = rho.dim();
    if op.rows() != d || op.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", op.rows(), op.cols()),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for (j, &v) in op.row(i).iter().enumerate() {
            acc += v * rho.matrix[(j, i)];
        }
    }
    Ok(acc)
}

/// `ρ ← (ρ + ρ†)/2`, then `ρ ← ρ / Tr ρ`.
///
/// Fails with [`Error::IntegrationDiverged`] when the trace is outside
/// [`TRACE_GUARD`] or not finite. `step` and `time` label the error.
pub fn hermitize_and_normalize(rho: &DensityMatrix, step: u64, time: f64) -> Result<DensityMatrix> {
    let mut m = rho.matrix.clone();
    hermitize_and_normalize_in_place(&mut m, step, time)?;
    Ok(DensityMatrix { matrix: m })
}

pub(crate) fn hermitize_and_normalize_in_place(m: &mut ComplexMatrix, step: u64, time: f64) -> Result<()> {
    let n = m.rows();
    let tr = m.trace().re;
    if !tr.is_finite() || tr < TRACE_GUARD.0 || tr > TRACE_GUARD.1 {
        return Err(Error::IntegrationDiverged { step, time, trace: tr });
    }
    let inv = 1.0 / tr;
    let data = m.as_mut_slice();
    for i in 0..n {
        data[i * n + i] = Complex64::new(data[i * n + i].re * inv, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (data[i * n + j] + data[j * n + i].conj()) * inv;
            data[i * n + j] = avg;
            data[j * n + i] = avg.conj();
        }
    }
    if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::IntegrationDiverged { step, time, trace: f64::NAN });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::build_operator_set;
    use proptest::prelude::*;

    #[test]
    fn coherent_vacuum() {
        let rho = coherent_state(Complex64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(rho, DensityMatrix::fock(0, 5).unwrap());
    }

    #[test]
    fn coherent_moments() {
        let ops = build_operator_set(30).unwrap();
        let rho = coherent_state(Complex64::new(1.5, 0.0), 30).unwrap();
        let x = expectation(&ops.x_tilde, &rho).unwrap();
        let p = expectation(&ops.p_tilde, &rho).unwrap();
        let n = expectation(&ops.n_op, &rho).unwrap();
        assert!((x.re - 3.0).abs() < 1e-9 && x.im.abs() < 1e-9);
        assert!(p.re.abs() < 1e-9);
        assert!((n.re - 2.25).abs() < 1e-9);

        let rho = coherent_state(Complex64::new(0.5, -1.0), 30).unwrap();
        let p = expectation(&ops.p_tilde, &rho).unwrap();
        assert!((p.re + 2.0).abs() < 1e-9);
    }

    #[test]
    fn expectation_identity_and_eigenstate() {
        let ops = build_operator_set(8).unwrap();
        let res = coherent_state(Complex64::new(0.7, 0.2), 8).unwrap();
        let plus = DensityMatrix::qubit([0.0, 0.0, 1.0]).unwrap();
        let rho = DensityMatrix::product(&plus, &res).unwrap();
        let id = ComplexMatrix::identity(16);
        assert!((expectation(&id, &rho).unwrap() - 1.0).norm() < 1e-12);
        let sz = ops.sz.to_dense();
        assert!((expectation(&sz, &rho).unwrap() - 1.0).norm() < 1e-12);
        assert!(expectation(&ComplexMatrix::identity(3), &rho).is_err());
    }

    #[test]
    fn composite_position_on_minus_branch() {
        let ops = build_operator_set(30).unwrap();
        let minus = DensityMatrix::qubit([0.0, 0.0, -1.0]).unwrap();
        let res = coherent_state(Complex64::new(1.5, 0.0), 30).unwrap();
        let rho = DensityMatrix::product(&minus, &res).unwrap();
        // Oracle: plain dense trace over explicit matrices.
        let x = ops.x.to_dense();
        let dense = (&x * rho.matrix()).trace();
        let fast = ops.x.trace_product(rho.matrix());
        assert!((dense.re - 3.0).abs() < 1e-9);
        assert!((fast - dense).norm() < 1e-12);
    }

    #[test]
    fn bloch_vector_matches_pauli_expectations() {
        let ops = build_operator_set(4).unwrap();
        let q = DensityMatrix::qubit([0.3, -0.4, 0.5]).unwrap();
        let r = coherent_state(Complex64::new(0.3, 0.1), 4).unwrap();
        let rho = DensityMatrix::product(&q, &r).unwrap();
        let s = rho.bloch_vector();
        let want = [
            ops.sx.trace_product(rho.matrix()).re,
            ops.sy.trace_product(rho.matrix()).re,
            ops.sz.trace_product(rho.matrix()).re,
        ];
        for k in 0..3 {
            assert!((s[k] - want[k]).abs() < 1e-12);
        }
        assert!((s[0] - 0.3).abs() < 1e-12 && (s[1] + 0.4).abs() < 1e-12);
        assert!((rho.p_plus() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn normalize_fixed_point_and_scaling() {
        let rho = coherent_state(Complex64::new(1.0, 0.5), 10).unwrap();
        let again = hermitize_and_normalize(&rho, 0, 0.0).unwrap();
        assert!(again.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let scaled = DensityMatrix::from_matrix_unchecked(rho.matrix().scale_real(1.01));
        let back = hermitize_and_normalize(&scaled, 0, 0.0).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn normalize_removes_antihermitian_part() {
        let rho = coherent_state(Complex64::new(0.4, 0.0), 4).unwrap();
        let mut pert = rho.matrix().clone();
        let eps = Complex64::new(0.0, 1e-3);
        // i ε (E01 + E10) is anti-Hermitian.
        pert[(0, 1)] += eps;
        pert[(1, 0)] += eps;
        let fixed = hermitize_and_normalize(&DensityMatrix::from_matrix_unchecked(pert), 0, 0.0).unwrap();
        assert!(fixed.matrix().max_abs_diff(rho.matrix()) < 1e-16);
    }

    #[test]
    fn normalize_guard_reports_step() {
        let rho = DensityMatrix::fock(0, 3).unwrap();
        let blown = DensityMatrix::from_matrix_unchecked(rho.matrix().scale_real(3.0));
        match hermitize_and_normalize(&blown, 42, 1.5) {
            Err(Error::IntegrationDiverged { step, .. }) => assert_eq!(step, 42),
            other => panic!("expected divergence, got {other:?}"),
        }
        let nan = DensityMatrix::from_matrix_unchecked(rho.matrix().scale_real(f64::NAN));
        assert!(hermitize_and_normalize(&nan, 1, 0.0).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
        let mut m = ComplexMatrix::identity(2).scale_real(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    proptest! {
        #[test]
        fn coherent_state_is_pure(re in -2.5f64..2.5, im in -2.5f64..2.5) {
            let alpha = Complex64::new(re, im);
            let n = 30;
            prop_assume!(coherent_truncation_ok(alpha, n));
            let rho = coherent_state(alpha, n).unwrap();
            prop_assert!((rho.purity() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn expectation_is_linear(
            w in -3.0f64..3.0,
            a1 in -1.0f64..1.0, a2 in -1.0f64..1.0,
            mix in 0.0f64..1.0,
        ) {
            let ops = build_operator_set(6).unwrap();
            let x = ops.x_tilde.clone();
            let p = ops.p_tilde.clone();
            let combo = &x.scale_real(w) + &p;
            let r1 = coherent_state(Complex64::new(a1, a2), 6).unwrap();
            let r2 = DensityMatrix::fock(2, 6).unwrap();
            let lhs = expectation(&combo, &r1).unwrap();
            let rhs = expectation(&x, &r1).unwrap() * w + expectation(&p, &r1).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);

            let mixed = DensityMatrix::from_matrix_unchecked(
                &r1.matrix().scale_real(mix) + &r2.matrix().scale_real(1.0 - mix));
            let lhs = expectation(&x, &mixed).unwrap();
            let rhs = expectation(&x, &r1).unwrap() * mix + expectation(&x, &r2).unwrap() * (1.0 - mix);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
