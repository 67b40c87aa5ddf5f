use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Kronecker product with the qubit factor first:
/// `out[(i*N + k), (j*N + l)] = qubit[i, j] * res[k, l]`.
pub fn tensor(qubit_op: &ComplexMatrix, res_op: &ComplexMatrix) -> Result<ComplexMatrix> {
    if qubit_op.rows() != 2 || qubit_op.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2 qubit operator".into(),
            found: format!("{}x{}", qubit_op.rows(), qubit_op.cols()),
        });
    }
    if !res_op.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square resonator operator".into(),
            found: format!("{}x{}", res_op.rows(), res_op.cols()),
        });
    }
    Ok(qubit_op.kron(res_op))
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
}

/// `diag(1, -1)`: basis index 0 is the `+1` eigenstate `|+>`.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap()
}

/// `|+><-|`, raising `|->` to `|+>`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap()
}

pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, ZERO], vec![ONE, ZERO]]).unwrap()
}

/// Operators on the truncated Fock space, the qubit, and the product space.
///
/// Resonator quadratures use `x = a + a†`, `p = -i(a - a†)`, so `[x, p] = 2i`
/// away from the truncation edge. Composite operators act on the
/// `2N`-dimensional space with the qubit factor first.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub fock_dim: usize,
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub x_tilde: ComplexMatrix,
    pub p_tilde: ComplexMatrix,
    pub n_op: ComplexMatrix,
    pub sigma_x: ComplexMatrix,
    pub sigma_y: ComplexMatrix,
    pub sigma_z: ComplexMatrix,
    pub sigma_plus: ComplexMatrix,
    pub sigma_minus: ComplexMatrix,
    /// `I ⊗ x`.
    pub x: SparseMatrix,
    /// `I ⊗ p`.
    pub p: SparseMatrix,
    /// `I ⊗ a†a`.
    pub n: SparseMatrix,
    /// `I ⊗ x²`.
    pub x_sq: SparseMatrix,
    /// `σ_z ⊗ x`, the coupling operator.
    pub sz_x: SparseMatrix,
    pub sx: SparseMatrix,
    pub sy: SparseMatrix,
    pub sz: SparseMatrix,
    pub s_plus: SparseMatrix,
    pub s_minus: SparseMatrix,
    pub identity: SparseMatrix,
}

impl OperatorSet {
    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.fock_dim
    }

    /// Qubit operator ⊗ resonator identity, dense.
    pub fn qubit_composite(&self, qubit_op: &ComplexMatrix) -> Result<ComplexMatrix> {
        tensor(qubit_op, &ComplexMatrix::identity(self.fock_dim))
    }

    /// Qubit identity ⊗ resonator operator, dense.
    pub fn resonator_composite(&self, res_op: &ComplexMatrix) -> Result<ComplexMatrix> {
        tensor(&ComplexMatrix::identity(2), res_op)
    }
}

pub fn build_operator_set(fock_dim: usize) -> Result<OperatorSet> {
    if fock_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "fock_dim must be at least 2, got {fock_dim}"
        )));
    }
    let n = fock_dim;
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let a_dag = a.adjoint();
    let x_tilde = &a + &a_dag;
    let p_tilde = (&a - &a_dag).scale(-I);
    let n_op = &a_dag * &a;

    let id2 = ComplexMatrix::identity(2);
    let idn = ComplexMatrix::identity(n);
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let (sp, sm) = (sigma_plus(), sigma_minus());
    let sparse = |q: &ComplexMatrix, r: &ComplexMatrix| -> Result<SparseMatrix> {
        Ok(SparseMatrix::from_dense(&tensor(q, r)?))
    };

    Ok(OperatorSet {
        fock_dim: n,
        x: sparse(&id2, &x_tilde)?,
        p: sparse(&id2, &p_tilde)?,
        n: sparse(&id2, &n_op)?,
        x_sq: sparse(&id2, &(&x_tilde * &x_tilde))?,
        sz_x: sparse(&sz, &x_tilde)?,
        sx: sparse(&sx, &idn)?,
        sy: sparse(&sy, &idn)?,
        sz: sparse(&sz, &idn)?,
        s_plus: sparse(&sp, &idn)?,
        s_minus: sparse(&sm, &idn)?,
        identity: SparseMatrix::identity(2 * n),
        a,
        a_dag,
        x_tilde,
        p_tilde,
        n_op,
        sigma_x: sx,
        sigma_y: sy,
        sigma_z: sz,
        sigma_plus: sp,
        sigma_minus: sm,
    })
}
