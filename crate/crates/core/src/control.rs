//! Feedback laws: momentum damping of the resonator and Bloch-vector
//! rotation of the Cooper-pair box toward a target state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SimParams;
use crate::qops::{ComplexMatrix, DensityMatrix, OperatorSet};

/// Below this norm the steering axis is undefined and feedback stalls.
pub const AXIS_DEGENERACY_TOL: f64 = 1e-9;

/// `(γ/2) <p> X`. Adding it to the Hamiltonian gives `d<p>/dt` a `-γ<p>`
/// contribution.
pub fn momentum_damping_hamiltonian(p_mean: f64, gamma_fb: f64, ops: &OperatorSet) -> ComplexMatrix {
    ops.x.to_dense().scale_real(0.5 * gamma_fb * p_mean)
}

/// Strength and target of the qubit feedback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitFeedbackSetting {
    pub mu: f64,
    pub target: [f64; 3],
}

impl QubitFeedbackSetting {
    /// Steers toward `|->`, the south pole.
    pub fn toward_minus(mu: f64) -> Result<Self> {
        Self::new(mu, [0.0, 0.0, -1.0])
    }

    pub fn new(mu: f64, target: [f64; 3]) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu_fb",
                reason: format!("must be >= 0, got {mu}"),
            });
        }
        let norm = dot(target, target).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "target",
                reason: format!("must be a unit vector, |target| = {norm}"),
            });
        }
        Ok(Self { mu, target })
    }

    /// The controller implied by `params.mu_fb`, if enabled.
    pub fn from_params(params: &SimParams) -> Result<Option<Self>> {
        if params.mu_fb > 0.0 {
            Self::toward_minus(params.mu_fb).map(Some)
        } else {
            Ok(None)
        }
    }
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rotation axis in the x–z plane that turns `s` toward `target` fastest:
/// the normalized x–z projection of `s × target`. `None` at degeneracies.
pub fn feedback_axis(s: [f64; 3], target: [f64; 3]) -> Option<[f64; 3]> {
    let c = cross(s, target);
    let norm = (c[0] * c[0] + c[2] * c[2]).sqrt();
    (norm >= AXIS_DEGENERACY_TOL).then(|| [c[0] / norm, 0.0, c[2] / norm])
}

/// `μ(n_x Σx + n_z Σz)` for the axis chosen from the reduced Bloch vector of
/// `rho`; the zero matrix when the axis is degenerate.
pub fn qubit_feedback_hamiltonian(
    rho: &DensityMatrix,
    setting: &QubitFeedbackSetting,
    ops: &OperatorSet,
) -> ComplexMatrix {
    let d = ops.dim();
    match feedback_axis(rho.bloch_vector(), setting.target) {
        Some(n) => {
            let sx = ops.sx.to_dense().scale_real(setting.mu * n[0]);
            let sz = ops.sz.to_dense().scale_real(setting.mu * n[2]);
            &sx + &sz
        }
        None => ComplexMatrix::zeros(d, d),
    }
}

/// `exp(-i μ dt (n·σ))` as a 2×2 matrix, row-major.
pub fn qubit_rotation(axis: [f64; 3], mu: f64, dt: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (mu * dt).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let (nx, ny, nz) = (axis[0], axis[1], axis[2]);
    [
        [c - i * s * nz, -i * s * Complex64::new(nx, -ny)],
        [-i * s * Complex64::new(nx, ny), c + i * s * nz],
    ]
}

/// `ρ ← (U ⊗ I) ρ (U ⊗ I)†` on a `2N x 2N` matrix.
pub fn apply_qubit_unitary(rho: &mut ComplexMatrix, u: &[[Complex64; 2]; 2]) {
    let d = rho.rows();
    let n = d / 2;
    let data = rho.as_mut_slice();
    // Left: rows (k, n+k) mix.
    for k in 0..n {
        for j in 0..d {
            let a = data[k * d + j];
            let b = data[(n + k) * d + j];
            data[k * d + j] = u[0][0] * a + u[0][1] * b;
            data[(n + k) * d + j] = u[1][0] * a + u[1][1] * b;
        }
    }
    // Right: columns (k, n+k) mix with U†.
    let (c00, c01, c10, c11) = (u[0][0].conj(), u[0][1].conj(), u[1][0].conj(), u[1][1].conj());
    for i in 0..d {
        let row = &mut data[i * d..(i + 1) * d];
        for k in 0..n {
            let a = row[k];
            let b = row[n + k];
            row[k] = a * c00 + b * c01;
            row[n + k] = a * c10 + b * c11;
        }
    }
}
