use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{noise_generator, NoiseChannel, NoiseGenerator, SimParams};
use crate::qops::{build_operator_set, hermitize_and_normalize_in_place, ComplexMatrix, DensityMatrix, OperatorSet, SparseMatrix};

use super::trajectory::TrajectoryRecord;

/// How the unconditioned evolution treats the `(γ/2)<p> X` feedback term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DampingTreatment {
    /// Linear replacement: amplitude damping at rate `γ/2` on `a` plus the
    /// squeezing Hamiltonian `(γ/8)(XP + PX)`. Every state then sees
    /// `d<x> = 2π<p> + ...` and `d<p> = -γ<p> + ...`, the same first-moment
    /// equations as a conditioned trajectory, and each phase branch is
    /// damped on its own.
    #[default]
    Linear,
    /// Keep the term with `<p>` taken from the evolving state itself. Exact
    /// for the first moments, but a two-branch mixture has `<p> ≈ 0`, so
    /// the branches themselves go undamped.
    MeanField,
    /// Drop the term (`γ = 0`).
    Off,
}

/// Hamiltonian terms on one shared pattern; combined per evaluation.
#[derive(Clone, Debug)]
struct HamiltonianTerms {
    h: SparseMatrix,
    fixed: Vec<Complex64>,
    coupling: Vec<Complex64>,
    damping: Vec<Complex64>,
}

impl HamiltonianTerms {
    fn new(params: &SimParams, ops: &OperatorSet, squeeze: &SparseMatrix) -> Result<Self> {
        let h = SparseMatrix::union_pattern(&[&ops.n, &ops.sz_x, &ops.sz, &ops.sx, &ops.x, squeeze])?;
        let n = ops.n.values_on_pattern(&h)?;
        let sz = ops.sz.values_on_pattern(&h)?;
        let sx = ops.sx.values_on_pattern(&h)?;
        let sq = squeeze.values_on_pattern(&h)?;
        let fixed = (0..h.nnz())
            .map(|i| params.omega_r() * n[i] + params.omega_c * sz[i] + params.omega_j * sx[i] + sq[i])
            .collect();
        Ok(Self {
            fixed,
            coupling: ops.sz_x.values_on_pattern(&h)?,
            damping: ops.x.values_on_pattern(&h)?,
            h,
        })
    }

    fn set(&mut self, coupling: f64, damping: f64) {
        for (i, v) in self.h.values_mut().iter_mut().enumerate() {
            *v = self.fixed[i] + coupling * self.coupling[i] + damping * self.damping[i];
        }
    }
}

/// Right-hand side of the unconditioned master equation
/// `dρ/dt = -i[H, ρ] - k[X, [X, ρ]] + L_noise(ρ)`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    params: SimParams,
    damping: DampingTreatment,
    k_tot: f64,
    terms: HamiltonianTerms,
    x: SparseMatrix,
    x_sq: SparseMatrix,
    p: SparseMatrix,
    noise: NoiseGenerator,
}

impl LindbladGenerator {
    pub fn new(params: &SimParams, ops: &OperatorSet, damping: DampingTreatment) -> Result<Self> {
        params.validate()?;
        if params.mu_fb > 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu_fb",
                reason: "the unconditioned evolution has no qubit feedback; set mu_fb = 0".into(),
            });
        }
        if params.fock_dim != ops.fock_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("fock_dim {}", params.fock_dim),
                found: format!("fock_dim {}", ops.fock_dim),
            });
        }
        let d = ops.dim();
        let mut noise = noise_generator(params, ops)?;
        let mut squeeze = SparseMatrix::from_dense(&ComplexMatrix::zeros(d, d));
        if damping == DampingTreatment::Linear && params.gamma_fb > 0.0 {
            let a = SparseMatrix::from_dense(&ops.resonator_composite(&ops.a)?);
            // (γ/8)(XP + PX) = -i(γ/4)(a² - a†²)
            let a2 = a.matmul(&a).to_dense();
            let gen = a2.try_sub(&a2.adjoint())?;
            squeeze = SparseMatrix::from_dense(&gen.scale(Complex64::new(0.0, -0.25 * params.gamma_fb)));
            noise.channels.push(NoiseChannel::new(0.5 * params.gamma_fb, a));
        }
        Ok(Self {
            params: params.clone(),
            damping,
            k_tot: params.k_meas + params.k_therm,
            terms: HamiltonianTerms::new(params, ops, &squeeze)?,
            x: ops.x.clone(),
            x_sq: ops.x_sq.clone(),
            p: ops.p.clone(),
            noise,
        })
    }

    /// `dρ/dt` at time `t`.
    pub fn rhs(&mut self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let d = rho.rows();
        let p_mean = match self.damping {
            DampingTreatment::MeanField => self.p.trace_product(rho).re,
            DampingTreatment::Linear | DampingTreatment::Off => 0.0,
        };
        let coupling = self.params.lambda0 * (self.params.omega_r() * t).cos();
        self.terms.set(coupling, 0.5 * self.params.gamma_fb * p_mean);

        let mut out = self.noise.apply(rho);
        let h_rho = self.terms.h.mul_dense(rho);
        let rho_h = self.terms.h.dense_mul(rho);
        let minus_i = Complex64::new(0.0, -1.0);
        for (o, (a, b)) in out.as_mut_slice().iter_mut().zip(h_rho.as_slice().iter().zip(rho_h.as_slice())) {
            *o += minus_i * (a - b);
        }
        if self.k_tot > 0.0 {
            // [X, [X, ρ]] = X²ρ + ρX² - 2XρX.
            let x2_rho = self.x_sq.mul_dense(rho);
            let rho_x2 = self.x_sq.dense_mul(rho);
            let x_rho_x = self.x.dense_mul(&self.x.mul_dense(rho));
            let k = self.k_tot;
            for i in 0..d * d {
                out.as_mut_slice()[i] -= k
                    * (x2_rho.as_slice()[i] + rho_x2.as_slice()[i] - 2.0 * x_rho_x.as_slice()[i]);
            }
        }
        out
    }
}

fn axpy_into(out: &mut ComplexMatrix, base: &ComplexMatrix, h: f64, k: &ComplexMatrix) {
    for ((o, b), v) in out.as_mut_slice().iter_mut().zip(base.as_slice()).zip(k.as_slice()) {
        *o = b + h * v;
    }
}

/// Unconditioned (ensemble-averaged) evolution by classical RK4 at step
/// `params.dt`, sampled like [`super::simulate_trajectory`]. The record
/// series is all zeros.
pub fn lindblad_evolve(rho0: &DensityMatrix, params: &SimParams) -> Result<TrajectoryRecord> {
    lindblad_evolve_with(rho0, params, DampingTreatment::default())
}

pub fn lindblad_evolve_with(
    rho0: &DensityMatrix,
    params: &SimParams,
    damping: DampingTreatment,
) -> Result<TrajectoryRecord> {
    let ops = build_operator_set(params.fock_dim)?;
    let mut gen = LindbladGenerator::new(params, &ops, damping)?;
    let dt = params.dt;
    let d = rho0.dim();
    let omega_r = params.omega_r();
    let stride = params.output_stride as u64;

    let mut out = TrajectoryRecord::with_capacity(params.n_samples(), params, rho0);
    out.record_noise_infinite = true;
    let mut rho = rho0.matrix().clone();
    let mut stage = ComplexMatrix::zeros(d, d);
    out.push_sample(0.0, rho0, &ops, omega_r, 0.0);

    for step in 0..params.n_steps() {
        let t = step as f64 * dt;
        let k1 = gen.rhs(&rho, t);
        axpy_into(&mut stage, &rho, 0.5 * dt, &k1);
        let k2 = gen.rhs(&stage, t + 0.5 * dt);
        axpy_into(&mut stage, &rho, 0.5 * dt, &k2);
        let k3 = gen.rhs(&stage, t + 0.5 * dt);
        axpy_into(&mut stage, &rho, dt, &k3);
        let k4 = gen.rhs(&stage, t + dt);
        let w = dt / 6.0;
        for (i, r) in rho.as_mut_slice().iter_mut().enumerate() {
            *r += w * (k1.as_slice()[i] + 2.0 * k2.as_slice()[i] + 2.0 * k3.as_slice()[i] + k4.as_slice()[i]);
        }
        let t_next = (step + 1) as f64 * dt;
        hermitize_and_normalize_in_place(&mut rho, step + 1, t_next)?;
        if (step + 1) % stride == 0 {
            let state = DensityMatrix::from_matrix_unchecked(rho.clone());
            out.push_sample(t_next, &state, &ops, omega_r, 0.0);
        }
    }
    out.final_state = DensityMatrix::from_matrix_unchecked(rho);
    Ok(out)
}
