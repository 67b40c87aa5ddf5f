use num_complex::Complex64;

use crate::control::{apply_qubit_unitary, feedback_axis, qubit_rotation, QubitFeedbackSetting};
use crate::error::{Error, Result};
use crate::model::{coupling_at, effective_rates, noise_generator, NoiseChannel, SimParams};
use super::planes::{Diagonals, Planes};
use crate::qops::{ComplexMatrix, DensityMatrix, OperatorSet, SparseMatrix, TRACE_GUARD};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Result of a single conditioned step.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub rho_next: DensityMatrix,
    /// `dr = <X> dt + dW / √(8 η_tot k_tot)`.
    pub record_increment: f64,
    pub dw_used: f64,
    /// Set when `η_tot k_tot = 0`: the record carries no information and
    /// `record_increment` holds only `<X> dt`.
    pub record_noise_infinite: bool,
}

/// Means of the pre-step state and the record increment of one step.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub x_mean: f64,
    pub p_mean: f64,
    pub record_increment: f64,
}

/// Values of the operators that make up the measurement Kraus operator,
/// laid out on one shared sparsity pattern.
#[derive(Clone, Debug)]
struct KrausBasis {
    identity: Vec<Complex64>,
    x: Vec<Complex64>,
    sz_x: Vec<Complex64>,
    x_sq: Vec<Complex64>,
    sx: Vec<Complex64>,
    /// `Σ rate c†c` over the qubit noise channels.
    noise_cc: Vec<Complex64>,
}

/// Conditioned integrator for the measured resonator + Cooper-pair box.
///
/// Each step of length `dt`:
///
/// 1. measurement, coupling, resonator feedback and qubit noise as a
///    first-order Kraus map
///    `ρ ← M ρ M† + (1-η) 2k X ρ X dt + Σ 2γ_c c ρ c† dt`, with
///    `M = I - (iH₁ + k X² + Σ γ_c c†c) dt + √(2ηk) X dy + ηk X² (dy² - dt)`
///    and `dy = 2√(2ηk) <X> dt + dW`;
/// 2. exact free evolution under the diagonal `ω_R a†a + ω_C σz`;
/// 3. the exact qubit feedback rotation, when a controller is attached;
/// 4. normalization.
///
/// The Hermitian products are formed on the upper triangle only and
/// mirrored, so the stored state is exactly Hermitian after every step.
///
/// To first order in `dt` this is the Itô stochastic master equation with
/// innovation `√(2ηk)(Xρ + ρX - 2<X>ρ) dW`; unlike a plain Euler–Maruyama
/// update the map is completely positive, so trace, Hermiticity and
/// positivity survive long runs.
#[derive(Clone, Debug)]
pub struct SmeStepper {
    params: SimParams,
    k_tot: f64,
    eta_tot: f64,
    x: SparseMatrix,
    p: SparseMatrix,
    kraus: SparseMatrix,
    basis: KrausBasis,
    kraus_values: Vec<Complex64>,
    kraus_dia: Diagonals,
    x_dia: Diagonals,
    noise: Vec<NoiseChannel>,
    noise_dia: Vec<Diagonals>,
    /// `exp(-i (E_i - E_j) dt)` for the diagonal free Hamiltonian.
    phases: Planes,
    controller: Option<QubitFeedbackSetting>,
    rho_p: Planes,
    s: Planes,
    acc: Planes,
    out: ComplexMatrix,
}

impl SmeStepper {
    pub fn new(params: &SimParams, ops: &OperatorSet, controller: Option<QubitFeedbackSetting>) -> Result<Self> {
        params.validate()?;
        if params.fock_dim != ops.fock_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("fock_dim {}", params.fock_dim),
                found: format!("fock_dim {}", ops.fock_dim),
            });
        }
        let (k_tot, eta_tot) = effective_rates(params);
        let noise: Vec<NoiseChannel> = noise_generator(params, ops)?
            .channels
            .into_iter()
            .filter(|c| c.rate > 0.0)
            .collect();

        let mut parts: Vec<&SparseMatrix> = vec![&ops.identity, &ops.x, &ops.sz_x, &ops.x_sq];
        if params.omega_j != 0.0 {
            parts.push(&ops.sx);
        }
        let mut noise_cc_sum = SparseMatrix::from_dense(&ComplexMatrix::zeros(ops.dim(), ops.dim()));
        if !noise.is_empty() {
            let mut dense = ComplexMatrix::zeros(ops.dim(), ops.dim());
            for ch in &noise {
                dense = &dense + &ch.op_dag_op.to_dense().scale_real(ch.rate);
            }
            noise_cc_sum = SparseMatrix::from_dense(&dense);
        }
        parts.push(&noise_cc_sum);
        let kraus = SparseMatrix::union_pattern(&parts)?;
        let on = |m: &SparseMatrix| m.values_on_pattern(&kraus);
        let basis = KrausBasis {
            identity: on(&ops.identity)?,
            x: on(&ops.x)?,
            sz_x: on(&ops.sz_x)?,
            x_sq: on(&ops.x_sq)?,
            sx: if params.omega_j != 0.0 { on(&ops.sx)? } else { vec![ZERO; kraus.nnz()] },
            noise_cc: on(&noise_cc_sum)?,
        };

        let d = ops.dim();
        let n = ops.fock_dim;
        let energies: Vec<f64> = (0..d)
            .map(|i| {
                let level = (i % n) as f64;
                let qubit = if i < n { 1.0 } else { -1.0 };
                params.omega_r() * level + params.omega_c * qubit
            })
            .collect();
        let phases = Planes::from_fn(d, |i, j| Complex64::from_polar(1.0, -(energies[i] - energies[j]) * params.dt));

        Ok(Self {
            params: params.clone(),
            k_tot,
            eta_tot,
            x: ops.x.clone(),
            p: ops.p.clone(),
            kraus_values: vec![ZERO; kraus.nnz()],
            kraus_dia: Diagonals::new(&kraus),
            x_dia: Diagonals::new(&ops.x),
            noise_dia: noise.iter().map(|c| Diagonals::new(&c.op)).collect(),
            kraus,
            basis,
            noise,
            phases,
            controller: controller.filter(|c| c.mu > 0.0),
            rho_p: Planes::zeros(d),
            s: Planes::zeros(d),
            acc: Planes::zeros(d),
            out: ComplexMatrix::zeros(d, d),
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// `(k_tot, η_tot)` used by this stepper.
    pub fn rates(&self) -> (f64, f64) {
        (self.k_tot, self.eta_tot)
    }

    /// True when the record carries no information (`η_tot k_tot = 0`).
    pub fn record_noise_infinite(&self) -> bool {
        self.eta_tot * self.k_tot == 0.0
    }

    /// Advances `rho` from `t` to `t + dt` given the Wiener increment `dw`
    /// (variance `dt`). `step` labels divergence errors.
    pub fn step(&mut self, rho: &mut DensityMatrix, t: f64, dw: f64, step: u64) -> Result<StepInfo> {
        let dt = self.params.dt;
        let k = self.k_tot;
        let ek = self.eta_tot * k;
        let sq = (2.0 * ek).sqrt();

        let rho_m = rho.matrix();
        let x_mean = self.x.trace_product(rho_m).re;
        let p_mean = self.p.trace_product(rho_m).re;
        if !(x_mean.is_finite() && p_mean.is_finite()) {
            return Err(Error::IntegrationDiverged {
                step,
                time: t,
                trace: rho.trace(),
            });
        }
        let s_pre = self.controller.map(|_| rho.bloch_vector());

        let dy = 2.0 * sq * x_mean * dt + dw;
        let g = 0.5 * self.params.gamma_fb * p_mean;
        let c_x = -I * (dt * g) + sq * dy;
        let c_zx = -I * (dt * coupling_at(&self.params, t));
        let c_x2 = Complex64::new(-k * dt + ek * (dy * dy - dt), 0.0);
        let c_sx = -I * (dt * self.params.omega_j);
        let b = &self.basis;
        for (idx, v) in self.kraus_values.iter_mut().enumerate() {
            *v = b.identity[idx] + c_x * b.x[idx] + c_zx * b.sz_x[idx] + c_x2 * b.x_sq[idx] + c_sx * b.sx[idx]
                - dt * b.noise_cc[idx];
        }

        // M ρ M†, upper triangle only.
        self.rho_p.load(rho_m);
        self.acc.clear();
        self.kraus_dia.set_values(&self.kraus_values);
        self.kraus_dia
            .left_product(&self.kraus, &self.kraus_values, &self.rho_p, &mut self.s);
        self.kraus_dia.right_adjoint_upper(1.0, &self.s, &mut self.acc);

        let unobserved = (1.0 - self.eta_tot) * 2.0 * k * dt;
        if unobserved > 0.0 {
            self.x_dia.left_product(&self.x, self.x.values(), &self.rho_p, &mut self.s);
            self.x_dia.right_adjoint_upper(unobserved, &self.s, &mut self.acc);
        }
        for (ch, dia) in self.noise.iter().zip(&self.noise_dia) {
            dia.left_product(&ch.op, ch.op.values(), &self.rho_p, &mut self.s);
            dia.right_adjoint_upper(2.0 * ch.rate * dt, &self.s, &mut self.acc);
        }

        // Free evolution, normalization and Hermitian completion.
        let tr = self.acc.trace_re();
        if !tr.is_finite() || tr < TRACE_GUARD.0 || tr > TRACE_GUARD.1 {
            return Err(Error::IntegrationDiverged {
                step,
                time: t + dt,
                trace: tr,
            });
        }
        // A non-finite entry reaches the trace within a few steps through
        // the banded products; recorded samples are checked in full.
        self.acc.hermitian_fill(&self.phases, 1.0 / tr, self.out.as_mut_slice());
        if let (Some(ctrl), Some(s)) = (self.controller, s_pre) {
            if let Some(axis) = feedback_axis(s, ctrl.target) {
                apply_qubit_unitary(&mut self.out, &qubit_rotation(axis, ctrl.mu, dt));
            }
        }
        std::mem::swap(rho.matrix_mut(), &mut self.out);

        let record_increment = if ek > 0.0 {
            x_mean * dt + dw / (8.0 * ek).sqrt()
        } else {
            x_mean * dt
        };
        Ok(StepInfo {
            x_mean,
            p_mean,
            record_increment,
        })
    }
}

/// One conditioned step from `rho` at time `t` with Wiener increment `dw`.
///
/// Convenience wrapper that builds a [`SmeStepper`]; long runs should keep
/// a stepper alive instead.
pub fn sme_step(
    rho: &DensityMatrix,
    t: f64,
    params: &SimParams,
    ops: &OperatorSet,
    dw: f64,
    controller: Option<QubitFeedbackSetting>,
) -> Result<StepOutput> {
    let mut stepper = SmeStepper::new(params, ops, controller)?;
    let mut next = rho.clone();
    let info = stepper.step(&mut next, t, dw, 0)?;
    Ok(StepOutput {
        rho_next: next,
        record_increment: info.record_increment,
        dw_used: dw,
        record_noise_infinite: stepper.record_noise_infinite(),
    })
}
