//! System model: parameters, the time-dependent Hamiltonian, qubit noise
//! generators, thermal rates and steady-state predictions.
//!
//! Units are dimensionless throughout: `ħ = m = 1`, time in resonator
//! periods `1/f`, `ω_R = 2π f`, and resonator quadratures `x = a + a†`,
//! `p = -i(a - a†)`. A measurement strength `k` in SI units maps to
//! `k̃ = k ħ / (2 m ω_R)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qops::{coherent_state, ComplexMatrix, DensityMatrix, OperatorSet, SparseMatrix};

/// Noise acting on the Cooper-pair box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QubitNoiseModel {
    /// `2κ(Σx ρ Σx - ρ)`.
    SigmaXDephasing,
    /// Thermal emission/absorption with mean occupancy `xi`.
    Thermal { xi: f64 },
}

/// Every knob of a run. Rates are in units of `f`, times in units of `1/f`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimParams {
    /// Resonator frequency; the time unit, fixed to 1.
    pub f: f64,
    pub lambda0: f64,
    pub omega_c: f64,
    pub omega_j: f64,
    pub gamma_fb: f64,
    /// Dimensionless measurement strength `k̃`.
    pub k_meas: f64,
    /// Dimensionless thermal information rate.
    pub k_therm: f64,
    pub eta_det: f64,
    /// Replaces the derived `eta_tot` when set.
    pub eta_tot_override: Option<f64>,
    pub kappa: f64,
    pub qubit_noise_model: QubitNoiseModel,
    /// Cooper-pair-box feedback strength; 0 disables.
    pub mu_fb: f64,
    pub dt: f64,
    pub t_final: f64,
    pub fock_dim: usize,
    pub seed: u64,
    pub output_stride: usize,
    /// Keep the phase at every integration step, not only at recorded samples.
    pub full_rate_theta: bool,
}

impl Default for SimParams {
    /// Parameters of the reference configuration: `λ0 = 0.5`, `γ = 0.25`,
    /// `k̃ = 0.01`, `κ = 0.01`, `η = 0.7`, `dt = 1/2500`.
    fn default() -> Self {
        Self {
            f: 1.0,
            lambda0: 0.5,
            omega_c: 10.0,
            omega_j: 0.0,
            gamma_fb: 0.25,
            k_meas: 0.01,
            k_therm: 0.0,
            eta_det: 0.7,
            eta_tot_override: None,
            kappa: 0.01,
            qubit_noise_model: QubitNoiseModel::SigmaXDephasing,
            mu_fb: 0.0,
            dt: 1.0 / 2500.0,
            t_final: 500.0,
            fock_dim: 30,
            seed: 0,
            output_stride: 50,
            full_rate_theta: false,
        }
    }
}

fn check_rate(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got {v}"),
        });
    }
    Ok(())
}

fn check_fraction(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{name} ∈ [0,1] required, got {v}"),
        });
    }
    Ok(())
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.f != 1.0 {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: "the resonator frequency is the time unit and must be 1".into(),
            });
        }
        check_fraction("eta_det", self.eta_det)?;
        if let Some(e) = self.eta_tot_override {
            check_fraction("eta_tot_override", e)?;
        }
        for (name, v) in [
            ("lambda0", self.lambda0),
            ("omega_c", self.omega_c),
            ("omega_j", self.omega_j),
            ("gamma_fb", self.gamma_fb),
            ("k_meas", self.k_meas),
            ("k_therm", self.k_therm),
            ("kappa", self.kappa),
            ("mu_fb", self.mu_fb),
        ] {
            check_rate(name, v)?;
        }
        if let QubitNoiseModel::Thermal { xi } = self.qubit_noise_model {
            check_rate("xi", xi)?;
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be > 0, got {}", self.dt),
            });
        }
        if !self.t_final.is_finite() || self.t_final < 0.0 || (self.t_final > 0.0 && self.t_final < self.dt) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("must be 0 or at least dt, got {}", self.t_final),
            });
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "fock_dim",
                reason: format!("must be at least 2, got {}", self.fock_dim),
            });
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "output_stride",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    #[inline]
    pub fn omega_r(&self) -> f64 {
        2.0 * PI * self.f
    }

    /// Number of integration steps covering `t_final`.
    pub fn n_steps(&self) -> u64 {
        ((self.t_final / self.dt) + 1e-9).floor() as u64
    }

    /// Number of recorded samples, including `t = 0`.
    pub fn n_samples(&self) -> usize {
        (self.n_steps() / self.output_stride as u64) as usize + 1
    }

    pub fn effective_rates(&self) -> (f64, f64) {
        effective_rates(self)
    }
}

/// `(k_tot, η_tot)` with `k_tot = k + k_therm` and `η_tot = (k / k_tot) η`.
pub fn effective_rates(params: &SimParams) -> (f64, f64) {
    let k_tot = params.k_meas + params.k_therm;
    if let Some(eta) = params.eta_tot_override {
        return (k_tot, eta);
    }
    let eta_tot = if params.k_therm == 0.0 || k_tot == 0.0 {
        params.eta_det
    } else {
        params.k_meas / k_tot * params.eta_det
    };
    (k_tot, eta_tot)
}

/// Dimensionless thermal information rate `(Γ/4) coth(r/2)` for damping
/// rate `Γ` and `r = ħω_R / (k_B T)`.
pub fn thermal_measurement_rate(gamma_th: f64, temperature_ratio: f64) -> Result<f64> {
    check_rate("gamma_th", gamma_th)?;
    if temperature_ratio.is_nan() || temperature_ratio <= 0.0 {
        return Err(Error::Domain(format!(
            "temperature ratio must be > 0, got {temperature_ratio}"
        )));
    }
    Ok(gamma_th / 4.0 / (temperature_ratio / 2.0).tanh())
}

/// `H(t)` in units of `f`:
/// `ω_R a†a + λ0 cos(ω_R t) σz x + ω_C σz + ω_J σx + (γ/2) <p> x`.
///
/// The feedback term makes `d<p>/dt` pick up `-γ <p>`.
pub fn hamiltonian_at(params: &SimParams, ops: &OperatorSet, t: f64, p_mean: f64) -> Result<ComplexMatrix> {
    if params.fock_dim != ops.fock_dim {
        return Err(Error::DimensionMismatch {
            expected: format!("fock_dim {}", params.fock_dim),
            found: format!("fock_dim {}", ops.fock_dim),
        });
    }
    Ok(hamiltonian_sparse(params, ops, t, p_mean).to_dense())
}

pub(crate) fn coupling_at(params: &SimParams, t: f64) -> f64 {
    params.lambda0 * (params.omega_r() * t).cos()
}

pub(crate) fn hamiltonian_sparse(params: &SimParams, ops: &OperatorSet, t: f64, p_mean: f64) -> SparseMatrix {
    let terms: [(&SparseMatrix, f64); 5] = [
        (&ops.n, params.omega_r()),
        (&ops.sz_x, coupling_at(params, t)),
        (&ops.sz, params.omega_c),
        (&ops.sx, params.omega_j),
        (&ops.x, 0.5 * params.gamma_fb * p_mean),
    ];
    let ops_list: Vec<&SparseMatrix> = terms.iter().map(|(o, _)| *o).collect();
    let mut h = SparseMatrix::union_pattern(&ops_list).expect("operators share a dimension");
    let mut values = vec![Complex64::new(0.0, 0.0); h.nnz()];
    for (op, c) in terms {
        if c == 0.0 {
            continue;
        }
        let v = op.values_on_pattern(&h).expect("pattern is a union");
        values.iter_mut().zip(v).for_each(|(a, b)| *a += b * c);
    }
    h.values_mut().copy_from_slice(&values);
    h
}

/// One Lindblad channel `rate * (2 c ρ c† - {c†c, ρ})`.
#[derive(Clone, Debug)]
pub struct NoiseChannel {
    pub rate: f64,
    pub op: SparseMatrix,
    pub op_dag: SparseMatrix,
    pub op_dag_op: SparseMatrix,
}

impl NoiseChannel {
    pub fn new(rate: f64, op: SparseMatrix) -> Self {
        let op_dag = op.adjoint();
        let op_dag_op = op_dag.matmul(&op);
        Self {
            rate,
            op,
            op_dag,
            op_dag_op,
        }
    }
}

/// Sum of Lindblad channels in the convention
/// `rate * (2 c ρ c† - c†c ρ - ρ c†c)`, i.e. twice the standard dissipator.
#[derive(Clone, Debug, Default)]
pub struct NoiseGenerator {
    pub channels: Vec<NoiseChannel>,
}

impl NoiseGenerator {
    pub fn is_empty(&self) -> bool {
        self.channels.iter().all(|c| c.rate == 0.0)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.rows();
        let mut out = ComplexMatrix::zeros(d, d);
        let mut t1 = ComplexMatrix::zeros(d, d);
        let mut t2 = ComplexMatrix::zeros(d, d);
        for ch in self.channels.iter().filter(|c| c.rate != 0.0) {
            ch.op.mul_dense_into(rho, &mut t1);
            ch.op_dag.dense_mul_into(&t1, &mut t2);
            let jump = t2.clone();
            ch.op_dag_op.mul_dense_into(rho, &mut t1);
            ch.op_dag_op.dense_mul_into(rho, &mut t2);
            let out_s = out.as_mut_slice();
            for (k, o) in out_s.iter_mut().enumerate() {
                *o += ch.rate * (2.0 * jump.as_slice()[k] - t1.as_slice()[k] - t2.as_slice()[k]);
            }
        }
        out
    }

    /// Matrix of the superoperator acting on row-major `vec(ρ)`.
    pub fn superoperator(&self, dim: usize) -> ComplexMatrix {
        let d2 = dim * dim;
        let mut s = ComplexMatrix::zeros(d2, d2);
        for col in 0..d2 {
            let mut e = ComplexMatrix::zeros(dim, dim);
            e.as_mut_slice()[col] = Complex64::new(1.0, 0.0);
            let img = self.apply(&e);
            for (row, v) in img.as_slice().iter().enumerate() {
                s[(row, col)] = *v;
            }
        }
        s
    }
}

/// `L(ρ) = 2κ(Σx ρ Σx - ρ)`, with `Σx = σx ⊗ I`.
pub fn dephasing_generator(kappa: f64, ops: &OperatorSet) -> Result<NoiseGenerator> {
    check_rate("kappa", kappa)?;
    Ok(NoiseGenerator {
        channels: vec![NoiseChannel::new(kappa, ops.sx.clone())],
    })
}

/// `κ(ξ+1)(2Σ-ρΣ+ - {Σ+Σ-, ρ}) + κξ(2Σ+ρΣ- - {Σ-Σ+, ρ})`.
pub fn thermal_qubit_generator(kappa: f64, xi: f64, ops: &OperatorSet) -> Result<NoiseGenerator> {
    check_rate("kappa", kappa)?;
    check_rate("xi", xi)?;
    Ok(NoiseGenerator {
        channels: vec![
            NoiseChannel::new(kappa * (xi + 1.0), ops.s_minus.clone()),
            NoiseChannel::new(kappa * xi, ops.s_plus.clone()),
        ],
    })
}

/// Large-occupancy form of the thermal generator:
/// `κξ(Σx ρ Σx + Σy ρ Σy - 2ρ)`.
pub fn thermal_high_occupancy_generator(kappa: f64, xi: f64, ops: &OperatorSet) -> Result<NoiseGenerator> {
    check_rate("kappa", kappa)?;
    check_rate("xi", xi)?;
    Ok(NoiseGenerator {
        channels: vec![
            NoiseChannel::new(0.5 * kappa * xi, ops.sx.clone()),
            NoiseChannel::new(0.5 * kappa * xi, ops.sy.clone()),
        ],
    })
}

pub fn noise_generator(params: &SimParams, ops: &OperatorSet) -> Result<NoiseGenerator> {
    match params.qubit_noise_model {
        QubitNoiseModel::SigmaXDephasing => dephasing_generator(params.kappa, ops),
        QubitNoiseModel::Thermal { xi } => thermal_qubit_generator(params.kappa, xi, ops),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitSign {
    /// `σz = +1`.
    Plus,
    /// `σz = -1`.
    Minus,
}

impl QubitSign {
    pub fn value(self) -> f64 {
        match self {
            QubitSign::Plus => 1.0,
            QubitSign::Minus => -1.0,
        }
    }

    pub fn bloch(self) -> [f64; 3] {
        [0.0, 0.0, self.value()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    /// Oscillation amplitude of `<x>`.
    pub amplitude: f64,
    /// Locked value of the rotating-frame phase (as returned by
    /// [`crate::analysis::phase_of`]).
    pub phase: f64,
}

/// Driven, damped steady state with the qubit frozen in `sign`:
/// amplitude `2λ0/γ` and phase `-sign·π/2`.
pub fn steady_state_prediction(params: &SimParams, sign: QubitSign) -> Result<SteadyState> {
    if params.gamma_fb <= 0.0 {
        return Err(Error::UndefinedSteadyState);
    }
    check_rate("lambda0", params.lambda0)?;
    Ok(SteadyState {
        amplitude: 2.0 * params.lambda0 / params.gamma_fb,
        phase: -sign.value() * FRAC_PI_2,
    })
}

/// Initial qubit preparation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QubitInit {
    /// Equal superposition `(|+> + |->)/√2`.
    Superposition,
    Plus,
    Minus,
    Bloch([f64; 3]),
}

impl QubitInit {
    pub fn bloch(self) -> [f64; 3] {
        match self {
            QubitInit::Superposition => [1.0, 0.0, 0.0],
            QubitInit::Plus => [0.0, 0.0, 1.0],
            QubitInit::Minus => [0.0, 0.0, -1.0],
            QubitInit::Bloch(s) => s,
        }
    }
}

/// Product initial state: qubit preparation ⊗ coherent resonator state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialState {
    pub alpha: Complex64,
    pub qubit: QubitInit,
}

impl Default for InitialState {
    /// `α = 1.5` gives `<x> = 3`, three vacuum widths from the origin.
    fn default() -> Self {
        Self {
            alpha: Complex64::new(1.5, 0.0),
            qubit: QubitInit::Superposition,
        }
    }
}

impl InitialState {
    pub fn prepare(&self, fock_dim: usize) -> Result<DensityMatrix> {
        let q = DensityMatrix::qubit(self.qubit.bloch())?;
        let r = coherent_state(self.alpha, fock_dim)?;
        DensityMatrix::product(&q, &r)
    }
}
