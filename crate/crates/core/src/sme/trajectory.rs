use crate::analysis::phase_of;
use crate::control::QubitFeedbackSetting;
use crate::error::{Error, Result};
use crate::model::SimParams;
use crate::qops::{build_operator_set, DensityMatrix, OperatorSet};

use super::rng::GaussianStream;
use super::stepper::SmeStepper;

/// Observables of one run, sampled every `output_stride` steps.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub p_mean: Vec<f64>,
    pub theta: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub bloch: Vec<[f64; 3]>,
    pub p_plus: Vec<f64>,
    pub purity: Vec<f64>,
    /// `record[k]` is the increment `dr` of the step that ends at sample `k`;
    /// `record[0] = 0`.
    pub record: Vec<f64>,
    pub seed: u64,
    pub params_snapshot: SimParams,
    pub record_noise_infinite: bool,
    /// θ at every integration step (index 0 is the initial state), when
    /// `params.full_rate_theta` is set.
    pub theta_full: Option<Vec<f64>>,
    pub final_state: DensityMatrix,
}

impl TrajectoryRecord {
    pub(crate) fn with_capacity(n: usize, params: &SimParams, rho0: &DensityMatrix) -> Self {
        Self {
            times: Vec::with_capacity(n),
            x_mean: Vec::with_capacity(n),
            p_mean: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
            amplitude: Vec::with_capacity(n),
            bloch: Vec::with_capacity(n),
            p_plus: Vec::with_capacity(n),
            purity: Vec::with_capacity(n),
            record: Vec::with_capacity(n),
            seed: params.seed,
            params_snapshot: params.clone(),
            record_noise_infinite: false,
            theta_full: None,
            final_state: rho0.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push_sample(&mut self, t: f64, rho: &DensityMatrix, ops: &OperatorSet, omega_r: f64, dr: f64) {
        let x = ops.x.trace_product(rho.matrix()).re;
        let p = ops.p.trace_product(rho.matrix()).re;
        let ph = phase_of(x, p, t, omega_r);
        let s = rho.bloch_vector();
        self.times.push(t);
        self.x_mean.push(x);
        self.p_mean.push(p);
        self.theta.push(ph.theta);
        self.amplitude.push(ph.amplitude);
        self.bloch.push(s);
        self.p_plus.push(0.5 * (1.0 + s[2]));
        self.purity.push(rho.purity());
        self.record.push(dr);
    }
}

/// Conditioned trajectory from `rho0`, driven by the Wiener stream seeded
/// with `params.seed`.
pub fn simulate_trajectory(
    rho0: &DensityMatrix,
    params: &SimParams,
    controller: Option<&QubitFeedbackSetting>,
) -> Result<TrajectoryRecord> {
    let ops = build_operator_set(params.fock_dim)?;
    simulate_trajectory_with_ops(rho0, params, controller, &ops)
}

/// As [`simulate_trajectory`] with a prebuilt operator set.
pub fn simulate_trajectory_with_ops(
    rho0: &DensityMatrix,
    params: &SimParams,
    controller: Option<&QubitFeedbackSetting>,
    ops: &OperatorSet,
) -> Result<TrajectoryRecord> {
    simulate_trajectory_observed(rho0, params, controller, ops, |_, _, _| Ok(()))
}

/// As [`simulate_trajectory_with_ops`], calling `observe(sample, t, rho)`
/// on every recorded state.
pub fn simulate_trajectory_observed<F>(
    rho0: &DensityMatrix,
    params: &SimParams,
    controller: Option<&QubitFeedbackSetting>,
    ops: &OperatorSet,
    mut observe: F,
) -> Result<TrajectoryRecord>
where
    F: FnMut(usize, f64, &DensityMatrix) -> Result<()>,
{
    let mut stepper = SmeStepper::new(params, ops, controller.copied())?;
    let n_steps = params.n_steps();
    let stride = params.output_stride as u64;
    let omega_r = params.omega_r();
    let sqrt_dt = params.dt.sqrt();

    let mut out = TrajectoryRecord::with_capacity(params.n_samples(), params, rho0);
    out.record_noise_infinite = stepper.record_noise_infinite();
    let mut theta_full = params.full_rate_theta.then(|| Vec::with_capacity(n_steps as usize + 1));

    let mut rho = rho0.clone();
    let mut noise = GaussianStream::new(params.seed);
    out.push_sample(0.0, &rho, ops, omega_r, 0.0);
    observe(0, 0.0, &rho)?;
    if let Some(tf) = theta_full.as_mut() {
        tf.push(out.theta[0]);
    }

    for step in 0..n_steps {
        let t = step as f64 * params.dt;
        let dw = sqrt_dt * noise.next_standard();
        let info = stepper.step(&mut rho, t, dw, step + 1)?;
        let t_next = (step + 1) as f64 * params.dt;
        if let Some(tf) = theta_full.as_mut() {
            let x = ops.x.trace_product(rho.matrix()).re;
            let p = ops.p.trace_product(rho.matrix()).re;
            tf.push(phase_of(x, p, t_next, omega_r).theta);
        }
        if (step + 1) % stride == 0 {
            if rho.matrix().as_slice().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::IntegrationDiverged {
                    step: step + 1,
                    time: t_next,
                    trace: f64::NAN,
                });
            }
            out.push_sample(t_next, &rho, ops, omega_r, info.record_increment);
            observe(out.len() - 1, t_next, &rho)?;
        }
    }
    out.theta_full = theta_full;
    out.final_state = rho;
    Ok(out)
}
