//! Phase extraction, telegraph classification of the phase, dwell-time
//! and occupancy statistics, and measurement-record diagnostics.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::model::{effective_rates, steady_state_prediction, QubitSign, SimParams};
use crate::sme::TrajectoryRecord;

pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 0.1;
pub const DEFAULT_UPPER_THRESHOLD: f64 = FRAC_PI_4;
pub const DEFAULT_LOWER_THRESHOLD: f64 = -FRAC_PI_4;

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub theta: f64,
    pub amplitude: f64,
    pub low_confidence: bool,
}

/// Rotating-frame phase and amplitude of `<x> + i<p>` at time `t`, with the
/// default amplitude floor.
pub fn phase_of(x_mean: f64, p_mean: f64, t: f64, omega_r: f64) -> Phase {
    phase_of_with_floor(x_mean, p_mean, t, omega_r, DEFAULT_AMPLITUDE_FLOOR)
}

pub fn phase_of_with_floor(x_mean: f64, p_mean: f64, t: f64, omega_r: f64, floor: f64) -> Phase {
    let amplitude = x_mean.hypot(p_mean);
    if amplitude == 0.0 {
        return Phase {
            theta: 0.0,
            amplitude,
            low_confidence: true,
        };
    }
    Phase {
        theta: wrap_angle(p_mean.atan2(x_mean) + omega_r * t),
        amplitude,
        low_confidence: amplitude < floor,
    }
}

/// One of the two phase branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `θ ≈ +π/2`, telegraph `+1`.
    Plus,
    /// `θ ≈ -π/2`, telegraph `-1`.
    Minus,
}

impl Branch {
    pub fn telegraph_value(self) -> i8 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }

    pub fn of_phase(theta: f64) -> Self {
        if theta >= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

/// The branch that the resonator locks to while the qubit sits in `sign`,
/// under the implemented coupling sign.
pub fn branch_for_qubit(sign: QubitSign) -> Branch {
    let params = SimParams::default();
    let phase = steady_state_prediction(&params, sign)
        .map(|s| s.phase)
        .unwrap_or(-sign.value());
    Branch::of_phase(phase)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpStatistics {
    /// `+1`, `-1`, or `0` before the first decision.
    pub telegraph: Vec<i8>,
    pub jump_times: Vec<f64>,
    pub dwell_times_plus: Vec<f64>,
    pub dwell_times_minus: Vec<f64>,
    pub occupancy_plus: f64,
    pub occupancy_minus: f64,
    pub occupancy_undecided: f64,
    pub jump_count: usize,
    /// Time spanned by the analysed series.
    pub duration: f64,
}

impl JumpStatistics {
    pub fn occupancy(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.occupancy_plus,
            Branch::Minus => self.occupancy_minus,
        }
    }

    pub fn dwell_times(&self, branch: Branch) -> &[f64] {
        match branch {
            Branch::Plus => &self.dwell_times_plus,
            Branch::Minus => &self.dwell_times_minus,
        }
    }

    /// Mean completed dwell time, `None` without any completed dwell.
    pub fn mean_dwell(&self, branch: Branch) -> Option<f64> {
        let d = self.dwell_times(branch);
        (!d.is_empty()).then(|| d.iter().sum::<f64>() / d.len() as f64)
    }

    /// Jumps per unit time.
    pub fn jump_rate(&self) -> f64 {
        if self.duration > 0.0 {
            self.jump_count as f64 / self.duration
        } else {
            0.0
        }
    }

    /// Fraction of samples with a decided telegraph state.
    pub fn decided_fraction(&self) -> f64 {
        1.0 - self.occupancy_undecided
    }
}

/// Hysteresis telegraph classification with default handling of every
/// sample as confident.
pub fn detect_jumps(theta: &[f64], times: &[f64], upper: f64, lower: f64) -> Result<JumpStatistics> {
    detect_jumps_masked(theta, times, None, upper, lower)
}

/// As [`detect_jumps`]; samples with `low_confidence[k]` set keep the
/// previous state whatever their phase.
pub fn detect_jumps_masked(
    theta: &[f64],
    times: &[f64],
    low_confidence: Option<&[bool]>,
    upper: f64,
    lower: f64,
) -> Result<JumpStatistics> {
    if theta.len() != times.len() {
        return Err(Error::SeriesLengthMismatch(format!(
            "theta has {} samples, times has {}",
            theta.len(),
            times.len()
        )));
    }
    if let Some(mask) = low_confidence {
        if mask.len() != theta.len() {
            return Err(Error::SeriesLengthMismatch(format!(
                "theta has {} samples, confidence mask has {}",
                theta.len(),
                mask.len()
            )));
        }
    }
    if !(upper > lower) {
        return Err(Error::InvalidParameter {
            name: "upper_threshold",
            reason: format!("must exceed lower_threshold ({upper} <= {lower})"),
        });
    }

    let n = theta.len();
    let mut telegraph = Vec::with_capacity(n);
    let mut state: i8 = 0;
    let mut segment_start: Option<f64> = None;
    let mut jump_times = Vec::new();
    let (mut dwell_plus, mut dwell_minus) = (Vec::new(), Vec::new());
    for k in 0..n {
        let skip = low_confidence.is_some_and(|m| m[k]);
        let next = if skip {
            state
        } else if theta[k] > upper {
            1
        } else if theta[k] < lower {
            -1
        } else {
            state
        };
        if next != state {
            if state == 0 {
                segment_start = Some(times[k]);
            } else {
                let start = segment_start.unwrap_or(times[k]);
                let dwell = times[k] - start;
                if state > 0 {
                    dwell_plus.push(dwell);
                } else {
                    dwell_minus.push(dwell);
                }
                jump_times.push(times[k]);
                segment_start = Some(times[k]);
            }
            state = next;
        }
        telegraph.push(state);
    }

    let count = |v: i8| telegraph.iter().filter(|&&s| s == v).count();
    let (plus, minus, undecided) = if n == 0 {
        (0.0, 0.0, 1.0)
    } else {
        let n = n as f64;
        let plus = count(1) as f64 / n;
        let minus = count(-1) as f64 / n;
        (plus, minus, count(0) as f64 / n)
    };
    let duration = if n > 1 { times[n - 1] - times[0] } else { 0.0 };
    Ok(JumpStatistics {
        jump_count: jump_times.len(),
        telegraph,
        jump_times,
        dwell_times_plus: dwell_plus,
        dwell_times_minus: dwell_minus,
        occupancy_plus: plus,
        occupancy_minus: minus,
        occupancy_undecided: undecided,
        duration,
    })
}

/// Thresholds and amplitude floor for classifying a [`TrajectoryRecord`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpDetector {
    pub upper: f64,
    pub lower: f64,
    pub amplitude_floor: f64,
}

impl Default for JumpDetector {
    fn default() -> Self {
        Self {
            upper: DEFAULT_UPPER_THRESHOLD,
            lower: DEFAULT_LOWER_THRESHOLD,
            amplitude_floor: DEFAULT_AMPLITUDE_FLOOR,
        }
    }
}

impl JumpDetector {
    /// Classifies the recorded samples; low-amplitude samples hold state.
    pub fn analyze(&self, record: &TrajectoryRecord) -> Result<JumpStatistics> {
        let mask: Vec<bool> = record.amplitude.iter().map(|&a| a < self.amplitude_floor).collect();
        detect_jumps_masked(&record.theta, &record.times, Some(&mask), self.upper, self.lower)
    }

    /// Classifies the full-rate phase series when the record carries one,
    /// otherwise the recorded samples.
    pub fn analyze_full_rate(&self, record: &TrajectoryRecord) -> Result<JumpStatistics> {
        match &record.theta_full {
            Some(theta) => {
                let dt = record.params_snapshot.dt;
                let times: Vec<f64> = (0..theta.len()).map(|k| k as f64 * dt).collect();
                detect_jumps(theta, &times, self.upper, self.lower)
            }
            None => self.analyze(record),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordDiagnostics {
    pub empirical_variance: f64,
    pub predicted_variance: f64,
}

impl RecordDiagnostics {
    pub fn ratio(&self) -> f64 {
        self.empirical_variance / self.predicted_variance
    }
}

/// Sample variance of the innovations `dr - <X> dt` against the predicted
/// `dt / (8 η_tot k_tot)`. `x_mean[k]` must be the mean that produced
/// `record[k]`.
pub fn record_diagnostics(record: &[f64], x_mean: &[f64], params: &SimParams) -> Result<RecordDiagnostics> {
    if record.len() != x_mean.len() {
        return Err(Error::SeriesLengthMismatch(format!(
            "record has {} samples, x_mean has {}",
            record.len(),
            x_mean.len()
        )));
    }
    let (k_tot, eta_tot) = effective_rates(params);
    if eta_tot * k_tot <= 0.0 {
        return Err(Error::DegenerateRecord);
    }
    let n = record.len();
    let empirical_variance = if n < 2 {
        0.0
    } else {
        let innov: Vec<f64> = record.iter().zip(x_mean).map(|(r, x)| r - x * params.dt).collect();
        let mean = innov.iter().sum::<f64>() / n as f64;
        innov.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    };
    Ok(RecordDiagnostics {
        empirical_variance,
        predicted_variance: params.dt / (8.0 * eta_tot * k_tot),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchSummary {
    pub occupancy: f64,
    pub mean_dwell: Option<f64>,
}

/// Side-by-side summary of two runs, `b` relative to `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyReport {
    pub target: Branch,
    pub a_plus: BranchSummary,
    pub a_minus: BranchSummary,
    pub b_plus: BranchSummary,
    pub b_minus: BranchSummary,
    pub a_jump_rate: f64,
    pub b_jump_rate: f64,
    /// `b.occupancy(target) - a.occupancy(target)`.
    pub target_difference: f64,
    pub target_increased: bool,
}

impl OccupancyReport {
    pub fn plus_difference(&self) -> f64 {
        self.b_plus.occupancy - self.a_plus.occupancy
    }

    pub fn minus_difference(&self) -> f64 {
        self.b_minus.occupancy - self.a_minus.occupancy
    }
}

pub fn occupancy_comparison(a: &JumpStatistics, b: &JumpStatistics, target: Branch) -> OccupancyReport {
    let summary = |s: &JumpStatistics, br: Branch| BranchSummary {
        occupancy: s.occupancy(br),
        mean_dwell: s.mean_dwell(br),
    };
    let diff = b.occupancy(target) - a.occupancy(target);
    OccupancyReport {
        target,
        a_plus: summary(a, Branch::Plus),
        a_minus: summary(a, Branch::Minus),
        b_plus: summary(b, Branch::Plus),
        b_minus: summary(b, Branch::Minus),
        a_jump_rate: a.jump_rate(),
        b_jump_rate: b.jump_rate(),
        target_difference: diff,
        target_increased: diff > 0.0,
    }
}

/// Histogram of wrapped phases over `(-π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseHistogram {
    pub counts: Vec<usize>,
}

impl PhaseHistogram {
    pub fn new(theta: &[f64], bins: usize) -> Self {
        let bins = bins.max(2);
        let mut counts = vec![0; bins];
        let width = 2.0 * PI / bins as f64;
        for &t in theta {
            let w = wrap_angle(t);
            let idx = (((w + PI) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Self { counts }
    }

    pub fn bin_center(&self, idx: usize) -> f64 {
        let width = 2.0 * PI / self.counts.len() as f64;
        -PI + (idx as f64 + 0.5) * width
    }

    /// Tallest bins in `(-π, 0)` and `[0, π]`, and whether the histogram
    /// dips below `dip` times the smaller peak on both arcs between them.
    pub fn bimodality(&self, dip: f64) -> Bimodality {
        let n = self.counts.len();
        let half = n / 2;
        let argmax = |range: std::ops::Range<usize>| {
            range
                .max_by_key(|&i| (self.counts[i], std::cmp::Reverse(i)))
                .unwrap_or(0)
        };
        let lo = argmax(0..half);
        let hi = argmax(half..n);
        let peak = self.counts[lo].min(self.counts[hi]);
        let inner = self.counts[lo..=hi].iter().copied().min().unwrap_or(0);
        let outer = self.counts[hi..]
            .iter()
            .chain(&self.counts[..=lo])
            .copied()
            .min()
            .unwrap_or(0);
        let limit = dip * peak as f64;
        Bimodality {
            mode_minus: self.bin_center(lo),
            mode_plus: self.bin_center(hi),
            is_bimodal: peak > 0 && (inner as f64) < limit && (outer as f64) < limit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bimodality {
    pub mode_minus: f64,
    pub mode_plus: f64,
    pub is_bimodal: bool,
}

/// Fraction of decided samples within `width` of either mode.
pub fn mode_concentration(theta: &[f64], telegraph: &[i8], modes: [f64; 2], width: f64) -> f64 {
    let mut decided = 0usize;
    let mut near = 0usize;
    for (&t, &s) in theta.iter().zip(telegraph) {
        if s == 0 {
            continue;
        }
        decided += 1;
        if modes.iter().any(|&m| wrap_angle(t - m).abs() < width) {
            near += 1;
        }
    }
    if decided == 0 {
        0.0
    } else {
        near as f64 / decided as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const W: f64 = 2.0 * PI;

    fn blocks(values: &[(f64, usize)]) -> (Vec<f64>, Vec<f64>) {
        let theta: Vec<f64> = values
            .iter()
            .flat_map(|&(v, n)| std::iter::repeat(v).take(n))
            .collect();
        let times = (0..theta.len()).map(|k| k as f64 * 0.1).collect();
        (theta, times)
    }

    #[test]
    fn phase_examples() {
        let ph = phase_of(0.0, 2.0, 0.0, W);
        assert!((ph.theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(ph.amplitude, 2.0);
        assert!(!ph.low_confidence);
        let zero = phase_of(0.0, 0.0, 0.3, W);
        assert_eq!(zero.theta, 0.0);
        assert!(zero.low_confidence);
        assert!(phase_of(0.01, 0.02, 0.0, W).low_confidence);
        // Rotating frame: <x> + i<p> = A e^{-iωt} gives a constant phase.
        let t = 0.37;
        let (x, p) = (3.0 * (-W * t).cos(), 3.0 * (-W * t).sin());
        assert!(phase_of(x, p, t, W).theta.abs() < 1e-12);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
        assert!((wrap_angle(7.0 * W + 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_branch() {
        let (theta, times) = blocks(&[(FRAC_PI_2, 50)]);
        let s = detect_jumps(&theta, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
        assert_eq!(s.jump_count, 0);
        assert_eq!(s.occupancy_plus, 1.0);
    }

    #[test]
    fn three_block_telegraph() {
        let (theta, times) = blocks(&[(FRAC_PI_2, 100), (-FRAC_PI_2, 100), (FRAC_PI_2, 100)]);
        let s = detect_jumps(&theta, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
        assert_eq!(s.jump_count, 2);
        assert_eq!(s.dwell_times_plus.len(), 1);
        assert_eq!(s.dwell_times_minus.len(), 1);
        assert!((s.occupancy_plus - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.occupancy_minus - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.jump_times[0] - 10.0).abs() < 1e-9);
        assert!((s.dwell_times_plus[0] - 10.0).abs() < 1e-9);
        assert!((s.dwell_times_minus[0] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn hysteresis_holds_state() {
        let mut theta = vec![FRAC_PI_2; 10];
        theta.extend((0..200).map(|k| 0.7 * (k as f64 * 0.3).sin()));
        let times: Vec<f64> = (0..theta.len()).map(|k| k as f64).collect();
        let s = detect_jumps(&theta, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
        assert_eq!(s.jump_count, 0);
        assert!(s.telegraph.iter().all(|&v| v == 1));
    }

    #[test]
    fn leading_undecided_and_mask() {
        let theta = [0.0, 0.1, 1.5, -1.5, 1.5];
        let times = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mask = [false, false, false, true, false];
        let s = detect_jumps_masked(&theta, &times, Some(&mask), FRAC_PI_4, -FRAC_PI_4).unwrap();
        assert_eq!(s.telegraph, vec![0, 0, 1, 1, 1]);
        assert_eq!(s.jump_count, 0);
        assert!((s.occupancy_undecided - 0.4).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            detect_jumps(&[0.0, 1.0], &[0.0], FRAC_PI_4, -FRAC_PI_4),
            Err(Error::SeriesLengthMismatch(_))
        ));
        assert!(detect_jumps(&[0.0], &[0.0], -1.0, 1.0).is_err());
    }

    #[test]
    fn record_diagnostic_examples() {
        let params = SimParams {
            eta_tot_override: Some(1.0),
            k_meas: 0.125,
            ..SimParams::default()
        };
        let x: Vec<f64> = (0..100).map(|k| (k as f64).sin()).collect();
        let clean: Vec<f64> = x.iter().map(|v| v * params.dt).collect();
        let d = record_diagnostics(&clean, &x, &params).unwrap();
        assert!(d.empirical_variance < 1e-30);
        assert!((d.predicted_variance - params.dt).abs() < 1e-18);

        let off = SimParams { k_meas: 0.0, ..params.clone() };
        assert!(matches!(record_diagnostics(&clean, &x, &off), Err(Error::DegenerateRecord)));
        assert!(record_diagnostics(&clean[1..], &x, &params).is_err());
    }

    #[test]
    fn synthetic_record_variance() {
        let params = SimParams {
            eta_tot_override: Some(1.0),
            k_meas: 0.125,
            ..SimParams::default()
        };
        let sdt = params.dt.sqrt();
        let x = vec![2.0; 100_000];
        let r: Vec<f64> = crate::sme::gaussian_stream(11)
            .take(x.len())
            .zip(&x)
            .map(|(z, xv)| xv * params.dt + sdt * z)
            .collect();
        let d = record_diagnostics(&r, &x, &params).unwrap();
        assert!((d.ratio() - 1.0).abs() < 0.02, "ratio {}", d.ratio());
    }

    fn stats(plus: f64, minus: f64) -> JumpStatistics {
        JumpStatistics {
            telegraph: vec![],
            jump_times: vec![],
            dwell_times_plus: vec![],
            dwell_times_minus: vec![],
            occupancy_plus: plus,
            occupancy_minus: minus,
            occupancy_undecided: 1.0 - plus - minus,
            jump_count: 0,
            duration: 1.0,
        }
    }

    #[test]
    fn comparison_examples() {
        let a = stats(0.5, 0.5);
        let same = occupancy_comparison(&a, &a, Branch::Plus);
        assert_eq!(same.plus_difference(), 0.0);
        assert_eq!(same.minus_difference(), 0.0);
        assert!(!same.target_increased);

        let b = stats(0.8, 0.2);
        let r = occupancy_comparison(&a, &b, Branch::Plus);
        assert!(r.target_increased);
        assert!((r.target_difference - 0.3).abs() < 1e-12);
    }

    #[test]
    fn branch_mapping_follows_steady_state() {
        assert_eq!(branch_for_qubit(QubitSign::Plus), Branch::Minus);
        assert_eq!(branch_for_qubit(QubitSign::Minus), Branch::Plus);
    }

    #[test]
    fn histogram_bimodality() {
        let mut theta: Vec<f64> = (0..1000).map(|k| FRAC_PI_2 + 0.2 * ((k as f64) * 0.37).sin()).collect();
        theta.extend((0..600).map(|k| -FRAC_PI_2 + 0.2 * ((k as f64) * 0.51).cos()));
        let h = PhaseHistogram::new(&theta, 36);
        let b = h.bimodality(0.5);
        assert!(b.is_bimodal);
        assert!((b.mode_plus - FRAC_PI_2).abs() < 0.3);
        assert!((b.mode_minus + FRAC_PI_2).abs() < 0.3);
        let uni = PhaseHistogram::new(&theta[..1000], 36).bimodality(0.5);
        assert!(!uni.is_bimodal);

        let tel = vec![1i8; theta.len()];
        let c = mode_concentration(&theta, &tel, [b.mode_minus, b.mode_plus], FRAC_PI_4);
        assert_eq!(c, 1.0);
    }

    proptest! {
        #[test]
        fn phase_scale_invariant(x in -5.0f64..5.0, p in -5.0f64..5.0, c in 0.01f64..100.0, t in 0.0f64..10.0) {
            prop_assume!(x.hypot(p) > 1e-3);
            let a = phase_of(x, p, t, W).theta;
            let b = phase_of(c * x, c * p, t, W).theta;
            prop_assert!(wrap_angle(a - b).abs() < 1e-9);
        }

        #[test]
        fn occupancies_sum_to_one(theta in prop::collection::vec(-PI..PI, 0..300)) {
            let times: Vec<f64> = (0..theta.len()).map(|k| k as f64).collect();
            let s = detect_jumps(&theta, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
            prop_assert!((s.occupancy_plus + s.occupancy_minus + s.occupancy_undecided - 1.0).abs() < 1e-12);
            let decided: Vec<i8> = s.telegraph.iter().copied().filter(|&v| v != 0).collect();
            let alternations = decided.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert_eq!(s.jump_count, alternations);
            prop_assert!(s.dwell_times_plus.iter().chain(&s.dwell_times_minus).all(|&d| d > 0.0));
        }

        #[test]
        fn negation_swaps_branches(theta in prop::collection::vec(-PI..PI, 1..300), shift in -50.0f64..50.0) {
            let times: Vec<f64> = (0..theta.len()).map(|k| k as f64 * 0.5).collect();
            let s = detect_jumps(&theta, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
            let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
            let n = detect_jumps(&neg, &times, FRAC_PI_4, -FRAC_PI_4).unwrap();
            prop_assert_eq!(s.occupancy_plus, n.occupancy_minus);
            prop_assert_eq!(s.occupancy_minus, n.occupancy_plus);
            prop_assert_eq!(&s.dwell_times_plus, &n.dwell_times_minus);
            prop_assert_eq!(s.jump_count, n.jump_count);

            let shifted: Vec<f64> = times.iter().map(|t| t + shift).collect();
            let m = detect_jumps(&theta, &shifted, FRAC_PI_4, -FRAC_PI_4).unwrap();
            prop_assert_eq!(m.jump_count, s.jump_count);
            prop_assert_eq!(&m.telegraph, &s.telegraph);
        }
    }
}
