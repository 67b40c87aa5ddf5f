//! Run modes and the files they write.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use qjump_core::analysis::{detect_jumps_masked, PhaseHistogram};
use qjump_core::ensemble::EnsembleResult;
use qjump_core::{
    ensemble_mean, record_diagnostics, simulate_trajectory, Branch, JumpStatistics, QubitFeedbackSetting,
    SimParams, TrajectoryRecord,
};

use crate::config::{Mode, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{fmt_f64, fmt_opt, read_csv, write_csv, TRAJECTORY_HEADER};
use crate::plot::Chart;

pub const HISTOGRAM_BINS: usize = 36;

/// Worker cap from `QJUMP_THREADS`, limited to the available cores.
/// 0 means no cap.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("QJUMP_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("QJUMP_THREADS: expected a count, got `{v}`")))?;
            let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
            Ok(n.min(cores))
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    match cfg.mode {
        Mode::Simulate => run_simulate(cfg),
        Mode::Ensemble => run_ensemble(cfg),
        Mode::Sweep => run_sweep(cfg),
        Mode::Analyze => run_analyze(cfg),
        Mode::Plot => run_plot(cfg),
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_snapshot(cfg: &RunConfig, out: &mut Vec<PathBuf>) -> Result<()> {
    let path = cfg.output_dir.join("params.snapshot");
    write_text(&path, &cfg.to_snapshot())?;
    out.push(path);
    Ok(())
}

/// Per-trajectory numbers reported in `jumps_summary.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySummary {
    pub jump_count: usize,
    pub occupancy_plus: f64,
    pub occupancy_minus: f64,
    pub occupancy_undecided: f64,
    pub mean_dwell_plus: Option<f64>,
    pub mean_dwell_minus: Option<f64>,
    pub jump_rate: f64,
    /// Empirical over predicted innovation variance.
    pub record_ratio: Option<f64>,
}

/// Innovation-variance ratio of a record, pairing each increment with the
/// mean of the previous sample. Exact for `output_stride = 1`.
pub fn record_ratio(record: &TrajectoryRecord, params: &SimParams) -> Option<f64> {
    let n = record.len();
    if record.record_noise_infinite || n < 3 {
        return None;
    }
    record_diagnostics(&record.record[1..], &record.x_mean[..n - 1], params)
        .ok()
        .map(|d| d.ratio())
}

fn summarize(stats: &JumpStatistics, ratio: Option<f64>) -> TrajectorySummary {
    TrajectorySummary {
        jump_count: stats.jump_count,
        occupancy_plus: stats.occupancy_plus,
        occupancy_minus: stats.occupancy_minus,
        occupancy_undecided: stats.occupancy_undecided,
        mean_dwell_plus: stats.mean_dwell(Branch::Plus),
        mean_dwell_minus: stats.mean_dwell(Branch::Minus),
        jump_rate: stats.jump_rate(),
        record_ratio: ratio,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Means over completed trajectories, in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub n_completed: usize,
    pub n_diverged: usize,
    pub jump_count: f64,
    pub occupancy_plus: f64,
    pub occupancy_minus: f64,
    pub occupancy_undecided: f64,
    pub mean_dwell_plus: Option<f64>,
    pub mean_dwell_minus: Option<f64>,
    pub jump_rate: f64,
    pub record_ratio: Option<f64>,
}

impl Aggregate {
    pub fn decided_fraction(&self) -> f64 {
        1.0 - self.occupancy_undecided
    }

    fn of(rows: &[Option<TrajectorySummary>]) -> Self {
        let ok: Vec<&TrajectorySummary> = rows.iter().flatten().collect();
        let m = |f: fn(&TrajectorySummary) -> f64| mean(ok.iter().map(|s| f(s))).unwrap_or(f64::NAN);
        Aggregate {
            n_completed: ok.len(),
            n_diverged: rows.len() - ok.len(),
            jump_count: m(|s| s.jump_count as f64),
            occupancy_plus: m(|s| s.occupancy_plus),
            occupancy_minus: m(|s| s.occupancy_minus),
            occupancy_undecided: m(|s| s.occupancy_undecided),
            mean_dwell_plus: mean(ok.iter().filter_map(|s| s.mean_dwell_plus)),
            mean_dwell_minus: mean(ok.iter().filter_map(|s| s.mean_dwell_minus)),
            jump_rate: m(|s| s.jump_rate),
            record_ratio: mean(ok.iter().filter_map(|s| s.record_ratio)),
        }
    }
}

fn controller(params: &SimParams) -> Result<Option<QubitFeedbackSetting>> {
    Ok(QubitFeedbackSetting::from_params(params)?)
}

pub fn run_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    prepare_dir(&cfg.output_dir)?;
    let params = &cfg.params;
    let rho0 = cfg.initial.prepare(params.fock_dim)?;
    let ctl = controller(params)?;
    let record = simulate_trajectory(&rho0, params, ctl.as_ref())?;
    let stats = cfg.detector.analyze(&record)?;

    let mut written = Vec::new();
    let path = cfg.output_dir.join("trajectory.csv");
    let rows = (0..record.len()).map(|k| {
        let s = record.bloch[k];
        vec![
            fmt_f64(record.times[k]),
            fmt_f64(record.x_mean[k]),
            fmt_f64(record.p_mean[k]),
            fmt_f64(record.theta[k]),
            fmt_f64(record.amplitude[k]),
            fmt_f64(s[0]),
            fmt_f64(s[1]),
            fmt_f64(s[2]),
            fmt_f64(record.p_plus[k]),
            fmt_f64(record.purity[k]),
            fmt_f64(record.record[k]),
            stats.telegraph[k].to_string(),
        ]
    });
    write_csv(&path, TRAJECTORY_HEADER, rows, &[])?;
    written.push(path);
    write_snapshot(cfg, &mut written)?;
    if cfg.emit_plots {
        written.extend(write_plots(&cfg.output_dir, &record.times, &record.theta, &record.x_mean)?);
    }
    log::info!(
        "{} samples, {} jumps, occupancy +{:.3} / -{:.3}",
        record.len(),
        stats.jump_count,
        stats.occupancy_plus,
        stats.occupancy_minus
    );
    Ok(written)
}

/// Runs the configured ensemble and classifies every completed member.
pub fn ensemble_with_summaries(cfg: &RunConfig) -> Result<(EnsembleResult, Vec<Option<TrajectorySummary>>, Aggregate)> {
    let params = &cfg.params;
    let rho0 = cfg.initial.prepare(params.fock_dim)?;
    let ctl = controller(params)?;
    let res = qjump_core::run_ensemble(&rho0, params, ctl.as_ref(), cfg.n_trajectories, cfg.threads)?;
    let summaries = res
        .records
        .iter()
        .map(|r| match r {
            Some(r) => Ok(Some(summarize(&cfg.detector.analyze(r)?, record_ratio(r, params)))),
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let agg = Aggregate::of(&summaries);
    Ok((res, summaries, agg))
}

const SUMMARY_COLUMNS: &[&str] = &[
    "jump_count",
    "occupancy_plus",
    "occupancy_minus",
    "occupancy_undecided",
    "mean_dwell_plus",
    "mean_dwell_minus",
    "jump_rate",
    "record_ratio",
];

pub fn run_ensemble(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    prepare_dir(&cfg.output_dir)?;
    let (res, summaries, agg) = ensemble_with_summaries(cfg)?;
    let mut written = Vec::new();

    let m = ensemble_mean(res.completed())?;
    let path = cfg.output_dir.join("ensemble_mean.csv");
    let header = [
        "t", "x_mean", "x_stderr", "p_mean", "amplitude", "s_x", "s_y", "s_z", "p_plus", "purity",
    ];
    let rows = (0..m.times.len()).map(|k| {
        vec![
            fmt_f64(m.times[k]),
            fmt_f64(m.x_mean[k]),
            fmt_f64(m.x_stderr[k]),
            fmt_f64(m.p_mean[k]),
            fmt_f64(m.amplitude[k]),
            fmt_f64(m.bloch[k][0]),
            fmt_f64(m.bloch[k][1]),
            fmt_f64(m.bloch[k][2]),
            fmt_f64(m.p_plus[k]),
            fmt_f64(m.purity[k]),
        ]
    });
    write_csv(&path, &header, rows, &[format!("trajectories averaged: {}", m.count)])?;
    written.push(path);

    let path = cfg.output_dir.join("jumps_summary.csv");
    let mut header = vec!["index", "seed", "diverged"];
    header.extend_from_slice(SUMMARY_COLUMNS);
    let mut rows = Vec::with_capacity(summaries.len() + 1);
    for (i, s) in summaries.iter().enumerate() {
        let seed = res.records[i]
            .as_ref()
            .map(|r| r.seed)
            .or_else(|| res.failures.iter().find(|f| f.index == i).map(|f| f.seed))
            .unwrap_or_default();
        let mut row = vec![i.to_string(), seed.to_string()];
        match s {
            Some(s) => {
                row.push("0".into());
                row.extend([
                    s.jump_count.to_string(),
                    fmt_f64(s.occupancy_plus),
                    fmt_f64(s.occupancy_minus),
                    fmt_f64(s.occupancy_undecided),
                    fmt_opt(s.mean_dwell_plus),
                    fmt_opt(s.mean_dwell_minus),
                    fmt_f64(s.jump_rate),
                    fmt_opt(s.record_ratio),
                ]);
            }
            None => {
                row.push("1".into());
                row.extend(std::iter::repeat_n(String::new(), SUMMARY_COLUMNS.len()));
            }
        }
        rows.push(row);
    }
    let mut row = vec!["aggregate".to_string(), res.master_seed.to_string(), agg.n_diverged.to_string()];
    row.extend(aggregate_fields(&agg));
    rows.push(row);
    let trailer: Vec<String> = std::iter::once(format!(
        "diverged {} of {}; aggregate row averages completed trajectories",
        agg.n_diverged,
        summaries.len()
    ))
    .chain(res.failures.iter().map(|f| format!("trajectory {} (seed {}): {}", f.index, f.seed, f.error)))
    .collect();
    write_csv(&path, &header, rows, &trailer)?;
    written.push(path);
    write_snapshot(cfg, &mut written)?;
    Ok(written)
}

fn aggregate_fields(agg: &Aggregate) -> Vec<String> {
    vec![
        fmt_f64(agg.jump_count),
        fmt_f64(agg.occupancy_plus),
        fmt_f64(agg.occupancy_minus),
        fmt_f64(agg.occupancy_undecided),
        fmt_opt(agg.mean_dwell_plus),
        fmt_opt(agg.mean_dwell_minus),
        fmt_f64(agg.jump_rate),
        fmt_opt(agg.record_ratio),
    ]
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let axis = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sweep mode requires sweep_param and sweep_values".into()))?;
    // Resolve every point before running any of them.
    let points = axis
        .values
        .iter()
        .map(|&v| cfg.with_value(&axis.param, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>>>()?;
    prepare_dir(&cfg.output_dir)?;

    let mut rows = Vec::with_capacity(points.len());
    for (v, point) in &points {
        log::info!("sweep {} = {v}", axis.param);
        let (_, _, agg) = ensemble_with_summaries(point)?;
        let mut row = vec![fmt_f64(*v), agg.n_completed.to_string(), agg.n_diverged.to_string()];
        row.extend(aggregate_fields(&agg));
        row.push(fmt_f64(agg.decided_fraction()));
        rows.push(row);
    }
    let mut header = vec![axis.param.as_str(), "n_completed", "n_diverged"];
    header.extend_from_slice(SUMMARY_COLUMNS);
    header.push("decided_fraction");
    let mut written = Vec::new();
    let path = cfg.output_dir.join("sweep.csv");
    write_csv(&path, &header, rows, &[])?;
    written.push(path);
    write_snapshot(cfg, &mut written)?;
    Ok(written)
}

/// Recomputes jump statistics, dwell times and the phase histogram from a
/// trajectory CSV.
pub fn run_analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let input = cfg.input_path();
    let table = read_csv(&input)?;
    let t = table.column("t")?;
    let theta = table.column("theta")?;
    let amplitude = table.column("amplitude")?;
    let x = table.column("x_mean")?;
    let dr = table.column("dr")?;
    let mask: Vec<bool> = amplitude.iter().map(|&a| a < cfg.detector.amplitude_floor).collect();
    let stats = detect_jumps_masked(&theta, &t, Some(&mask), cfg.detector.upper, cfg.detector.lower)?;
    let n = t.len();
    let ratio = (n >= 3)
        .then(|| record_diagnostics(&dr[1..], &x[..n - 1], &cfg.params).ok())
        .flatten()
        .map(|d| d.ratio());
    let s = summarize(&stats, ratio);

    prepare_dir(&cfg.output_dir)?;
    let mut written = Vec::new();
    let path = cfg.output_dir.join("analysis.csv");
    let mut header = SUMMARY_COLUMNS.to_vec();
    header.push("decided_fraction");
    let row = vec![
        s.jump_count.to_string(),
        fmt_f64(s.occupancy_plus),
        fmt_f64(s.occupancy_minus),
        fmt_f64(s.occupancy_undecided),
        fmt_opt(s.mean_dwell_plus),
        fmt_opt(s.mean_dwell_minus),
        fmt_f64(s.jump_rate),
        fmt_opt(s.record_ratio),
        fmt_f64(stats.decided_fraction()),
    ];
    write_csv(&path, &header, [row], &[format!("input: {}", input.display())])?;
    written.push(path);

    let path = cfg.output_dir.join("dwell_times.csv");
    let rows = stats
        .dwell_times_plus
        .iter()
        .map(|&d| vec!["1".to_string(), fmt_f64(d)])
        .chain(stats.dwell_times_minus.iter().map(|&d| vec!["-1".to_string(), fmt_f64(d)]));
    write_csv(&path, &["branch", "dwell"], rows, &[])?;
    written.push(path);

    let hist = PhaseHistogram::new(&theta, HISTOGRAM_BINS);
    let path = cfg.output_dir.join("phase_histogram.csv");
    let rows = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![fmt_f64(hist.bin_center(i)), c.to_string()]);
    write_csv(&path, &["theta", "count"], rows, &[])?;
    written.push(path);
    Ok(written)
}

pub fn run_plot(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let table = read_csv(&cfg.input_path())?;
    prepare_dir(&cfg.output_dir)?;
    write_plots(
        &cfg.output_dir,
        &table.column("t")?,
        &table.column("theta")?,
        &table.column("x_mean")?,
    )
}

/// `phase.svg` (θ against t) and `position.svg` (⟨x⟩ against t).
pub fn write_plots(dir: &Path, t: &[f64], theta: &[f64], x: &[f64]) -> Result<Vec<PathBuf>> {
    let phase = Chart {
        title: "Resonator phase",
        x_label: "t (periods)",
        y_label: "θ",
        x: t,
        y: theta,
        y_range: Some((-PI, PI)),
        y_ticks: vec![
            (-PI, "-π".into()),
            (-FRAC_PI_2, "-π/2".into()),
            (0.0, "0".into()),
            (FRAC_PI_2, "π/2".into()),
            (PI, "π".into()),
        ],
        break_above: Some(PI),
    };
    let position = Chart {
        title: "Resonator position",
        x_label: "t (periods)",
        y_label: "⟨x⟩",
        x: t,
        y: x,
        y_range: None,
        y_ticks: Vec::new(),
        break_above: None,
    };
    let mut written = Vec::new();
    for (name, chart) in [("phase.svg", phase), ("position.svg", position)] {
        let path = dir.join(name);
        write_text(&path, &chart.to_svg())?;
        written.push(path);
    }
    Ok(written)
}
