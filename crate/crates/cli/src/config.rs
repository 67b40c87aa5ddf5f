//! Run configuration files.
//!
//! Flat `key = value` lines with `#` comments. Values are numbers, booleans,
//! quoted strings, or (for `sweep_values`) a bracketed list of numbers.
//! This is the flat subset of TOML and is parsed as such. Unknown keys are
//! rejected; missing keys take the reference defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use qjump_core::analysis::{DEFAULT_AMPLITUDE_FLOOR, DEFAULT_LOWER_THRESHOLD, DEFAULT_UPPER_THRESHOLD};
use qjump_core::{effective_rates, thermal_measurement_rate, InitialState, JumpDetector, QubitInit, QubitNoiseModel, SimParams};
use toml::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Ensemble,
    Sweep,
    Analyze,
    Plot,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Ensemble => "ensemble",
            Mode::Sweep => "sweep",
            Mode::Analyze => "analyze",
            Mode::Plot => "plot",
        }
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Mode::Simulate,
            "ensemble" => Mode::Ensemble,
            "sweep" => Mode::Sweep,
            "analyze" => Mode::Analyze,
            "plot" => Mode::Plot,
            other => {
                return Err(CliError::Validation(format!(
                    "mode: expected one of simulate, ensemble, sweep, analyze, plot; got `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

/// Bath parameters from which `k_therm` is derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalBath {
    pub gamma_th: f64,
    pub temperature_ratio: f64,
}

/// Keys of [`SimParams`] that a sweep may vary. `eta_tot` is accepted as an
/// alias of `eta_tot_override`.
pub const SWEEPABLE: &[&str] = &[
    "f",
    "lambda0",
    "omega_c",
    "omega_j",
    "gamma_fb",
    "k_meas",
    "k_therm",
    "eta_det",
    "eta_tot_override",
    "kappa",
    "xi",
    "mu_fb",
    "dt",
    "t_final",
    "fock_dim",
    "seed",
    "output_stride",
];

const INTEGER_KEYS: &[&str] = &["fock_dim", "seed", "output_stride", "n_trajectories"];

#[derive(Clone, Debug, Default, PartialEq)]
struct Raw {
    entries: Vec<(String, Value)>,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn set(&mut self, key: &str, value: Value) {
        self.entries.retain(|(k, _)| k != key);
        self.entries.push((key.to_string(), value));
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: SimParams,
    pub thermal: Option<ThermalBath>,
    pub initial: InitialState,
    pub detector: JumpDetector,
    pub n_trajectories: usize,
    pub sweep: Option<SweepAxis>,
    pub output_dir: PathBuf,
    /// Trajectory CSV read by `analyze` and `plot`; defaults to
    /// `output_dir/trajectory.csv`.
    pub input: Option<PathBuf>,
    pub emit_plots: bool,
    /// Worker cap for ensembles; 0 uses all cores. Not a file key.
    pub threads: usize,
    raw: Raw,
}

fn type_error(key: &str, want: &str, v: &Value) -> CliError {
    CliError::Validation(format!("{key}: expected {want}, got `{v}`"))
}

fn num(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number", v)),
    }
}

fn uint(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(type_error(key, "a non-negative integer", v)),
    }
}

fn boolean(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_error(key, "true or false", v))
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a quoted string", v))
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn at_line(text: &str, key: &str, e: CliError) -> CliError {
    match (e, line_of(text, key)) {
        (CliError::Validation(msg), Some(line)) => CliError::Validation(format!("line {line}: {msg}")),
        (e, _) => e,
    }
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "f",
    "lambda0",
    "omega_c",
    "omega_j",
    "gamma_fb",
    "k_meas",
    "k_therm",
    "eta_det",
    "eta_tot_override",
    "kappa",
    "qubit_noise_model",
    "xi",
    "mu_fb",
    "dt",
    "t_final",
    "fock_dim",
    "seed",
    "output_stride",
    "full_rate_theta",
    "gamma_th",
    "temperature_ratio",
    "alpha0",
    "alpha0_im",
    "qubit_init",
    "upper_threshold",
    "lower_threshold",
    "amplitude_floor",
    "n_trajectories",
    "sweep_param",
    "sweep_values",
    "output_dir",
    "input",
    "emit_plots",
];

impl RunConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Validation(e.to_string().trim_end().to_string()))?;
        let mut raw = Raw::default();
        for (key, value) in table {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                let msg = format!("unknown key `{key}`");
                return Err(at_line(text, &key, CliError::Validation(msg)));
            }
            if value.is_table() {
                let msg = format!("{key}: nested tables are not supported");
                return Err(at_line(text, &key, CliError::Validation(msg)));
            }
            raw.set(&key, value);
        }
        let cfg = Self::resolve(raw).map_err(|(key, e)| match key {
            Some(k) => at_line(text, &k, e),
            None => e,
        })?;
        cfg.validate_mode()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text).map_err(|e| match e {
            CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    /// A copy with `key` set to `value`, re-validated. Used by sweeps.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let key = if key == "eta_tot" { "eta_tot_override" } else { key };
        if !SWEEPABLE.contains(&key) {
            return Err(CliError::Validation(format!(
                "sweep_param: `{key}` is not a numeric simulation parameter"
            )));
        }
        let v = if INTEGER_KEYS.contains(&key) {
            if value.fract() != 0.0 || value < 0.0 || value > i64::MAX as f64 {
                return Err(CliError::Validation(format!("{key}: {value} is not a non-negative integer")));
            }
            Value::Integer(value as i64)
        } else {
            Value::Float(value)
        };
        let mut raw = self.raw.clone();
        raw.set(key, v);
        let mut out = Self::resolve(raw).map_err(|(_, e)| e)?;
        out.mode = self.mode;
        out.output_dir.clone_from(&self.output_dir);
        out.threads = self.threads;
        Ok(out)
    }

    pub fn set_mode(&mut self, mode: Mode) -> Result<()> {
        self.mode = mode;
        self.raw.set("mode", Value::String(mode.as_str().into()));
        self.validate_mode()
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.params.seed = seed;
        self.raw.set("seed", Value::Integer(seed as i64));
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        self.raw.set("output_dir", Value::String(dir.display().to_string()));
        self.output_dir = dir;
    }

    pub fn input_path(&self) -> PathBuf {
        self.input.clone().unwrap_or_else(|| self.output_dir.join("trajectory.csv"))
    }

    fn resolve(raw: Raw) -> std::result::Result<Self, (Option<String>, CliError)> {
        let mut p = SimParams::default();
        let mut cfg = RunConfig {
            mode: Mode::Simulate,
            params: SimParams::default(),
            thermal: None,
            initial: InitialState::default(),
            detector: JumpDetector {
                upper: DEFAULT_UPPER_THRESHOLD,
                lower: DEFAULT_LOWER_THRESHOLD,
                amplitude_floor: DEFAULT_AMPLITUDE_FLOOR,
            },
            n_trajectories: 10,
            sweep: None,
            output_dir: PathBuf::from("out"),
            input: None,
            emit_plots: true,
            threads: 0,
            raw: Raw::default(),
        };
        let mut noise_model = "dephasing".to_string();
        let mut xi = None;
        let (mut gamma_th, mut temperature_ratio) = (None, None);
        let (mut alpha_re, mut alpha_im) = (cfg.initial.alpha.re, 0.0);
        let mut sweep_param = None;
        let mut sweep_values = None;

        for (key, v) in &raw.entries {
            let k = key.as_str();
            let r: Result<()> = (|| {
                match k {
                    "mode" => cfg.mode = string(k, v)?.parse()?,
                    "f" => p.f = num(k, v)?,
                    "lambda0" => p.lambda0 = num(k, v)?,
                    "omega_c" => p.omega_c = num(k, v)?,
                    "omega_j" => p.omega_j = num(k, v)?,
                    "gamma_fb" => p.gamma_fb = num(k, v)?,
                    "k_meas" => p.k_meas = num(k, v)?,
                    "k_therm" => p.k_therm = num(k, v)?,
                    "eta_det" => p.eta_det = num(k, v)?,
                    "eta_tot_override" => p.eta_tot_override = Some(num(k, v)?),
                    "kappa" => p.kappa = num(k, v)?,
                    "qubit_noise_model" => noise_model = string(k, v)?.to_string(),
                    "xi" => xi = Some(num(k, v)?),
                    "mu_fb" => p.mu_fb = num(k, v)?,
                    "dt" => p.dt = num(k, v)?,
                    "t_final" => p.t_final = num(k, v)?,
                    "fock_dim" => p.fock_dim = uint(k, v)? as usize,
                    "seed" => p.seed = uint(k, v)?,
                    "output_stride" => p.output_stride = uint(k, v)? as usize,
                    "full_rate_theta" => p.full_rate_theta = boolean(k, v)?,
                    "gamma_th" => gamma_th = Some(num(k, v)?),
                    "temperature_ratio" => temperature_ratio = Some(num(k, v)?),
                    "alpha0" => alpha_re = num(k, v)?,
                    "alpha0_im" => alpha_im = num(k, v)?,
                    "qubit_init" => {
                        cfg.initial.qubit = match string(k, v)? {
                            "superposition" => QubitInit::Superposition,
                            "plus" => QubitInit::Plus,
                            "minus" => QubitInit::Minus,
                            other => {
                                return Err(CliError::Validation(format!(
                                    "qubit_init: expected superposition, plus or minus; got `{other}`"
                                )))
                            }
                        }
                    }
                    "upper_threshold" => cfg.detector.upper = num(k, v)?,
                    "lower_threshold" => cfg.detector.lower = num(k, v)?,
                    "amplitude_floor" => cfg.detector.amplitude_floor = num(k, v)?,
                    "n_trajectories" => cfg.n_trajectories = uint(k, v)? as usize,
                    "sweep_param" => sweep_param = Some(string(k, v)?.to_string()),
                    "sweep_values" => {
                        let list = v.as_array().ok_or_else(|| type_error(k, "a list of numbers", v))?;
                        sweep_values = Some(list.iter().map(|x| num(k, x)).collect::<Result<Vec<f64>>>()?);
                    }
                    "output_dir" => cfg.output_dir = PathBuf::from(string(k, v)?),
                    "input" => cfg.input = Some(PathBuf::from(string(k, v)?)),
                    "emit_plots" => cfg.emit_plots = boolean(k, v)?,
                    other => return Err(CliError::Validation(format!("unknown key `{other}`"))),
                }
                Ok(())
            })();
            r.map_err(|e| (Some(key.clone()), e))?;
        }

        let field = |key: &str, e: CliError| (Some(key.to_string()), e);

        p.qubit_noise_model = match (noise_model.as_str(), xi) {
            ("dephasing", None) => QubitNoiseModel::SigmaXDephasing,
            ("dephasing", Some(_)) => {
                return Err(field(
                    "xi",
                    CliError::Validation("xi: only used with qubit_noise_model = \"thermal\"".into()),
                ))
            }
            ("thermal", Some(xi)) => QubitNoiseModel::Thermal { xi },
            ("thermal", None) => {
                return Err(field(
                    "qubit_noise_model",
                    CliError::Validation("qubit_noise_model: \"thermal\" requires xi".into()),
                ))
            }
            (other, _) => {
                return Err(field(
                    "qubit_noise_model",
                    CliError::Validation(format!(
                        "qubit_noise_model: expected \"dephasing\" or \"thermal\", got `{other}`"
                    )),
                ))
            }
        };

        match (gamma_th, temperature_ratio) {
            (None, None) => {}
            (Some(g), Some(r)) => {
                if raw.get("k_therm").is_some() {
                    return Err(field(
                        "k_therm",
                        CliError::Validation("k_therm: set either k_therm or gamma_th/temperature_ratio".into()),
                    ));
                }
                p.k_therm = thermal_measurement_rate(g, r).map_err(|e| field("gamma_th", e.into()))?;
                cfg.thermal = Some(ThermalBath {
                    gamma_th: g,
                    temperature_ratio: r,
                });
            }
            (Some(_), None) | (None, Some(_)) => {
                let key = if gamma_th.is_some() { "gamma_th" } else { "temperature_ratio" };
                return Err(field(
                    key,
                    CliError::Validation("gamma_th and temperature_ratio must be given together".into()),
                ));
            }
        }

        p.validate().map_err(|e| {
            let key = match &e {
                qjump_core::Error::InvalidParameter { name, .. } => Some(name.to_string()),
                _ => None,
            };
            (key, CliError::from(e))
        })?;

        cfg.initial.alpha = Complex64::new(alpha_re, alpha_im);
        if !cfg.initial.alpha.re.is_finite() || !cfg.initial.alpha.im.is_finite() {
            return Err(field("alpha0", CliError::Validation("alpha0: must be finite".into())));
        }
        // Cheap, and catches a coherent state that does not fit in fock_dim.
        cfg.initial
            .prepare(p.fock_dim)
            .map_err(|e| field("alpha0", CliError::Validation(format!("alpha0: {e}"))))?;

        let d = cfg.detector;
        if !(d.upper.is_finite() && d.lower.is_finite() && d.lower < d.upper) {
            return Err(field(
                "upper_threshold",
                CliError::Validation("upper_threshold must exceed lower_threshold".into()),
            ));
        }
        if !(d.amplitude_floor.is_finite() && d.amplitude_floor >= 0.0) {
            return Err(field(
                "amplitude_floor",
                CliError::Validation("amplitude_floor: must be >= 0".into()),
            ));
        }

        cfg.sweep = match (sweep_param, sweep_values) {
            (None, None) => None,
            (Some(param), values) => Some(SweepAxis {
                param,
                values: values.unwrap_or_default(),
            }),
            (None, Some(_)) => {
                return Err(field(
                    "sweep_values",
                    CliError::Validation("sweep_values given without sweep_param".into()),
                ))
            }
        };

        cfg.params = p;
        cfg.raw = raw;
        Ok(cfg)
    }

    /// Mode-specific requirements, checked before any compute.
    fn validate_mode(&self) -> Result<()> {
        match self.mode {
            Mode::Ensemble | Mode::Sweep if self.n_trajectories == 0 => Err(CliError::Validation(format!(
                "n_trajectories: {} requires at least 1",
                self.mode.as_str()
            ))),
            Mode::Sweep => {
                let axis = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("sweep mode requires sweep_param and sweep_values".into()))?;
                if axis.values.is_empty() {
                    return Err(CliError::Validation("sweep_values: at least one value required".into()));
                }
                for &v in &axis.values {
                    self.with_value(&axis.param, v)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `(k_tot, η_tot)` as used by the integrator.
    pub fn effective_rates(&self) -> (f64, f64) {
        effective_rates(&self.params)
    }

    /// The resolved configuration in the same grammar. Loading it back
    /// reproduces this configuration.
    pub fn to_snapshot(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut kv = |k: &str, v: Value| {
            writeln!(s, "{k} = {v}").expect("write to String");
        };
        let fl = |x: f64| Value::Float(x);
        let st = |x: &str| Value::String(x.to_string());

        kv("mode", st(self.mode.as_str()));
        kv("seed", Value::Integer(p.seed as i64));
        kv("f", fl(p.f));
        kv("lambda0", fl(p.lambda0));
        kv("omega_c", fl(p.omega_c));
        kv("omega_j", fl(p.omega_j));
        kv("gamma_fb", fl(p.gamma_fb));
        kv("k_meas", fl(p.k_meas));
        match self.thermal {
            Some(b) => {
                kv("gamma_th", fl(b.gamma_th));
                kv("temperature_ratio", fl(b.temperature_ratio));
            }
            None => kv("k_therm", fl(p.k_therm)),
        }
        kv("eta_det", fl(p.eta_det));
        if let Some(e) = p.eta_tot_override {
            kv("eta_tot_override", fl(e));
        }
        kv("kappa", fl(p.kappa));
        match p.qubit_noise_model {
            QubitNoiseModel::SigmaXDephasing => kv("qubit_noise_model", st("dephasing")),
            QubitNoiseModel::Thermal { xi } => {
                kv("qubit_noise_model", st("thermal"));
                kv("xi", fl(xi));
            }
        }
        kv("mu_fb", fl(p.mu_fb));
        kv("dt", fl(p.dt));
        kv("t_final", fl(p.t_final));
        kv("fock_dim", Value::Integer(p.fock_dim as i64));
        kv("output_stride", Value::Integer(p.output_stride as i64));
        kv("full_rate_theta", Value::Boolean(p.full_rate_theta));
        kv("alpha0", fl(self.initial.alpha.re));
        kv("alpha0_im", fl(self.initial.alpha.im));
        kv(
            "qubit_init",
            st(match self.initial.qubit {
                QubitInit::Plus => "plus",
                QubitInit::Minus => "minus",
                _ => "superposition",
            }),
        );
        kv("upper_threshold", fl(self.detector.upper));
        kv("lower_threshold", fl(self.detector.lower));
        kv("amplitude_floor", fl(self.detector.amplitude_floor));
        kv("n_trajectories", Value::Integer(self.n_trajectories as i64));
        if let Some(axis) = &self.sweep {
            kv("sweep_param", st(&axis.param));
            kv("sweep_values", Value::Array(axis.values.iter().map(|&v| fl(v)).collect()));
        }
        kv("output_dir", st(&self.output_dir.display().to_string()));
        if let Some(input) = &self.input {
            kv("input", st(&input.display().to_string()));
        }
        kv("emit_plots", Value::Boolean(self.emit_plots));

        let (k_tot, eta_tot) = self.effective_rates();
        writeln!(s, "# derived: k_therm = {:?}, k_tot = {k_tot:?}, eta_tot = {eta_tot:?}", p.k_therm)
            .expect("write to String");
        s
    }
}
