//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.
//!
//! Run a subset with `cargo test --test acceptance -- 2 5`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use qjump_cli::{run, Mode, RunConfig};
use qjump_core::analysis::{branch_for_qubit, mode_concentration, wrap_angle, PhaseHistogram};
use qjump_core::model::{thermal_high_occupancy_generator, thermal_qubit_generator};
use qjump_core::sme::simulate_trajectory_observed;
use qjump_core::{
    build_operator_set, effective_rates, ensemble_mean, lindblad_evolve, record_diagnostics, run_ensemble,
    simulate_trajectory, steady_state_prediction, thermal_measurement_rate, InitialState, JumpDetector,
    QubitFeedbackSetting, QubitInit, QubitSign, SimParams,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn start(fock_dim: usize) -> qjump_core::DensityMatrix {
    InitialState::default().prepare(fock_dim).unwrap()
}

/// Circular mean of angles.
fn circular_mean(a: &[f64]) -> f64 {
    let (s, c) = a.iter().fold((0.0, 0.0), |(s, c), &t| (s + t.sin(), c + t.cos()));
    s.atan2(c)
}

fn state_validity() -> Outcome {
    let params = SimParams {
        seed: 1,
        ..SimParams::default()
    };
    assert_eq!((params.t_final, params.dt, params.fock_dim), (500.0, 1.0 / 2500.0, 30));
    let ops = build_operator_set(params.fock_dim).unwrap();
    let (mut tr, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut samples = 0;
    simulate_trajectory_observed(&start(params.fock_dim), &params, None, &ops, |_, _, rho| {
        let d = rho.diagnostics();
        tr = tr.max(d.trace_error);
        herm = herm.max(d.hermiticity_deviation);
        min_eig = min_eig.min(d.min_eigenvalue);
        samples += 1;
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    check(
        tr < 1e-9 && herm < 1e-10 && min_eig > -1e-6,
        format!("{samples} states: max |Tr-1| {tr:.2e}, max Hermiticity dev {herm:.2e}, min eigenvalue {min_eig:.2e}"),
    )
}

fn steady_state_lock() -> Outcome {
    let base = SimParams {
        kappa: 0.0,
        k_meas: 0.0,
        fock_dim: 20,
        ..SimParams::default()
    };
    let settle = 50.0 / base.gamma_fb;
    let window = 20.0;
    let params = SimParams {
        t_final: settle + window,
        ..base
    };
    let mut phases = Vec::new();
    let mut details = Vec::new();
    let mut ok = true;
    for (sign, init, want) in [
        (QubitSign::Plus, QubitInit::Plus, -FRAC_PI_2),
        (QubitSign::Minus, QubitInit::Minus, FRAC_PI_2),
    ] {
        let pred = steady_state_prediction(&params, sign).unwrap();
        ok &= (pred.amplitude - 4.0).abs() < 1e-12 && wrap_angle(pred.phase - want).abs() < 1e-12;
        let rho0 = InitialState {
            qubit: init,
            ..InitialState::default()
        }
        .prepare(params.fock_dim)
        .unwrap();
        let r = simulate_trajectory(&rho0, &params, None).map_err(|e| e.to_string())?;
        let from = r.times.iter().position(|&t| t >= settle - 1e-9).unwrap();
        let amp = r.amplitude[from..].iter().sum::<f64>() / (r.len() - from) as f64;
        let phase = circular_mean(&r.theta[from..]);
        ok &= (amp - 4.0).abs() / 4.0 < 0.02 && wrap_angle(phase - want).abs() < 0.05;
        details.push(format!("{sign:?}: amplitude {amp:.4}, phase {phase:+.4}"));
        phases.push(phase);
    }
    let split = wrap_angle(phases[1] - phases[0]).abs();
    ok &= (split - PI).abs() < 0.1;
    check(ok, format!("{}; separation {split:.4}", details.join("; ")))
}

fn oracle_equivalence() -> Outcome {
    let params = SimParams {
        t_final: 50.0,
        fock_dim: 20,
        seed: 2024,
        ..SimParams::default()
    };
    let (_, eta) = effective_rates(&params);
    assert_eq!((eta, params.kappa, params.mu_fb), (0.7, 0.01, 0.0));
    let rho0 = start(params.fock_dim);
    let ens = run_ensemble(&rho0, &params, None, 200, 0).map_err(|e| e.to_string())?;
    let mean = ensemble_mean(ens.completed()).map_err(|e| e.to_string())?;
    let oracle = lindblad_evolve(&rho0, &params).map_err(|e| e.to_string())?;
    let per_checkpoint = (mean.times.len() - 1) / 20;
    let mut worst: f64 = 0.0;
    for c in 1..=20 {
        let k = c * per_checkpoint;
        assert!((mean.times[k] - oracle.times[k]).abs() < 1e-12);
        let z = (mean.x_mean[k] - oracle.x_mean[k]).abs() / mean.x_stderr[k];
        worst = worst.max(z);
    }
    check(
        worst < 3.0 && mean.count == 200,
        format!("{} trajectories, largest deviation {worst:.2} standard errors over 20 checkpoints", mean.count),
    )
}

fn purity_preservation() -> Outcome {
    let params = SimParams {
        kappa: 0.0,
        k_therm: 0.0,
        eta_det: 1.0,
        t_final: 10.0,
        output_stride: 10,
        seed: 4,
        ..SimParams::default()
    };
    let rho0 = start(params.fock_dim);
    assert!((1.0 - rho0.purity()).abs() < 1e-12);
    let r = simulate_trajectory(&rho0, &params, None).map_err(|e| e.to_string())?;
    let loss = r.purity.iter().map(|p| 1.0 - p).fold(0.0, f64::max);
    check(loss < 1e-4, format!("max 1-Tr(rho^2) = {loss:.2e} over {} samples", r.len()))
}

fn record_statistics() -> Outcome {
    let params = SimParams {
        output_stride: 1,
        fock_dim: 20,
        seed: 5,
        ..SimParams::default()
    };
    let params = SimParams {
        t_final: 1e5 * params.dt,
        ..params
    };
    let r = simulate_trajectory(&start(params.fock_dim), &params, None).map_err(|e| e.to_string())?;
    let n = r.len();
    assert_eq!(n - 1, 100_000);
    let d = record_diagnostics(&r.record[1..], &r.x_mean[..n - 1], &params).map_err(|e| e.to_string())?;
    let (k, eta) = effective_rates(&params);
    let predicted = params.dt / (8.0 * eta * k);
    assert!((d.predicted_variance - predicted).abs() < 1e-15 * predicted);
    check(
        (d.ratio() - 1.0).abs() < 0.05,
        format!(
            "empirical {:.6e} vs predicted {predicted:.6e} (ratio {:.4})",
            d.empirical_variance,
            d.ratio()
        ),
    )
}

fn figure_structure() -> Outcome {
    let detector = JumpDetector::default();
    let mut good = 0;
    let mut details = Vec::new();
    for seed in 1..=5 {
        let params = SimParams {
            seed,
            ..SimParams::default()
        };
        let r = simulate_trajectory(&start(params.fock_dim), &params, None).map_err(|e| e.to_string())?;
        let stats = detector.analyze(&r).map_err(|e| e.to_string())?;
        let b = PhaseHistogram::new(&r.theta, 36).bimodality(0.5);
        let modes_ok = (b.mode_minus + FRAC_PI_2).abs() < 0.3 && (b.mode_plus - FRAC_PI_2).abs() < 0.3;
        let conc = mode_concentration(&r.theta, &stats.telegraph, [b.mode_minus, b.mode_plus], FRAC_PI_4);
        let pass = b.is_bimodal && modes_ok && stats.jump_count >= 1 && conc >= 0.7;
        good += pass as usize;
        details.push(format!(
            "seed {seed}: modes {:+.2}/{:+.2}, {} jumps, {:.0}% near a mode",
            b.mode_minus,
            b.mode_plus,
            stats.jump_count,
            100.0 * conc
        ));
    }
    check(good >= 4, format!("{good}/5 runs ({})", details.join("; ")))
}

fn feedback_asymmetry() -> Outcome {
    let base = SimParams {
        eta_tot_override: Some(0.95),
        t_final: 100.0,
        fock_dim: 20,
        seed: 7,
        ..SimParams::default()
    };
    let target = branch_for_qubit(QubitSign::Minus);
    let rho0 = start(base.fock_dim);
    let detector = JumpDetector::default();
    let occupancies = |mu: f64| -> Result<Vec<f64>, String> {
        let params = SimParams { mu_fb: mu, ..base.clone() };
        let ctl = QubitFeedbackSetting::from_params(&params).map_err(|e| e.to_string())?;
        let ens = run_ensemble(&rho0, &params, ctl.as_ref(), 20, 0).map_err(|e| e.to_string())?;
        ens.records
            .iter()
            .map(|r| {
                let r = r.as_ref().ok_or("trajectory diverged")?;
                detector.analyze(r).map(|s| s.occupancy(target)).map_err(|e| e.to_string())
            })
            .collect()
    };
    let with = occupancies(200.0)?;
    let without = occupancies(0.0)?;
    // Paired by noise seed.
    let d: Vec<f64> = with.iter().zip(&without).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let sd = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    check(
        mean > 2.0 * se,
        format!(
            "{target:?}-branch occupancy {:.3} with feedback vs {:.3} without; difference {mean:.3} = {:.1} standard errors",
            avg(&with),
            avg(&without),
            mean / se
        ),
    )
}

fn thermal_formulas() -> Outcome {
    let mut worst: f64 = 0.0;
    for &g in &[1e-4, 3e-3, 0.01, 0.25, 1.0, 7.5] {
        for &r in &[1e-3f64, 0.05, 0.5, 1.0, 3.0, 12.0, 40.0] {
            // coth(r/2) = 1 + 2/(e^r - 1)
            let want = g / 4.0 * (1.0 + 2.0 / r.exp_m1());
            let got = thermal_measurement_rate(g, r).unwrap();
            worst = worst.max((got - want).abs() / want);
        }
    }
    for &k in &[1e-3, 0.01, 0.2] {
        for &kt in &[0.0, 1e-4, 0.01, 0.5] {
            for &eta in &[0.1, 0.7, 1.0] {
                let p = SimParams {
                    k_meas: k,
                    k_therm: kt,
                    eta_det: eta,
                    ..SimParams::default()
                };
                let (k_tot, eta_tot) = effective_rates(&p);
                let want_eta = eta / (1.0 + kt / k);
                worst = worst.max((k_tot - (k + kt)).abs() / (k + kt));
                worst = worst.max((eta_tot - want_eta).abs() / want_eta);
            }
        }
    }
    check(worst < 1e-12, format!("largest relative error {worst:.2e}"))
}

type Mat4 = [[Complex64; 4]; 4];

fn qubit_op(q: [[f64; 2]; 2]) -> Mat4 {
    // Qubit factor first, two resonator levels.
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for r in 0..2 {
                m[2 * a + r][2 * b + r] = Complex64::new(q[a][b], 0.0);
            }
        }
    }
    m
}

/// Frobenius norm of the superoperator `ρ ↦ Σ w (2cρc† − {c†c, ρ})`.
fn dissipator_norm(terms: &[(f64, Mat4)]) -> f64 {
    let mut total = 0.0;
    for col in 0..16 {
        let mut e = [[Complex64::new(0.0, 0.0); 4]; 4];
        e[col / 4][col % 4] = Complex64::new(1.0, 0.0);
        let mut img = [[Complex64::new(0.0, 0.0); 4]; 4];
        for &(w, c) in terms {
            for i in 0..4 {
                for j in 0..4 {
                    let mut v = Complex64::new(0.0, 0.0);
                    for a in 0..4 {
                        for b in 0..4 {
                            // 2 c e c†
                            v += 2.0 * c[i][a] * e[a][b] * c[j][b].conj();
                            // c†c e + e c†c
                            v -= c[a][i].conj() * c[a][b] * e[b][j];
                            v -= e[i][a] * c[b][a].conj() * c[b][j];
                        }
                    }
                    img[i][j] += w * v;
                }
            }
        }
        total += img.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    }
    total.sqrt()
}

fn footnote_equivalence() -> Outcome {
    let ops = build_operator_set(2).unwrap();
    let lower = qubit_op([[0.0, 0.0], [1.0, 0.0]]);
    let raise = qubit_op([[0.0, 1.0], [0.0, 0.0]]);
    let kappa = 0.01;
    let mut ok = true;
    let mut scaled = Vec::new();
    for xi in [10.0, 100.0, 1000.0] {
        let th = thermal_qubit_generator(kappa, xi, &ops).unwrap().superoperator(4);
        let hi = thermal_high_occupancy_generator(kappa, xi, &ops).unwrap().superoperator(4);
        let dist = (&th - &hi).frobenius_norm() / hi.frobenius_norm();
        // Independent: the two differ by exactly one emission term.
        let want = dissipator_norm(&[(kappa, lower)]) / dissipator_norm(&[(kappa * xi, lower), (kappa * xi, raise)]);
        ok &= (dist - want).abs() < 1e-10 * want;
        scaled.push(xi * dist);
    }
    ok &= scaled.iter().all(|s| (s - scaled[0]).abs() < 1e-9 * scaled[0]);
    check(
        ok,
        format!("xi * distance = {:.6} / {:.6} / {:.6} at xi = 10 / 100 / 1000", scaled[0], scaled[1], scaled[2]),
    )
}

fn determinism() -> Outcome {
    let text = "t_final = 5\nfock_dim = 12\nn_trajectories = 8\nseed = 31\nmu_fb = 50\n";
    let mut outputs = Vec::new();
    for threads in [1, 2, 4] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut c = RunConfig::parse_str(text).map_err(|e| e.to_string())?;
        c.set_output_dir(dir.path().to_path_buf());
        c.set_mode(Mode::Ensemble).map_err(|e| e.to_string())?;
        c.threads = threads;
        run(&c).map_err(|e| e.to_string())?;
        let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        let snap = String::from_utf8(read("params.snapshot")).unwrap();
        let snap = snap.replace(&dir.path().display().to_string(), "<out>");
        outputs.push((read("ensemble_mean.csv"), read("jumps_summary.csv"), snap));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let bytes = outputs[0].0.len() + outputs[0].1.len();
    check(same, format!("worker counts 1/2/4 give identical files ({bytes} CSV bytes)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("state validity", state_validity),
        ("steady-state lock", steady_state_lock),
        ("oracle equivalence", oracle_equivalence),
        ("purity preservation", purity_preservation),
        ("record statistics", record_statistics),
        ("phase structure", figure_structure),
        ("feedback asymmetry", feedback_asymmetry),
        ("thermal-rate formulas", thermal_formulas),
        ("high-occupancy limit", footnote_equivalence),
        ("determinism", determinism),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {id:>2} {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
