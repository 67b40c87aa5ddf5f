use qjump_core::control::QubitFeedbackSetting;
use qjump_core::{
    build_operator_set, gaussian_stream, hamiltonian_at, lindblad_evolve, run_ensemble, sme_step,
    steady_state_prediction, Error, InitialState, QubitSign, SimParams,
};

fn small() -> SimParams {
    SimParams {
        fock_dim: 10,
        t_final: 0.4,
        output_stride: 20,
        seed: 17,
        ..SimParams::default()
    }
}

#[test]
fn step_reports_the_measurement_increment() {
    let params = small();
    let ops = build_operator_set(params.fock_dim).unwrap();
    let rho = InitialState::default().prepare(params.fock_dim).unwrap();
    let x = ops.x.trace_product(rho.matrix()).re;
    let dw = 0.013;
    let out = sme_step(&rho, 0.0, &params, &ops, dw, None).unwrap();
    let (k, eta) = params.effective_rates();
    let want = x * params.dt + dw / (8.0 * eta * k).sqrt();
    assert!((out.record_increment - want).abs() < 1e-15);
    assert_eq!(out.dw_used, dw);
    assert!(!out.record_noise_infinite);

    let d = out.rho_next.diagnostics();
    assert!(d.trace_error < 1e-12);
    assert_eq!(d.hermiticity_deviation, 0.0);
    assert!(d.min_eigenvalue > -1e-12);
}

#[test]
fn feedback_step_turns_the_qubit_toward_minus() {
    let params = SimParams { mu_fb: 200.0, ..small() };
    let ops = build_operator_set(params.fock_dim).unwrap();
    let rho = InitialState::default().prepare(params.fock_dim).unwrap();
    let ctl = QubitFeedbackSetting::from_params(&params).unwrap();
    let mut state = rho.clone();
    for i in 0..20 {
        let t = i as f64 * params.dt;
        state = sme_step(&state, t, &params, &ops, 0.0, ctl).unwrap().rho_next;
    }
    assert!(state.bloch_vector()[2] < rho.bloch_vector()[2] - 0.1);
}

#[test]
fn ensembles_ignore_worker_count() {
    let params = small();
    let rho = InitialState::default().prepare(params.fock_dim).unwrap();
    let a = run_ensemble(&rho, &params, None, 5, 1).unwrap();
    let b = run_ensemble(&rho, &params, None, 5, 3).unwrap();
    for (ra, rb) in a.completed().zip(b.completed()) {
        assert_eq!(ra.seed, rb.seed);
        assert_eq!(ra.x_mean, rb.x_mean);
        assert_eq!(ra.record, rb.record);
    }
    assert_eq!(a.n_completed(), 5);
}

#[test]
fn steady_state_needs_damping() {
    let params = SimParams {
        gamma_fb: 0.0,
        ..SimParams::default()
    };
    assert_eq!(
        steady_state_prediction(&params, QubitSign::Plus).unwrap_err(),
        Error::UndefinedSteadyState
    );
}

#[test]
fn noise_streams_repeat_per_seed() {
    let draw = |seed| {
        let mut g = gaussian_stream(seed);
        (0..8).map(|_| g.next_standard()).collect::<Vec<f64>>()
    };
    assert_eq!(draw(9), draw(9));
    assert_ne!(draw(9), draw(10));
}

#[test]
fn hamiltonian_is_hermitian() {
    let params = SimParams {
        omega_j: 0.3,
        ..small()
    };
    let ops = build_operator_set(params.fock_dim).unwrap();
    let h = hamiltonian_at(&params, &ops, 0.37, -1.2).unwrap();
    assert!(h.hermiticity_deviation() < 1e-14);
}

#[test]
fn reference_integrator_rejects_feedback() {
    let params = SimParams { mu_fb: 1.0, ..small() };
    let rho = InitialState::default().prepare(params.fock_dim).unwrap();
    assert!(matches!(
        lindblad_evolve(&rho, &params),
        Err(Error::InvalidParameter { .. })
    ));
}
