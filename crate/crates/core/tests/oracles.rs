//! Independent cross-checks: finite differences, closed-form dynamics,
//! numerical frame transformations and eigendecompositions.

use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_relative_eq;
use nalgebra::SymmetricEigen;
use satd_holonomy::dynamics::{
    evolve_master, evolve_unitary, propagator, DensityMatrix, IntegratorConfig, PureState,
};
use satd_holonomy::gates::{run_gate, GateProtocol};
use satd_holonomy::model::{
    adiabatic_frame_hamiltonian, hermiticity_error, transition, AdiabaticFrame, LindbladModel,
    Operator, RamanCavityModel, RamanParams, TripodModel, TwoQubitBasis, LEVEL_1, LEVEL_E,
};
use satd_holonomy::pulse::{
    correct_schedule, theta_dot, vitanov_on, vitanov_theta, AdiabaticSchedule, Amplitude, Dressing,
    Leg,
};
use satd_holonomy::{C64, TWO_PI_MHZ};

const OMEGA_MAX: f64 = 750.0 * TWO_PI_MHZ;
const TAU: f64 = 0.38 / OMEGA_MAX;

fn schedule() -> AdiabaticSchedule {
    AdiabaticSchedule::vitanov(OMEGA_MAX, TAU, 10.0)
        .unwrap()
        .with_varphi(0.5)
        .with_leg_phases(0.2, 2.1)
}

#[test]
fn theta_dot_matches_central_differences() {
    let leg = 10.0 * TAU;
    let h = 1e-6 * TAU;
    for k in 1..200 {
        let t = 2.0 * leg * k as f64 / 200.0;
        if (t - leg).abs() < 2.0 * h {
            continue;
        }
        let fd = (vitanov_theta(t + h, leg, TAU).unwrap()
            - vitanov_theta(t - h, leg, TAU).unwrap())
            / (2.0 * h);
        let exact = theta_dot(t, leg, TAU).unwrap();
        assert!(
            (fd - exact).abs() <= 1e-6 * (PI / (8.0 * TAU)),
            "t = {t:e}: {fd} vs {exact}"
        );

        let l = Leg::at(t, leg);
        let fd2 = (vitanov_on(l, t + h, leg, TAU).1 - vitanov_on(l, t - h, leg, TAU).1) / (2.0 * h);
        let exact2 = vitanov_on(l, t, leg, TAU).2;
        assert!(
            (fd2 - exact2).abs() <= 1e-5 / (TAU * TAU),
            "t = {t:e}: {fd2} vs {exact2}"
        );
    }
}

#[test]
fn custom_profile_reproduces_analytic_pulses() {
    // The Vitanov angle fed through the finite-difference path.
    let leg = 10.0 * TAU;
    let profile = Arc::new(move |t: f64| vitanov_on(Leg::at(t, leg), t, leg, TAU).0);
    let custom =
        AdiabaticSchedule::custom(profile, Amplitude::Constant(OMEGA_MAX), leg, TAU).unwrap();
    let analytic = AdiabaticSchedule::vitanov(OMEGA_MAX, TAU, 10.0).unwrap();
    let a = correct_schedule(&analytic, &Dressing::satd()).unwrap();
    let c = correct_schedule(&custom, &Dressing::satd()).unwrap();
    for leg_id in Leg::BOTH {
        let (lo, hi) = leg_id.window(leg);
        for k in 0..=100 {
            let t = lo + (hi - lo) * k as f64 / 100.0;
            let (x, y) = (
                a.drive_on(leg_id, t).unwrap(),
                c.drive_on(leg_id, t).unwrap(),
            );
            for i in 0..3 {
                assert!(
                    (x[i] - y[i]).norm() < 1e-5 * OMEGA_MAX,
                    "t = {t:e}, channel {i}"
                );
            }
        }
    }
}

#[test]
fn rabi_oscillation() {
    let omega0 = 2.0 * PI * 100.0e6;
    let h = move |_t: f64| {
        Ok(
            (transition(4, LEVEL_E, LEVEL_1) + transition(4, LEVEL_1, LEVEL_E))
                * C64::from(omega0 / 2.0),
        )
    };
    let psi0 = PureState::basis(4, LEVEL_1);
    let traj =
        evolve_unitary(h, &psi0, (0.0, 3.0 / 100.0e6), &IntegratorConfig::default()).unwrap();
    for (t, psi) in &traj.samples {
        let exact = (omega0 * t / 2.0).sin().powi(2);
        assert!((psi.population(LEVEL_E) - exact).abs() < 1e-6);
        assert!((psi.norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn eigenvectors_of_the_tripod_hamiltonian() {
    let s = schedule();
    let model = TripodModel::new(correct_schedule(&s, &Dressing::none()).unwrap());
    for k in 0..=40 {
        let t = s.duration() * k as f64 / 40.0;
        let leg = s.leg_at(t).unwrap();
        let h = model.hamiltonian_on(leg, t).unwrap();
        let frame = AdiabaticFrame::at(&s, leg, t);
        let omega = s.amplitude_on(leg, t).0;
        assert!((&h * &frame.dark1).norm() < 1e-6 * omega);
        assert!((&h * &frame.dark2).norm() < 1e-6 * omega);
        assert!((&h * &frame.plus + &frame.plus * C64::from(omega)).norm() < 1e-6 * omega);
        assert!((&h * &frame.minus - &frame.minus * C64::from(omega)).norm() < 1e-6 * omega);
        let w = frame.matrix();
        assert!((w.adjoint() * &w - Operator::identity(4, 4)).norm() < 1e-12);
    }
}

#[test]
fn corrected_spectrum_is_plus_minus_omega_prime() {
    let s = schedule();
    let c = correct_schedule(&s, &Dressing::satd()).unwrap();
    let model = TripodModel::new(c.clone());
    for k in 0..=40 {
        let t = s.duration() * k as f64 / 40.0;
        let h = model.hamiltonian(t).unwrap();
        let op = c.point(t).unwrap().omega_prime();
        let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let want = [-op, 0.0, 0.0, op];
        for (a, b) in eig.iter().zip(want) {
            assert!((a - b).abs() < 1e-6 * OMEGA_MAX, "{eig:?} vs ±{op}");
        }
    }
}

#[test]
fn frame_transformation_matches_closed_form() {
    // i ċ = (W†HW − iW†Ẇ) c for ψ = W c.
    let s = schedule();
    let model = TripodModel::new(correct_schedule(&s, &Dressing::none()).unwrap());
    let leg_duration = s.leg_duration;
    let h = 1e-6 * leg_duration;
    for leg in Leg::BOTH {
        let (lo, hi) = leg.window(leg_duration);
        for k in 1..20 {
            let t = lo + (hi - lo) * k as f64 / 20.0;
            let w = AdiabaticFrame::at(&s, leg, t).matrix();
            let w_dot = (AdiabaticFrame::at(&s, leg, t + h).matrix()
                - AdiabaticFrame::at(&s, leg, t - h).matrix())
                / C64::from(2.0 * h);
            let full = w.adjoint() * model.hamiltonian_on(leg, t).unwrap() * &w
                - w.adjoint() * w_dot * C64::new(0.0, 1.0);
            let block = full.view((0, 0), (3, 3)).into_owned();
            let expected = adiabatic_frame_hamiltonian(&s, t).unwrap();
            assert!((block - expected).norm() < 1e-5 * OMEGA_MAX, "t = {t:e}");
            // |d₂⟩ is decoupled.
            for i in 0..3 {
                assert!(full[(3, i)].norm() < 1e-5 * OMEGA_MAX);
            }
        }
    }
}

#[test]
fn hamiltonians_are_hermitian() {
    let s = schedule();
    let tripod = TripodModel::new(correct_schedule(&s, &Dressing::msa(0.8)).unwrap());
    let params = RamanParams {
        lambda_c: 750.0 * TWO_PI_MHZ,
        omega_r: 750.0 * TWO_PI_MHZ,
        delta: 4000.0 * TWO_PI_MHZ,
        coupling_divisor: 2.0,
    };
    let g = params.g_max();
    let cs = AdiabaticSchedule::vitanov(g, 0.4 / g, 10.0)
        .unwrap()
        .with_leg_phases(0.0, PI);
    let cavity = RamanCavityModel::new(
        params,
        correct_schedule(&cs, &Dressing::satd()).unwrap(),
        TwoQubitBasis::Extended,
    )
    .unwrap();
    for k in 0..=200 {
        assert_eq!(
            hermiticity_error(&tripod.hamiltonian(s.duration() * k as f64 / 200.0).unwrap()),
            0.0
        );
        assert_eq!(
            hermiticity_error(
                &cavity
                    .hamiltonian(cs.duration() * k as f64 / 200.0)
                    .unwrap()
            ),
            0.0
        );
    }
}

#[test]
fn closed_and_open_paths_agree_without_dissipation() {
    let s = schedule();
    let model = TripodModel::new(correct_schedule(&s, &Dressing::satd()).unwrap());
    let psi0 = PureState::basis(4, 0);
    let cfg = IntegratorConfig::default();
    let span = Leg::First.window(s.leg_duration);
    let h = |t: f64| model.hamiltonian_on(Leg::First, t);
    let psi = evolve_unitary(h, &psi0, span, &cfg).unwrap().into_final();
    let lindblad = LindbladModel::unitary(4, h);
    let rho = evolve_master(&lindblad, &psi0.density(), span, &cfg)
        .unwrap()
        .into_final();
    let f = rho.expectation(&psi.amplitudes).unwrap();
    assert!(f > 1.0 - 1e-8, "fidelity {f}");
}

#[test]
fn time_reversal_returns_the_initial_state() {
    // Real drives: uncorrected pulses with zero leg phase.
    let s = AdiabaticSchedule::vitanov(OMEGA_MAX, TAU, 10.0)
        .unwrap()
        .with_varphi(0.3);
    let model = TripodModel::new(correct_schedule(&s, &Dressing::none()).unwrap());
    let end = s.leg_duration;
    let cfg = IntegratorConfig::default();
    let psi0 = PureState::basis(4, 0);
    let forward = evolve_unitary(
        |t| model.hamiltonian_on(Leg::First, t),
        &psi0,
        (0.0, end),
        &cfg,
    )
    .unwrap()
    .into_final();
    let back = evolve_unitary(
        |t| Ok(model.hamiltonian_on(Leg::First, end - t)? * C64::from(-1.0)),
        &forward,
        (0.0, end),
        &cfg,
    )
    .unwrap()
    .into_final();
    assert!(back.overlap(&psi0.amplitudes) > 1.0 - 1e-6);
}

#[test]
fn propagator_is_unitary() {
    let s = schedule();
    let model = TripodModel::new(correct_schedule(&s, &Dressing::satd()).unwrap());
    let u = propagator(
        |t| model.hamiltonian_on(Leg::Second, t),
        4,
        Leg::Second.window(s.leg_duration),
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!((u.adjoint() * &u - Operator::identity(4, 4)).norm() < 1e-8);
}

#[test]
fn vanishing_coupling_is_the_identity() {
    let params = RamanParams {
        lambda_c: 1e-20,
        omega_r: 1.0,
        delta: 1.0,
        coupling_divisor: 1.0,
    };
    let g = params.g_max();
    let s = AdiabaticSchedule::vitanov(g, 1e-9, 10.0).unwrap();
    let model = RamanCavityModel::new(
        params,
        correct_schedule(&s, &Dressing::none()).unwrap(),
        TwoQubitBasis::Restricted,
    )
    .unwrap();
    let u = propagator(
        |t| model.hamiltonian(t),
        5,
        (0.0, s.duration()),
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!((u - Operator::identity(5, 5)).norm() < 1e-12);
}

#[test]
fn halving_the_step_leaves_the_not_fidelity_unchanged() {
    let base = GateProtocol::not_gate();
    let leg = base.schedule().unwrap().leg_duration;
    let run = |steps: usize| {
        let mut p = base.clone();
        p.integrator = IntegratorConfig::default()
            .with_step(leg / steps as f64 * (1.0 + 1e-12))
            .with_samples(2);
        run_gate(&p, true).unwrap().fidelity
    };
    // 800 steps per leg is close to what auto mode picks for this workload.
    let (coarse, fine) = (run(800), run(1600));
    assert!((coarse - fine).abs() < 1e-8, "{coarse} vs {fine}");
}

#[test]
fn two_level_decay_matches_exponential() {
    let gamma = 2.6 * TWO_PI_MHZ;
    let term = satd_holonomy::model::CollapseTerm {
        label: "a".into(),
        operator: transition(2, 0, 1),
        rate: gamma,
    };
    let model = LindbladModel::new(2, |_| Ok(Operator::zeros(2, 2)), vec![term]).unwrap();
    let traj = evolve_master(
        &model,
        &DensityMatrix::basis(2, 1),
        (0.0, 4.0 / gamma),
        &IntegratorConfig::default(),
    )
    .unwrap();
    for (t, rho) in &traj.samples {
        assert_relative_eq!(rho.population(1), (-gamma * t).exp(), max_relative = 1e-6);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}
