use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubit_reach::bloch::BlochVector;
use qubit_reach::control::{simulate, SimulationOptions};
use qubit_reach::pmp::{
    convexity_margin, costate_rhs, hamiltonian, hamiltonian_theta, hamiltonian_theta_theta,
    integrate_extremal, recover_control, seed, seed_psi, seed_roots, seeding_residual, sweep,
    theta_rhs, ExtremalOptions, ExtremalState, RecoveryOptions,
};
use qubit_reach::SystemParams;

fn p01() -> SystemParams {
    SystemParams::scaled(0.1).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> ExtremalState {
    ExtremalState::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-PI..PI),
    )
}

#[test]
fn hamiltonian_examples() {
    let p = p01();
    let s = ExtremalState::new(0.0, 1.0, 0.0, 1.0, FRAC_PI_2);
    assert!(hamiltonian(&s, &p).abs() < 1e-16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let shifted = ExtremalState {
            theta: s.theta + TAU,
            ..s
        };
        assert!((hamiltonian(&s, &p) - hamiltonian(&shifted, &p)).abs() < 1e-13);
        let psi: f64 = rng.gen_range(-PI..PI);
        let at_start = ExtremalState::new(0.0, 1.0, psi.cos(), psi.sin(), s.theta);
        let (sn, c) = s.theta.sin_cos();
        let want = psi.cos() * sn - p.ratio() * psi.sin() * c * (sn - 1.0);
        assert!((hamiltonian_theta(&at_start, &p) - want).abs() < 1e-14);
        assert!((seeding_residual(psi, s.theta, &p) - want).abs() < 1e-15);
    }
}

#[test]
fn theta_derivatives_match_finite_differences() {
    let p = p01();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-5;
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let at = |t: f64| ExtremalState { theta: t, ..s };
        let d1 =
            (hamiltonian(&at(s.theta + h), &p) - hamiltonian(&at(s.theta - h), &p)) / (2.0 * h);
        let d2 = (hamiltonian_theta(&at(s.theta + h), &p)
            - hamiltonian_theta(&at(s.theta - h), &p))
            / (2.0 * h);
        assert!((d1 - hamiltonian_theta(&s, &p)).abs() < 1e-8);
        assert!((d2 - hamiltonian_theta_theta(&s, &p)).abs() < 1e-8);
    }
}

#[test]
fn costate_is_minus_gradient() {
    let p = p01();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let hz = (hamiltonian(&ExtremalState { z: s.z + h, ..s }, &p)
            - hamiltonian(&ExtremalState { z: s.z - h, ..s }, &p))
            / (2.0 * h);
        let hr = (hamiltonian(
            &ExtremalState {
                radius: s.radius + h,
                ..s
            },
            &p,
        ) - hamiltonian(
            &ExtremalState {
                radius: s.radius - h,
                ..s
            },
            &p,
        )) / (2.0 * h);
        let [dp, dq] = costate_rhs(&s, &p);
        assert!((dp + hz).abs() < 1e-7 && (dq + hr).abs() < 1e-7);
    }
    let s = ExtremalState::new(0.3, 0.4, 0.7, -0.2, FRAC_PI_2);
    let [dp, dq] = costate_rhs(&s, &p);
    assert!((dp - 0.05 * 0.7).abs() < 1e-15 && (dq - 0.1 * -0.2).abs() < 1e-15);
}

/// Printed closed form of `theta'` in scaled time.
fn theta_closed_form(s: &ExtremalState, e: f64) -> f64 {
    let (p, q, r, z, t) = (s.p, s.q, s.radius, s.z, s.theta);
    let num = (p * r + q * z) * (5.0 * t.sin() + (3.0 * t).sin())
        - 8.0 * p
        - 4.0 * e * q * t.cos().powi(3);
    let den = (p * r - q * z) * t.cos() - e * q * (t.sin() + r * (2.0 * t).cos());
    e / 8.0 * num / den
}

#[test]
fn theta_rhs_matches_closed_form_on_the_stationary_set() {
    let p = p01();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100 {
        let mut s = random_state(&mut rng);
        // Move theta onto a stationary point of H.
        for _ in 0..50 {
            s.theta -= hamiltonian_theta(&s, &p) / hamiltonian_theta_theta(&s, &p);
        }
        if hamiltonian_theta(&s, &p).abs() > 1e-13 || hamiltonian_theta_theta(&s, &p).abs() < 1e-2 {
            continue;
        }
        let a = theta_rhs(&s, &p).unwrap();
        let b = theta_closed_form(&s, p.ratio());
        assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
        checked += 1;
    }
}

#[test]
fn convexity_margin_examples() {
    let p = p01();
    assert!(convexity_margin(0.0, 1.0, FRAC_PI_2, &p).abs() < 1e-16);
    assert_eq!(convexity_margin(0.3, 0.0, 1.0, &p), 0.0);
    for k in 0..720 {
        let t = TAU * k as f64 / 720.0;
        assert!(convexity_margin(0.0, 0.5, t, &p) <= 0.1 * 0.5 * (0.5 - 1.0) + 1e-16);
        for j in 1..100 {
            let r = j as f64 / 100.0;
            assert!(convexity_margin(0.0, r, t, &p) < 0.0);
        }
    }
}

#[test]
fn seeds_solve_the_seeding_equation_and_maximize_h() {
    let p = p01();
    for k in 0..256 {
        let psi = seed_psi(k, 256);
        let s = seed(psi, &p).unwrap();
        assert!(seeding_residual(psi, s.theta0, &p).abs() < 1e-12);
        let h0 = hamiltonian(&s.initial_state(), &p);
        for j in 0..720 {
            let t = TAU * j as f64 / 720.0;
            let h = hamiltonian(
                &ExtremalState {
                    theta: t,
                    ..s.initial_state()
                },
                &p,
            );
            assert!(h0 >= h - 1e-9, "psi {psi}: H(theta0) = {h0} < H({t}) = {h}");
        }
    }
}

#[test]
fn special_seed_angles() {
    let p = p01();
    // psi = 0 reduces to sin(theta) = 0.
    let s = seed(0.0, &p).unwrap();
    assert!(s.theta0.sin().abs() < 1e-12);
    let roots = seed_roots(0.0, &p);
    assert!(roots.iter().all(|t| t.sin().abs() < 1e-10));
    // psi = pi/2: roots where cos(theta)(sin(theta) - 1) = 0.
    let s = seed(FRAC_PI_2, &p).unwrap();
    let (sn, c) = s.theta0.sin_cos();
    assert!((c * (sn - 1.0)).abs() < 1e-4);
}

#[test]
fn sweep_stays_in_the_disc_and_conserves_h() {
    let p = p01();
    let res = sweep(256, 7.0, &p, &ExtremalOptions::default()).unwrap();
    assert!(res.failures.is_empty());
    for t in res.extremals.iter().flatten() {
        assert!(t.hamiltonian_drift(&p) < 1e-8);
        assert!(t.stationarity_residual(&p) < 1e-8);
        for k in 0..t.len() {
            let s = t.raw_state(k);
            assert!(s.z * s.z + s.radius * s.radius <= 1.0 + 1e-9);
            assert!(s.p.hypot(s.q) > 0.0);
            assert!(t.state(k).radius >= 0.0);
        }
    }
}

#[test]
fn recovered_control_replays_the_extremal() {
    let p = SystemParams::new(2.0, 0.25, 0.3).unwrap();
    let opts = ExtremalOptions::default();
    for psi in [0.4, 2.0, 4.0] {
        let traj = integrate_extremal(seed(psi, &p).unwrap(), 1.0, &p, &opts).unwrap();
        let sched = recover_control(&traj, &p, &RecoveryOptions::default()).unwrap();
        assert!(sched.n().iter().all(|&n| n == 0.0));
        let sim = SimulationOptions {
            u_max: Some(2.0 * sched.max_abs_u()),
            ..SimulationOptions::default()
        };
        let run = simulate(BlochVector::NORTH, &sched, &p, &sim).unwrap();
        let offset = sched.final_time() - traj.end_time() / p.omega();
        for k in 0..=50 {
            let tau = traj.end_time() * k as f64 / 50.0;
            let r = run.sample(offset + tau / p.omega());
            let s = traj.sample(tau);
            assert!((r.rx - s.z).abs() < 1e-4 && (r.ry.hypot(r.rz) - s.radius).abs() < 1e-4);
        }
    }
}
