use qubit_reach::bloch::{aux_rhs, bloch_rhs, BlochVector};
use qubit_reach::ode::{integrate, IntegratorConfig};
use qubit_reach::{Error, SystemParams};

fn decay(_t: f64, y: &[f64], d: &mut [f64]) -> qubit_reach::Result<()> {
    d[0] = -y[0];
    Ok(())
}

#[test]
fn exponential_decay() {
    let t = integrate(decay, &[1.0], 1.0, &IntegratorConfig::default()).unwrap();
    assert!((t.last_state()[0] - (-1.0f64).exp()).abs() < 1e-8);
    assert_eq!(t.end_time(), 1.0);
    let t = integrate(decay, &[1.0], 1.0, &IntegratorConfig::rk4(1e-2)).unwrap();
    assert!((t.last_state()[0] - (-1.0f64).exp()).abs() < 1e-8);
}

#[test]
fn free_bloch_spiral_rate() {
    let p = SystemParams::scaled(0.1).unwrap();
    let rhs = |_t: f64, y: &[f64], d: &mut [f64]| {
        let v = bloch_rhs(BlochVector::new(y[0], y[1], y[2]), 0.0, 0.0, &p)?;
        d.copy_from_slice(&v);
        Ok(())
    };
    let traj = integrate(rhs, &[1.0, 0.0, 0.0], 20.0, &IntegratorConfig::default()).unwrap();
    // Least-squares fit of log|rx + i ry| against t.
    let (mut sx, mut sy, mut sxx, mut sxy, n) = (0.0, 0.0, 0.0, 0.0, 200.0);
    for k in 0..200 {
        let t = 0.1 * k as f64;
        let y = traj.sample(t);
        let l = y[0].hypot(y[1]).ln();
        sx += t;
        sy += l;
        sxx += t * t;
        sxy += t * l;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((slope + 0.05).abs() < 0.01 * 0.05, "slope {slope}");
}

fn spiral_error(cfg: &IntegratorConfig) -> f64 {
    let p = SystemParams::scaled(0.1).unwrap();
    let rhs = |_t: f64, y: &[f64], d: &mut [f64]| {
        d.copy_from_slice(&aux_rhs(y[0], y[1], 0.0, &p));
        Ok(())
    };
    let t_end = 3.0 * std::f64::consts::PI;
    let y = integrate(rhs, &[0.0, 1.0], t_end, cfg).unwrap();
    let y = y.last_state();
    let amp = (-0.05 * t_end).exp();
    (y[0] + amp * t_end.sin()).hypot(y[1] - amp * t_end.cos())
}

#[test]
fn spiral_oracle() {
    assert!(spiral_error(&IntegratorConfig::adaptive(1e-12, 1e-12)) < 1e-6);
}

#[test]
fn rk4_is_fourth_order() {
    let h = 3.0 * std::f64::consts::PI / 64.0;
    let coarse = spiral_error(&IntegratorConfig::rk4(h));
    let fine = spiral_error(&IntegratorConfig::rk4(0.5 * h));
    assert!(coarse / fine >= 14.0, "ratio {}", coarse / fine);
}

#[test]
fn adaptive_agrees_with_fixed_step() {
    let tol = 1e-10;
    let a = spiral_error(&IntegratorConfig::adaptive(tol, tol));
    let b = spiral_error(&IntegratorConfig::rk4(1e-3));
    assert!((a - b).abs() < 10.0 * tol, "{a} vs {b}");
    let a = integrate(decay, &[1.0], 3.0, &IntegratorConfig::adaptive(tol, tol)).unwrap();
    let b = integrate(decay, &[1.0], 3.0, &IntegratorConfig::rk4(1e-3)).unwrap();
    assert!((a.last_state()[0] - b.last_state()[0]).abs() < 10.0 * tol);
}

#[test]
fn dense_output_between_nodes() {
    let t = integrate(
        decay,
        &[1.0],
        2.0,
        &IntegratorConfig::default().with_max_step(0.05),
    )
    .unwrap();
    assert!(t.is_dense());
    for k in 0..100 {
        let s = 0.0199 * k as f64;
        assert!((t.sample(s)[0] - (-s).exp()).abs() < 1e-8);
    }
}

#[test]
fn rejects_bad_configs_and_step_limits() {
    assert!(integrate(decay, &[1.0], 1.0, &IntegratorConfig::rk4(0.0)).is_err());
    assert!(integrate(decay, &[1.0], 1.0, &IntegratorConfig::adaptive(-1.0, 1e-9)).is_err());
    let cfg = IntegratorConfig {
        max_steps: 3,
        ..IntegratorConfig::rk4(1e-3)
    };
    assert!(matches!(
        integrate(decay, &[1.0], 1.0, &cfg),
        Err(Error::StepLimit(3))
    ));
}

#[test]
fn rhs_errors_propagate() {
    let bad = |t: f64, _y: &[f64], _d: &mut [f64]| {
        if t > 0.5 {
            Err(Error::ZeroDecoherence)
        } else {
            Ok(())
        }
    };
    assert!(integrate(bad, &[0.0], 1.0, &IntegratorConfig::default()).is_err());
}
