use std::f64::consts::FRAC_PI_2;

use super::{theta_rhs, ExtremalState, ExtremalTrajectory};
use crate::bloch::{wrap_angle, R_MIN};
use crate::control::ControlSchedule;
use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Sampling interval of the piecewise-constant control, in units of `1/omega`.
    pub dt_scaled: f64,
    /// Length of the initial pulse turning `theta` from `pi/2` to `theta0`, in
    /// units of `1/omega`.
    pub pulse_scaled: f64,
    /// Stop at this scaled time instead of the end of the extremal.
    pub horizon_scaled: Option<f64>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            dt_scaled: 1e-3,
            pulse_scaled: 1e-6,
            horizon_scaled: None,
        }
    }
}

/// `u` from the `theta` equation of the cylindrical system, physical units.
fn control_at(s: &ExtremalState, params: &SystemParams) -> Result<f64> {
    if !(s.radius.abs() > R_MIN) {
        return Err(Error::Singular {
            what: "R",
            value: s.radius,
            min: R_MIN,
        });
    }
    let w = params.omega();
    let g = params.gamma();
    let theta_dot = w * theta_rhs(s, params)?;
    let (sn, c) = s.theta.sin_cos();
    let two_kappa_u =
        theta_dot + w * (s.z / s.radius) * sn + 0.25 * g * (2.0 * s.theta).sin() - g * c / s.radius;
    Ok(two_kappa_u / (2.0 * params.kappa()))
}

/// Physical control realizing an extremal from `r = (0, 0, 1)`, with `n = 0`.
///
/// The state starts at `theta = pi/2`, so a short strong pulse first rotates it
/// to the seed angle. Afterwards `u` is held constant on intervals of length
/// `dt_scaled / omega`, each value being the Simpson average over the interval.
pub fn recover_control(
    traj: &ExtremalTrajectory,
    params: &SystemParams,
    opts: &RecoveryOptions,
) -> Result<ControlSchedule> {
    if !(opts.dt_scaled > 0.0 && opts.pulse_scaled > 0.0) {
        return Err(Error::InvalidParameter(
            "dt and pulse length must be > 0".into(),
        ));
    }
    let horizon = opts
        .horizon_scaled
        .unwrap_or(f64::INFINITY)
        .min(traj.end_time());
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter("empty extremal".into()));
    }
    let w = params.omega();
    let two_kappa = 2.0 * params.kappa();

    let mut times = Vec::new();
    let mut u = Vec::new();
    let turn = wrap_angle(traj.raw_state(0).theta - FRAC_PI_2);
    let offset = if turn != 0.0 {
        let pulse = opts.pulse_scaled / w;
        times.push(0.0);
        u.push(turn / (two_kappa * pulse));
        pulse
    } else {
        0.0
    };

    let steps = (horizon / opts.dt_scaled).ceil().max(1.0) as usize;
    for k in 0..steps {
        let a = k as f64 * opts.dt_scaled;
        let b = ((k + 1) as f64 * opts.dt_scaled).min(horizon);
        if b <= a {
            break;
        }
        let ua = control_at(&traj.sample_raw(a), params)?;
        let um = control_at(&traj.sample_raw(0.5 * (a + b)), params)?;
        let ub = control_at(&traj.sample_raw(b), params)?;
        times.push(offset + a / w);
        u.push((ua + 4.0 * um + ub) / 6.0);
    }
    let n = vec![0.0; u.len()];
    ControlSchedule::new(times, u, n, offset + horizon / w)
}
