//! Initial-value problem integration.
//!
//! Two methods are provided: classical fixed-step RK4 and the Dormand–Prince
//! 5(4) embedded pair with local extrapolation. Both record the derivative at
//! every accepted node, so any [`Trajectory`] can be evaluated between nodes by
//! cubic Hermite interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    Rk4 { step: f64 },
    /// Dormand–Prince 5(4) with per-component tolerance `abs_tol + rel_tol * |y|`.
    Adaptive { abs_tol: f64, rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub max_steps: usize,
    /// Upper bound on the adaptive step; `f64::INFINITY` for none.
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Adaptive {
                abs_tol: 1e-10,
                rel_tol: 1e-10,
            },
            max_steps: 10_000_000,
            max_step: f64::INFINITY,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            method: Method::Adaptive { abs_tol, rel_tol },
            ..Self::default()
        }
    }

    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::Rk4 { step },
            ..Self::default()
        }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4 { step } if !(step > 0.0 && step.is_finite()) => Err(
                Error::InvalidParameter(format!("step must be > 0, got {step}")),
            ),
            Method::Adaptive { abs_tol, rel_tol } if !(abs_tol > 0.0 && rel_tol > 0.0) => {
                Err(Error::InvalidParameter(format!(
                    "tolerances must be > 0, got {abs_tol}, {rel_tol}"
                )))
            }
            _ if self.max_steps == 0 => {
                Err(Error::InvalidParameter("max_steps must be > 0".into()))
            }
            _ if !(self.max_step > 0.0) => {
                Err(Error::InvalidParameter("max_step must be > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Accepted integration nodes with derivatives for dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
}

impl Trajectory {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, y: &[f64], dy: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(y);
        self.derivs.extend_from_slice(dy);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Dense output is available whenever there are at least two nodes.
    pub fn is_dense(&self) -> bool {
        self.times.len() > 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn derivative(&self, k: usize) -> &[f64] {
        &self.derivs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Cubic Hermite interpolation between the accepted nodes bracketing `t`.
    /// Times outside the covered span are clamped to the ends; an empty
    /// trajectory yields NaN.
    pub fn sample_into(&self, t: f64, out: &mut [f64]) {
        let n = self.len();
        if n == 0 {
            out.fill(f64::NAN);
            return;
        }
        if n == 1 || t <= self.times[0] {
            out.copy_from_slice(self.state(0));
            return;
        }
        if t >= self.times[n - 1] {
            out.copy_from_slice(self.state(n - 1));
            return;
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let (y0, y1) = (self.state(k), self.state(k + 1));
        let (f0, f1) = (self.derivative(k), self.derivative(k + 1));
        for i in 0..self.dim {
            out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
        }
    }

    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(t, &mut out);
        out
    }
}

/// Outcome of an observed integration: whatever was accepted before a
/// failure is kept.
#[derive(Debug, Clone)]
pub struct Integration {
    pub trajectory: Trajectory,
    pub failure: Option<Error>,
}

impl Integration {
    pub fn into_result(self) -> Result<Trajectory> {
        match self.failure {
            None => Ok(self.trajectory),
            Some(e) => Err(e),
        }
    }
}

/// Integrates `y' = rhs(t, y)` on `[0, duration]`.
pub fn integrate<F>(rhs: F, y0: &[f64], duration: f64, cfg: &IntegratorConfig) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    integrate_observed(rhs, y0, duration, cfg, |_, _| Ok(false)).into_result()
}

/// Like [`integrate`], but calls `post_step` after every accepted step. The
/// hook may modify the state in place and must return `true` when it did.
pub fn integrate_observed<F, G>(
    mut rhs: F,
    y0: &[f64],
    duration: f64,
    cfg: &IntegratorConfig,
    mut post_step: G,
) -> Integration
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: FnMut(f64, &mut [f64]) -> Result<bool>,
{
    let dim = y0.len();
    let mut traj = Trajectory::new(dim);
    let fail = |traj: Trajectory, e: Error| Integration {
        trajectory: traj,
        failure: Some(e),
    };

    if let Err(e) = cfg.validate() {
        return fail(traj, e);
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return fail(
            traj,
            Error::InvalidParameter(format!("duration must be > 0, got {duration}")),
        );
    }

    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    if let Err(e) = call(&mut rhs, 0.0, &y, &mut f) {
        return fail(traj, e);
    }
    traj.push(0.0, &y, &f);

    let result = match cfg.method {
        Method::Rk4 { step } => run_rk4(
            &mut rhs,
            &mut post_step,
            &mut y,
            &mut f,
            duration,
            step,
            cfg,
            &mut traj,
        ),
        Method::Adaptive { abs_tol, rel_tol } => run_dopri(
            &mut rhs,
            &mut post_step,
            &mut y,
            &mut f,
            duration,
            abs_tol,
            rel_tol,
            cfg,
            &mut traj,
        ),
    };
    Integration {
        trajectory: traj,
        failure: result.err(),
    }
}

fn call<F>(rhs: &mut F, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    rhs(t, y, dy).map_err(|e| match e {
        e @ Error::Rhs { .. } => e,
        e => Error::Rhs {
            t,
            source: Box::new(e),
        },
    })?;
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            t,
            reason: "non-finite derivative".into(),
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_rk4<F, G>(
    rhs: &mut F,
    post_step: &mut G,
    y: &mut [f64],
    f: &mut [f64],
    duration: f64,
    step: f64,
    cfg: &IntegratorConfig,
    traj: &mut Trajectory,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: FnMut(f64, &mut [f64]) -> Result<bool>,
{
    let dim = y.len();
    let n_steps = (duration / step).ceil().max(1.0) as usize;
    if n_steps > cfg.max_steps {
        return Err(Error::StepLimit(cfg.max_steps));
    }
    let h = duration / n_steps as f64;
    let (mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );
    for n in 0..n_steps {
        let t = n as f64 * h;
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * f[i];
        }
        call(rhs, t + 0.5 * h, &tmp, &mut k2)?;
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        call(rhs, t + 0.5 * h, &tmp, &mut k3)?;
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        call(rhs, t + h, &tmp, &mut k4)?;
        for i in 0..dim {
            y[i] += h / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_new = if n + 1 == n_steps {
            duration
        } else {
            (n + 1) as f64 * h
        };
        post_step(t_new, y)?;
        call(rhs, t_new, y, f)?;
        traj.push(t_new, y, f);
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[allow(clippy::too_many_arguments)]
fn run_dopri<F, G>(
    rhs: &mut F,
    post_step: &mut G,
    y: &mut [f64],
    f: &mut [f64],
    duration: f64,
    abs_tol: f64,
    rel_tol: f64,
    cfg: &IntegratorConfig,
    traj: &mut Trajectory,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: FnMut(f64, &mut [f64]) -> Result<bool>,
{
    let dim = y.len();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut t = 0.0;
    let mut h = initial_step(rhs, y, f, duration, abs_tol, rel_tol, cfg.max_step)?;
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < duration {
        if steps >= cfg.max_steps {
            return Err(Error::StepLimit(cfg.max_steps));
        }
        steps += 1;
        let last = t + h >= duration;
        if last {
            h = duration - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: "step size underflow".into(),
            });
        }

        k[0].copy_from_slice(f);
        for i in 0..dim {
            tmp[i] = y[i] + h * A21 * k[0][i];
        }
        call(rhs, t + C2 * h, &tmp, &mut k[1])?;
        for i in 0..dim {
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        call(rhs, t + C3 * h, &tmp, &mut k[2])?;
        for i in 0..dim {
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        call(rhs, t + C4 * h, &tmp, &mut k[3])?;
        for i in 0..dim {
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        call(rhs, t + C5 * h, &tmp, &mut k[4])?;
        for i in 0..dim {
            tmp[i] = y[i]
                + h * (A61 * k[0][i]
                    + A62 * k[1][i]
                    + A63 * k[2][i]
                    + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        call(rhs, t + h, &tmp, &mut k[5])?;
        for i in 0..dim {
            y_new[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        call(rhs, t + h, &y_new, &mut k[6])?;

        let mut err = 0.0f64;
        for i in 0..dim {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if err <= 1.0 {
            t = if last { duration } else { t + h };
            y.copy_from_slice(&y_new);
            if post_step(t, y)? {
                call(rhs, t, y, f)?;
            } else {
                f.copy_from_slice(&k[6]);
            }
            traj.push(t, y, f);
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(cfg.max_step);
            last_rejected = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            last_rejected = true;
        }
    }
    Ok(())
}

fn initial_step<F>(
    rhs: &mut F,
    y: &[f64],
    f: &[f64],
    duration: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_step: f64,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    // Hairer, Nørsett & Wanner, Solving ODEs I, II.4.
    let dim = y.len();
    let scale: Vec<f64> = y.iter().map(|v| abs_tol + rel_tol * v.abs()).collect();
    let norm = |v: &[f64]| {
        (v.iter()
            .zip(&scale)
            .map(|(a, s)| (a / s).powi(2))
            .sum::<f64>()
            / dim.max(1) as f64)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(duration).min(max_step);
    let y1: Vec<f64> = y.iter().zip(f).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; dim];
    call(rhs, h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(duration).min(max_step))
}
