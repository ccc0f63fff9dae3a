use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;

use super::{
    costate_rhs, hamiltonian, hamiltonian_theta, project_theta, seed, theta_rhs, velocity,
    ExtremalSeed, ExtremalState,
};
use crate::error::{Error, Result};
use crate::ode::{integrate_observed, IntegratorConfig, Trajectory};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalOptions {
    pub integrator: IntegratorConfig,
    /// `|H_theta|` above which `theta` is re-projected onto the argmax branch.
    pub projection_threshold: f64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default().with_max_step(0.05),
            projection_threshold: 1e-6,
        }
    }
}

/// An integrated extremal. The underlying trajectory is kept unfolded (it may
/// cross `R = 0`); accessors return the representative with `R >= 0`.
#[derive(Debug, Clone)]
pub struct ExtremalTrajectory {
    pub seed: ExtremalSeed,
    trajectory: Trajectory,
    /// Number of argmax re-projections applied during integration.
    pub projections: usize,
}

impl ExtremalTrajectory {
    pub fn raw(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        self.trajectory.end_time()
    }

    pub fn taus(&self) -> &[f64] {
        self.trajectory.times()
    }

    pub fn raw_state(&self, k: usize) -> ExtremalState {
        ExtremalState::from_slice(self.trajectory.state(k))
    }

    pub fn state(&self, k: usize) -> ExtremalState {
        self.raw_state(k).folded()
    }

    pub fn sample_raw(&self, tau: f64) -> ExtremalState {
        let mut buf = [0.0; 5];
        self.trajectory.sample_into(tau, &mut buf);
        ExtremalState::from_slice(&buf)
    }

    pub fn sample(&self, tau: f64) -> ExtremalState {
        self.sample_raw(tau).folded()
    }

    /// `max |H(tau) - H(0)|` over accepted nodes.
    pub fn hamiltonian_drift(&self, params: &SystemParams) -> f64 {
        let h0 = hamiltonian(&self.raw_state(0), params);
        (0..self.len())
            .map(|k| (hamiltonian(&self.raw_state(k), params) - h0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |H_theta|` over accepted nodes.
    pub fn stationarity_residual(&self, params: &SystemParams) -> f64 {
        (0..self.len())
            .map(|k| hamiltonian_theta(&self.raw_state(k), params).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `tau,z,R,p,q,theta,H`, folded to `R >= 0`.
    pub fn write_csv<W: Write>(&self, mut w: W, params: &SystemParams) -> Result<()> {
        writeln!(w, "tau,z,R,p,q,theta,H")?;
        for k in 0..self.len() {
            let s = self.state(k);
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.taus()[k],
                s.z,
                s.radius,
                s.p,
                s.q,
                s.theta,
                hamiltonian(&s, params)
            )?;
        }
        Ok(())
    }
}

/// Integrates the coupled `(z, R, p, q, theta)` system from `(0, 1)`.
///
/// On failure the part integrated so far is returned alongside the error.
pub fn integrate_extremal_partial(
    seedv: ExtremalSeed,
    t_scaled: f64,
    params: &SystemParams,
    opts: &ExtremalOptions,
) -> (ExtremalTrajectory, Option<Error>) {
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let s = ExtremalState::from_slice(y);
        let [dz, dr] = velocity(s.z, s.radius, s.theta, params);
        let [dp, dq] = costate_rhs(&s, params);
        out[0] = dz;
        out[1] = dr;
        out[2] = dp;
        out[3] = dq;
        out[4] = theta_rhs(&s, params)?;
        Ok(())
    };
    let mut projections = 0usize;
    let threshold = opts.projection_threshold;
    let hook = |_t: f64, y: &mut [f64]| -> Result<bool> {
        let s = ExtremalState::from_slice(y);
        if hamiltonian_theta(&s, params).abs() <= threshold {
            return Ok(false);
        }
        y[4] = project_theta(&s, params)?;
        projections += 1;
        Ok(true)
    };
    let y0 = seedv.initial_state().to_array();
    let run = integrate_observed(rhs, &y0, t_scaled, &opts.integrator, hook);
    (
        ExtremalTrajectory {
            seed: seedv,
            trajectory: run.trajectory,
            projections,
        },
        run.failure,
    )
}

pub fn integrate_extremal(
    seedv: ExtremalSeed,
    t_scaled: f64,
    params: &SystemParams,
    opts: &ExtremalOptions,
) -> Result<ExtremalTrajectory> {
    match integrate_extremal_partial(seedv, t_scaled, params, opts) {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

/// `k`-th costate angle of an `n`-seed sweep: `2 pi (k + 1/2) / n`.
///
/// The half-step offset keeps the grid away from `psi = pi/2`, where the start
/// point is stationary and the extremal never leaves it.
pub fn seed_psi(k: usize, n: usize) -> f64 {
    TAU * (k as f64 + 0.5) / n as f64
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// One entry per seed in sweep order; partial trajectories are kept.
    pub extremals: Vec<Option<ExtremalTrajectory>>,
    /// `(seed index, error)` for seeds that stopped early or could not start.
    pub failures: Vec<(usize, Error)>,
}

/// Integrates `n_seeds` extremals in parallel; output order is deterministic.
pub fn sweep(
    n_seeds: usize,
    t_scaled: f64,
    params: &SystemParams,
    opts: &ExtremalOptions,
) -> Result<SweepResult> {
    if n_seeds == 0 {
        return Err(Error::InvalidParameter("n_seeds must be > 0".into()));
    }
    let psis: Vec<f64> = (0..n_seeds).map(|k| seed_psi(k, n_seeds)).collect();
    Ok(sweep_angles(&psis, t_scaled, params, opts))
}

/// Integrates one extremal per costate angle, in parallel.
///
/// Entry `k` of `extremals` is `None` when no seed could be formed for `psis[k]`.
pub fn sweep_angles(
    psis: &[f64],
    t_scaled: f64,
    params: &SystemParams,
    opts: &ExtremalOptions,
) -> SweepResult {
    let runs: Vec<Result<(ExtremalTrajectory, Option<Error>)>> = psis
        .par_iter()
        .map(|&psi| {
            seed(psi, params).map(|s| integrate_extremal_partial(s, t_scaled, params, opts))
        })
        .collect();
    let mut extremals = Vec::with_capacity(psis.len());
    let mut failures = Vec::new();
    for (k, r) in runs.into_iter().enumerate() {
        match r {
            Ok((traj, fail)) => {
                if let Some(e) = fail {
                    failures.push((k, e));
                }
                extremals.push(Some(traj));
            }
            Err(e) => {
                failures.push((k, e));
                extremals.push(None);
            }
        }
    }
    SweepResult {
        extremals,
        failures,
    }
}
