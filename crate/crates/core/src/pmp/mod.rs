//! Pontryagin maximum principle for the time-optimal auxiliary problem.
//!
//! Time is scaled, `tau = omega t`, and `e = gamma / omega`. The auxiliary
//! system with control angle `theta` reads
//!
//! ```text
//! z' = -e z / 2 - R cos(theta)
//! R' = z cos(theta) - e R (3 - cos(2 theta)) / 4 + e sin(theta)
//! ```
//!
//! and the Hamiltonian is `H = p z' + q R'`. Along an extremal `theta`
//! maximizes `H`, so `H_theta = 0` and `theta'` follows by differentiating
//! that identity in time.

mod extremal;
mod recover;

pub use extremal::{
    integrate_extremal, integrate_extremal_partial, seed_psi, sweep, sweep_angles, ExtremalOptions,
    ExtremalTrajectory, SweepResult,
};
pub use recover::{recover_control, RecoveryOptions};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Threshold on `|H_theta_theta|` below which the argmax branch is degenerate.
pub const DENOMINATOR_TOL: f64 = 1e-10;

/// Phase point `(z, R, p, q, theta)` of the extremal system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtremalState {
    pub z: f64,
    pub radius: f64,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
}

impl ExtremalState {
    pub const fn new(z: f64, radius: f64, p: f64, q: f64, theta: f64) -> Self {
        Self {
            z,
            radius,
            p,
            q,
            theta,
        }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3], s[4])
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.z, self.radius, self.p, self.q, self.theta]
    }

    /// Image under `(R, q, theta) -> (-R, -q, theta + pi)`, which preserves `H`.
    pub fn mirrored(self) -> Self {
        Self::new(
            self.z,
            -self.radius,
            self.p,
            -self.q,
            self.theta + std::f64::consts::PI,
        )
    }

    /// Representative with `R >= 0`.
    pub fn folded(self) -> Self {
        if self.radius < 0.0 {
            self.mirrored()
        } else {
            self
        }
    }
}

/// Which stationary point of `H` in `theta` a seed follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalSeed {
    pub psi0: f64,
    pub theta0: f64,
    pub branch: Branch,
}

impl ExtremalSeed {
    pub fn initial_state(&self) -> ExtremalState {
        ExtremalState::new(0.0, 1.0, self.psi0.cos(), self.psi0.sin(), self.theta0)
    }
}

/// `(z', R')` in scaled time.
pub fn velocity(z: f64, radius: f64, theta: f64, params: &SystemParams) -> [f64; 2] {
    let e = params.ratio();
    let (s, c) = theta.sin_cos();
    [
        -0.5 * e * z - radius * c,
        z * c - 0.25 * e * radius * (3.0 - (2.0 * theta).cos()) + e * s,
    ]
}

pub fn hamiltonian(s: &ExtremalState, params: &SystemParams) -> f64 {
    let [dz, dr] = velocity(s.z, s.radius, s.theta, params);
    s.p * dz + s.q * dr
}

/// `dH/dtheta`.
pub fn hamiltonian_theta(s: &ExtremalState, params: &SystemParams) -> f64 {
    let e = params.ratio();
    let (sn, c) = s.theta.sin_cos();
    (s.p * s.radius - s.q * s.z) * sn + e * s.q * (c - s.radius * sn * c)
}

/// `d^2H/dtheta^2`.
pub fn hamiltonian_theta_theta(s: &ExtremalState, params: &SystemParams) -> f64 {
    let e = params.ratio();
    let (sn, c) = s.theta.sin_cos();
    (s.p * s.radius - s.q * s.z) * c - e * s.q * (sn + s.radius * (2.0 * s.theta).cos())
}

/// `(p', q') = -(dH/dz, dH/dR)`.
pub fn costate_rhs(s: &ExtremalState, params: &SystemParams) -> [f64; 2] {
    let e = params.ratio();
    let c = s.theta.cos();
    [
        0.5 * e * s.p - s.q * c,
        s.p * c + 0.25 * e * s.q * (3.0 - (2.0 * s.theta).cos()),
    ]
}

/// `theta'` keeping `H_theta = 0` along the flow.
pub fn theta_rhs(s: &ExtremalState, params: &SystemParams) -> Result<f64> {
    let den = hamiltonian_theta_theta(s, params);
    if !(den.abs() > DENOMINATOR_TOL) {
        return Err(Error::DegenerateBranch(den.abs()));
    }
    let e = params.ratio();
    let (sn, c) = s.theta.sin_cos();
    let [dz, dr] = velocity(s.z, s.radius, s.theta, params);
    let [dp, dq] = costate_rhs(s, params);
    let h_z = -s.q * sn;
    let h_r = s.p * sn - e * s.q * sn * c;
    let h_p = s.radius * sn;
    let h_q = e * (c - s.radius * sn * c) - s.z * sn;
    Ok(-(h_z * dz + h_r * dr + h_p * dp + h_q * dq) / den)
}

/// `xi eta' - eta xi'` for the velocity curve `theta -> (xi, eta)`; negative means
/// the curve turns strictly clockwise.
pub fn convexity_margin(_z: f64, radius: f64, theta: f64, params: &SystemParams) -> f64 {
    params.ratio() * radius * (radius * theta.sin().powi(3) - 1.0)
}

/// `H_theta` at the start point `(0, 1)` with costate `(cos psi, sin psi)`.
pub fn seeding_residual(psi0: f64, theta: f64, params: &SystemParams) -> f64 {
    let e = params.ratio();
    psi0.cos() * theta.sin() - e * psi0.sin() * theta.cos() * (theta.sin() - 1.0)
}

const SEED_SCAN: usize = 4096;

/// All roots of the seeding equation in `[0, 2 pi)`.
pub fn seed_roots(psi0: f64, params: &SystemParams) -> Vec<f64> {
    let f = |t: f64| seeding_residual(psi0, t, params);
    let mut roots: Vec<f64> = Vec::new();
    let h = TAU / SEED_SCAN as f64;
    for i in 0..SEED_SCAN {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let r = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
            roots.push(r.rem_euclid(TAU));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    roots
}

/// Initial maximizer for the costate direction `psi0`.
pub fn seed(psi0: f64, params: &SystemParams) -> Result<ExtremalSeed> {
    seed_with_branch(psi0, Branch::Max, params)
}

pub fn seed_with_branch(psi0: f64, branch: Branch, params: &SystemParams) -> Result<ExtremalSeed> {
    let h = |t: f64| {
        hamiltonian(
            &ExtremalState::new(0.0, 1.0, psi0.cos(), psi0.sin(), t),
            params,
        )
    };
    let roots = seed_roots(psi0, params);
    let pick = roots.into_iter().map(|t| (t, h(t))).reduce(|a, b| {
        let better = match branch {
            Branch::Max => b.1 > a.1,
            Branch::Min => b.1 < a.1,
        };
        if better {
            b
        } else {
            a
        }
    });
    match pick {
        Some((theta0, _)) => Ok(ExtremalSeed {
            psi0,
            theta0,
            branch,
        }),
        None => Err(Error::NoSeedRoot(psi0)),
    }
}

/// Refines `theta` to the nearby root of `H_theta` by Newton iteration.
pub fn project_theta(s: &ExtremalState, params: &SystemParams) -> Result<f64> {
    let mut st = *s;
    for _ in 0..20 {
        let g = hamiltonian_theta(&st, params);
        let d = hamiltonian_theta_theta(&st, params);
        if !(d.abs() > DENOMINATOR_TOL) {
            return Err(Error::DegenerateBranch(d.abs()));
        }
        let step = (g / d).clamp(-0.1, 0.1);
        st.theta -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    Ok(st.theta)
}
