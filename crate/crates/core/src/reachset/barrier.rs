use crate::bloch::{polar_rhs, PolarState};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// `1/2 (1 + (gamma/omega)^2)^{-1/2}`: any smaller `alpha` yields a lacuna.
pub fn lacuna_alpha_bound(params: &SystemParams) -> Result<f64> {
    if params.gamma() <= 0.0 {
        return Err(Error::ZeroDecoherence);
    }
    let e = params.ratio();
    Ok(0.5 / (1.0 + e * e).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Plus,
    Minus,
}

/// Thin triangle in polar coordinates touching the unit circle along
/// `[phi0 - beta, phi0 + beta]`, with apex at `rho = 1 - alpha e beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierTriangle {
    pub phi0: f64,
    pub alpha: f64,
    pub beta: f64,
    ratio: f64,
}

impl BarrierTriangle {
    pub fn new(phi0: f64, alpha: f64, beta: f64, params: &SystemParams) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha and beta must be > 0, got {alpha}, {beta}"
            )));
        }
        Ok(Self {
            phi0,
            alpha,
            beta,
            ratio: params.ratio(),
        })
    }

    /// `phi` range of an edge.
    pub fn edge_range(&self, edge: Edge) -> (f64, f64) {
        match edge {
            Edge::Plus => (self.phi0, self.phi0 + self.beta),
            Edge::Minus => (self.phi0 - self.beta, self.phi0),
        }
    }

    /// `rho` on an edge at angle `phi`.
    pub fn edge_rho(&self, edge: Edge, phi: f64) -> f64 {
        let k = self.alpha * self.ratio;
        match edge {
            Edge::Plus => 1.0 + k * (phi - self.phi0 - self.beta),
            Edge::Minus => 1.0 - k * (phi - self.phi0 + self.beta),
        }
    }

    /// Apex `(rho, phi)` and the two vertices on the unit circle.
    pub fn vertices(&self) -> [(f64, f64); 3] {
        [
            (1.0 - self.alpha * self.ratio * self.beta, self.phi0),
            (1.0, self.phi0 - self.beta),
            (1.0, self.phi0 + self.beta),
        ]
    }

    /// True if the Cartesian point `(z, R)` lies in the closed triangle.
    pub fn contains(&self, z: f64, r: f64) -> bool {
        let rho = z.hypot(r);
        let phi = self.phi0 + crate::bloch::wrap_angle(r.atan2(z) - self.phi0);
        if rho > 1.0 || (phi - self.phi0).abs() > self.beta {
            return false;
        }
        let edge = if phi >= self.phi0 {
            Edge::Plus
        } else {
            Edge::Minus
        };
        rho >= self.edge_rho(edge, phi)
    }
}

/// Outward component `G = <(rho', phi'), (-1, +-alpha e)>` of the velocity on an edge.
pub fn barrier_values(
    t: &BarrierTriangle,
    edge: Edge,
    phi: f64,
    theta: f64,
    params: &SystemParams,
) -> Result<f64> {
    let (lo, hi) = t.edge_range(edge);
    let slack = 1e-12 * (1.0 + phi.abs());
    if phi < lo - slack || phi > hi + slack {
        return Err(Error::InvalidParameter(format!(
            "phi = {phi} outside edge [{lo}, {hi}]"
        )));
    }
    let rho = t.edge_rho(edge, phi);
    let [rho_dot, phi_dot] = polar_rhs(&PolarState::new(rho, phi), theta, params)?;
    let k = t.alpha * params.ratio();
    Ok(match edge {
        Edge::Plus => -rho_dot + k * phi_dot,
        Edge::Minus => -rho_dot - k * phi_dot,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarrierGrid {
    pub n_phi: usize,
    pub n_theta: usize,
}

impl Default for BarrierGrid {
    fn default() -> Self {
        Self {
            n_phi: 2048,
            n_theta: 720,
        }
    }
}

/// Smallest `G` over both slanted edges on the sampling grid.
pub fn barrier_min(
    phi0: f64,
    alpha: f64,
    beta: f64,
    params: &SystemParams,
    grid: BarrierGrid,
) -> Result<f64> {
    if !(phi0.sin().abs() < 1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "phi0 = {phi0} is a pole; the certificate requires |sin phi0| < 1"
        )));
    }
    if grid.n_phi < 2 || grid.n_theta < 1 {
        return Err(Error::InvalidParameter("barrier grid too small".into()));
    }
    let t = BarrierTriangle::new(phi0, alpha, beta, params)?;
    let mut min = f64::INFINITY;
    for edge in [Edge::Plus, Edge::Minus] {
        let (lo, hi) = t.edge_range(edge);
        for a in 0..grid.n_phi {
            let phi = lo + (hi - lo) * a as f64 / (grid.n_phi - 1) as f64;
            for b in 0..grid.n_theta {
                let theta = std::f64::consts::TAU * b as f64 / grid.n_theta as f64;
                min = min.min(barrier_values(&t, edge, phi, theta, params)?);
            }
        }
    }
    Ok(min)
}

/// Numerical check that all admissible velocities leave the triangle through
/// its slanted edges, i.e. the triangle is a lacuna.
pub fn barrier_certificate(
    phi0: f64,
    alpha: f64,
    beta: f64,
    params: &SystemParams,
    grid: BarrierGrid,
) -> Result<bool> {
    Ok(barrier_min(phi0, alpha, beta, params, grid)? > 0.0)
}
