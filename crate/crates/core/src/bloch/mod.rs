//! State representations and right-hand sides of the qubit dynamics.
//!
//! The Bloch vector `r` parametrizes the density matrix as
//! `rho = (I + rx sx + ry sy + rz sz) / 2`. The controlled dynamics are
//!
//! ```text
//! r' = omega f0(r) + 2 kappa f1(r) u + gamma f2(r) n
//! ```
//!
//! with coherent control `u` and incoherent control `n >= 0`. The same system
//! is available in cylindrical coordinates `(z, R, theta)` around the `rx`
//! axis, as the two-dimensional auxiliary system in which `theta` is promoted
//! to a control, and in polar coordinates on the meridian disc.

mod coords;
mod density;
mod vector;

pub use coords::{
    aux_rhs, cylindrical_rhs, g0, g1, g2, polar_rhs, wrap_angle, CylindricalState, PolarState,
    POLAR_RHO_MIN, R_MIN,
};
pub use density::{
    bloch_to_density, density_to_bloch, hermitian_deviation, lindblad_rhs, CMat2, DensityMatrix,
};
pub use vector::{ball_norm_derivative, bloch_rhs, field_f, BlochField, BlochVector};
