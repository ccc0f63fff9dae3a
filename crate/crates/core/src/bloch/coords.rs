use std::f64::consts::PI;

use super::vector::BlochVector;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default singularity guard for the `1/R` terms of the cylindrical system.
pub const R_MIN: f64 = 1e-8;
/// Default singularity guard for the `1/rho` term of the polar system.
pub const POLAR_RHO_MIN: f64 = 1e-8;

/// Cylindrical coordinates around the `rx` axis:
/// `rx = z`, `ry = R cos(theta)`, `rz = R sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalState {
    pub z: f64,
    pub radius: f64,
    pub theta: f64,
}

impl CylindricalState {
    pub const fn new(z: f64, radius: f64, theta: f64) -> Self {
        Self { z, radius, theta }
    }

    /// `theta` is 0 on the axis `ry = rz = 0`.
    pub fn from_bloch(r: BlochVector) -> Self {
        let radius = r.ry.hypot(r.rz);
        let theta = if radius == 0.0 { 0.0 } else { r.rz.atan2(r.ry) };
        Self {
            z: r.rx,
            radius,
            theta,
        }
    }

    pub fn to_bloch(self) -> BlochVector {
        let (s, c) = self.theta.sin_cos();
        BlochVector::new(self.z, self.radius * c, self.radius * s)
    }
}

/// Polar coordinates on the meridian disc: `z = rho cos(phi)`, `R = rho sin(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub rho: f64,
    pub phi: f64,
}

impl PolarState {
    pub const fn new(rho: f64, phi: f64) -> Self {
        Self { rho, phi }
    }

    pub fn from_meridian(z: f64, radius: f64) -> Self {
        Self {
            rho: z.hypot(radius),
            phi: radius.atan2(z),
        }
    }

    pub fn to_meridian(self) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        (self.rho * c, self.rho * s)
    }
}

fn guard_radius(radius: f64) -> Result<()> {
    if !(radius.abs() > R_MIN) {
        return Err(Error::Singular {
            what: "R",
            value: radius,
            min: R_MIN,
        });
    }
    Ok(())
}

/// Drift in cylindrical coordinates, in units of `omega`.
pub fn g0(c: &CylindricalState, params: &SystemParams) -> Result<[f64; 3]> {
    guard_radius(c.radius)?;
    let e = params.ratio();
    let CylindricalState {
        z,
        radius: r,
        theta,
    } = *c;
    let (s, co) = theta.sin_cos();
    let d = g2(c);
    Ok([
        -r * co + e * d[0],
        z * co + e * d[1] + e * s,
        -(z / r) * s + e * d[2] + e * co / r,
    ])
}

/// Coherent control field: a pure rotation of `theta`.
pub fn g1() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Incoherent control field.
pub fn g2(c: &CylindricalState) -> [f64; 3] {
    let CylindricalState {
        z,
        radius: r,
        theta,
    } = *c;
    [
        -0.5 * z,
        -0.25 * r * (3.0 - (2.0 * theta).cos()),
        -0.25 * (2.0 * theta).sin(),
    ]
}

/// `omega g0 + 2 kappa g1 u + gamma g2 n`.
pub fn cylindrical_rhs(
    c: &CylindricalState,
    u: f64,
    n: f64,
    params: &SystemParams,
) -> Result<[f64; 3]> {
    if n < 0.0 || n.is_nan() {
        return Err(Error::NegativeIncoherentControl(n));
    }
    let a = g0(c, params)?;
    let b = g2(c);
    let w = params.omega();
    let k = 2.0 * params.kappa() * u;
    let g = params.gamma() * n;
    Ok([
        w * a[0] + g * b[0],
        w * a[1] + g * b[1],
        w * a[2] + k + g * b[2],
    ])
}

/// Auxiliary meridian-plane system with `theta` as the control, physical time.
///
/// `R` may be negative; the system is symmetric under `(R, theta) -> (-R, theta + pi)`.
pub fn aux_rhs(z: f64, radius: f64, theta: f64, params: &SystemParams) -> [f64; 2] {
    let w = params.omega();
    let g = params.gamma();
    let (s, c) = theta.sin_cos();
    [
        -0.5 * g * z - w * radius * c,
        w * z * c - 0.25 * g * radius * (3.0 - (2.0 * theta).cos()) + g * s,
    ]
}

/// Auxiliary system in polar coordinates, derivatives with respect to `omega t`.
pub fn polar_rhs(s: &PolarState, theta: f64, params: &SystemParams) -> Result<[f64; 2]> {
    if !(s.rho > POLAR_RHO_MIN) {
        return Err(Error::Singular {
            what: "rho",
            value: s.rho,
            min: POLAR_RHO_MIN,
        });
    }
    let e = params.ratio();
    let (sp, cp) = s.phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let rho_dot = -0.5 * e * (s.rho + s.rho * sp * sp * st * st - 2.0 * sp * st);
    let phi_dot = ct + 0.5 * e / s.rho * cp * st * (2.0 - s.rho * sp * st);
    Ok([rho_dot, phi_dot])
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn cylindrical_examples() {
        let c = CylindricalState::from_bloch(BlochVector::new(0.0, 1.0, 0.0));
        assert_eq!(c, CylindricalState::new(0.0, 1.0, 0.0));
        let c = CylindricalState::from_bloch(BlochVector::NORTH);
        assert_eq!((c.z, c.radius), (0.0, 1.0));
        assert!((c.theta - FRAC_PI_2).abs() < 1e-15);
        let axis = CylindricalState::from_bloch(BlochVector::new(0.3, 0.0, 0.0));
        assert_eq!(axis.theta, 0.0);
    }

    #[test]
    fn singular_guards() {
        let p = SystemParams::scaled(0.1).unwrap();
        let c = CylindricalState::new(0.5, 1e-9, 0.3);
        assert!(matches!(
            cylindrical_rhs(&c, 0.0, 0.0, &p),
            Err(Error::Singular { .. })
        ));
        assert!(polar_rhs(&PolarState::new(0.0, 0.2), 0.0, &p).is_err());
    }

    #[test]
    fn aux_examples() {
        let p = SystemParams::scaled(0.1).unwrap();
        let v = aux_rhs(0.0, -1.0, -FRAC_PI_2, &p);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        let v = aux_rhs(0.0, 1.0, 0.0, &p);
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] + 0.05).abs() < 1e-15);
    }

    #[test]
    fn polar_rim_example() {
        let p = SystemParams::scaled(0.1).unwrap();
        let v = polar_rhs(&PolarState::new(1.0, FRAC_PI_2), FRAC_PI_2, &p).unwrap();
        assert!(v[0].abs() < 1e-16);
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-FRAC_PI_2) + FRAC_PI_2).abs() < 1e-15);
    }
}
