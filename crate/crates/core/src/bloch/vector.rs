use crate::error::{Error, Result};
use crate::params::SystemParams;

/// A point of the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub const NORTH: BlochVector = BlochVector {
        rx: 0.0,
        ry: 0.0,
        rz: 1.0,
    };

    pub const fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }

    pub fn norm_squared(&self) -> f64 {
        self.rx * self.rx + self.ry * self.ry + self.rz * self.rz
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// True when `|r|^2 <= 1 + tol`.
    pub fn in_ball(&self, tol: f64) -> bool {
        self.norm_squared() <= 1.0 + tol
    }
}

/// The three vector fields of the Bloch equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlochField {
    /// Free precession plus amplitude damping, scaled by 1/omega.
    F0,
    /// Rotation about the rx axis generated by the coherent control.
    F1,
    /// Dephasing and relaxation generated by the incoherent control.
    F2,
}

impl BlochField {
    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Self::F0),
            1 => Some(Self::F1),
            2 => Some(Self::F2),
            _ => None,
        }
    }
}

pub fn field_f(field: BlochField, r: BlochVector, params: &SystemParams) -> [f64; 3] {
    let BlochVector { rx, ry, rz } = r;
    match field {
        BlochField::F0 => {
            let e = params.ratio();
            [-ry - 0.5 * e * rx, rx - 0.5 * e * ry, e * (1.0 - rz)]
        }
        BlochField::F1 => [0.0, -rz, ry],
        BlochField::F2 => [-0.5 * rx, -0.5 * ry, -rz],
    }
}

/// `omega f0(r) + 2 kappa f1(r) u + gamma f2(r) n`.
pub fn bloch_rhs(r: BlochVector, u: f64, n: f64, params: &SystemParams) -> Result<[f64; 3]> {
    if n < 0.0 || n.is_nan() {
        return Err(Error::NegativeIncoherentControl(n));
    }
    let f0 = field_f(BlochField::F0, r, params);
    let f1 = field_f(BlochField::F1, r, params);
    let f2 = field_f(BlochField::F2, r, params);
    let (w, c, g) = (params.omega(), 2.0 * params.kappa() * u, params.gamma() * n);
    Ok([
        w * f0[0] + c * f1[0] + g * f2[0],
        w * f0[1] + c * f1[1] + g * f2[1],
        w * f0[2] + c * f1[2] + g * f2[2],
    ])
}

/// Exact `d|r|^2/dt` along the Bloch equations; independent of `u`.
///
/// Equals `-gamma (rx^2 + ry^2 + 2 rz^2 - 2 rz) - gamma n (rx^2 + ry^2 + 2 rz^2)`.
/// For `n = 0` this is twice `r . r'`, i.e. twice the familiar
/// `-gamma/2 (rx^2 + ry^2 + 2 rz^2 - 2 rz)`. On the unit sphere it is never
/// positive.
pub fn ball_norm_derivative(r: BlochVector, n: f64, params: &SystemParams) -> Result<f64> {
    if n < 0.0 || n.is_nan() {
        return Err(Error::NegativeIncoherentControl(n));
    }
    let BlochVector { rx, ry, rz } = r;
    let a = rx * rx + ry * ry + 2.0 * rz * rz;
    Ok(-params.gamma() * (a - 2.0 * rz) - params.gamma() * n * a)
}
