use num_complex::Complex64 as C64;

use super::vector::BlochVector;
use crate::error::{Error, Result};
use crate::params::SystemParams;

pub type CMat2 = [[C64; 2]; 2];

const HERMITIAN_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

// Basis |0> is the rz = +1 state (the attractor of the free dynamics).
const SIGMA_X: CMat2 = [[ZERO, ONE], [ONE, ZERO]];
const SIGMA_Z: CMat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
/// Lowering operator |0><1|.
const SIGMA_MINUS: CMat2 = [[ZERO, ONE], [ZERO, ZERO]];
/// Raising operator |1><0|.
const SIGMA_PLUS: CMat2 = [[ZERO, ZERO], [ONE, ZERO]];

/// 2x2 density matrix of the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMat2);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and non-negative spectrum within `tol`.
    pub fn new(m: CMat2, tol: f64) -> Result<Self> {
        let dev = hermitian_deviation(&m);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let tr = (m[0][0] + m[1][1]).re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::NonUnitTrace(tr));
        }
        let rho = Self(m);
        let (lo, _) = rho.eigenvalues();
        if lo < -tol {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {lo}")));
        }
        Ok(rho)
    }

    pub fn from_matrix_unchecked(m: CMat2) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = 0.5 * (self.0[0][1] + self.0[1][0].conj());
        let mean = 0.5 * (a + d);
        let half = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean - half, mean + half)
    }
}

pub fn hermitian_deviation(m: &CMat2) -> f64 {
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    pairs
        .iter()
        .map(|&(i, j)| (m[i][j] - m[j][i].conj()).norm())
        .fold(0.0, f64::max)
}

/// `rho = (I + r . sigma) / 2`.
pub fn bloch_to_density(r: BlochVector) -> DensityMatrix {
    DensityMatrix([
        [
            C64::new(0.5 * (1.0 + r.rz), 0.0),
            C64::new(0.5 * r.rx, -0.5 * r.ry),
        ],
        [
            C64::new(0.5 * r.rx, 0.5 * r.ry),
            C64::new(0.5 * (1.0 - r.rz), 0.0),
        ],
    ])
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::NonUnitTrace(tr.re));
    }
    let m = rho.matrix();
    let off = 0.5 * (m[0][1] + m[1][0].conj());
    Ok(BlochVector::new(
        2.0 * off.re,
        -2.0 * off.im,
        (m[0][0] - m[1][1]).re,
    ))
}

fn mul(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn add_scaled(acc: &mut CMat2, s: C64, m: &CMat2) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += s * m[i][j];
        }
    }
}

/// `L rho L^dag - {L^dag L, rho} / 2`.
fn dissipator(l: &CMat2, l_dag: &CMat2, rho: &CMat2) -> CMat2 {
    let jump = mul(&mul(l, rho), l_dag);
    let ldl = mul(l_dag, l);
    let mut out = jump;
    add_scaled(&mut out, C64::new(-0.5, 0.0), &mul(&ldl, rho));
    add_scaled(&mut out, C64::new(-0.5, 0.0), &mul(rho, &ldl));
    out
}

/// GKSL right-hand side generating exactly the Bloch equations.
///
/// Hamiltonian `(omega/2) sz + kappa u sx`, decay `gamma (m + 1) D[s-]` and
/// excitation `gamma m D[s+]` with bath occupation `m = n / 2`. With this
/// normalization `omega` is the Bloch precession frequency and the incoherent
/// term reproduces `gamma f2(r) n`.
pub fn lindblad_rhs(rho: &DensityMatrix, u: f64, n: f64, params: &SystemParams) -> Result<CMat2> {
    if n < 0.0 || n.is_nan() {
        return Err(Error::NegativeIncoherentControl(n));
    }
    let m = rho.matrix();
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }

    let mut h = [[ZERO; 2]; 2];
    add_scaled(&mut h, C64::new(0.5 * params.omega(), 0.0), &SIGMA_Z);
    add_scaled(&mut h, C64::new(params.kappa() * u, 0.0), &SIGMA_X);

    let mut out = [[ZERO; 2]; 2];
    add_scaled(&mut out, -I, &mul(&h, m));
    add_scaled(&mut out, I, &mul(m, &h));

    let occupation = 0.5 * n;
    let g = params.gamma();
    add_scaled(
        &mut out,
        C64::new(g * (occupation + 1.0), 0.0),
        &dissipator(&SIGMA_MINUS, &SIGMA_PLUS, m),
    );
    add_scaled(
        &mut out,
        C64::new(g * occupation, 0.0),
        &dissipator(&SIGMA_PLUS, &SIGMA_MINUS, m),
    );
    Ok(out)
}
