//! Affine vector fields, their Lie brackets and full-rank certificates.

use nalgebra::{Matrix3, Vector3};

use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default threshold below which a determinant is treated as zero.
pub const DET_TOL: f64 = 1e-12;

/// The field `r -> A r + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub a: Matrix3<f64>,
    pub b: Vector3<f64>,
}

impl AffineField {
    pub fn new(a: Matrix3<f64>, b: Vector3<f64>) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Matrix3::zeros(), Vector3::zeros())
    }

    pub fn eval(&self, r: BlochVector) -> Vector3<f64> {
        self.a * Vector3::new(r.rx, r.ry, r.rz) + self.b
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.a + other.a, self.b + other.b)
    }

    /// Largest absolute coefficient of `self - other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        (self.a - other.a).amax().max((self.b - other.b).amax())
    }
}

/// `[f, g] = Df g - Dg f`, computed on the coefficients.
///
/// For `f = A r + a` and `g = B r + b` this is `(A B - B A) r + (A b - B a)`.
pub fn bracket(f: &AffineField, g: &AffineField) -> AffineField {
    AffineField::new(f.a * g.a - g.a * f.a, f.a * g.b - g.a * f.b)
}

/// The drift and control fields together with the brackets used by the certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFields {
    /// Indexed `f0..=f7`.
    pub fields: [AffineField; 8],
}

impl CanonicalFields {
    pub fn get(&self, k: usize) -> &AffineField {
        &self.fields[k]
    }
}

pub fn canonical_fields(params: &SystemParams) -> CanonicalFields {
    let e = params.ratio();
    #[rustfmt::skip]
    let f0 = AffineField::new(
        Matrix3::new(
            -0.5 * e, -1.0,     0.0,
            1.0,      -0.5 * e, 0.0,
            0.0,      0.0,      -e,
        ),
        Vector3::new(0.0, 0.0, e),
    );
    #[rustfmt::skip]
    let f1 = AffineField::new(
        Matrix3::new(
            0.0, 0.0, 0.0,
            0.0, 0.0, -1.0,
            0.0, 1.0, 0.0,
        ),
        Vector3::zeros(),
    );
    #[rustfmt::skip]
    let f2 = AffineField::new(
        Matrix3::new(
            -0.5, 0.0,  0.0,
            0.0,  -0.5, 0.0,
            0.0,  0.0,  -1.0,
        ),
        Vector3::zeros(),
    );
    let f3 = bracket(&f0, &f1);
    let f4 = bracket(&f0, &f3);
    let f5 = bracket(&f1, &f3);
    let f6 = bracket(&f1, &f5);
    let mut f7 = f0;
    for _ in 0..4 {
        f7 = bracket(&f1, &f7);
    }
    CanonicalFields {
        fields: [f0, f1, f2, f3, f4, f5, f6, f7],
    }
}

fn det3(u: Vector3<f64>, v: Vector3<f64>, w: Vector3<f64>) -> f64 {
    Matrix3::from_columns(&[u, v, w]).determinant()
}

/// `det(f_i(r), f_j(r), f_k(r))` for canonical indices.
pub fn field_determinant(fields: &CanonicalFields, idx: [usize; 3], r: BlochVector) -> f64 {
    det3(
        fields.get(idx[0]).eval(r),
        fields.get(idx[1]).eval(r),
        fields.get(idx[2]).eval(r),
    )
}

/// The triples tried in order by [`rank_certificate`].
pub const CANDIDATE_TRIPLES: [[usize; 3]; 4] = [[1, 3, 5], [1, 3, 6], [3, 4, 6], [1, 3, 7]];

#[derive(Debug, Clone, PartialEq)]
pub struct RankCertificate {
    pub rank: usize,
    /// Names of three fields spanning the tangent space, when rank is 3.
    pub witness: Option<[String; 3]>,
    pub determinant: f64,
}

/// Brackets of `f0` and `f1` up to depth 4, labelled, without trivial repeats.
pub fn brackets_to_depth4(fields: &CanonicalFields) -> Vec<(String, AffineField)> {
    let mut by_depth: Vec<Vec<(String, AffineField)>> = vec![vec![
        ("f0".to_string(), *fields.get(0)),
        ("f1".to_string(), *fields.get(1)),
    ]];
    for _ in 1..4 {
        let prev = by_depth.last().unwrap();
        let mut next = Vec::new();
        for (gl, g) in &by_depth[0] {
            for (hl, h) in prev {
                let b = bracket(g, h);
                if b.a.amax() == 0.0 && b.b.amax() == 0.0 {
                    continue;
                }
                next.push((format!("[{gl},{hl}]"), b));
            }
        }
        by_depth.push(next);
    }
    by_depth.into_iter().flatten().collect()
}

/// Certifies that the brackets span the tangent space at `r`.
pub fn rank_certificate(r: BlochVector, params: &SystemParams) -> Result<RankCertificate> {
    rank_certificate_with_tol(r, params, DET_TOL)
}

pub fn rank_certificate_with_tol(
    r: BlochVector,
    params: &SystemParams,
    det_tol: f64,
) -> Result<RankCertificate> {
    if params.gamma() <= 0.0 {
        return Err(Error::ZeroDecoherence);
    }
    let fields = canonical_fields(params);
    for idx in CANDIDATE_TRIPLES {
        let d = field_determinant(&fields, idx, r);
        if d.abs() > det_tol {
            return Ok(RankCertificate {
                rank: 3,
                witness: Some(idx.map(|k| format!("f{k}"))),
                determinant: d,
            });
        }
    }

    // Search the full bracket family for the best-conditioned triple.
    let family = brackets_to_depth4(&fields);
    let values: Vec<Vector3<f64>> = family.iter().map(|(_, f)| f.eval(r)).collect();
    let mut best: Option<([usize; 3], f64)> = None;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            for k in j + 1..values.len() {
                let d = det3(values[i], values[j], values[k]);
                if best.is_none_or(|(_, b)| d.abs() > b.abs()) {
                    best = Some(([i, j, k], d));
                }
            }
        }
    }
    if let Some((idx, d)) = best {
        if d.abs() > det_tol {
            return Ok(RankCertificate {
                rank: 3,
                witness: Some(idx.map(|k| family[k].0.clone())),
                determinant: d,
            });
        }
    }

    let m = nalgebra::DMatrix::from_fn(3, values.len(), |i, j| values[j][i]);
    let sv = m.svd(false, false).singular_values;
    let scale = sv.max().max(1.0);
    let rank = sv.iter().filter(|s| **s > det_tol * scale).count();
    Ok(RankCertificate {
        rank,
        witness: None,
        determinant: best.map_or(0.0, |b| b.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_bracket_vanishes() {
        let f = canonical_fields(&SystemParams::scaled(0.3).unwrap());
        for g in &f.fields {
            assert_eq!(bracket(g, g), AffineField::zero());
        }
    }

    #[test]
    fn f3_coefficients() {
        let e = 0.1;
        let f = canonical_fields(&SystemParams::scaled(e).unwrap());
        #[rustfmt::skip]
        let want = AffineField::new(
            Matrix3::new(
                0.0,  0.0,      1.0,
                0.0,  0.0,      -0.5 * e,
                -1.0, -0.5 * e, 0.0,
            ),
            Vector3::new(0.0, e, 0.0),
        );
        assert!(f.get(3).max_coeff_diff(&want) < 1e-15);
    }

    #[test]
    fn zero_gamma_is_rejected() {
        let p = SystemParams::scaled(0.0).unwrap();
        assert_eq!(
            rank_certificate(BlochVector::NORTH, &p),
            Err(Error::ZeroDecoherence)
        );
    }

    #[test]
    fn axis_falls_back_to_bracket_search() {
        let p = SystemParams::scaled(0.1).unwrap();
        let c = rank_certificate(BlochVector::new(0.4, 0.0, 0.0), &p).unwrap();
        assert_eq!(c.rank, 3);
        assert!(c.determinant.abs() > 1e-4);
    }

    #[test]
    fn north_pole_uses_f7() {
        let p = SystemParams::scaled(0.1).unwrap();
        let c = rank_certificate(BlochVector::NORTH, &p).unwrap();
        assert_eq!(c.witness.unwrap(), ["f1", "f3", "f7"].map(String::from));
        assert!((c.determinant + 0.3).abs() < 1e-14);
    }
}
