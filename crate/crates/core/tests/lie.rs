use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubit_reach::bloch::BlochVector;
use qubit_reach::lie::{
    bracket, brackets_to_depth4, canonical_fields, field_determinant, rank_certificate, AffineField,
};
use qubit_reach::{Error, SystemParams};

fn random_field(rng: &mut ChaCha8Rng) -> AffineField {
    AffineField::new(
        Matrix3::from_fn(|_, _| rng.gen_range(-2.0..2.0)),
        Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0)),
    )
}

fn affine_from(f: impl Fn(f64, f64, f64) -> [f64; 3]) -> AffineField {
    let b = f(0.0, 0.0, 0.0);
    let cols = [f(1.0, 0.0, 0.0), f(0.0, 1.0, 0.0), f(0.0, 0.0, 1.0)];
    AffineField::new(Matrix3::from_fn(|i, j| cols[j][i] - b[i]), Vector3::from(b))
}

#[test]
fn bracket_is_antisymmetric_and_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (f, g, h) = (
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
        );
        let a: f64 = rng.gen_range(-3.0..3.0);
        assert!(bracket(&f, &f).max_coeff_diff(&AffineField::zero()) == 0.0);
        assert!(
            bracket(&f, &g)
                .add(&bracket(&g, &f))
                .max_coeff_diff(&AffineField::zero())
                < 1e-12
        );
        let lhs = bracket(&f.scale(a).add(&h), &g);
        let rhs = bracket(&f, &g).scale(a).add(&bracket(&h, &g));
        assert!(lhs.max_coeff_diff(&rhs) < 1e-12);
        let jac = bracket(&f, &bracket(&g, &h))
            .add(&bracket(&g, &bracket(&h, &f)))
            .add(&bracket(&h, &bracket(&f, &g)));
        assert!(jac.max_coeff_diff(&AffineField::zero()) < 1e-11);
    }
}

#[test]
fn bracket_is_the_vector_field_commutator() {
    // [f, g](r) = Df g(r) - Dg f(r).
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (f, g) = (random_field(&mut rng), random_field(&mut rng));
        let r = BlochVector::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.3);
        let want = f.a * g.eval(r) - g.a * f.eval(r);
        assert!((bracket(&f, &g).eval(r) - want).amax() < 1e-12);
    }
}

#[test]
fn jacobi_on_canonical_fields() {
    let f = canonical_fields(&SystemParams::scaled(0.1).unwrap());
    let (f0, f1, f3) = (f.get(0), f.get(1), f.get(3));
    let s = bracket(f0, &bracket(f1, f3))
        .add(&bracket(f1, &bracket(f3, f0)))
        .add(&bracket(f3, &bracket(f0, f1)));
    assert!(s.max_coeff_diff(&AffineField::zero()) < 1e-14);
}

#[test]
fn printed_brackets_f3_to_f6() {
    for e in [0.01, 0.1, 0.5] {
        let f = canonical_fields(&SystemParams::scaled(e).unwrap());
        let c = 1.0 - 0.25 * e * e;
        let printed = [
            (
                3,
                affine_from(|x, y, z| [z, e * (1.0 - 0.5 * z), -x - 0.5 * e * y]),
            ),
            (
                4,
                affine_from(|x, y, z| [e * (z - 2.0), c * z, e * x - c * y]),
            ),
            (5, affine_from(|x, y, z| [-y, x + e * y, e * (1.0 - z)])),
            (
                6,
                affine_from(|x, y, z| [-z, e * (2.0 * z - 1.0), x + 2.0 * e * y]),
            ),
        ];
        for (k, want) in printed {
            assert!(f.get(k).max_coeff_diff(&want) < 1e-12, "f{k} at {e}");
        }
    }
}

#[test]
fn f7_is_fourfold_ad_f1() {
    // Exact fourth bracket; its first two components differ in sign from the
    // commonly printed display.
    let e = 0.1;
    let f = canonical_fields(&SystemParams::scaled(e).unwrap());
    let want = affine_from(|x, y, z| [-y, x + 4.0 * e * y, e * (1.0 - 4.0 * z)]);
    assert!(f.get(7).max_coeff_diff(&want) < 1e-12);
}

#[test]
fn determinant_identities_on_sample_grid() {
    let nodes = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for e in [0.01, 0.1, 0.5] {
        let f = canonical_fields(&SystemParams::scaled(e).unwrap());
        for &x in &nodes {
            for &y in &nodes {
                for &z in &nodes {
                    let r = BlochVector::new(x, y, z);
                    let d = field_determinant(&f, [1, 3, 5], r);
                    assert!((d - (y * y - z * z * z + z * z) * e).abs() < 1e-12);
                    let d = field_determinant(&f, [1, 3, 6], r);
                    assert!((d - 3.0 * y * z * z * e).abs() < 1e-12);
                }
            }
            let d = field_determinant(&f, [1, 3, 7], BlochVector::new(x, 0.0, 1.0));
            assert!((d + 3.0 * e).abs() < 1e-12);
            // On the rx axis f6 = -f3, so this triple is degenerate there.
            let d = field_determinant(&f, [3, 4, 6], BlochVector::new(x, 0.0, 0.0));
            assert!(d.abs() < 1e-12);
            let d = field_determinant(&f, [3, 4, 5], BlochVector::new(x, 0.0, 0.0));
            assert!((d - 2.0 * e * (e * e + x * x)).abs() < 1e-12);
        }
    }
}

#[test]
fn rank_three_on_grid() {
    for e in [0.01, 0.1, 0.5] {
        let p = SystemParams::scaled(e).unwrap();
        let c = |k: usize| -1.0 + 2.0 * k as f64 / 20.0;
        for i in 0..21 {
            for j in 0..21 {
                for k in 0..21 {
                    let r = BlochVector::new(c(i), c(j), c(k));
                    if r.norm_squared() > 1.0 + 1e-12 {
                        continue;
                    }
                    let cert = rank_certificate(r, &p).unwrap();
                    assert_eq!(cert.rank, 3, "at {r:?}");
                    assert!(cert.witness.is_some() && cert.determinant.abs() > 1e-12);
                }
            }
        }
    }
}

#[test]
fn rank_witnesses() {
    let p = SystemParams::scaled(0.1).unwrap();
    let c = rank_certificate(BlochVector::new(0.2, 0.3, 0.1), &p).unwrap();
    assert_eq!(c.witness.unwrap(), ["f1", "f3", "f5"].map(String::from));
    let c = rank_certificate(BlochVector::NORTH, &p).unwrap();
    assert_eq!(c.witness.unwrap(), ["f1", "f3", "f7"].map(String::from));
    assert!((c.determinant + 0.3).abs() < 1e-12);
    // The rx axis falls through to the full bracket family.
    let c = rank_certificate(BlochVector::new(0.5, 0.0, 0.0), &p).unwrap();
    assert_eq!(c.rank, 3);
    assert!(c.witness.unwrap().iter().any(|w| w.starts_with('[')));
    assert_eq!(
        rank_certificate(BlochVector::NORTH, &SystemParams::scaled(0.0).unwrap()),
        Err(Error::ZeroDecoherence)
    );
}

#[test]
fn depth_four_family() {
    let f = canonical_fields(&SystemParams::scaled(0.1).unwrap());
    let fam = brackets_to_depth4(&f);
    assert_eq!(&fam[0].0, "f0");
    assert!(fam
        .iter()
        .any(|(l, g)| l == "[f0,f1]" && g.max_coeff_diff(f.get(3)) == 0.0));
    assert!(fam.iter().all(|(l, _)| l.matches('f').count() <= 4));
}
