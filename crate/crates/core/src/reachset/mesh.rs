use std::io::Write;

use super::ReachableSet2D;
use crate::error::{Error, Result};

/// Triangle mesh in Bloch coordinates `(rx, ry, rz)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Wavefront OBJ (1-based indices).
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}

/// Pieces of a closed loop lying in `R >= 0`. Arcs that cross the axis get
/// their crossing points appended; a loop entirely above the axis is returned
/// as a closed profile (flag `true`).
pub(crate) fn upper_profiles(poly: &[[f64; 2]]) -> Vec<(Vec<[f64; 2]>, bool)> {
    let pts = &poly[..poly.len() - 1];
    let m = pts.len();
    if pts.iter().all(|p| p[1] > 0.0) {
        return vec![(pts.to_vec(), true)];
    }
    // Start just after a point with R <= 0 so every upper arc is contiguous.
    let Some(s0) = (0..m).find(|&k| pts[k][1] <= 0.0) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    for step in 0..m {
        let a = pts[(s0 + step) % m];
        let b = pts[(s0 + step + 1) % m];
        if a[1] <= 0.0 && b[1] > 0.0 {
            let t = a[1] / (a[1] - b[1]);
            cur = vec![[a[0] + t * (b[0] - a[0]), 0.0]];
        }
        if b[1] > 0.0 {
            cur.push(b);
        } else if a[1] > 0.0 {
            let t = a[1] / (a[1] - b[1]);
            cur.push([a[0] + t * (b[0] - a[0]), 0.0]);
            out.push((std::mem::take(&mut cur), false));
        }
    }
    out
}

/// Revolves profiles in the `(z, R >= 0)` half-plane around the `rx` axis.
pub fn revolve_profiles(loops: &[Vec<[f64; 2]>], n_angles: usize) -> Result<TriangleMesh> {
    if n_angles < 3 {
        return Err(Error::InvalidParameter(format!(
            "need >= 3 angles, got {n_angles}"
        )));
    }
    let mut mesh = TriangleMesh::default();
    for poly in loops {
        if poly.len() < 4 || poly.first() != poly.last() {
            return Err(Error::OpenPolyline);
        }
        for (profile, closed) in upper_profiles(poly) {
            let base = mesh.vertices.len();
            let m = profile.len();
            for p in &profile {
                for a in 0..n_angles {
                    let phi = std::f64::consts::TAU * a as f64 / n_angles as f64;
                    mesh.vertices
                        .push([p[0], p[1] * phi.cos(), p[1] * phi.sin()]);
                }
            }
            let id = |k: usize, a: usize| base + k * n_angles + a % n_angles;
            let segs = if closed { m } else { m - 1 };
            for k in 0..segs {
                let k2 = (k + 1) % m;
                for a in 0..n_angles {
                    if profile[k][1] > 0.0 {
                        mesh.triangles.push([id(k, a), id(k2, a), id(k, a + 1)]);
                    }
                    if profile[k2][1] > 0.0 {
                        mesh.triangles
                            .push([id(k2, a), id(k2, a + 1), id(k, a + 1)]);
                    }
                }
            }
        }
    }
    Ok(mesh)
}

/// Surface of revolution of the reachable set's boundary.
pub fn revolve_to_3d(set: &ReachableSet2D, n_angles: usize) -> Result<TriangleMesh> {
    revolve_profiles(&set.boundary, n_angles)
}
