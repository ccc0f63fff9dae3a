//! Reachable sets of the auxiliary system in the meridian plane and the
//! geometric certificates around them.
//!
//! "Reachable at time `T`" means reachable in time at most `T`. Every
//! time-optimal trajectory is an extremal, so the set is the image of
//! `(psi0, tau) -> (z, R)` over all costate angles and `tau <= T`. It is
//! rasterized by filling the quadrilaterals spanned by neighbouring extremals
//! at neighbouring sample times.

mod barrier;
mod mesh;
mod raster;
mod spiral;
mod svg;

pub use barrier::{
    barrier_certificate, barrier_min, barrier_values, lacuna_alpha_bound, BarrierGrid,
    BarrierTriangle, Edge,
};
pub use mesh::{revolve_to_3d, TriangleMesh};
pub use raster::Raster;
pub use spiral::{delta_estimate, guaranteed_ball_radius, SpiralRegion};
pub use svg::{render_svg, SvgOptions};

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::pmp::{seed_psi, sweep_angles, ExtremalOptions};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    pub n_seeds: usize,
    /// Raster resolution per axis.
    pub raster: usize,
    /// Sampling step along extremals, scaled time.
    pub dtau: f64,
    /// Quads with an edge longer than this many cells are not filled (they
    /// would bridge a discontinuity of the extremal family).
    pub max_quad_edge_cells: f64,
    /// Enclosed empty components up to this size are filled.
    pub max_hole_cells: usize,
    /// Neighbouring extremals further apart than the quad-edge limit are
    /// separated by bisecting their costate angles, at most this many times.
    pub max_refine_depth: u32,
    /// Upper bound on the total number of extremals after refinement.
    pub max_seeds: usize,
    pub extremal: ExtremalOptions,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            n_seeds: 1024,
            raster: 512,
            dtau: 0.01,
            max_quad_edge_cells: 6.0,
            max_hole_cells: 16,
            max_refine_depth: 40,
            max_seeds: 1 << 16,
            extremal: ExtremalOptions::default(),
        }
    }
}

impl ReachOptions {
    fn validate(&self) -> Result<()> {
        if self.n_seeds < 64 {
            return Err(Error::InvalidParameter(format!(
                "need >= 64 seeds, got {}",
                self.n_seeds
            )));
        }
        if self.raster < 2 || !self.raster.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "raster must be even and >= 2, got {}",
                self.raster
            )));
        }
        if !(self.dtau > 0.0) {
            return Err(Error::InvalidParameter("dtau must be > 0".into()));
        }
        Ok(())
    }
}

/// Extremals of a full seed sweep sampled on the uniform grid `tau_k = k dtau`.
#[derive(Debug, Clone)]
pub struct ReachSweep {
    opts: ReachOptions,
    t_max: f64,
    /// Costate angles in increasing order, cyclically adjacent.
    psis: Vec<f64>,
    /// Per seed, unfolded `(z, R)` samples; shorter when integration stopped early.
    paths: Vec<Vec<[f64; 2]>>,
    failures: Vec<(f64, Error)>,
}

impl ReachSweep {
    pub fn new(t_max: f64, params: &SystemParams, opts: &ReachOptions) -> Result<Self> {
        opts.validate()?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T must be > 0, got {t_max}"
            )));
        }
        let steps = sample_count(t_max, opts.dtau);
        let n = opts.n_seeds;
        let mut psis: Vec<f64> = (0..n).map(|k| seed_psi(k, n)).collect();
        let mut paths = Vec::with_capacity(n);
        let mut failures = Vec::new();
        run_batch(&psis, t_max, steps, params, opts, &mut paths, &mut failures);

        let limit = opts.max_quad_edge_cells * 2.0 / opts.raster as f64;
        // Pairs (left, right, depth) of node indices; the last one wraps around.
        let mut pending: Vec<(usize, usize, u32)> = (0..n).map(|k| (k, (k + 1) % n, 0)).collect();
        while !pending.is_empty() {
            let split: Vec<(usize, usize, u32)> = pending
                .into_iter()
                .filter(|&(a, b, d)| d < opts.max_refine_depth && gap(&paths[a], &paths[b]) > limit)
                .collect();
            let room = opts.max_seeds.saturating_sub(psis.len());
            let split = &split[..split.len().min(room)];
            if split.is_empty() {
                break;
            }
            let mids: Vec<f64> = split
                .iter()
                .map(|&(a, b, _)| {
                    let hi = if psis[b] > psis[a] {
                        psis[b]
                    } else {
                        psis[b] + TAU
                    };
                    (0.5 * (psis[a] + hi)).rem_euclid(TAU)
                })
                .collect();
            let base = psis.len();
            psis.extend_from_slice(&mids);
            run_batch(&mids, t_max, steps, params, opts, &mut paths, &mut failures);
            pending = split
                .iter()
                .enumerate()
                .flat_map(|(m, &(a, b, d))| [(a, base + m, d + 1), (base + m, b, d + 1)])
                .collect();
        }

        let mut order: Vec<usize> = (0..psis.len()).collect();
        order.sort_by(|&a, &b| psis[a].total_cmp(&psis[b]));
        let psis = order.iter().map(|&k| psis[k]).collect();
        let mut slots: Vec<Option<Vec<[f64; 2]>>> = paths.into_iter().map(Some).collect();
        let paths = order.iter().map(|&k| slots[k].take().unwrap()).collect();
        Ok(Self {
            opts: *opts,
            t_max,
            psis,
            paths,
            failures,
        })
    }

    /// Costate angles of all extremals, increasing.
    pub fn psis(&self) -> &[f64] {
        &self.psis
    }

    pub fn seed_count(&self) -> usize {
        self.psis.len()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn options(&self) -> &ReachOptions {
        &self.opts
    }

    /// `(psi0, error)` for extremals that stopped before `t_max`.
    pub fn failures(&self) -> &[(f64, Error)] {
        &self.failures
    }

    /// Unfolded sample paths, one per seed.
    pub fn paths(&self) -> &[Vec<[f64; 2]>] {
        &self.paths
    }

    /// The set reachable in time at most `t_scaled <= t_max`.
    pub fn reachable_set(&self, t_scaled: f64) -> Result<ReachableSet2D> {
        if !(t_scaled > 0.0 && t_scaled <= self.t_max * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "T = {t_scaled} outside (0, {}]",
                self.t_max
            )));
        }
        let n = self.opts.raster;
        let steps = sample_count(t_scaled, self.opts.dtau);
        let max_edge = self.opts.max_quad_edge_cells * 2.0 / n as f64;
        let m = self.paths.len();
        let mut raster = (0..m)
            .into_par_iter()
            .fold(
                || Raster::new(n),
                |mut r, k| {
                    let a = &self.paths[k][..self.paths[k].len().min(steps)];
                    let b = &self.paths[(k + 1) % m];
                    let b = &b[..b.len().min(steps)];
                    if let Some(p) = a.first() {
                        r.mark_point(p[0], p[1]);
                    }
                    for w in a.windows(2) {
                        r.mark_segment(w[0], w[1]);
                    }
                    let common = a.len().min(b.len());
                    for i in 1..common {
                        let quad = [a[i - 1], a[i], b[i], b[i - 1]];
                        if (0..4).all(|e| dist(quad[e], quad[(e + 1) % 4]) <= max_edge) {
                            r.fill_quad(quad);
                        }
                    }
                    r
                },
            )
            .reduce(
                || Raster::new(n),
                |mut x, y| {
                    x.union_with(&y);
                    x
                },
            );
        raster.union_with(&raster.mirrored());

        let start_i = raster.index_of(0.0);
        let start_j = raster.index_of(1.0);
        let mut upper = raster.clone();
        upper.retain_component(start_i, start_j);
        let mut lower = raster.clone();
        lower.retain_component(start_i, n - 1 - start_j);
        upper.union_with(&lower);
        let mut raster = upper;
        raster.fill_small_holes(self.opts.max_hole_cells);

        let boundary = raster.boundary();
        Ok(ReachableSet2D {
            t_scaled,
            raster,
            boundary,
        })
    }
}

fn run_batch(
    psis: &[f64],
    t_max: f64,
    steps: usize,
    params: &SystemParams,
    opts: &ReachOptions,
    paths: &mut Vec<Vec<[f64; 2]>>,
    failures: &mut Vec<(f64, Error)>,
) {
    let result = sweep_angles(psis, t_max, params, &opts.extremal);
    let sampled: Vec<Vec<[f64; 2]>> = result
        .extremals
        .par_iter()
        .map(|e| match e {
            Some(e) if !e.is_empty() => {
                let end = e.end_time();
                (0..steps)
                    .map(|k| k as f64 * opts.dtau)
                    .take_while(|t| *t <= end * (1.0 + 1e-12))
                    .map(|t| {
                        let s = e.sample_raw(t);
                        [s.z, s.radius]
                    })
                    .collect()
            }
            _ => Vec::new(),
        })
        .collect();
    paths.extend(sampled);
    failures.extend(result.failures.into_iter().map(|(k, e)| (psis[k], e)));
}

/// Largest distance between two paths at equal sample times.
fn gap(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| dist(*p, *q))
        .fold(0.0, f64::max)
}

fn sample_count(t: f64, dtau: f64) -> usize {
    (t / dtau * (1.0 + 1e-12)).floor() as usize + 1
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Rasterized reachable set in the `(z, R)` plane, symmetric under `R -> -R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachableSet2D {
    pub t_scaled: f64,
    pub raster: Raster,
    /// Closed polylines (first point repeated at the end).
    pub boundary: Vec<Vec<[f64; 2]>>,
}

impl ReachableSet2D {
    /// Fraction of cells with centers in the centered disc of `radius` that are occupied.
    pub fn disc_coverage(&self, radius: f64) -> f64 {
        let r = &self.raster;
        let n = r.resolution();
        let (mut inside, mut hit) = (0usize, 0usize);
        for j in 0..n {
            for i in 0..n {
                if r.center(i).hypot(r.center(j)) <= radius {
                    inside += 1;
                    hit += usize::from(r.get(i, j));
                }
            }
        }
        if inside == 0 {
            1.0
        } else {
            hit as f64 / inside as f64
        }
    }

    /// Largest distance from the origin of an occupied cell center.
    pub fn max_radius(&self) -> f64 {
        self.raster
            .occupied_centers()
            .map(|(z, r)| z.hypot(r))
            .fold(0.0, f64::max)
    }

    /// Occupied cell centers as CSV `z,R`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "z,R")?;
        for (z, r) in self.raster.occupied_centers() {
            writeln!(w, "{z},{r}")?;
        }
        Ok(())
    }
}

/// Sweeps `n_seeds` extremals to `t_scaled` and rasterizes the reachable set.
pub fn compute_reachable_set(
    t_scaled: f64,
    params: &SystemParams,
    opts: &ReachOptions,
) -> Result<ReachableSet2D> {
    ReachSweep::new(t_scaled, params, opts)?.reachable_set(t_scaled)
}
