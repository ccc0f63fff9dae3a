use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Region of the meridian disc bounded by four logarithmic-spiral arcs
/// `(z, R) = (+-e^{-e s/2} sin s, +-e^{-e s/2} cos s)`, `s` in `[0, pi/2]`.
///
/// Every point inside is exactly reachable from `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralRegion {
    ratio: f64,
}

impl SpiralRegion {
    pub fn new(params: &SystemParams) -> Self {
        Self {
            ratio: params.ratio(),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Point of arc `(sz, sr)` (signs of `z` and `R`) at parameter `s`.
    pub fn arc_point(&self, sz: f64, sr: f64, s: f64) -> [f64; 2] {
        let m = (-0.5 * self.ratio * s).exp();
        [sz * m * s.sin(), sr * m * s.cos()]
    }

    /// Closed boundary polygon with `per_arc` segments on each arc, counter-clockwise.
    pub fn boundary(&self, per_arc: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(4 * per_arc + 1);
        let s_at = |k: usize| FRAC_PI_2 * k as f64 / per_arc as f64;
        // (0,1) -> (-a,0) -> (0,-1) -> (a,0) -> (0,1)
        for k in 0..per_arc {
            out.push(self.arc_point(-1.0, 1.0, s_at(k)));
        }
        for k in 0..per_arc {
            out.push(self.arc_point(-1.0, -1.0, s_at(per_arc - k)));
        }
        for k in 0..per_arc {
            out.push(self.arc_point(1.0, -1.0, s_at(k)));
        }
        for k in 0..per_arc {
            out.push(self.arc_point(1.0, 1.0, s_at(per_arc - k)));
        }
        out.push(out[0]);
        out
    }

    /// Boundary distance from the origin in direction `phi` (`z = rho cos phi`).
    pub fn radius_at(&self, phi: f64) -> f64 {
        let a = phi.rem_euclid(2.0 * PI);
        let a = if a > PI { 2.0 * PI - a } else { a };
        (-0.5 * self.ratio * (a - FRAC_PI_2).abs()).exp()
    }

    /// The region is star-shaped about the origin, so membership is a radial test.
    pub fn contains(&self, z: f64, r: f64) -> bool {
        z.hypot(r) <= self.radius_at(r.atan2(z))
    }
}

/// `1 - (pi/4) gamma/omega`: radius of a centered disc inside the spiral region.
pub fn guaranteed_ball_radius(params: &SystemParams) -> Result<f64> {
    let e = params.ratio();
    if e >= 1.0 / FRAC_PI_4 {
        return Err(Error::VacuousCertificate(e));
    }
    Ok(1.0 - FRAC_PI_4 * e)
}

/// `delta = pi gamma / (4 omega)`: how far the guaranteed ball falls short of the sphere.
pub fn delta_estimate(params: &SystemParams) -> f64 {
    FRAC_PI_4 * params.ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs_meet_at_expected_points() {
        let s = SpiralRegion::new(&SystemParams::scaled(0.1).unwrap());
        let a = (-0.025 * PI).exp();
        let p = s.arc_point(1.0, 1.0, FRAC_PI_2);
        assert!((p[0] - a).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert_eq!(s.arc_point(-1.0, 1.0, 0.0), [0.0, 1.0]);
        assert!((s.radius_at(0.0) - a).abs() < 1e-15);
        assert!((s.radius_at(PI) - a).abs() < 1e-15);
        assert_eq!(s.radius_at(-FRAC_PI_2), 1.0);
    }

    #[test]
    fn membership_examples() {
        for e in [0.0, 0.1, 1.0] {
            let s = SpiralRegion::new(&SystemParams::scaled(e).unwrap());
            assert!(s.contains(0.0, 0.0));
            assert!(s.contains(0.0, 1.0 - 1e-9));
            assert!(!s.contains(0.0, 1.0 + 1e-9));
        }
    }

    #[test]
    fn ball_radius() {
        let p = |e| SystemParams::scaled(e).unwrap();
        assert_eq!(guaranteed_ball_radius(&p(0.0)).unwrap(), 1.0);
        assert!((guaranteed_ball_radius(&p(0.1)).unwrap() - (1.0 - 0.025 * PI)).abs() < 1e-15);
        assert!(matches!(
            guaranteed_ball_radius(&p(1.3)),
            Err(Error::VacuousCertificate(_))
        ));
    }
}
