use std::f64::consts::{PI, TAU};

use crate::cones::SectorCone2D;
use crate::error::{Error, Result};
use crate::geometry::{ccw_angle, cross2, Plane2D, Vector};

use super::RetractionPair;

/// The unique mutually polar pair of a transversal planar configuration.
///
/// The plane is cut into four sectors, counterclockwise:
/// `K1 = cone{e1, e2}` (range of `Q`), `K2 = cone{e2, u1}`,
/// `K3 = cone{u1, u2}` (range of `R`) and `K4 = cone{u2, e1}`.
/// On `K4` a point `x = λ e1 + μ u2` splits as `(λ e1, μ u2)`; on `K2`,
/// `x = λ e2 + μ u1` splits as `(λ e2, μ u1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RetractionPair2D {
    pub plane: Plane2D,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    pub u1: [f64; 2],
    pub u2: [f64; 2],
    /// `K3` is a single ray (`u1 == u2`).
    pub degenerate: bool,
    /// `K1` is a single ray (`e1 == e2`).
    pub k1_ray: bool,
    det_k4: f64,
    det_k2: f64,
}

/// Builds the planar pair with ranges `K1` and `K3`.
pub fn build_2d(k1: &SectorCone2D, k3: &SectorCone2D) -> Result<RetractionPair2D> {
    if k1.degenerate_ray && k3.degenerate_ray {
        return Err(Error::NotTransversal2D("both cones are rays".into()));
    }
    let (e1, e2, u1, u2) = (k1.g1, k1.g2, k3.g1, k3.g2);
    let a2 = ccw_angle(e2, u1);
    let a4 = ccw_angle(u2, e1);
    let total = k1.angle() + a2 + k3.angle() + a4;
    if (total - TAU).abs() > 1e-9 {
        return Err(Error::NotTransversal2D("the sectors overlap".into()));
    }
    for (name, a) in [("K2", a2), ("K4", a4)] {
        if a <= 1e-12 {
            return Err(Error::NotTransversal2D(format!(
                "{name} is empty; the cones touch"
            )));
        }
        if a >= PI - 1e-12 {
            return Err(Error::NotTransversal2D(format!("{name} is not pointed")));
        }
    }
    Ok(RetractionPair2D {
        plane: k1.plane.clone(),
        e1,
        e2,
        u1,
        u2,
        degenerate: k3.degenerate_ray,
        k1_ray: k1.degenerate_ray,
        det_k4: cross2(e1, u2),
        det_k2: cross2(e2, u1),
    })
}

impl RetractionPair2D {
    /// Pair on `R^2` itself from four generators (`u1 == u2` allowed).
    pub fn from_generators(e1: [f64; 2], e2: [f64; 2], u1: [f64; 2], u2: [f64; 2]) -> Result<Self> {
        let plane = Plane2D::coordinate(2, 0, 1);
        let k1 = SectorCone2D::new(plane.clone(), e1, e2)?;
        let k3 = SectorCone2D::new(plane, u1, u2)?;
        build_2d(&k1, &k3)
    }

    /// Opening angles of `K1..K4`.
    pub fn sector_angles(&self) -> [f64; 4] {
        let k1 = if self.k1_ray {
            0.0
        } else {
            ccw_angle(self.e1, self.e2)
        };
        let k3 = if self.degenerate {
            0.0
        } else {
            ccw_angle(self.u1, self.u2)
        };
        [
            k1,
            ccw_angle(self.e2, self.u1),
            k3,
            ccw_angle(self.u2, self.e1),
        ]
    }

    /// `(Qx, Rx)` for a point in plane coordinates.
    ///
    /// Boundary points are resolved in the order `K1`, `K3`, `K4`, `K2`;
    /// all applicable formulas agree there.
    pub fn eval_2d(&self, x: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        if x == [0.0, 0.0] {
            return ([0.0; 2], [0.0; 2]);
        }
        if !self.k1_ray && in_sector(self.e1, self.e2, x) {
            return (x, [0.0; 2]);
        }
        if !self.degenerate && in_sector(self.u1, self.u2, x) {
            return ([0.0; 2], x);
        }
        if in_sector(self.u2, self.e1, x) {
            // x = λ e1 + μ u2
            let lambda = cross2(x, self.u2) / self.det_k4;
            let mu = cross2(self.e1, x) / self.det_k4;
            return (scale2(self.e1, lambda), scale2(self.u2, mu));
        }
        // x = λ e2 + μ u1
        let lambda = cross2(x, self.u1) / self.det_k2;
        let mu = cross2(self.e2, x) / self.det_k2;
        (scale2(self.e2, lambda), scale2(self.u1, mu))
    }
}

fn in_sector(a: [f64; 2], b: [f64; 2], x: [f64; 2]) -> bool {
    cross2(a, x) >= 0.0 && cross2(x, b) >= 0.0
}

fn scale2(v: [f64; 2], t: f64) -> [f64; 2] {
    [v[0] * t, v[1] * t]
}

impl RetractionPair for RetractionPair2D {
    fn dim(&self) -> usize {
        self.plane.ambient_dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        let (q, r) = self.eval_2d(self.plane.project_coords(x));
        Ok((self.plane.lift(q), self.plane.lift(r)))
    }

    fn construction(&self) -> &'static str {
        "planar"
    }
}
