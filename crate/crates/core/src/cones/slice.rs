use crate::error::{Error, Result};
use crate::geometry::{ccw_angle, cross2, dot2, norm2, Plane2D};
use crate::tolerance::ToleranceConfig;

use super::PolyhedralCone;

/// A pointed planar cone `cone{g1, g2}` inside an embedded plane, with `g1`
/// before `g2` counterclockwise. When `degenerate_ray` is set, `g1 == g2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorCone2D {
    pub plane: Plane2D,
    pub g1: [f64; 2],
    pub g2: [f64; 2],
    pub degenerate_ray: bool,
}

impl SectorCone2D {
    pub fn new(plane: Plane2D, g1: [f64; 2], g2: [f64; 2]) -> Result<Self> {
        let g1 = unit2(g1)?;
        let g2 = unit2(g2)?;
        let angle = ccw_angle(g1, g2);
        if angle >= std::f64::consts::PI {
            return Err(Error::NotPointed("sector angle must be below pi"));
        }
        Ok(Self {
            plane,
            g1,
            g2,
            degenerate_ray: angle == 0.0,
        })
    }

    pub fn ray(plane: Plane2D, g: [f64; 2]) -> Result<Self> {
        let g = unit2(g)?;
        Ok(Self {
            plane,
            g1: g,
            g2: g,
            degenerate_ray: true,
        })
    }

    /// Counterclockwise opening angle from `g1` to `g2`.
    pub fn angle(&self) -> f64 {
        if self.degenerate_ray {
            0.0
        } else {
            ccw_angle(self.g1, self.g2)
        }
    }
}

pub(crate) fn unit2(v: [f64; 2]) -> Result<[f64; 2]> {
    let n = norm2(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroGenerator);
    }
    Ok([v[0] / n, v[1] / n])
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlaneSlice {
    Sector(SectorCone2D),
    Ray(SectorCone2D),
    Zero,
}

impl PlaneSlice {
    /// The slice as a (possibly degenerate) sector; `None` for the zero cone.
    pub fn into_sector(self) -> Option<SectorCone2D> {
        match self {
            PlaneSlice::Sector(s) | PlaneSlice::Ray(s) => Some(s),
            PlaneSlice::Zero => None,
        }
    }
}

/// `K ∩ P` in the plane's coordinates.
///
/// Each facet inequality `<n, s a + t b> <= 0` becomes a planar half-plane;
/// the extreme rays of the planar cone are found among the boundary
/// directions of those half-planes.
pub fn intersect_with_plane(k: &PolyhedralCone, plane: &Plane2D) -> Result<PlaneSlice> {
    if k.dim() != plane.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: plane.ambient_dim(),
        });
    }
    let tol: &ToleranceConfig = k.tolerance();
    let eps = tol.base;
    let planar: Vec<[f64; 2]> = k
        .facets()?
        .iter()
        .map(|n| plane.project_coords(n))
        .filter(|c| norm2(*c) > tol.singular)
        .map(|c| {
            let n = norm2(c);
            [c[0] / n, c[1] / n]
        })
        .collect();
    if planar.is_empty() {
        return Err(Error::SliceDegenerate("plane lies inside the cone".into()));
    }

    let feasible = |z: [f64; 2]| planar.iter().all(|c| dot2(*c, z) <= eps);
    let mut candidates: Vec<[f64; 2]> = Vec::new();
    for c in &planar {
        for z in [[-c[1], c[0]], [c[1], -c[0]]] {
            if feasible(z)
                && !candidates
                    .iter()
                    .any(|w| norm2([w[0] - z[0], w[1] - z[1]]) < eps)
            {
                candidates.push(z);
            }
        }
    }
    if candidates.is_empty() {
        return Ok(PlaneSlice::Zero);
    }

    // widest feasible pair spans the sector
    let mut best = (0, 0, 0.0f64);
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let angle = cross2(candidates[i], candidates[j])
                .abs()
                .atan2(dot2(candidates[i], candidates[j]));
            if angle > best.2 {
                best = (i, j, angle);
            }
        }
    }
    let (i, j, angle) = best;
    if angle <= eps {
        let mut g = candidates[0];
        if candidates.len() > 1 {
            g = [g[0] + candidates[1][0], g[1] + candidates[1][1]];
        }
        return Ok(PlaneSlice::Ray(SectorCone2D::ray(plane.clone(), g)?));
    }
    if angle >= std::f64::consts::PI - eps {
        return Err(Error::SliceDegenerate("slice is not pointed".into()));
    }
    let (g1, g2) = if cross2(candidates[i], candidates[j]) > 0.0 {
        (candidates[i], candidates[j])
    } else {
        (candidates[j], candidates[i])
    };
    Ok(PlaneSlice::Sector(SectorCone2D::new(
        plane.clone(),
        g1,
        g2,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{plane_through, Vector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn lifts_into(k: &PolyhedralCone, plane: &Plane2D, g: [f64; 2]) -> bool {
        k.contains(&plane.lift(g), false).unwrap()
    }

    #[test]
    fn coordinate_plane_of_orthant() {
        let k = PolyhedralCone::orthant(3, &tol());
        let p = Plane2D::coordinate(3, 0, 1);
        match intersect_with_plane(&k, &p).unwrap() {
            PlaneSlice::Sector(s) => {
                assert!(norm2([s.g1[0] - 1.0, s.g1[1]]) < 1e-12);
                assert!(norm2([s.g2[0], s.g2[1] - 1.0]) < 1e-12);
            }
            other => panic!("expected sector, got {other:?}"),
        }
    }

    #[test]
    fn ray_slice_of_orthant() {
        let k = PolyhedralCone::orthant(3, &tol());
        let p = Plane2D::from_orthonormal(
            Vector::from([1.0, -1.0, 0.0]).normalized().unwrap(),
            Vector::from([0.0, 0.0, 1.0]),
            &tol(),
        )
        .unwrap();
        match intersect_with_plane(&k, &p).unwrap() {
            PlaneSlice::Ray(s) => {
                assert!(s.degenerate_ray);
                assert!(p.lift(s.g1).dist(&[0.0, 0.0, 1.0].into()) < 1e-12);
            }
            other => panic!("expected ray, got {other:?}"),
        }
    }

    #[test]
    fn oblique_plane_sector_is_sound() {
        let k = PolyhedralCone::orthant(3, &tol());
        let p = plane_through(&[-1.0, 1.0, 1.0].into(), &[1.0, 1.0, 0.0].into(), &tol()).unwrap();
        let s = intersect_with_plane(&k, &p).unwrap().into_sector().unwrap();
        assert!(!s.degenerate_ray);
        assert!(lifts_into(&k, &p, s.g1) && lifts_into(&k, &p, s.g2));
        let mid = [s.g1[0] + s.g2[0], s.g1[1] + s.g2[1]];
        assert!(k.contains(&p.lift(mid), true).unwrap() || s.angle() < 1e-6);
    }

    #[test]
    fn zero_slice() {
        let k = PolyhedralCone::orthant(3, &tol());
        let p = Plane2D::from_orthonormal(
            Vector::from([1.0, -1.0, 0.0]).normalized().unwrap(),
            Vector::from([1.0, 1.0, -2.0]).normalized().unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!(intersect_with_plane(&k, &p).unwrap(), PlaneSlice::Zero);
    }

    #[test]
    fn random_slices_lift_into_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens: Vec<Vector> = (0..5)
            .map(|_| {
                Vector::new(vec![
                    rng.random_range(-0.6..0.6),
                    rng.random_range(-0.6..0.6),
                    1.0,
                ])
                .unwrap()
            })
            .collect();
        let k = PolyhedralCone::from_generators(3, gens, &tol()).unwrap();
        let axis = Vector::from([0.0, 0.0, 1.0]);
        for _ in 0..200 {
            let x = Vector::new((0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let p = plane_through(&x, &axis, &tol()).unwrap();
            let s = intersect_with_plane(&k, &p).unwrap().into_sector().unwrap();
            assert!(k.violation(&p.lift(s.g1)).unwrap() <= 1e-8);
            assert!(k.violation(&p.lift(s.g2)).unwrap() <= 1e-8);
            let mid = [s.g1[0] + s.g2[0], s.g1[1] + s.g2[1]];
            assert!(k.contains(&p.lift(mid), true).unwrap());
        }
    }
}
