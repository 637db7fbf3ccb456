use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{intersect_with_plane, InteriorSide, PolyhedralCone, TransversalCertificate};
use crate::error::{Error, Result};
use crate::geometry::{plane_through, Plane2D, Vector};

use super::{build_2d, RetractionPair, RetractionPair2D};

/// The transversal pair of `(M, N)`: on every plane through the
/// transversal line, the planar construction applied to the slices of
/// `M` and `N`.
#[derive(Clone, Debug)]
pub struct TransversalRetractionPair {
    m: PolyhedralCone,
    n: PolyhedralCone,
    delta_dir: Vector,
}

/// Builds the pair after re-verifying `cert` and the existence hypothesis:
/// both cones solid, or `N` a single ray with the line through `int M`.
pub fn build_transversal(
    m: &PolyhedralCone,
    n: &PolyhedralCone,
    cert: &TransversalCertificate,
) -> Result<TransversalRetractionPair> {
    match cert.verify(m, n) {
        Ok(()) => {}
        Err(Error::ConesIntersect) => return Err(Error::ConesIntersect),
        Err(e @ Error::HypothesisNotMet(_)) => return Err(e),
        Err(e) => {
            return Err(Error::HypothesisNotMet(format!(
                "certificate check failed: {e}"
            )))
        }
    }
    // make sure both facet descriptions exist before evaluating
    m.facets()?;
    n.facets()?;
    let m_solid = m.is_solid();
    let n_solid = n.is_solid();
    let n_ray = n.generators().len() == 1;
    let ok = (m_solid && n_solid) || (m_solid && n_ray && cert.interior_side == InteriorSide::M);
    if !ok {
        let why = if !m_solid {
            "M must have nonempty interior"
        } else if n_ray {
            "the transversal line must pass through the interior of M"
        } else {
            "N must be solid or a single ray"
        };
        return Err(Error::HypothesisNotMet(why.into()));
    }

    let pair = TransversalRetractionPair {
        m: m.clone(),
        n: n.clone(),
        delta_dir: cert.delta_dir.clone(),
    };
    let tol = m.tolerance();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10 {
        let x = Vector::new((0..m.dim()).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let (qx, rx) = pair.eval(&x)?;
        let scale = 1.0 + x.norm();
        let sum = (&(&qx + &rx) - &x).norm();
        let qr = pair.q(&rx)?.norm();
        let rq = pair.r(&qx)?.norm();
        if sum.max(qr).max(rq) > tol.violation() * scale {
            return Err(Error::HypothesisNotMet(format!(
                "smoke evaluation failed the polarity check at {x:?}"
            )));
        }
    }
    Ok(pair)
}

impl TransversalRetractionPair {
    pub fn m(&self) -> &PolyhedralCone {
        &self.m
    }

    pub fn n(&self) -> &PolyhedralCone {
        &self.n
    }

    pub fn delta_dir(&self) -> &Vector {
        &self.delta_dir
    }

    /// The planar pair on a plane through the transversal line.
    pub fn planar_pair(&self, plane: &Plane2D) -> Result<RetractionPair2D> {
        let m_slice = intersect_with_plane(&self.m, plane)?
            .into_sector()
            .ok_or_else(|| Error::SliceDegenerate("M meets the plane only at the origin".into()))?;
        let n_slice = intersect_with_plane(&self.n, plane)?
            .into_sector()
            .ok_or_else(|| Error::SliceDegenerate("N meets the plane only at the origin".into()))?;
        build_2d(&m_slice, &n_slice)
    }

    /// `(Qx, Rx)`, slicing `M` and `N` with `span{x, Δ}`.
    pub fn eval_transversal(&self, x: &Vector) -> Result<(Vector, Vector)> {
        let zero = Vector::zeros(self.m.dim());
        if x.is_zero() {
            return Ok((zero.clone(), zero));
        }
        if self.m.contains(x, false)? {
            return Ok((x.clone(), zero));
        }
        if self.n.contains(x, false)? {
            return Ok((zero, x.clone()));
        }
        let plane = match plane_through(x, &self.delta_dir, self.m.tolerance()) {
            Ok(p) => p,
            // x lies on the line itself: the M side or the N side of it
            Err(Error::DegeneratePlane) if x.dot(&self.delta_dir) > 0.0 => {
                return Ok((x.clone(), zero))
            }
            Err(Error::DegeneratePlane) => return Ok((zero, x.clone())),
            Err(e) => return Err(e),
        };
        let planar = self.planar_pair(&plane)?;
        let (q, r) = planar.eval_2d(plane.project_coords(x));
        Ok((plane.lift(q), plane.lift(r)))
    }
}

impl RetractionPair for TransversalRetractionPair {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        self.eval_transversal(x)
    }

    fn construction(&self) -> &'static str {
        "transversal"
    }
}
