//! Metric projection onto closed convex cones and the Moreau decomposition
//! `x = P_K x + P_{K°} x`, `<P_K x, P_{K°} x> = 0`.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::geometry::{check_dim, Vector};
use crate::nnls;
use crate::retractions::RetractionPair;

/// `argmin {||x - y|| : y in K}` via NNLS on the generators.
pub fn project_polyhedral(k: &PolyhedralCone, x: &Vector) -> Result<Vector> {
    check_dim(k.dim(), x)?;
    let sol = nnls::nnls(k.generators(), x, k.tolerance())?;
    let kkt = nnls::kkt_residual(k.generators(), x, &sol.coeffs);
    if kkt > k.tolerance().base * (1.0 + x.norm()) {
        return Err(Error::DecompositionInvariant(format!(
            "KKT residual {kkt:e} after NNLS"
        )));
    }
    Ok(Vector::combination(k.dim(), &sol.coeffs, k.generators()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoreauDecomposition {
    pub x: Vector,
    /// `P_K x`.
    pub p: Vector,
    /// `P_{K°} x = x - P_K x`.
    pub q: Vector,
    /// `<p, q>`.
    pub inner: f64,
}

impl MoreauDecomposition {
    /// `||p + q - x||`.
    pub fn sum_residual(&self) -> f64 {
        (&(&self.p + &self.q) - &self.x).norm()
    }
}

/// Projects, then verifies the decomposition: the sum and orthogonality
/// residuals, `p in K`, `q in K°`, and that projecting `q` onto the polar
/// cone (generated by the facet normals of `K`) returns `q`.
pub fn decompose(k: &PolyhedralCone, x: &Vector) -> Result<MoreauDecomposition> {
    let tol = k.tolerance();
    let p = project_polyhedral(k, x)?;
    let q = x - &p;
    let d = MoreauDecomposition {
        inner: p.dot(&q),
        x: x.clone(),
        p,
        q,
    };
    let scale = 1.0 + x.norm();
    let limit = tol.violation();
    let fail = |what: String| Err(Error::DecompositionInvariant(what));
    if d.sum_residual() > limit * scale {
        return fail(format!("||p + q - x|| = {:e}", d.sum_residual()));
    }
    if d.inner.abs() > limit * scale * scale {
        return fail(format!("<p, q> = {:e}", d.inner));
    }
    if !k.contains(&d.p, false)? && k.violation(&d.p)? > limit * scale {
        return fail("p is outside K".into());
    }
    let polar_gap = k
        .generators()
        .iter()
        .map(|g| g.dot(&d.q))
        .fold(0.0, f64::max);
    if polar_gap > limit * scale {
        return fail(format!("q is outside the polar cone by {polar_gap:e}"));
    }
    let polar_gens = k.facets()?;
    let sol = nnls::nnls(polar_gens, &d.q, tol)?;
    let reproj = Vector::combination(k.dim(), &sol.coeffs, polar_gens);
    if reproj.dist(&d.q) > limit * scale {
        return fail("projecting q onto the polar cone does not return q".into());
    }
    Ok(d)
}

/// `{x : <axis, x> >= ||x|| cos(half_angle)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircularCone {
    axis: Vector,
    half_angle: f64,
}

impl CircularCone {
    pub fn new(axis: &Vector, half_angle: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidHalfAngle(half_angle));
        }
        let axis = axis.normalized().ok_or(Error::ZeroGenerator)?;
        Ok(Self { axis, half_angle })
    }

    pub fn dim(&self) -> usize {
        self.axis.dim()
    }

    pub fn axis(&self) -> &Vector {
        &self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// The polar cone: axis `-axis`, half-angle `pi/2 - half_angle`.
    pub fn polar(&self) -> CircularCone {
        CircularCone {
            axis: -&self.axis,
            half_angle: std::f64::consts::FRAC_PI_2 - self.half_angle,
        }
    }

    /// `(s, w, r)`: axial coordinate, orthogonal part and its norm.
    fn split(&self, x: &Vector) -> (f64, Vector, f64) {
        let s = self.axis.dot(x);
        let w = x.axpy(-s, &self.axis);
        let r = w.norm();
        (s, w, r)
    }

    /// `s sin θ - r cos θ`: nonnegative exactly on the cone, zero on its boundary.
    pub fn slack(&self, x: &Vector) -> f64 {
        let (s, _, r) = self.split(x);
        s * self.half_angle.sin() - r * self.half_angle.cos()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.slack(x) >= -tol * x.norm()
    }

    /// Distance from `x` to the cone.
    pub fn distance(&self, x: &Vector) -> f64 {
        project_circular(self, x).dist(x)
    }

    /// Random cone element with its angle to the axis drawn uniformly in `[0, θ]`.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        let dim = self.dim();
        let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
        let raw = Vector::new(raw).expect("normal samples are finite");
        let w = raw.axpy(-raw.dot(&self.axis), &self.axis);
        let phi = rng.random_range(0.0..=self.half_angle);
        let radius: f64 = Exp1.sample(&mut *rng);
        let dir = match w.normalized() {
            Some(w) => self.axis.scale(phi.cos()).axpy(phi.sin(), &w),
            None => self.axis.clone(),
        };
        dir.scale(radius)
    }
}

/// Closed-form projection onto a circular cone: `x` inside, `0` on the
/// polar, otherwise the projection onto the boundary ray in the plane of
/// `x` and the axis.
pub fn project_circular(c: &CircularCone, x: &Vector) -> Vector {
    let (s, w, r) = c.split(x);
    let (sin, cos) = c.half_angle.sin_cos();
    if s * sin >= r * cos {
        return x.clone();
    }
    if s * cos <= -r * sin {
        return Vector::zeros(x.dim());
    }
    let ray = c.axis.scale(cos).axpy(sin / r, &w);
    ray.scale(x.dot(&ray))
}

/// `(P_K, I - P_K)` for a polyhedral cone.
#[derive(Clone, Debug)]
pub struct ProjectionPair {
    k: PolyhedralCone,
}

impl ProjectionPair {
    pub fn new(k: PolyhedralCone) -> Self {
        Self { k }
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.k
    }
}

impl RetractionPair for ProjectionPair {
    fn dim(&self) -> usize {
        self.k.dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        let p = project_polyhedral(&self.k, x)?;
        let q = x - &p;
        Ok((p, q))
    }

    fn construction(&self) -> &'static str {
        "projection"
    }
}

/// `(P_C, I - P_C)` for a circular cone.
#[derive(Clone, Debug)]
pub struct CircularProjectionPair {
    c: CircularCone,
}

impl CircularProjectionPair {
    pub fn new(c: CircularCone) -> Self {
        Self { c }
    }

    pub fn cone(&self) -> &CircularCone {
        &self.c
    }
}

impl RetractionPair for CircularProjectionPair {
    fn dim(&self) -> usize {
        self.c.dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        check_dim(self.c.dim(), x)?;
        let p = project_circular(&self.c, x);
        let q = x - &p;
        Ok((p, q))
    }

    fn construction(&self) -> &'static str {
        "circular-projection"
    }
}
