use crate::cones::dd;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::nnls;
use crate::tolerance::ToleranceConfig;

/// A polytope `D = conv{v_i}` with the origin in its relative interior,
/// typically lying in a hyperplane of the ambient space.
///
/// The facet form `<a_k, y> <= c_k` (with `c_k > 0`) is derived from the
/// vertices once, by double description on the homogenized cone
/// `cone{(1, v_i)}`; equality constraints of the affine hull are dropped, so
/// the gauge is evaluated relative to `span D`.
#[derive(Clone, Debug)]
pub struct PolytopeInHyperplane {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<(Vector, f64)>,
}

impl PolytopeInHyperplane {
    pub fn new(vertices: Vec<Vector>, tol: &ToleranceConfig) -> Result<Self> {
        let dim = vertices.first().map(Vector::dim).ok_or_else(|| {
            Error::PreconditionViolated("polytope needs at least one vertex".into())
        })?;
        let lifted: Vec<Vector> = vertices
            .iter()
            .map(|v| {
                if v.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: v.dim(),
                    });
                }
                let mut w = Vec::with_capacity(dim + 1);
                w.push(1.0);
                w.extend_from_slice(v.as_slice());
                Vector::new(w)
            })
            .collect::<Result<_>>()?;
        let polar = dd::generators_of_inequalities(dim + 1, &lifted, tol)?;
        let mut facets = Vec::with_capacity(polar.rays.len());
        for r in &polar.rays {
            let offset = -r[0];
            if offset <= tol.base {
                return Err(Error::PreconditionViolated(
                    "origin is not in the relative interior of the base".into(),
                ));
            }
            let normal = Vector::new(r.as_slice()[1..].to_vec())?;
            facets.push((normal, offset));
        }
        Ok(Self {
            dim,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Facet inequalities `<a, y> <= c`.
    pub fn facets(&self) -> &[(Vector, f64)] {
        &self.facets
    }

    /// Smallest facet offset relative to its normal: the distance from the
    /// origin to the relative boundary.
    pub fn min_offset(&self) -> f64 {
        self.facets
            .iter()
            .map(|(a, c)| c / a.norm().max(1e-300))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minkowski gauge `inf{t > 0 : y in t D}` for `y` in `span D`.
    pub fn gauge(&self, y: &Vector) -> f64 {
        self.facets
            .iter()
            .map(|(a, c)| a.dot(y) / c)
            .fold(0.0, f64::max)
    }

    /// Membership decided from the vertices alone: `z` is a convex
    /// combination of the `v_i` up to residual `eps`.
    pub fn contains_by_vertices(
        &self,
        z: &Vector,
        eps: f64,
        tol: &ToleranceConfig,
    ) -> Result<bool> {
        let cols: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| {
                let mut w = v.clone().into_vec();
                w.push(1.0);
                Vector::new(w)
            })
            .collect::<Result<_>>()?;
        let mut rhs = z.clone().into_vec();
        rhs.push(1.0);
        Ok(nnls::nnls(&cols, &Vector::new(rhs)?, tol)?.residual <= eps)
    }
}

/// Gauge of `d` at `y`.
pub fn gauge_eval(d: &PolytopeInHyperplane, y: &Vector) -> f64 {
    d.gauge(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(vs: &[&[f64]]) -> PolytopeInHyperplane {
        let vs = vs
            .iter()
            .map(|v| Vector::new(v.to_vec()).unwrap())
            .collect();
        PolytopeInHyperplane::new(vs, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn symmetric_interval() {
        let d = poly(&[&[-1.0], &[1.0]]);
        assert!((gauge_eval(&d, &[0.5].into()) - 0.5).abs() < 1e-15);
        assert_eq!(gauge_eval(&d, &[0.0].into()), 0.0);
    }

    #[test]
    fn asymmetric_interval() {
        let d = poly(&[&[-1.0], &[3.0]]);
        assert!((gauge_eval(&d, &[-2.0].into()) - 2.0).abs() < 1e-14);
        assert!((gauge_eval(&d, &[6.0].into()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn square() {
        let d = poly(&[&[-1.0, -1.0], &[1.0, -1.0], &[1.0, 1.0], &[-1.0, 1.0]]);
        assert!((gauge_eval(&d, &[2.0, 1.0].into()) - 2.0).abs() < 1e-14);
        assert_eq!(d.facets().len(), 4);
    }

    #[test]
    fn segment_in_a_hyperplane() {
        // D = [(1,-1), (-1,1)] / sqrt 2 inside the line x + y = 0
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = poly(&[&[s, -s], &[-s, s]]);
        assert!((gauge_eval(&d, &[0.5, -0.5].into()) - s).abs() < 1e-14);
        assert!(d
            .contains_by_vertices(&[0.3, -0.3].into(), 1e-12, &ToleranceConfig::default())
            .unwrap());
        assert!(!d
            .contains_by_vertices(&[0.3, 0.3].into(), 1e-12, &ToleranceConfig::default())
            .unwrap());
    }

    #[test]
    fn origin_on_boundary_rejected() {
        let vs = vec![Vector::from([0.0]), Vector::from([1.0])];
        assert!(PolytopeInHyperplane::new(vs, &ToleranceConfig::default()).is_err());
    }
}
