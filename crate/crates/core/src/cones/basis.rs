use crate::error::{Error, Result};
use crate::geometry::{check_dim, Vector};
use crate::retractions::PolytopeInHyperplane;

use super::PolyhedralCone;

/// A cross-section of a solid pointed cone `M` through `-u`.
///
/// `functional_f` is strictly positive on `M \ {0}`. The base `B` is
/// `M ∩ {x : <f, x> = <f, -u>}`; `base_d` is `B` translated by `u`, so that
/// `-u` lands on the origin.
#[derive(Clone, Debug)]
pub struct ConeBasisData {
    pub functional_f: Vector,
    pub u: Vector,
    /// `<f, -u>`, the level of the base hyperplane.
    pub level: f64,
    /// Vertices of `B`: each generator of `M` scaled onto the hyperplane.
    pub base_vertices: Vec<Vector>,
    pub base_d: PolytopeInHyperplane,
}

/// Builds the base of `M` on the hyperplane through `-u` cut out by the
/// functional `f = -sum_i n_i` (unit facet normals `n_i` of `M`), which lies
/// in the interior of the dual cone.
pub fn basis_on_hyperplane(m: &PolyhedralCone, u: &Vector) -> Result<ConeBasisData> {
    check_dim(m.dim(), u)?;
    let tol = m.tolerance();
    let u = u
        .normalized()
        .ok_or_else(|| Error::PreconditionViolated("u must be nonzero".into()))?;
    if !m.is_pointed()? {
        return Err(Error::NotPointed("M"));
    }
    if !m.is_solid() {
        return Err(Error::PreconditionViolated("M has empty interior".into()));
    }
    let minus_u = -&u;
    if !m.contains(&minus_u, true)? {
        return Err(Error::PreconditionViolated(
            "-u is not an interior point of M".into(),
        ));
    }

    let mut f = Vector::zeros(m.dim());
    for n in m.facets()? {
        f -= n;
    }
    let f = f.normalized().ok_or(Error::NoStrictFunctional)?;
    if m.generators().iter().any(|g| f.dot(g) <= tol.base) {
        return Err(Error::NoStrictFunctional);
    }

    let level = f.dot(&minus_u);
    let base_vertices: Vec<Vector> = m
        .generators()
        .iter()
        .map(|g| g.scale(level / f.dot(g)))
        .collect();
    let translated: Vec<Vector> = base_vertices.iter().map(|v| v + &u).collect();
    let base_d = PolytopeInHyperplane::new(translated, tol)?;
    Ok(ConeBasisData {
        functional_f: f,
        u,
        level,
        base_vertices,
        base_d,
    })
}
