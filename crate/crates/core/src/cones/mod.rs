//! Finitely generated cones, polars, plane slices and transversality.

mod basis;
pub mod dd;
mod slice;
mod transversal;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

pub use basis::{basis_on_hyperplane, ConeBasisData};
pub use slice::{intersect_with_plane, PlaneSlice, SectorCone2D};
pub use transversal::{is_transversal, InteriorSide, TransversalCertificate, TransversalSearch};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, Vector};
use crate::nnls;
use crate::tolerance::ToleranceConfig;

/// A closed convex cone in `R^d` held as nonnegative combinations of its
/// generators, with a lazily computed facet description
/// `x in K  <=>  <n_i, x> <= 0` for every normal `n_i`.
///
/// Generators are rescaled to unit length and near-duplicates merged on
/// construction. An empty generator list is the zero cone.
#[derive(Clone, Debug)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vector>,
    facets: OnceLock<Result<Vec<Vector>>>,
    tol: ToleranceConfig,
}

impl PolyhedralCone {
    pub fn from_generators(
        dim: usize,
        generators: Vec<Vector>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        Ok(Self {
            dim,
            generators: normalize_set(dim, generators, tol)?,
            facets: OnceLock::new(),
            tol: *tol,
        })
    }

    /// Cone `{x : <n_i, x> <= 0}`; generators come from double description.
    pub fn from_facets(dim: usize, normals: Vec<Vector>, tol: &ToleranceConfig) -> Result<Self> {
        let normals = normalize_set(dim, normals, tol)?;
        let generators = dd::generators_of_inequalities(dim, &normals, tol)?.into_generators();
        let facets = OnceLock::new();
        let _ = facets.set(Ok(normals));
        Ok(Self {
            dim,
            generators: normalize_set(dim, generators, tol)?,
            facets,
            tol: *tol,
        })
    }

    /// Both representations supplied; they are cross-checked before use.
    pub fn with_representations(
        dim: usize,
        generators: Vec<Vector>,
        normals: Vec<Vector>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let generators = normalize_set(dim, generators, tol)?;
        let normals = normalize_set(dim, normals, tol)?;
        for g in &generators {
            if normals.iter().any(|n| n.dot(g) > tol.base) {
                return Err(Error::InvalidSpec(
                    "a generator violates a facet inequality".into(),
                ));
            }
        }
        let from_facets = PolyhedralCone::from_facets(dim, normals.clone(), tol)?;
        for g in &from_facets.generators {
            if !nnls::in_conic_hull(&generators, g, tol.base, tol)? {
                return Err(Error::InvalidSpec(
                    "facets describe a larger cone than the generators".into(),
                ));
            }
        }
        let facets = OnceLock::new();
        let _ = facets.set(Ok(normals));
        Ok(Self {
            dim,
            generators,
            facets,
            tol: *tol,
        })
    }

    /// The nonnegative orthant `R^d_+`.
    pub fn orthant(dim: usize, tol: &ToleranceConfig) -> Self {
        let gens = (0..dim).map(|i| Vector::unit(dim, i)).collect();
        let normals = (0..dim).map(|i| -Vector::unit(dim, i)).collect();
        Self::with_known_facets(dim, gens, normals, tol)
    }

    /// The ray `{t v : t >= 0}`.
    pub fn ray(v: &Vector, tol: &ToleranceConfig) -> Result<Self> {
        Self::from_generators(v.dim(), vec![v.clone()], tol)
    }

    fn with_known_facets(
        dim: usize,
        generators: Vec<Vector>,
        normals: Vec<Vector>,
        tol: &ToleranceConfig,
    ) -> Self {
        let facets = OnceLock::new();
        let _ = facets.set(Ok(normals));
        Self {
            dim,
            generators,
            facets,
            tol: *tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// Unit outward normals of the facet description (vrep -> hrep).
    pub fn facets(&self) -> Result<&[Vector]> {
        self.facets
            .get_or_init(|| {
                // normals of K generate the polar cone
                let g = dd::generators_of_inequalities(self.dim, &self.generators, &self.tol)?;
                normalize_set(self.dim, g.into_generators(), &self.tol)
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Facet normals if they have already been computed.
    pub fn known_facets(&self) -> Option<&[Vector]> {
        match self.facets.get() {
            Some(Ok(f)) => Some(f),
            _ => None,
        }
    }

    /// `-K`.
    pub fn negated(&self) -> Self {
        let generators = self.generators.iter().map(|g| -g).collect();
        let facets = OnceLock::new();
        if let Some(f) = self.known_facets() {
            let _ = facets.set(Ok(f.iter().map(|n| -n).collect()));
        }
        Self {
            dim: self.dim,
            generators,
            facets,
            tol: self.tol,
        }
    }

    /// `K° = {y : <y, x> <= 0 for all x in K}`. Its facet normals are
    /// exactly the generators of `K`.
    pub fn polar(&self) -> Result<Self> {
        Self::from_facets(self.dim, self.generators.clone(), &self.tol)
    }

    /// Membership with tolerance `tol.base * ||x||`. With `strict`, tests
    /// interior membership with the same margin.
    pub fn contains(&self, x: &Vector, strict: bool) -> Result<bool> {
        check_dim(self.dim, x)?;
        let scale = x.norm();
        let margin = self.tol.base * scale;
        if strict {
            if scale == 0.0 {
                return Ok(false);
            }
            let facets = self.facets()?;
            return Ok(facets.iter().all(|n| n.dot(x) < -margin));
        }
        if scale == 0.0 {
            return Ok(true);
        }
        match self.known_facets() {
            Some(facets) => Ok(facets.iter().all(|n| n.dot(x) <= margin)),
            None => {
                let sol = nnls::nnls(&self.generators, x, &self.tol)?;
                Ok(sol.residual <= margin)
            }
        }
    }

    /// `max_i <n_i, x>^+`: zero exactly on the cone.
    pub fn violation(&self, x: &Vector) -> Result<f64> {
        Ok(self.facets()?.iter().map(|n| n.dot(x)).fold(0.0, f64::max))
    }

    /// `min_i -<n_i, x>`, i.e. the slack of the tightest facet; zero on the boundary.
    pub fn facet_slack(&self, x: &Vector) -> Result<f64> {
        Ok(self
            .facets()?
            .iter()
            .map(|n| -n.dot(x))
            .fold(f64::INFINITY, f64::min))
    }

    /// `K ∩ (-K) = {0}`, decided by infeasibility of
    /// `sum c_i g_i = 0, sum c_i = 1, c >= 0`.
    pub fn is_pointed(&self) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(true);
        }
        let cols: Vec<Vector> = self
            .generators
            .iter()
            .map(|g| {
                let mut v = g.clone().into_vec();
                v.push(1.0);
                Vector::new(v)
            })
            .collect::<Result<_>>()?;
        let mut rhs = vec![0.0; self.dim];
        rhs.push(1.0);
        let sol = nnls::nnls(&cols, &Vector::new(rhs)?, &self.tol)?;
        Ok(sol.residual > self.tol.base)
    }

    /// Nonempty interior, i.e. the generators span `R^d`.
    pub fn is_solid(&self) -> bool {
        self.rank() == self.dim
    }

    /// Dimension of the linear span of the cone.
    pub fn rank(&self) -> usize {
        if self.generators.is_empty() {
            return 0;
        }
        let m = DMatrix::from_fn(self.dim, self.generators.len(), |i, j| {
            self.generators[j][i]
        });
        m.rank(1e-10)
    }

    /// Random cone element: exponential-weighted combination of the generators.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let weights: Vec<f64> = self.generators.iter().map(|_| Exp1.sample(rng)).collect();
        Vector::combination(self.dim, &weights, &self.generators)
    }

    /// Membership of `x` decided by NNLS on the generators alone.
    pub fn contains_by_generators(&self, x: &Vector) -> Result<bool> {
        check_dim(self.dim, x)?;
        Ok(nnls::nnls(&self.generators, x, &self.tol)?.residual <= self.tol.base * x.norm())
    }
}

/// Checks dimensions, rejects zero vectors, normalizes and merges near-duplicates.
fn normalize_set(dim: usize, vs: Vec<Vector>, tol: &ToleranceConfig) -> Result<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::with_capacity(vs.len());
    for v in vs {
        check_dim(dim, &v)?;
        let u = v.normalized().ok_or(Error::ZeroGenerator)?;
        if !out.iter().any(|w| w.dist(&u) < tol.parallel) {
            out.push(u);
        }
    }
    Ok(out)
}
