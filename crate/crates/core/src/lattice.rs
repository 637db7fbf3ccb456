//! Lattice operations on a simplicial cone, computed in the chart `B^{-1}`.

use nalgebra::{DMatrix, DVector};

use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::geometry::{check_dim, Vector};
use crate::retractions::RetractionPair;
use crate::tolerance::ToleranceConfig;

/// `cone{b_1, .., b_d}` for a basis of `R^d`. Every such cone orders `R^d`
/// as a vector lattice; the operations below are coefficient-wise in the
/// basis.
#[derive(Clone, Debug)]
pub struct SimplicialCone {
    basis: Vec<Vector>,
    b: DMatrix<f64>,
    b_inv: DMatrix<f64>,
    /// Norms of the rows of `B^{-1}`.
    row_norms: Vec<f64>,
}

impl SimplicialCone {
    pub fn new(basis: Vec<Vector>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        for v in &basis {
            check_dim(dim, v)?;
        }
        let b = DMatrix::from_fn(dim, dim, |i, j| basis[j][i]);
        let scale: f64 = basis.iter().map(Vector::norm).product();
        if scale == 0.0 || b.determinant().abs() <= 1e-10 * scale {
            return Err(Error::NotSimplicial);
        }
        let b_inv = b.clone().try_inverse().ok_or(Error::NotSimplicial)?;
        let id_err = (&b * &b_inv - DMatrix::identity(dim, dim)).amax();
        if id_err > 1e-10 {
            return Err(Error::NotSimplicial);
        }
        let row_norms = (0..dim).map(|i| b_inv.row(i).norm()).collect();
        Ok(Self {
            basis,
            b,
            b_inv,
            row_norms,
        })
    }

    pub fn orthant(dim: usize) -> Self {
        Self::new((0..dim).map(|i| Vector::unit(dim, i)).collect()).expect("identity basis")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Coefficients `c` with `B c = x`.
    pub fn coords(&self, x: &Vector) -> Vec<f64> {
        let c = &self.b_inv * DVector::from_column_slice(x.as_slice());
        c.iter().copied().collect()
    }

    pub fn from_coords(&self, c: &[f64]) -> Vector {
        let x = &self.b * DVector::from_column_slice(c);
        Vector::new(x.iter().copied().collect()).expect("finite chart image")
    }

    fn chart_map(&self, x: &Vector, f: impl Fn(f64) -> f64) -> Vector {
        let c: Vec<f64> = self.coords(x).into_iter().map(f).collect();
        self.from_coords(&c)
    }

    /// `x^+ = sup(x, 0)`.
    pub fn positive_part(&self, x: &Vector) -> Vector {
        self.chart_map(x, |c| c.max(0.0))
    }

    /// `x^- = (-x)^+`, so that `x = x^+ - x^-`.
    pub fn negative_part(&self, x: &Vector) -> Vector {
        self.chart_map(x, |c| (-c).max(0.0))
    }

    /// `|x| = x^+ + x^-`.
    pub fn abs(&self, x: &Vector) -> Vector {
        self.chart_map(x, f64::abs)
    }

    pub fn sup(&self, x: &Vector, y: &Vector) -> Vector {
        let c: Vec<f64> = self
            .coords(x)
            .into_iter()
            .zip(self.coords(y))
            .map(|(a, b)| a.max(b))
            .collect();
        self.from_coords(&c)
    }

    pub fn inf(&self, x: &Vector, y: &Vector) -> Vector {
        let c: Vec<f64> = self
            .coords(x)
            .into_iter()
            .zip(self.coords(y))
            .map(|(a, b)| a.min(b))
            .collect();
        self.from_coords(&c)
    }

    /// Smallest chart coefficient: nonnegative exactly on the cone.
    pub fn min_coord(&self, x: &Vector) -> f64 {
        self.coords(x).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Signed distances `c_i / |row_i(B^{-1})|` to the facet hyperplanes.
    pub fn facet_distances(&self, x: &Vector) -> Vec<f64> {
        self.coords(x)
            .into_iter()
            .zip(&self.row_norms)
            .map(|(c, n)| c / n)
            .collect()
    }

    /// The same cone as a `PolyhedralCone`; facet normals are the rows of `-B^{-1}`.
    pub fn to_polyhedral(&self, tol: &ToleranceConfig) -> Result<PolyhedralCone> {
        let dim = self.dim();
        let normals = (0..dim)
            .map(|i| Vector::new((0..dim).map(|j| -self.b_inv[(i, j)]).collect()))
            .collect::<Result<Vec<_>>>()?;
        PolyhedralCone::with_representations(dim, self.basis.clone(), normals, tol)
    }
}

/// `Q = (.)^+`, `R = -(.)^-`, with ranges `S` and `-S`.
#[derive(Clone, Debug)]
pub struct PositivePartPair {
    s: SimplicialCone,
}

pub fn positive_part_pair(s: &SimplicialCone) -> PositivePartPair {
    PositivePartPair { s: s.clone() }
}

impl PositivePartPair {
    pub fn cone(&self) -> &SimplicialCone {
        &self.s
    }
}

impl RetractionPair for PositivePartPair {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        check_dim(self.s.dim(), x)?;
        let c = self.s.coords(x);
        let pos: Vec<f64> = c.iter().map(|v| v.max(0.0)).collect();
        let neg: Vec<f64> = c.iter().map(|v| v.min(0.0)).collect();
        Ok((self.s.from_coords(&pos), self.s.from_coords(&neg)))
    }

    fn construction(&self) -> &'static str {
        "positive-part"
    }
}
