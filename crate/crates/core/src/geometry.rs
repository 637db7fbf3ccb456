//! Dense small-dimension vectors, planes through the origin and 2x2 solves.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// A point of `R^d` with `d >= 1`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Checked constructor: rejects empty and non-finite input.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard unit vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * t).collect())
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }

    /// Coordinate-wise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|v| f(*v)).collect())
    }

    /// Linear combination `sum_i coeffs[i] * vectors[i]`.
    pub fn combination(dim: usize, coeffs: &[f64], vectors: &[Vector]) -> Vector {
        let mut out = vec![0.0; dim];
        for (c, v) in coeffs.iter().zip(vectors) {
            for (o, x) in out.iter_mut().zip(&v.0) {
                *o += c * x;
            }
        }
        Vector(out)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Vector::new(value)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(value: [f64; N]) -> Self {
        Vector(value.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Add for Vector {
    type Output = Vector;

    fn add(self, rhs: Vector) -> Vector {
        &self + &rhs
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

impl Sub for Vector {
    type Output = Vector;

    fn sub(self, rhs: Vector) -> Vector {
        &self - &rhs
    }
}

impl AddAssign<&Vector> for Vector {
    fn add_assign(&mut self, rhs: &Vector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl SubAssign<&Vector> for Vector {
    fn sub_assign(&mut self, rhs: &Vector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Neg for Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, t: f64) -> Vector {
        self.scale(t)
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;

    fn mul(self, t: f64) -> Vector {
        self.scale(t)
    }
}

/// 2-D cross product `a x b`.
pub fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Counterclockwise angle from `a` to `b`, in `[0, 2*pi)`.
pub fn ccw_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let theta = cross2(a, b).atan2(dot2(a, b));
    if theta < 0.0 {
        theta + std::f64::consts::TAU
    } else {
        theta
    }
}

/// A 2-dimensional linear subspace of `R^d` with an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane2D {
    basis_a: Vector,
    basis_b: Vector,
}

impl Plane2D {
    /// Builds a plane from an orthonormal pair, checking orthonormality.
    pub fn from_orthonormal(
        basis_a: Vector,
        basis_b: Vector,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if basis_a.dim() != basis_b.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis_a.dim(),
                got: basis_b.dim(),
            });
        }
        let ok = (basis_a.norm_sq() - 1.0).abs() <= tol.singular
            && (basis_b.norm_sq() - 1.0).abs() <= tol.singular
            && basis_a.dot(&basis_b).abs() <= tol.singular;
        if !ok {
            return Err(Error::PreconditionViolated(
                "plane basis is not orthonormal".into(),
            ));
        }
        Ok(Self { basis_a, basis_b })
    }

    /// The standard coordinate plane `span{e_i, e_j}`.
    pub fn coordinate(dim: usize, i: usize, j: usize) -> Self {
        Self {
            basis_a: Vector::unit(dim, i),
            basis_b: Vector::unit(dim, j),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis_a.dim()
    }

    pub fn basis_a(&self) -> &Vector {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &Vector {
        &self.basis_b
    }

    /// Coordinates `(s, t)` of an in-plane point, `x = s a + t b`.
    pub fn coords(&self, x: &Vector, tol: &ToleranceConfig) -> Result<[f64; 2]> {
        check_dim(self.ambient_dim(), x)?;
        let s = x.dot(&self.basis_a);
        let t = x.dot(&self.basis_b);
        let residual = x.axpy(-s, &self.basis_a).axpy(-t, &self.basis_b).norm();
        if residual > tol.base * x.norm() {
            return Err(Error::NotInPlane { residual });
        }
        Ok([s, t])
    }

    /// Orthogonal projection coordinates, without the membership check.
    pub fn project_coords(&self, x: &Vector) -> [f64; 2] {
        [x.dot(&self.basis_a), x.dot(&self.basis_b)]
    }

    pub fn lift(&self, st: [f64; 2]) -> Vector {
        self.basis_a.scale(st[0]).axpy(st[1], &self.basis_b)
    }
}

/// Plane `span{x, delta_dir}` whose first basis vector is the normalized
/// `delta_dir`; the second completes it by Gram-Schmidt from `x`.
pub fn plane_through(x: &Vector, delta_dir: &Vector, tol: &ToleranceConfig) -> Result<Plane2D> {
    check_dim(delta_dir.dim(), x)?;
    let a = delta_dir.normalized().ok_or(Error::DegeneratePlane)?;
    let w = x.axpy(-x.dot(&a), &a);
    let wn = w.norm();
    if wn <= tol.parallel * x.norm() || wn == 0.0 {
        return Err(Error::DegeneratePlane);
    }
    Ok(Plane2D {
        basis_a: a,
        basis_b: w.scale(1.0 / wn),
    })
}

/// Solves `[a11 a12; a21 a22] (lambda, mu) = (b1, b2)` by Cramer's rule.
pub fn solve2x2(a11: f64, a12: f64, a21: f64, a22: f64, b1: f64, b2: f64) -> Result<(f64, f64)> {
    let scale = a11.abs().max(a12.abs()).max(a21.abs()).max(a22.abs());
    let det = a11 * a22 - a12 * a21;
    if scale == 0.0 || det.abs() <= 1e-12 * scale * scale {
        return Err(Error::SingularSystem);
    }
    Ok(((b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det))
}

/// Writes `x = lambda * c1 + mu * c2` for column vectors `c1`, `c2`.
pub fn solve_columns(c1: [f64; 2], c2: [f64; 2], x: [f64; 2]) -> Result<(f64, f64)> {
    solve2x2(c1[0], c2[0], c1[1], c2[1], x[0], x[1])
}

pub(crate) fn check_dim(expected: usize, x: &Vector) -> Result<()> {
    if x.dim() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got: x.dim(),
        })
    }
}
