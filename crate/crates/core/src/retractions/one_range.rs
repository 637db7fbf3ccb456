use crate::cones::{basis_on_hyperplane, ConeBasisData, PolyhedralCone};
use crate::error::Result;
use crate::geometry::{check_dim, Vector};

use super::RetractionPair;

/// Retraction pair whose `R` has one-dimensional range `ray{u}`:
/// `Rx = q(x) u`, `Q = I - R`, with the asymmetric norm
/// `q(t, y) = (t + g(y))^+` in the chart `x = t u + y`, `<f, y> = 0`,
/// and `g` the gauge of the translated base `D` of `M`.
#[derive(Clone, Debug)]
pub struct OneRangeRetraction {
    m: PolyhedralCone,
    basis: ConeBasisData,
    /// `<f, u>`, negative.
    f_dot_u: f64,
}

/// One-range construction for `M` and `N = ray{u}`; needs `-u` in `int M`.
pub fn build_one_range(m: &PolyhedralCone, u: &Vector) -> Result<OneRangeRetraction> {
    let basis = basis_on_hyperplane(m, u)?;
    let f_dot_u = basis.functional_f.dot(&basis.u);
    Ok(OneRangeRetraction {
        m: m.clone(),
        basis,
        f_dot_u,
    })
}

impl OneRangeRetraction {
    pub fn m(&self) -> &PolyhedralCone {
        &self.m
    }

    /// Unit generator of the range of `R`.
    pub fn u(&self) -> &Vector {
        &self.basis.u
    }

    pub fn basis_data(&self) -> &ConeBasisData {
        &self.basis
    }

    /// Chart `x = t u + y` with `y` in `{<f, .> = 0}`.
    pub fn chart(&self, x: &Vector) -> (f64, Vector) {
        let t = self.basis.functional_f.dot(x) / self.f_dot_u;
        (t, x.axpy(-t, &self.basis.u))
    }

    /// `g(y)`, the gauge of the translated base.
    pub fn gauge(&self, y: &Vector) -> f64 {
        self.basis.base_d.gauge(y)
    }

    /// `t + g(y)` before the positive part; `<= 0` exactly on `M`.
    pub fn level(&self, x: &Vector) -> f64 {
        let (t, y) = self.chart(x);
        t + self.gauge(&y)
    }

    /// The asymmetric norm `q(x) = (t + g(y))^+`.
    pub fn q_value(&self, x: &Vector) -> f64 {
        self.level(x).max(0.0)
    }

    /// `(Qx, Rx)` with `Rx = q(x) u`.
    pub fn eval_one_range(&self, x: &Vector) -> Result<(Vector, Vector)> {
        check_dim(self.m.dim(), x)?;
        let rx = self.basis.u.scale(self.q_value(x));
        Ok((x - &rx, rx))
    }

    /// Range of `Q`: `{x : t + g(y) <= 0}`, with a generator description
    /// rebuilt from the vertices of `D`.
    pub fn range_cone_of_q(&self) -> Result<QRangeCone> {
        let gens: Vec<Vector> = self
            .basis
            .base_d
            .vertices()
            .iter()
            .map(|v| v - &self.basis.u)
            .collect();
        Ok(QRangeCone {
            retraction: self.clone(),
            vrep: PolyhedralCone::from_generators(self.m.dim(), gens, self.m.tolerance())?,
        })
    }
}

impl RetractionPair for OneRangeRetraction {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)> {
        self.eval_one_range(x)
    }

    fn construction(&self) -> &'static str {
        "one-range"
    }
}

/// The range cone of `Q` for a one-range pair.
#[derive(Clone, Debug)]
pub struct QRangeCone {
    retraction: OneRangeRetraction,
    vrep: PolyhedralCone,
}

impl QRangeCone {
    /// `t + g(y) <= tol * ||x||`.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.retraction.level(x) <= tol * x.norm()
    }

    /// `t + g(y)` at `x`.
    pub fn level(&self, x: &Vector) -> f64 {
        self.retraction.level(x)
    }

    /// Generators: the rays through `(-1, v)` for every vertex `v` of `D`.
    pub fn vrep(&self) -> &PolyhedralCone {
        &self.vrep
    }
}
