#![allow(dead_code)]

use coneretract::{PolyhedralCone, SimplicialCone, ToleranceConfig, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let x = v(&x);
        if x.norm() > 1e-3 {
            return x;
        }
    }
}

pub fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    gaussian(rng, dim).normalized().unwrap()
}

/// Orthonormal basis of the complement of the unit vector `a`.
pub fn complement(a: &Vector) -> Vec<Vector> {
    let dim = a.dim();
    let mut out: Vec<Vector> = Vec::new();
    for i in 0..dim {
        let mut w = Vector::unit(dim, i);
        w = w.axpy(-w.dot(a), a);
        for e in &out {
            w = w.axpy(-w.dot(e), e);
        }
        if w.norm() > 1e-6 {
            out.push(w.normalized().unwrap());
        }
    }
    out.truncate(dim - 1);
    out
}

/// A solid pointed cone around a random axis, with `k >= dim` generators
/// spread on a ring so that the axis stays well inside.
pub fn solid_cone(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> (PolyhedralCone, Vector) {
    let tol = ToleranceConfig::default();
    let axis = unit(rng, dim);
    let frame = complement(&axis);
    loop {
        let gens: Vec<Vector> = (0..k)
            .map(|_| {
                let mut side = Vector::zeros(dim);
                for e in &frame {
                    side = side.axpy(rng.random_range(-1.0..1.0), e);
                }
                let side = side.normalized().unwrap_or_else(|| frame[0].clone());
                let r = rng.random_range(0.5..1.5);
                axis.axpy(r, &side).scale(rng.random_range(0.5..2.0))
            })
            .collect();
        let Ok(m) = PolyhedralCone::from_generators(dim, gens, &tol) else {
            continue;
        };
        if m.is_solid() && m.contains(&axis, true).unwrap_or(false) && m.facets().is_ok() {
            return (m, axis);
        }
    }
}

/// Random simplicial cone with bounded condition number.
pub fn simplicial(rng: &mut ChaCha8Rng, dim: usize) -> SimplicialCone {
    loop {
        let basis: Vec<Vector> = (0..dim)
            .map(|i| Vector::unit(dim, i).axpy(0.6, &gaussian(rng, dim).scale(0.5)))
            .collect();
        let Ok(s) = SimplicialCone::new(basis) else {
            continue;
        };
        let probe: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
        let worst = probe
            .iter()
            .map(|e| v(&s.coords(e)).norm())
            .fold(0.0, f64::max);
        if worst < 20.0 {
            return s;
        }
    }
}
