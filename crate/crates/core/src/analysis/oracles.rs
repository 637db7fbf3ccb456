use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::random_unit;
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::moreau::CircularCone;

/// `inf{t > 0 : y in t D}` by doubling and bisection on a membership
/// predicate for `D`.
pub fn oracle_gauge_bisection(member: impl Fn(&Vector) -> bool, y: &Vector) -> Result<f64> {
    if y.is_zero() {
        return Ok(0.0);
    }
    let inside = |t: f64| member(&y.scale(1.0 / t));
    let (mut lo, mut hi) = if inside(1.0) {
        let (mut lo, mut hi) = (0.5, 1.0);
        while inside(lo) {
            hi = lo;
            lo /= 2.0;
            if lo < 2f64.powi(-60) {
                return Ok(0.0);
            }
        }
        (lo, hi)
    } else {
        let (mut lo, mut hi) = (1.0, 2.0);
        while !inside(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 2f64.powi(60) {
                return Err(Error::BracketFailure);
            }
        }
        (lo, hi)
    };
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug)]
pub enum ProjectionTarget<'a> {
    Polyhedral(&'a PolyhedralCone),
    Circular(&'a CircularCone),
}

/// Best of `samples` candidate cone points for `min ||x - y||`.
///
/// Candidates are rays of the cone, each paired with its optimal point
/// `<x, w>^+ w / ||w||^2`. For polyhedral cones the rays are random
/// nonnegative mixtures of generators (plus every generator and `0`). For
/// circular cones they come from an angular grid on the boundary circle
/// (in `R^3`; random boundary rays otherwise) refined by golden-section
/// search, together with `x` itself when it is inside.
pub fn oracle_project_sampling(
    target: ProjectionTarget<'_>,
    x: &Vector,
    samples: usize,
    seed: u64,
) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Vector::zeros(x.dim());
    let mut best_d = x.norm();
    let offer = |w: &Vector, best: &mut Vector, best_d: &mut f64| {
        let n2 = w.norm_sq();
        if n2 == 0.0 {
            return;
        }
        let y = w.scale(x.dot(w).max(0.0) / n2);
        let d = y.dist(x);
        if d < *best_d {
            *best_d = d;
            *best = y;
        }
    };
    match target {
        ProjectionTarget::Polyhedral(k) => {
            for g in k.generators() {
                offer(g, &mut best, &mut best_d);
            }
            for _ in 0..samples {
                let w = k.sample(&mut rng);
                offer(&w, &mut best, &mut best_d);
            }
        }
        ProjectionTarget::Circular(c) => {
            if c.slack(x) >= 0.0 {
                return x.clone();
            }
            let (sin, cos) = c.half_angle().sin_cos();
            let frame = orthonormal_complement(c.axis());
            let ray_at = |psi: f64| {
                let side = match frame.as_slice() {
                    [] => Vector::zeros(x.dim()),
                    [e] => e.scale(psi.cos().signum()),
                    [e1, e2, ..] => e1.scale(psi.cos()).axpy(psi.sin(), e2),
                };
                c.axis().scale(cos).axpy(sin, &side)
            };
            let dist_at = |psi: f64| {
                let w = ray_at(psi);
                w.scale(x.dot(&w).max(0.0)).dist(x)
            };
            if frame.len() <= 2 {
                let n = samples.max(8);
                let step = TAU / n as f64;
                let (mut arg, mut val) = (0.0, f64::INFINITY);
                for i in 0..n {
                    let psi = i as f64 * step;
                    let d = dist_at(psi);
                    if d < val {
                        (arg, val) = (psi, d);
                    }
                }
                let psi = golden_section(&dist_at, arg - step, arg + step);
                offer(&ray_at(psi), &mut best, &mut best_d);
                offer(&ray_at(arg), &mut best, &mut best_d);
            } else {
                for _ in 0..samples {
                    let mut side = random_unit(x.dim(), &mut rng);
                    side = side.axpy(-side.dot(c.axis()), c.axis());
                    if let Some(side) = side.normalized() {
                        offer(
                            &c.axis().scale(cos).axpy(sin, &side),
                            &mut best,
                            &mut best_d,
                        );
                    }
                }
            }
            for _ in 0..samples.min(1000) {
                let y = c.sample(&mut rng);
                let r: f64 = rng.sample(Exp1);
                offer(&y.scale(r), &mut best, &mut best_d);
            }
        }
    }
    best
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// Orthonormal basis of `axis^⊥`.
fn orthonormal_complement(axis: &Vector) -> Vec<Vector> {
    let dim = axis.dim();
    let mut out: Vec<Vector> = Vec::new();
    for i in 0..dim {
        let mut v = Vector::unit(dim, i);
        v = v.axpy(-v.dot(axis), axis);
        for e in &out {
            v = v.axpy(-v.dot(e), e);
        }
        if v.norm() > 1e-6 {
            out.push(v.normalized().expect("nonzero"));
        }
        if out.len() + 1 == dim {
            break;
        }
    }
    out
}
