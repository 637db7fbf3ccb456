//! Double description: generators of `{y : <a_i, y> <= 0 for all i}`.
//!
//! Constraints are inserted one at a time. While the current cone still has
//! a lineality space, a constraint that is not orthogonal to it removes one
//! lineality direction; afterwards each constraint splits the extreme rays
//! into `+`, `0` and `-` sets and adjacent `(+, -)` pairs are combined.
//! Adjacency uses the combinatorial test on zero sets.

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Debug, Default)]
pub struct ConeGenerators {
    /// Extreme rays of the pointed part, unit length, orthogonal to `lineality`.
    pub rays: Vec<Vector>,
    /// Orthonormal basis of the lineality space.
    pub lineality: Vec<Vector>,
}

impl ConeGenerators {
    /// Rays plus both signs of every lineality direction.
    pub fn into_generators(self) -> Vec<Vector> {
        let mut out = self.rays;
        for l in self.lineality {
            out.push(-&l);
            out.push(l);
        }
        out
    }
}

pub fn generators_of_inequalities(
    dim: usize,
    normals: &[Vector],
    tol: &ToleranceConfig,
) -> Result<ConeGenerators> {
    if dim > tol.dd_dim_limit {
        return Err(Error::DimensionLimitExceeded {
            dim,
            limit: tol.dd_dim_limit,
        });
    }
    let eps = tol.base;
    let mut lineality: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
    let mut rays: Vec<Vector> = Vec::new();
    let mut processed: Vec<Vector> = Vec::new();

    for raw in normals {
        if raw.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: raw.dim(),
            });
        }
        let Some(a) = raw.normalized() else { continue };

        let lin_vals: Vec<f64> = lineality.iter().map(|l| a.dot(l)).collect();
        let pivot = lin_vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > eps)
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .map(|(i, _)| i);

        if let Some(p) = pivot {
            let mut pivot_dir = lineality.remove(p);
            let mut ap = lin_vals[p];
            if ap > 0.0 {
                pivot_dir = -pivot_dir;
                ap = -ap;
            }
            let others: Vec<Vector> = lineality
                .iter()
                .map(|l| l.axpy(-a.dot(l) / ap, &pivot_dir))
                .collect();
            lineality = orthonormalize(others, eps);
            // old rays now lie on the new hyperplane; the pivot becomes a ray
            let mut shifted: Vec<Vector> = rays
                .iter()
                .map(|r| r.axpy(-a.dot(r) / ap, &pivot_dir))
                .collect();
            shifted.push(pivot_dir);
            let mut next = Vec::with_capacity(shifted.len());
            for s in &shifted {
                if let Some(v) = reduce(s, &lineality, eps) {
                    push_unique(&mut next, v, eps);
                }
            }
            rays = next;
        } else {
            let vals: Vec<f64> = rays.iter().map(|r| a.dot(r)).collect();
            let zero_sets: Vec<Vec<usize>> =
                rays.iter().map(|r| zero_set(r, &processed, eps)).collect();
            let mut next: Vec<Vector> = Vec::new();
            for (r, &v) in rays.iter().zip(&vals) {
                if v <= eps {
                    push_unique(&mut next, r.clone(), eps);
                }
            }
            for (i, &vp) in vals.iter().enumerate().filter(|(_, v)| **v > eps) {
                for (j, &vn) in vals.iter().enumerate().filter(|(_, v)| **v < -eps) {
                    if !adjacent(i, j, &zero_sets) {
                        continue;
                    }
                    let combined = rays[j].scale(vp).axpy(-vn, &rays[i]);
                    if let Some(v) = reduce(&combined, &lineality, eps) {
                        push_unique(&mut next, v, eps);
                    }
                }
                if next.len() > tol.dd_face_budget {
                    return Err(Error::ConversionOverflow {
                        budget: tol.dd_face_budget,
                    });
                }
            }
            rays = next;
        }
        processed.push(a);
        if rays.len() > tol.dd_face_budget {
            return Err(Error::ConversionOverflow {
                budget: tol.dd_face_budget,
            });
        }
    }
    Ok(ConeGenerators { rays, lineality })
}

fn zero_set(r: &Vector, processed: &[Vector], eps: f64) -> Vec<usize> {
    processed
        .iter()
        .enumerate()
        .filter(|(_, a)| a.dot(r).abs() <= eps)
        .map(|(i, _)| i)
        .collect()
}

fn adjacent(i: usize, j: usize, zero_sets: &[Vec<usize>]) -> bool {
    let common: Vec<usize> = zero_sets[i]
        .iter()
        .copied()
        .filter(|k| zero_sets[j].binary_search(k).is_ok())
        .collect();
    !zero_sets
        .iter()
        .enumerate()
        .any(|(k, zs)| k != i && k != j && common.iter().all(|c| zs.binary_search(c).is_ok()))
}

/// Removes the lineality component and normalizes; `None` if nothing is left.
fn reduce(v: &Vector, lineality: &[Vector], eps: f64) -> Option<Vector> {
    let mut out = v.clone();
    for l in lineality {
        out = out.axpy(-out.dot(l), l);
    }
    let n = out.norm();
    (n > eps).then(|| out.scale(1.0 / n))
}

fn push_unique(set: &mut Vec<Vector>, v: Vector, eps: f64) {
    if !set.iter().any(|w| w.dist(&v) <= eps) {
        set.push(v);
    }
}

/// Modified Gram-Schmidt, dropping numerically dependent vectors.
pub(crate) fn orthonormalize(vs: Vec<Vector>, eps: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v;
        for q in &out {
            w = w.axpy(-w.dot(q), q);
        }
        let n = w.norm();
        if n > eps {
            out.push(w.scale(1.0 / n));
        }
    }
    out
}
