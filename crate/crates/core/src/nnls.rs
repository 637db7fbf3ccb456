//! Active-set nonnegative least squares (Lawson–Hanson).
//!
//! Minimizes `||A c - b||` subject to `c >= 0`, where the columns of `A` are
//! given as [`Vector`]s. Used for metric projection onto finitely generated
//! cones and as the feasibility oracle behind generator-based membership.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub coeffs: Vec<f64>,
    /// `||A c - b||`.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves the NNLS problem for `columns` and right-hand side `b`.
pub fn nnls(columns: &[Vector], b: &Vector, tol: &ToleranceConfig) -> Result<NnlsSolution> {
    let m = b.dim();
    let n = columns.len();
    if n == 0 {
        return Ok(NnlsSolution {
            coeffs: vec![],
            residual: b.norm(),
            iterations: 0,
        });
    }
    for c in columns {
        if c.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: c.dim(),
            });
        }
    }
    let a = DMatrix::from_fn(m, n, |i, j| columns[j][i]);
    let bv = DVector::from_column_slice(b.as_slice());
    let col_scale = columns
        .iter()
        .map(Vector::norm)
        .fold(0.0, f64::max)
        .max(1e-300);
    let w_tol = 1e-13 * (1.0 + b.norm()) * col_scale;
    let max_iter = tol.nnls_iter_factor * n;

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n];
    let mut iterations = 0;

    loop {
        let w = a.transpose() * (&bv - &a * &x);
        let entering = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > w_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = entering else { break };
        passive[j] = true;
        let before = x.clone();

        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::MaxIterations {
                    iterations: max_iter,
                });
            }
            let z = solve_passive(&a, &bv, &passive);
            if (0..n).all(|k| !passive[k] || z[k] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = 1.0f64;
            for k in (0..n).filter(|&k| passive[k] && z[k] <= 0.0) {
                let denom = x[k] - z[k];
                if denom > 0.0 {
                    alpha = alpha.min(x[k] / denom);
                }
            }
            x += (&z - &x) * alpha;
            for k in 0..n {
                if passive[k] && x[k] <= 1e-15 * col_scale {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }

        if passive[j] {
            blocked.fill(false);
        } else if x == before {
            // the entering column was dropped without progress
            blocked[j] = true;
        }
    }

    let residual = (&bv - &a * &x).norm();
    Ok(NnlsSolution {
        coeffs: x.iter().map(|v| v.max(0.0)).collect(),
        residual,
        iterations,
    })
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&k| passive[k]).collect();
    let mut out = DVector::zeros(passive.len());
    if idx.is_empty() {
        return out;
    }
    let sub = a.select_columns(&idx);
    let svd = sub.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max().max(1e-300);
    if let Ok(sol) = svd.solve(b, eps) {
        for (pos, &k) in idx.iter().enumerate() {
            out[k] = sol[pos];
        }
    }
    out
}

/// Largest KKT violation of an NNLS solution: `max(max_j w_j^+, max_{c_j>0} |w_j|)`
/// with `w = A^T (b - A c)`.
pub fn kkt_residual(columns: &[Vector], b: &Vector, coeffs: &[f64]) -> f64 {
    let fit = Vector::combination(b.dim(), coeffs, columns);
    let r = b - &fit;
    columns
        .iter()
        .zip(coeffs)
        .map(|(col, &c)| {
            let w = col.dot(&r);
            if c > 0.0 {
                w.abs()
            } else {
                w.max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// `true` when `b` is a nonnegative combination of `columns` up to a residual
/// of `eps * (1 + ||b||)`.
pub fn in_conic_hull(
    columns: &[Vector],
    b: &Vector,
    eps: f64,
    tol: &ToleranceConfig,
) -> Result<bool> {
    Ok(nnls(columns, b, tol)?.residual <= eps * (1.0 + b.norm()))
}
