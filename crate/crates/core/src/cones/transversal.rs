use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::nnls;

use super::PolyhedralCone;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteriorSide {
    M,
    N,
}

/// Evidence that `(M, N)` is a transversal pair: a line `span{delta_dir}`
/// meeting `M` in `witness_in_m`, `N` in `witness_in_n`, and the interior of
/// the cone named by `interior_side`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalCertificate {
    /// Unit direction of the line, pointing into `M`.
    pub delta_dir: Vector,
    pub witness_in_m: Vector,
    pub witness_in_n: Vector,
    pub interior_side: InteriorSide,
}

impl TransversalCertificate {
    /// Re-checks every condition from scratch (including `M ∩ N = {0}`).
    pub fn verify(&self, m: &PolyhedralCone, n: &PolyhedralCone) -> Result<()> {
        let tol = m.tolerance();
        let fail = |why: &str| Err(Error::HypothesisNotMet(why.to_string()));
        if (self.delta_dir.norm() - 1.0).abs() > 1e-9 {
            return fail("transversal direction is not a unit vector");
        }
        if !cones_meet_only_at_zero(m, n)? {
            return Err(Error::ConesIntersect);
        }
        let parallel = |w: &Vector, sign: f64| {
            w.normalized()
                .is_some_and(|u| u.dist(&self.delta_dir.scale(sign)) <= tol.parallel.max(1e-9))
        };
        if !parallel(&self.witness_in_m, 1.0) || !m.contains(&self.witness_in_m, false)? {
            return fail("M witness is not a nonzero point of M on the line");
        }
        if !parallel(&self.witness_in_n, -1.0) || !n.contains(&self.witness_in_n, false)? {
            return fail("N witness is not a nonzero point of N on the line");
        }
        let interior_ok = match self.interior_side {
            InteriorSide::M => m.contains(&self.witness_in_m, true)?,
            InteriorSide::N => n.contains(&self.witness_in_n, true)?,
        };
        if !interior_ok {
            return fail("the line misses the interior of the claimed cone");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransversalSearch {
    Found(TransversalCertificate),
    /// The finite candidate search failed; a transversal line may still exist.
    NotFound,
}

/// `M ∩ N = {0}`: infeasibility of `G_M a - G_N b = 0`, `sum a + sum b = 1`, `a, b >= 0`.
pub(crate) fn cones_meet_only_at_zero(m: &PolyhedralCone, n: &PolyhedralCone) -> Result<bool> {
    let dim = m.dim();
    let lift = |g: &Vector, sign: f64| {
        let mut v = g.scale(sign).into_vec();
        v.push(1.0);
        Vector::new(v)
    };
    let cols: Vec<Vector> = m
        .generators()
        .iter()
        .map(|g| lift(g, 1.0))
        .chain(n.generators().iter().map(|g| lift(g, -1.0)))
        .collect::<Result<_>>()?;
    if m.generators().is_empty() || n.generators().is_empty() {
        return Ok(true);
    }
    let mut rhs = vec![0.0; dim];
    rhs.push(1.0);
    let sol = nnls::nnls(&cols, &Vector::new(rhs)?, m.tolerance())?;
    Ok(sol.residual > m.tolerance().base)
}

/// Searches a finite candidate set for a transversal line of `(M, N)`.
///
/// Candidates, in order: `-u` for each generator `u` of `N` (needs `-u` in
/// `int M`), each generator `g` of `M` (needs `-g` in `int N`), the
/// generator means of `M` and of `-N`, and finally the direction with the
/// largest facet slack in both `M` and `-N` (found whenever
/// `int M ∩ -int N` is nonempty).
pub fn is_transversal(m: &PolyhedralCone, n: &PolyhedralCone) -> Result<TransversalSearch> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: n.dim(),
        });
    }
    if !m.is_pointed()? {
        return Err(Error::NotPointed("M"));
    }
    if !n.is_pointed()? {
        return Err(Error::NotPointed("N"));
    }
    if !cones_meet_only_at_zero(m, n)? {
        return Err(Error::ConesIntersect);
    }

    let try_dir = |d: &Vector| -> Result<Option<TransversalCertificate>> {
        let Some(d) = d.normalized() else {
            return Ok(None);
        };
        let back = -&d;
        if !m.contains(&d, false)? || !n.contains(&back, false)? {
            return Ok(None);
        }
        let side = if m.contains(&d, true)? {
            InteriorSide::M
        } else if n.contains(&back, true)? {
            InteriorSide::N
        } else {
            return Ok(None);
        };
        Ok(Some(TransversalCertificate {
            delta_dir: d.clone(),
            witness_in_m: d,
            witness_in_n: back,
            interior_side: side,
        }))
    };

    let mut candidates: Vec<Vector> = n.generators().iter().map(|u| -u).collect();
    candidates.extend(m.generators().iter().cloned());
    let mean = |k: &PolyhedralCone| {
        let ones = vec![1.0; k.generators().len()];
        Vector::combination(k.dim(), &ones, k.generators())
    };
    candidates.push(mean(m));
    candidates.push(-mean(n));
    if m.is_solid() && n.is_solid() {
        candidates.push(max_slack_direction(m, n)?);
    }

    for d in &candidates {
        if let Some(cert) = try_dir(d)? {
            return Ok(TransversalSearch::Found(cert));
        }
    }
    Ok(TransversalSearch::NotFound)
}

/// Approximate maximizer of `min(min_i -<n_i, d>, min_j <n'_j, d>)` over the
/// unit ball, by projected subgradient ascent from the sum of the cone means.
fn max_slack_direction(m: &PolyhedralCone, n: &PolyhedralCone) -> Result<Vector> {
    let rows: Vec<Vector> = m
        .facets()?
        .iter()
        .map(|f| -f)
        .chain(n.facets()?.iter().cloned())
        .collect();
    let slack = |d: &Vector| {
        rows.iter()
            .enumerate()
            .map(|(i, r)| (i, r.dot(d)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    };
    let unit_mean = |k: &PolyhedralCone, sign: f64| {
        let mut s = Vector::zeros(k.dim());
        for g in k.generators() {
            s = s.axpy(sign / g.norm(), g);
        }
        s.normalized().unwrap_or(s)
    };
    let mut d = &unit_mean(m, 1.0) + &unit_mean(n, -1.0);
    let mut best = (d.clone(), slack(&d).1);
    for k in 0..4000 {
        let (active, value) = slack(&d);
        if value > best.1 {
            best = (d.clone(), value);
        }
        d = d.axpy(0.5 / ((k + 1) as f64).sqrt(), &rows[active]);
        let len = d.norm();
        if len > 1.0 {
            d = d.scale(1.0 / len);
        }
    }
    Ok(best.0)
}
