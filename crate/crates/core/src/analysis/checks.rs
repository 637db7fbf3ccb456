use rand::RngCore;

use super::{run_property, ConeRegion, Evaluation, Map, PropertyReport, SampleSpec};
use crate::geometry::Vector;
use crate::retractions::RetractionPair;
use crate::tolerance::ToleranceConfig;

/// Largest accepted finite-difference ratio `||T x' - T x|| / ||x' - x||`.
pub const LIPSCHITZ_BOUND: f64 = 1e3;

const HOMOGENEITY_FACTORS: [f64; 4] = [0.0, 0.5, 2.0, 10.0];

fn apply(t: &Map<'_>, x: &Vector) -> Option<Vector> {
    t(x).ok()
}

/// Residual that flags evaluation failures.
fn gap(a: Option<&Vector>, b: &Vector) -> f64 {
    a.map_or(f64::INFINITY, |a| a.dist(b))
}

/// Idempotence, homogeneity, range and boundary membership and local
/// Lipschitz continuity of `t`, whose range is `range`.
pub fn check_retraction_axioms(
    t: &Map<'_>,
    range: &dyn ConeRegion,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> PropertyReport {
    let threshold = tol.violation();
    run_property("retraction-axioms", spec, threshold, |rng| {
        let x = spec.sample_point(rng);
        let scale = 1.0 + x.norm();
        let Some(tx) = apply(t, &x) else {
            return Evaluation {
                inputs: vec![x],
                residuals: vec![("evaluation", f64::INFINITY)],
            };
        };
        let idem = gap(apply(t, &tx).as_ref(), &tx) / scale;
        let homog = HOMOGENEITY_FACTORS
            .iter()
            .map(|&s| gap(apply(t, &x.scale(s)).as_ref(), &tx.scale(s)) / (1.0 + s * x.norm()))
            .fold(0.0, f64::max);
        let member = range.violation(&tx) / scale;
        let outside = range.violation(&x) > threshold * x.norm();
        let boundary = if outside {
            range.boundary_gap(&tx) / scale
        } else {
            0.0
        };

        let h = 1e-6 * scale;
        let dx = super::random_unit(spec.dim, rng).scale(h);
        let moved = &x + &dx;
        let ratio = gap(apply(t, &moved).as_ref(), &tx) / h;
        let lipschitz = (ratio / LIPSCHITZ_BOUND - 1.0).max(0.0);

        Evaluation {
            inputs: vec![x, dx],
            residuals: vec![
                ("idempotence", idem),
                ("homogeneity", homog),
                ("range-membership", member),
                ("boundary", boundary),
                ("lipschitz", lipschitz),
            ],
        }
    })
}

/// `||Qx + Rx - x||`, `||Q(Rx)||` and `||R(Qx)||`.
pub fn check_mutual_polarity(
    pair: &dyn RetractionPair,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> PropertyReport {
    run_property("mutual-polarity", spec, tol.violation(), |rng| {
        let x = spec.sample_point(rng);
        let scale = 1.0 + x.norm();
        let residuals = match polarity_residuals(pair, &x) {
            Some([sum, qr, rq]) => vec![
                ("sum", sum / scale),
                ("q-of-r", qr / scale),
                ("r-of-q", rq / scale),
            ],
            None => vec![("evaluation", f64::INFINITY)],
        };
        Evaluation {
            inputs: vec![x],
            residuals,
        }
    })
}

fn polarity_residuals(pair: &dyn RetractionPair, x: &Vector) -> Option<[f64; 3]> {
    let (qx, rx) = pair.eval(x).ok()?;
    let sum = (&(&qx + &rx) - x).norm();
    let qr = pair.q(&rx).ok()?.norm();
    let rq = pair.r(&qx).ok()?.norm();
    Some([sum, qr, rq])
}

/// `T(x + y) <= Tx + Ty` in the order of `range`.
pub fn check_subadditive(
    t: &Map<'_>,
    range: &dyn ConeRegion,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> PropertyReport {
    run_property("subadditive", spec, tol.violation(), |rng| {
        let x = spec.sample_point(rng);
        let y = spec.sample_point(rng);
        let r = subadditivity_residual(t, range, &x, &y);
        Evaluation {
            inputs: vec![x, y],
            residuals: vec![("subadditivity", r)],
        }
    })
}

pub(crate) fn subadditivity_residual(
    t: &Map<'_>,
    range: &dyn ConeRegion,
    x: &Vector,
    y: &Vector,
) -> f64 {
    let scale = 1.0 + x.norm() + y.norm();
    match (t(x), t(y), t(&(x + y))) {
        (Ok(tx), Ok(ty), Ok(txy)) => range.violation(&(&(&tx + &ty) - &txy)) / scale,
        _ => f64::INFINITY,
    }
}

/// `x <= x + s  =>  T x <= T(x + s)` for `s` drawn from `range`.
pub fn check_isotone(
    t: &Map<'_>,
    range: &dyn ConeRegion,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> PropertyReport {
    run_property("isotone", spec, tol.violation(), |rng| {
        let x = spec.sample_point(rng);
        let s = range.sample(rng as &mut dyn RngCore);
        let scale = 1.0 + x.norm() + s.norm();
        let r = match (t(&x), t(&(&x + &s))) {
            (Ok(tx), Ok(txs)) => range.violation(&(&txs - &tx)) / scale,
            _ => f64::INFINITY,
        };
        Evaluation {
            inputs: vec![x, s],
            residuals: vec![("isotonicity", r)],
        }
    })
}

/// Asymmetric-norm axioms of `q`: positive homogeneity, subadditivity and,
/// on unit vectors, `max(q(x), q(-x)) > 0`.
pub fn check_asymmetric_norm(
    q: &(dyn Fn(&Vector) -> f64 + Sync),
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> PropertyReport {
    let threshold = tol.violation();
    run_property("asymmetric-norm", spec, threshold, |rng| {
        let x = spec.sample_point(rng);
        let y = spec.sample_point(rng);
        let qx = q(&x);
        let homog = HOMOGENEITY_FACTORS
            .iter()
            .map(|&s| (q(&x.scale(s)) - s * qx).abs() / (1.0 + s * x.norm()))
            .fold(0.0, f64::max);
        let sub = (q(&(&x + &y)) - qx - q(&y)).max(0.0) / (1.0 + x.norm() + y.norm());
        let unit = x.normalized().unwrap_or_else(|| Vector::unit(spec.dim, 0));
        let separation = if q(&unit).max(q(&-&unit)) <= threshold {
            1.0
        } else {
            0.0
        };
        Evaluation {
            inputs: vec![x, y],
            residuals: vec![
                ("homogeneity", homog),
                ("subadditivity", sub),
                ("separation", separation),
            ],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::PolyhedralCone;
    use crate::lattice::{positive_part_pair, SimplicialCone};
    use crate::moreau::ProjectionPair;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn positive_part_passes() {
        let s = SimplicialCone::orthant(3);
        let pair = positive_part_pair(&s);
        let q = |x: &Vector| pair.q(x);
        let spec = SampleSpec::new(3, 10_000, 1);
        let rep = check_retraction_axioms(&q, &s, &spec, &tol());
        assert!(rep.passed(), "{rep:?}");
        assert!(check_mutual_polarity(&pair, &spec, &tol()).passed());
        assert!(check_subadditive(&q, &s, &spec, &tol()).passed());
        assert!(check_isotone(&q, &s, &spec, &tol()).passed());
    }

    #[test]
    fn doubling_is_not_idempotent() {
        let k = PolyhedralCone::orthant(2, &tol());
        let t = |x: &Vector| Ok(x.scale(2.0));
        let rep = check_retraction_axioms(&t, &k, &SampleSpec::new(2, 200, 3), &tol());
        assert!(rep.violations > 0);
        let w = rep.witness.unwrap();
        assert!(w.residuals["idempotence"] > 1e-8);
    }

    #[test]
    fn same_map_twice_is_not_polar() {
        struct Twice(crate::lattice::PositivePartPair);
        impl RetractionPair for Twice {
            fn dim(&self) -> usize {
                self.0.dim()
            }
            fn eval(&self, x: &Vector) -> crate::Result<(Vector, Vector)> {
                let q = self.0.q(x)?;
                Ok((q.clone(), q))
            }
            fn construction(&self) -> &'static str {
                "twice"
            }
        }
        let pair = Twice(positive_part_pair(&SimplicialCone::orthant(2)));
        let rep = check_mutual_polarity(&pair, &SampleSpec::new(2, 500, 5), &tol());
        assert!(rep.violations > 0 && rep.witness.is_some());
    }

    #[test]
    fn rotated_clamp_is_not_subadditive() {
        let k = PolyhedralCone::orthant(2, &tol());
        let (s, c) = 1.0_f64.sin_cos();
        let t = |x: &Vector| {
            let (a, b) = (x[0].max(0.0), x[1].max(0.0));
            Ok(Vector::from([c * a - s * b, s * a + c * b]))
        };
        let spec = SampleSpec::new(2, 2000, 7);
        let rep = check_subadditive(&t, &k, &spec, &tol());
        assert!(rep.violations > 0, "{rep:?}");
        let rep = check_isotone(&t, &k, &spec, &tol());
        assert!(rep.violations > 0);
    }

    #[test]
    fn orthant_projection_pair_passes() {
        let k = PolyhedralCone::orthant(3, &tol());
        let pair = ProjectionPair::new(k.clone());
        let spec = SampleSpec::new(3, 4000, 11);
        let q = |x: &Vector| pair.q(x);
        assert!(check_retraction_axioms(&q, &k, &spec, &tol()).passed());
        assert!(check_mutual_polarity(&pair, &spec, &tol()).passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let s = SimplicialCone::new(vec![[1.0, 0.2].into(), [0.3, 1.0].into()]).unwrap();
        let pair = positive_part_pair(&s);
        let q = |x: &Vector| pair.q(x);
        let spec = SampleSpec::new(2, 3000, 42);
        let a = check_subadditive(&q, &s, &spec, &tol());
        let b = check_subadditive(&q, &s, &spec, &tol());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn asymmetric_norm_axioms() {
        let q = |x: &Vector| x[0].max(0.0) + x[1].abs();
        let rep = check_asymmetric_norm(&q, &SampleSpec::new(2, 2000, 2), &tol());
        assert!(rep.passed(), "{rep:?}");
        let concave = |x: &Vector| (x[0] * x[1]).abs().sqrt();
        let rep = check_asymmetric_norm(&concave, &SampleSpec::new(2, 2000, 2), &tol());
        assert!(rep.violations > 0);
        assert!(rep.witness.unwrap().residuals["subadditivity"] > 1e-8);
    }
}
