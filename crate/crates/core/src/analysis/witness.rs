use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::checks::subadditivity_residual;
use super::oracles::{oracle_project_sampling, ProjectionTarget};
use super::{chunk_rng, Evaluation, Map, Negated, SampleSpec, Witness, CHUNK};
use crate::cones::{is_transversal, PolyhedralCone, TransversalSearch};
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::moreau::{project_circular, project_polyhedral, CircularCone};
use crate::nnls;
use crate::retractions::{build_transversal, RetractionPair};
use crate::tolerance::ToleranceConfig;

/// Chunks evaluated in parallel before the earliest hit is taken.
const BATCH: usize = 8;

/// Oracle samples per projection during re-verification.
const ORACLE_SAMPLES: usize = 1440;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome {
    /// A violation above the threshold that survived re-verification.
    Found {
        witness: Witness,
        verified_residual: f64,
    },
    /// No verified violation within the budget. Not evidence of absence.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessSearch {
    pub property: String,
    pub outcome: SearchOutcome,
    /// Pairs evaluated up to and including the witness.
    pub tested: usize,
    pub budget: usize,
    pub seed: u64,
}

impl WitnessSearch {
    pub fn found(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Found { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            SearchOutcome::Found { witness, .. } => Some(witness),
            SearchOutcome::Exhausted => None,
        }
    }

    /// The witness, or `BudgetExhausted` when the search was inconclusive.
    pub fn require(self) -> Result<Witness> {
        match self.outcome {
            SearchOutcome::Found { witness, .. } => Ok(witness),
            SearchOutcome::Exhausted => Err(Error::BudgetExhausted {
                tested: self.tested,
            }),
        }
    }
}

/// Searches random `(x, y)` for a subadditivity violation of `Q` (order of
/// `M`) or `R` (order of `-M`) for the transversal pair of `(M, -M)`.
pub fn find_halo_witness(m: &PolyhedralCone, spec: &SampleSpec) -> Result<WitnessSearch> {
    if !m.is_solid() {
        return Err(Error::PreconditionViolated(
            "M must have nonempty interior".into(),
        ));
    }
    let n = m.negated();
    let cert = match is_transversal(m, &n)? {
        TransversalSearch::Found(c) => c,
        TransversalSearch::NotFound => return Err(Error::TransversalNotFound),
    };
    let pair = build_transversal(m, &n, &cert)?;
    let q = |x: &Vector| pair.q(x);
    let r = |x: &Vector| pair.r(x);
    let neg = Negated(m);
    let evaluate = |inputs: &[Vector]| Evaluation {
        inputs: inputs.to_vec(),
        residuals: vec![
            (
                "q-subadditivity",
                subadditivity_residual(&q, m, &inputs[0], &inputs[1]),
            ),
            (
                "r-subadditivity",
                subadditivity_residual(&r, &neg, &inputs[0], &inputs[1]),
            ),
        ],
    };
    // membership decided through generators rather than facets
    let verify = |inputs: &[Vector]| -> f64 {
        let (x, y) = (&inputs[0], &inputs[1]);
        let scale = 1.0 + x.norm() + y.norm();
        let gap = |t: &Map<'_>, k: &PolyhedralCone| -> Option<f64> {
            let v = &(&t(x).ok()? + &t(y).ok()?) - &t(&(x + y)).ok()?;
            Some(nnls::nnls(k.generators(), &v, k.tolerance()).ok()?.residual)
        };
        let gq = gap(&q, m).unwrap_or(0.0);
        let gr = gap(&r, &n).unwrap_or(0.0);
        gq.max(gr) / scale
    };
    Ok(search(
        "halo-subadditivity",
        spec,
        m.tolerance(),
        &evaluate,
        &verify,
    ))
}

/// Joint subadditivity of `P_K` (order of `K`) and `I - P_K` (order of `K°`).
pub fn find_mprj_witness(
    target: ProjectionTarget<'_>,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> Result<WitnessSearch> {
    match target {
        ProjectionTarget::Polyhedral(k) => {
            let polar = k.polar()?;
            let p = |x: &Vector| project_polyhedral(k, x);
            let i_p = |x: &Vector| Ok(x - &project_polyhedral(k, x)?);
            let evaluate = |inputs: &[Vector]| Evaluation {
                inputs: inputs.to_vec(),
                residuals: vec![
                    (
                        "p-subadditivity",
                        subadditivity_residual(&p, k, &inputs[0], &inputs[1]),
                    ),
                    (
                        "i-p-subadditivity",
                        subadditivity_residual(&i_p, &polar, &inputs[0], &inputs[1]),
                    ),
                ],
            };
            let verify = |inputs: &[Vector]| -> f64 {
                let (x, y) = (&inputs[0], &inputs[1]);
                let scale = 1.0 + x.norm() + y.norm();
                let gap = |t: &Map<'_>, gens: &[Vector]| -> Option<f64> {
                    let v = &(&t(x).ok()? + &t(y).ok()?) - &t(&(x + y)).ok()?;
                    Some(nnls::nnls(gens, &v, tol).ok()?.residual)
                };
                let gp = gap(&p, k.generators()).unwrap_or(0.0);
                let gi = gap(&i_p, polar.generators()).unwrap_or(0.0);
                gp.max(gi) / scale
            };
            Ok(search("mprj-subadditivity", spec, tol, &evaluate, &verify))
        }
        ProjectionTarget::Circular(c) => {
            let polar = c.polar();
            let p = |x: &Vector| Ok(project_circular(c, x));
            let i_p = |x: &Vector| Ok(x - &project_circular(c, x));
            let evaluate = |inputs: &[Vector]| Evaluation {
                inputs: inputs.to_vec(),
                residuals: vec![
                    (
                        "p-subadditivity",
                        subadditivity_residual(&p, c, &inputs[0], &inputs[1]),
                    ),
                    (
                        "i-p-subadditivity",
                        subadditivity_residual(&i_p, &polar, &inputs[0], &inputs[1]),
                    ),
                ],
            };
            // every projection and distance recomputed by the sampling oracle
            let verify = |inputs: &[Vector]| -> f64 {
                let (x, y) = (&inputs[0], &inputs[1]);
                let scale = 1.0 + x.norm() + y.norm();
                let oracle = |cone: &CircularCone, v: &Vector| {
                    oracle_project_sampling(ProjectionTarget::Circular(cone), v, ORACLE_SAMPLES, 0)
                };
                let px = oracle(c, x);
                let py = oracle(c, y);
                let pxy = oracle(c, &(x + y));
                let vp = &(&px + &py) - &pxy;
                let vi = &(&(x - &px) + &(y - &py)) - &(&(x + y) - &pxy);
                let dp = vp.dist(&oracle(c, &vp));
                let di = vi.dist(&oracle(&polar, &vi));
                // each oracle projection is within ~1e-6 of the exact one
                (dp.max(di) - 1e-5 * scale).max(0.0) / scale
            };
            Ok(search("mprj-subadditivity", spec, tol, &evaluate, &verify))
        }
    }
}

type Evaluate<'a> = dyn Fn(&[Vector]) -> Evaluation + Sync + 'a;
type Verify<'a> = dyn Fn(&[Vector]) -> f64 + Sync + 'a;

/// Seeded Monte Carlo over pairs, with coordinate-descent refinement and
/// re-verification of each candidate. `spec.samples` is the budget.
fn search(
    property: &str,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
    evaluate: &Evaluate<'_>,
    verify: &Verify<'_>,
) -> WitnessSearch {
    let threshold = tol.violation();
    let budget = spec.samples;
    let chunks = budget.div_ceil(CHUNK);
    let mut start = 0;
    while start < chunks {
        let end = (start + BATCH).min(chunks);
        let hits: Vec<Option<(usize, Witness, f64)>> = (start..end)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(spec.seed, c as u64);
                let n = CHUNK.min(budget - c * CHUNK);
                for i in 0..n {
                    let inputs = [
                        spec.sample_point(&mut rng as &mut dyn RngCore),
                        spec.sample_point(&mut rng as &mut dyn RngCore),
                    ];
                    if evaluate(&inputs).worst() <= threshold {
                        continue;
                    }
                    let refined = refine(&inputs, &|v| evaluate(v).worst());
                    for candidate in [refined, inputs.to_vec()] {
                        let checked = verify(&candidate);
                        if checked > threshold {
                            let witness = evaluate(&candidate).into_witness();
                            return Some((c * CHUNK + i + 1, witness, checked));
                        }
                    }
                }
                None
            })
            .collect();
        if let Some((tested, witness, verified_residual)) = hits.into_iter().flatten().next() {
            return WitnessSearch {
                property: property.to_string(),
                outcome: SearchOutcome::Found {
                    witness,
                    verified_residual,
                },
                tested,
                budget,
                seed: spec.seed,
            };
        }
        start = end;
    }
    WitnessSearch {
        property: property.to_string(),
        outcome: SearchOutcome::Exhausted,
        tested: budget,
        budget,
        seed: spec.seed,
    }
}

/// Coordinate ascent on `objective` over all input coordinates.
fn refine(inputs: &[Vector], objective: &dyn Fn(&[Vector]) -> f64) -> Vec<Vector> {
    let mut cur = inputs.to_vec();
    let mut val = objective(&cur);
    let dim = cur[0].dim();
    let mut h = 0.1 * cur.iter().map(Vector::norm).fold(1e-3, f64::max);
    for _ in 0..40 {
        let mut improved = false;
        for i in 0..cur.len() {
            for j in 0..dim {
                for s in [1.0, -1.0] {
                    let mut cand = cur.clone();
                    cand[i] = cand[i].axpy(s * h, &Vector::unit(dim, j));
                    let v = objective(&cand);
                    if v.is_finite() && v > val {
                        cur = cand;
                        val = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::PolyhedralCone;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn square_pyramid() -> PolyhedralCone {
        let gens = vec![
            [0.0, 0.0, 1.0].into(),
            [1.0, 0.0, 1.0].into(),
            [1.0, 1.0, 1.0].into(),
            [0.0, 1.0, 1.0].into(),
        ];
        PolyhedralCone::from_generators(3, gens, &tol()).unwrap()
    }

    #[test]
    fn square_pyramid_has_halo_witness() {
        let s = find_halo_witness(&square_pyramid(), &SampleSpec::new(3, 20_000, 1)).unwrap();
        assert!(s.found(), "{s:?}");
        let SearchOutcome::Found {
            verified_residual, ..
        } = s.outcome
        else {
            unreachable!()
        };
        assert!(verified_residual > 1e-8);
    }

    #[test]
    fn planar_simplicial_cone_has_no_halo_witness() {
        // in the plane the transversal pair of (S, -S) is the positive-part pair
        let m =
            PolyhedralCone::from_generators(2, vec![[1.0, 0.2].into(), [-0.3, 1.0].into()], &tol())
                .unwrap();
        let s = find_halo_witness(&m, &SampleSpec::new(2, 3000, 2)).unwrap();
        assert_eq!(s.outcome, SearchOutcome::Exhausted);
        assert_eq!(
            s.clone().require().unwrap_err(),
            Error::BudgetExhausted { tested: 3000 }
        );
    }

    #[test]
    fn spatial_orthant_transversal_pair_is_not_the_positive_part() {
        // planes through (1,1,1) are invariant under Q, so Q differs from x -> x^+
        let m = PolyhedralCone::orthant(3, &tol());
        let s = find_halo_witness(&m, &SampleSpec::new(3, 3000, 2)).unwrap();
        assert!(s.found());
    }

    #[test]
    fn circular_projection_has_mprj_witness() {
        let c = CircularCone::new(&[0.0, 0.0, 1.0].into(), std::f64::consts::FRAC_PI_4).unwrap();
        let s = find_mprj_witness(
            ProjectionTarget::Circular(&c),
            &SampleSpec::new(3, 20_000, 3),
            &tol(),
        )
        .unwrap();
        assert!(s.found(), "{s:?}");
    }

    #[test]
    fn orthant_projection_has_no_mprj_witness() {
        let k = PolyhedralCone::orthant(3, &tol());
        let s = find_mprj_witness(
            ProjectionTarget::Polyhedral(&k),
            &SampleSpec::new(3, 3000, 4),
            &tol(),
        )
        .unwrap();
        assert!(!s.found());
    }

    #[test]
    fn searches_are_deterministic() {
        let c = CircularCone::new(&[0.0, 0.0, 1.0].into(), 0.5).unwrap();
        let spec = SampleSpec::new(3, 5000, 9);
        let a = find_mprj_witness(ProjectionTarget::Circular(&c), &spec, &tol()).unwrap();
        let b = find_mprj_witness(ProjectionTarget::Circular(&c), &spec, &tol()).unwrap();
        assert_eq!(a, b);
    }
}
