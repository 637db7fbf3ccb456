//! Sampled property checks, counterexample search and brute-force oracles.
//!
//! Every check draws its inputs from fixed-size chunks; chunk `i` owns the
//! ChaCha stream `i` of the report seed. Chunks may run on any number of
//! threads and are merged in index order, so a report depends only on the
//! seed and the sample count.

mod checks;
mod oracles;
mod witness;

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    check_asymmetric_norm, check_isotone, check_mutual_polarity, check_retraction_axioms,
    check_subadditive, LIPSCHITZ_BOUND,
};
pub use oracles::{oracle_gauge_bisection, oracle_project_sampling, ProjectionTarget};
pub use witness::{find_halo_witness, find_mprj_witness, SearchOutcome, WitnessSearch};

use crate::cones::PolyhedralCone;
use crate::geometry::Vector;
use crate::lattice::SimplicialCone;
use crate::moreau::CircularCone;
use crate::retractions::QRangeCone;

pub(crate) const CHUNK: usize = 512;

/// A sampled map `x -> T x`.
pub type Map<'a> = dyn Fn(&Vector) -> crate::Result<Vector> + Sync + 'a;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<Vector>,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub samples: usize,
    pub violations: usize,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadiusDist {
    Unit,
    Uniform { max: f64 },
    LogUniform { min: f64, max: f64 },
}

/// Random points: uniform direction on the sphere, radius from `radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub dim: usize,
    pub samples: usize,
    pub radius: RadiusDist,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(dim: usize, samples: usize, seed: u64) -> Self {
        Self {
            dim,
            samples,
            radius: RadiusDist::LogUniform {
                min: 1e-2,
                max: 1e2,
            },
            seed,
        }
    }

    pub fn with_radius(mut self, radius: RadiusDist) -> Self {
        self.radius = radius;
        self
    }

    pub fn sample_point(&self, rng: &mut dyn RngCore) -> Vector {
        let r = match self.radius {
            RadiusDist::Unit => 1.0,
            RadiusDist::Uniform { max } => rng.random_range(0.0..=max),
            RadiusDist::LogUniform { min, max } => (rng.random_range(min.ln()..=max.ln())).exp(),
        };
        random_unit(self.dim, rng).scale(r)
    }
}

pub(crate) fn random_unit(dim: usize, rng: &mut dyn RngCore) -> Vector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = Vector::new(v).ok().and_then(|v| v.normalized()) {
            return u;
        }
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// A closed cone given by measures rather than a representation.
pub trait ConeRegion: Sync {
    fn dim(&self) -> usize;

    /// Zero on the cone, positive (distance-like) outside.
    fn violation(&self, x: &Vector) -> f64;

    /// For points of the cone: zero on the boundary, positive inside.
    fn boundary_gap(&self, x: &Vector) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> Vector;
}

impl ConeRegion for PolyhedralCone {
    fn dim(&self) -> usize {
        PolyhedralCone::dim(self)
    }

    fn violation(&self, x: &Vector) -> f64 {
        PolyhedralCone::violation(self, x).unwrap_or(f64::INFINITY)
    }

    fn boundary_gap(&self, x: &Vector) -> f64 {
        self.facet_slack(x)
            .map(|s| s.max(0.0))
            .unwrap_or(f64::INFINITY)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        PolyhedralCone::sample(self, rng)
    }
}

impl ConeRegion for CircularCone {
    fn dim(&self) -> usize {
        CircularCone::dim(self)
    }

    fn violation(&self, x: &Vector) -> f64 {
        self.distance(x)
    }

    fn boundary_gap(&self, x: &Vector) -> f64 {
        self.slack(x).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        CircularCone::sample(self, rng)
    }
}

impl ConeRegion for QRangeCone {
    fn dim(&self) -> usize {
        self.vrep().dim()
    }

    fn violation(&self, x: &Vector) -> f64 {
        self.level(x).max(0.0)
    }

    fn boundary_gap(&self, x: &Vector) -> f64 {
        (-self.level(x)).max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        self.vrep().sample(rng)
    }
}

impl ConeRegion for SimplicialCone {
    fn dim(&self) -> usize {
        SimplicialCone::dim(self)
    }

    fn violation(&self, x: &Vector) -> f64 {
        self.facet_distances(x)
            .into_iter()
            .fold(0.0, |m, d| m.max(-d))
    }

    fn boundary_gap(&self, x: &Vector) -> f64 {
        self.facet_distances(x)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        let c: Vec<f64> = (0..self.dim())
            .map(|_| rng.sample(rand_distr::Exp1))
            .collect();
        self.from_coords(&c)
    }
}

/// `-C` for any region `C`.
pub struct Negated<'a, C: ?Sized>(pub &'a C);

impl<C: ConeRegion + ?Sized> ConeRegion for Negated<'_, C> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn violation(&self, x: &Vector) -> f64 {
        self.0.violation(&-x)
    }

    fn boundary_gap(&self, x: &Vector) -> f64 {
        self.0.boundary_gap(&-x)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vector {
        -self.0.sample(rng)
    }
}

/// Residuals of one sample, each already normalized by the input scale.
pub(crate) struct Evaluation {
    pub inputs: Vec<Vector>,
    pub residuals: Vec<(&'static str, f64)>,
}

impl Evaluation {
    pub fn worst(&self) -> f64 {
        self.residuals
            .iter()
            .map(|(_, r)| if r.is_nan() { f64::INFINITY } else { *r })
            .fold(0.0, f64::max)
    }

    pub fn into_witness(self) -> Witness {
        Witness {
            inputs: self.inputs,
            residuals: self
                .residuals
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

#[derive(Default)]
struct Partial {
    samples: usize,
    violations: usize,
    worst: f64,
    witness: Option<Witness>,
}

/// Runs `eval` on `spec.samples` samples and aggregates residuals against `threshold`.
pub(crate) fn run_property<F>(
    property: &str,
    spec: &SampleSpec,
    threshold: f64,
    eval: F,
) -> PropertyReport
where
    F: Fn(&mut ChaCha8Rng) -> Evaluation + Sync,
{
    let chunks = spec.samples.div_ceil(CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(spec.seed, c as u64);
            let n = CHUNK.min(spec.samples - c * CHUNK);
            let mut p = Partial::default();
            for _ in 0..n {
                let e = eval(&mut rng);
                let w = e.worst();
                p.samples += 1;
                p.worst = p.worst.max(w);
                if w > threshold {
                    p.violations += 1;
                    if p.witness.is_none() {
                        p.witness = Some(e.into_witness());
                    }
                }
            }
            p
        })
        .collect();
    let merged = partials.into_iter().fold(Partial::default(), |mut acc, p| {
        acc.samples += p.samples;
        acc.violations += p.violations;
        acc.worst = acc.worst.max(p.worst);
        if acc.witness.is_none() {
            acc.witness = p.witness;
        }
        acc
    });
    PropertyReport {
        property: property.to_string(),
        samples: merged.samples,
        violations: merged.violations,
        worst_residual: merged.worst,
        witness: merged.witness,
        seed: spec.seed,
    }
}
