//! Convex cones in `R^d` and mutually polar retraction pairs on them.
//!
//! The main entry points are [`build_transversal`] for two transversal
//! polyhedral cones, [`build_one_range`] when one of the ranges is a ray,
//! [`moreau::decompose`] for metric projection and
//! [`lattice::positive_part_pair`] for simplicial cones. The [`analysis`]
//! module checks the defining identities and order properties on samples.

pub mod analysis;
pub mod conefile;
pub mod cones;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod moreau;
pub mod nnls;
pub mod retractions;
pub mod tolerance;

pub use analysis::{PropertyReport, SampleSpec};
pub use conefile::{BuiltCone, ConeSpecFile};
pub use cones::{is_transversal, PolyhedralCone, TransversalCertificate, TransversalSearch};
pub use error::{Error, Result};
pub use geometry::{Plane2D, Vector};
pub use lattice::SimplicialCone;
pub use moreau::{CircularCone, MoreauDecomposition};
pub use retractions::{build_one_range, build_transversal, RetractionPair};
pub use tolerance::ToleranceConfig;
