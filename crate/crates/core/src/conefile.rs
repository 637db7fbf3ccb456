//! JSON cone specification files.
//!
//! ```json
//! { "dim": 2,
//!   "cones": [
//!     { "name": "M", "generators": [[1, 1], [-1, 1]] },
//!     { "name": "N", "kind": "ray", "generators": [[0, -1]] },
//!     { "name": "C", "kind": "circular", "axis": [0, 1], "half_angle_deg": 30 } ] }
//! ```
//!
//! A file holding a single cone may drop the list: `{"dim": 2, "generators": [...]}`
//! defines the cone `K`.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ConeRegion;
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::lattice::SimplicialCone;
use crate::moreau::CircularCone;
use crate::tolerance::ToleranceConfig;

pub const SINGLE_CONE_NAME: &str = "K";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    #[default]
    Polyhedral,
    Simplicial,
    Ray,
    Circular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeEntry {
    pub name: String,
    #[serde(default)]
    pub kind: ConeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_angle_deg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpecFile {
    pub dim: usize,
    pub cones: Vec<ConeEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    #[serde(default)]
    facets: Option<Vec<Vec<f64>>>,
}

/// A cone from a spec file, ready to use.
#[derive(Clone, Debug)]
pub enum BuiltCone {
    Polyhedral(PolyhedralCone),
    Simplicial(SimplicialCone, PolyhedralCone),
    Circular(CircularCone),
}

impl BuiltCone {
    pub fn dim(&self) -> usize {
        self.region().dim()
    }

    /// The polyhedral form, for every kind except circular.
    pub fn polyhedral(&self) -> Option<&PolyhedralCone> {
        match self {
            BuiltCone::Polyhedral(k) | BuiltCone::Simplicial(_, k) => Some(k),
            BuiltCone::Circular(_) => None,
        }
    }

    pub fn region(&self) -> &dyn ConeRegion {
        match self {
            BuiltCone::Polyhedral(k) | BuiltCone::Simplicial(_, k) => k,
            BuiltCone::Circular(c) => c,
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidSpec(msg.into()))
}

impl ConeSpecFile {
    /// Parses and validates either file form.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let spec = if value.get("cones").is_some() {
            serde_json::from_value::<ConeSpecFile>(value)
                .map_err(|e| Error::InvalidSpec(e.to_string()))?
        } else {
            let single: SingleCone =
                serde_json::from_value(value).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            ConeSpecFile {
                dim: single.dim,
                cones: vec![ConeEntry {
                    name: SINGLE_CONE_NAME.to_string(),
                    kind: ConeKind::Polyhedral,
                    generators: Some(single.generators),
                    facets: single.facets,
                    axis: None,
                    half_angle_deg: None,
                }],
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files serialize")
    }

    /// Structural checks; numerical ones (independence, pointedness) happen in `build`.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return invalid("dim must be positive");
        }
        let mut seen = HashSet::new();
        for c in &self.cones {
            if c.name.is_empty() {
                return invalid("cone names must be nonempty");
            }
            if !seen.insert(c.name.as_str()) {
                return invalid(format!("duplicate cone name {:?}", c.name));
            }
            self.validate_entry(c)?;
        }
        Ok(())
    }

    fn validate_entry(&self, c: &ConeEntry) -> Result<()> {
        let check_vec = |v: &[f64], what: &str| -> Result<()> {
            if v.len() != self.dim {
                return invalid(format!(
                    "{}: {what} has length {}, expected {}",
                    c.name,
                    v.len(),
                    self.dim
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return invalid(format!("{}: {what} has non-finite entries", c.name));
            }
            Ok(())
        };
        for v in c.generators.iter().flatten() {
            check_vec(v, "a generator")?;
        }
        for v in c.facets.iter().flatten() {
            check_vec(v, "a facet normal")?;
        }
        if let Some(a) = &c.axis {
            check_vec(a, "the axis")?;
        }
        let gens = c.generators.as_ref().map_or(0, Vec::len);
        let circular_fields = c.axis.is_some() || c.half_angle_deg.is_some();
        match c.kind {
            ConeKind::Circular => {
                if c.generators.is_some() || c.facets.is_some() {
                    return invalid(format!(
                        "{}: circular cones take axis and half_angle_deg only",
                        c.name
                    ));
                }
                if c.axis.is_none() {
                    return invalid(format!("{}: circular cone needs an axis", c.name));
                }
                match c.half_angle_deg {
                    Some(a) if a > 0.0 && a < 90.0 => {}
                    _ => return invalid(format!("{}: half_angle_deg must lie in (0, 90)", c.name)),
                }
            }
            _ if circular_fields => {
                return invalid(format!(
                    "{}: axis and half_angle_deg need kind \"circular\"",
                    c.name
                ));
            }
            ConeKind::Polyhedral => {
                if c.generators.is_none() && c.facets.is_none() {
                    return invalid(format!("{}: give generators, facets or both", c.name));
                }
            }
            ConeKind::Simplicial => {
                if gens != self.dim || c.facets.is_some() {
                    return invalid(format!(
                        "{}: a simplicial cone takes exactly {} generators",
                        c.name, self.dim
                    ));
                }
            }
            ConeKind::Ray => {
                if gens != 1 || c.facets.is_some() {
                    return invalid(format!("{}: a ray takes exactly one generator", c.name));
                }
            }
        }
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.cones.iter().map(|c| c.name.as_str())
    }

    pub fn entry(&self, name: &str) -> Result<&ConeEntry> {
        self.cones
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidSpec(format!("no cone named {name:?}")))
    }

    pub fn build(&self, name: &str, tol: &ToleranceConfig) -> Result<BuiltCone> {
        let c = self.entry(name)?;
        let vecs = |vs: &Option<Vec<Vec<f64>>>| -> Result<Option<Vec<Vector>>> {
            vs.as_ref()
                .map(|vs| vs.iter().map(|v| Vector::new(v.clone())).collect())
                .transpose()
        };
        let gens = vecs(&c.generators)?;
        let facets = vecs(&c.facets)?;
        Ok(match c.kind {
            ConeKind::Circular => {
                let axis = Vector::new(c.axis.clone().unwrap_or_default())?;
                let angle = c.half_angle_deg.unwrap_or_default().to_radians();
                BuiltCone::Circular(CircularCone::new(&axis, angle)?)
            }
            ConeKind::Simplicial => {
                let gens = gens.unwrap_or_default();
                let s = SimplicialCone::new(gens)?;
                let k = s.to_polyhedral(tol)?;
                BuiltCone::Simplicial(s, k)
            }
            ConeKind::Ray | ConeKind::Polyhedral => BuiltCone::Polyhedral(match (gens, facets) {
                (Some(g), Some(f)) => PolyhedralCone::with_representations(self.dim, g, f, tol)?,
                (Some(g), None) => PolyhedralCone::from_generators(self.dim, g, tol)?,
                (None, Some(f)) => PolyhedralCone::from_facets(self.dim, f, tol)?,
                (None, None) => return invalid(format!("{name}: no representation")),
            }),
        })
    }
}
