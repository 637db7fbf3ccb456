use serde::{Deserialize, Serialize};

/// Environment variable that overrides [`ToleranceConfig::base`].
pub const TOL_ENV_VAR: &str = "CONERETRACT_TOL";

/// Numerical thresholds shared by every module.
///
/// `base` is the relative membership / residual tolerance. Property checks
/// flag a violation only above `violation_factor * base`, which keeps
/// floating-point noise apart from genuine order-theoretic failures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub base: f64,
    /// Angle/length ratio below which two directions count as parallel.
    pub parallel: f64,
    /// Absolute threshold for orthonormality and determinant checks.
    pub singular: f64,
    pub violation_factor: f64,
    /// Largest ambient dimension accepted by the double description step.
    pub dd_dim_limit: usize,
    /// Largest number of intermediate rays the double description step may hold.
    pub dd_face_budget: usize,
    /// NNLS iteration cap is `nnls_iter_factor * #columns`.
    pub nnls_iter_factor: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            base: 1e-9,
            parallel: 1e-10,
            singular: 1e-12,
            violation_factor: 10.0,
            dd_dim_limit: 8,
            dd_face_budget: 4096,
            nnls_iter_factor: 100,
        }
    }
}

impl ToleranceConfig {
    pub fn with_base(base: f64) -> Self {
        Self {
            base,
            ..Self::default()
        }
    }

    /// Defaults, with `base` taken from `CONERETRACT_TOL` when it parses as a
    /// positive finite float.
    pub fn from_env() -> Self {
        match std::env::var(TOL_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
        {
            Some(tol) if tol.is_finite() && tol > 0.0 => Self::with_base(tol),
            _ => Self::default(),
        }
    }

    /// Residual threshold used when counting property violations.
    pub fn violation(&self) -> f64 {
        self.violation_factor * self.base
    }
}
