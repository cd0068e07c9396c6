//! Residual reports shared by the verifiers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidualReport {
    pub identity: String,
    pub params: serde_json::Value,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl IdentityResidualReport {
    /// Passes when the relative residual is within `tolerance`.
    pub fn new(identity: &str, params: serde_json::Value, abs: f64, rel: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.to_string(),
            params,
            abs_residual: abs,
            rel_residual: rel,
            tolerance,
            pass: rel.is_finite() && rel <= tolerance,
            flags: Vec::new(),
        }
    }

    pub fn flag(mut self, f: &str) -> Self {
        self.flags.push(f.to_string());
        self
    }

    /// Worst relative residual of a bundle.
    pub fn worst(reports: &[Self]) -> f64 {
        reports.iter().map(|r| r.rel_residual).fold(0.0, f64::max)
    }
}
