// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical thresholds used across the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable holding a JSON object merged over the defaults.
pub const TOL_OVERRIDE_ENV: &str = "RS_TOL_OVERRIDES";

/// All tolerances in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Absolute Frobenius bound on the moment map constraint.
    pub constraint: f64,
    /// Relative bound on factorization reconstruction.
    pub recon: f64,
    /// Unitarity bound per unit of dimension.
    pub unitarity: f64,
    /// Relative bound for finite-difference comparisons.
    pub fd: f64,
    /// Bound on duality round trips and spectral identities.
    pub duality: f64,
    /// Round-trip bound for completed-space maps, where `|z_j|` is a square root of a gap.
    pub completion: f64,
    /// Slack allowed when testing chamber membership.
    pub chamber: f64,
    /// Relative singular value cutoff for numerical rank.
    pub rank: f64,
    /// Minimal separation of eigenvalues or singular values.
    pub degeneracy: f64,
    /// Minimal value of |sin(q_j - q_k)| before a collision is reported.
    pub collision: f64,
    /// Relative pivot size below which a matrix is treated as singular.
    pub singular: f64,
    /// Largest exponent norm allowed in one factorization step of a flow.
    pub exp_cap: f64,
    /// Base step of the finite-difference derivatives.
    pub fd_step: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            constraint: 1e-9,
            recon: 1e-12,
            unitarity: 1e-11,
            fd: 1e-6,
            duality: 1e-8,
            completion: 1e-6,
            chamber: 1e-9,
            rank: 1e-6,
            degeneracy: 1e-8,
            collision: 1e-6,
            singular: 1e-14,
            exp_cap: 2.0,
            fd_step: 1e-5,
        }
    }
}

impl ToleranceConfig {
    /// Merges a JSON object over `self`; absent keys keep their value.
    pub fn merge_json(&self, json: &str) -> Result<Self> {
        let mut base = serde_json::to_value(self).expect("tolerances serialize");
        let patch: serde_json::Value = serde_json::from_str(json)
            .map_err(|e| Error::InvalidInput(format!("tolerance overrides: {e}")))?;
        let serde_json::Value::Object(patch) = patch else {
            return Err(Error::InvalidInput(
                "tolerance overrides must be a JSON object".into(),
            ));
        };
        let obj = base.as_object_mut().expect("object");
        for (k, v) in patch {
            if !obj.contains_key(&k) {
                return Err(Error::InvalidInput(format!("unknown tolerance '{k}'")));
            }
            obj.insert(k, v);
        }
        serde_json::from_value(base)
            .map_err(|e| Error::InvalidInput(format!("tolerance overrides: {e}")))
    }

    /// Defaults merged with `RS_TOL_OVERRIDES` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_OVERRIDE_ENV) {
            Ok(s) if !s.trim().is_empty() => Self::default().merge_json(&s),
            _ => Ok(Self::default()),
        }
    }

    /// Unitarity bound scaled by the dimension.
    pub fn unitarity_for(&self, n: usize) -> f64 {
        self.unitarity * n.max(1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overrides_single_key() {
        let t = ToleranceConfig::default()
            .merge_json(r#"{"constraint": 1e-7}"#)
            .unwrap();
        assert_eq!(t.constraint, 1e-7);
        assert_eq!(t.recon, 1e-12);
    }

    #[test]
    fn merge_rejects_unknown_key() {
        assert!(ToleranceConfig::default()
            .merge_json(r#"{"bogus": 1}"#)
            .is_err());
        assert!(ToleranceConfig::default().merge_json("[1]").is_err());
    }
}
