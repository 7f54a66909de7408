// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Coupling constant and phase space points of the three models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Nonzero finite coupling `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x == 0.0 {
            return Err(Error::InvalidCoupling(format!(
                "x = {x} must be finite and nonzero"
            )));
        }
        Ok(Self(x))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `x / 2`
    pub fn half(self) -> f64 {
        0.5 * self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0.0
    }

    pub fn negate(self) -> Self {
        Self(-self.0)
    }
}

impl TryFrom<f64> for Coupling {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Self::new(x)
    }
}

impl From<Coupling> for f64 {
    fn from(c: Coupling) -> f64 {
        c.0
    }
}

/// Point `(q, p)` of the Ruijsenaars-Schneider phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointP {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// Point `(q̂, p̂)` of the dual phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPhat {
    pub q_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
}

/// Point `(z, Z)` of the completed dual phase space `C^{n-1} × C^*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPhatC {
    pub z: Vec<C64>,
    #[serde(rename = "Z")]
    pub z_big: C64,
}

impl PointP {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        check_pair(q.len(), p.len())?;
        Ok(Self { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }
}

impl PointPhat {
    pub fn new(q_hat: Vec<f64>, p_hat: Vec<f64>) -> Result<Self> {
        check_pair(q_hat.len(), p_hat.len())?;
        Ok(Self { q_hat, p_hat })
    }

    pub fn n(&self) -> usize {
        self.p_hat.len()
    }

    /// True when `p̂_j - p̂_{j+1} > |x|/2` for all `j`.
    pub fn in_open_chamber(&self, x: Coupling) -> bool {
        self.p_hat
            .windows(2)
            .all(|w| w[0] - w[1] > x.get().abs() / 2.0)
    }
}

impl PointPhatC {
    pub fn new(z: Vec<C64>, z_big: C64) -> Result<Self> {
        if z_big.norm() == 0.0 || !z_big.norm().is_finite() {
            return Err(Error::InvalidInput(
                "Z must be a nonzero finite complex number".into(),
            ));
        }
        Ok(Self { z, z_big })
    }

    pub fn n(&self) -> usize {
        self.z.len() + 1
    }
}

fn check_pair(a: usize, b: usize) -> Result<()> {
    if a != b || a == 0 {
        return Err(Error::DimensionMismatch(format!(
            "coordinate vectors have lengths {a} and {b}"
        )));
    }
    Ok(())
}
