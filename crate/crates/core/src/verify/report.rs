// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification records and reports.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One residual gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub n: usize,
    pub x: f64,
    pub seed: u64,
    pub trial: usize,
    /// `null` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Coordinates shared by all checks of one trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialId {
    pub n: usize,
    pub x: f64,
    pub seed: u64,
    pub trial: usize,
}

impl TrialId {
    /// Records `residual ≤ tolerance`; an error becomes a failed check.
    pub fn record(&self, check: &str, residual: Result<f64>, tolerance: f64) -> CheckRecord {
        self.record_with_note(check, residual.map(|r| (r, None)), tolerance)
    }

    /// Like [`TrialId::record`], keeping a note next to the residual.
    pub fn record_with_note(
        &self,
        check: &str,
        residual: Result<(f64, Option<String>)>,
        tolerance: f64,
    ) -> CheckRecord {
        let (residual, note) = match residual {
            Ok((r, note)) => (Some(r), note),
            Err(e) => (None, Some(e.to_string())),
        };
        CheckRecord {
            check: check.to_string(),
            n: self.n,
            x: self.x,
            seed: self.seed,
            trial: self.trial,
            pass: residual.is_some_and(|r| r <= tolerance),
            residual,
            tolerance,
            note,
        }
    }
}

/// Result of one suite run. `pass` holds iff every residual is within its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn new(suite: &str, checks: Vec<CheckRecord>, elapsed: Duration) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            pass,
            checks,
            elapsed,
        }
    }

    /// Failed checks.
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Largest residual among checks named `check`; `None` if there are none
    /// or one of them could not be evaluated.
    pub fn max_residual(&self, check: &str) -> Option<f64> {
        let mut found = false;
        let mut worst: f64 = 0.0;
        for c in self.checks.iter().filter(|c| c.check == check) {
            found = true;
            worst = worst.max(c.residual?);
        }
        found.then_some(worst)
    }

    /// Number of checks named `check`.
    pub fn count(&self, check: &str) -> usize {
        self.checks.iter().filter(|c| c.check == check).count()
    }
}
