// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical verification harness: seeded suites of residual gates with
//! structured reports.

use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::Coupling;
use crate::tolerance::ToleranceConfig;

pub mod ode;
pub mod pullback;
pub mod report;
pub mod sampling;
pub mod suites;

pub use report::{CheckRecord, TrialId, VerificationReport};
pub use suites::{suite_names, REGISTRY};

/// Runs `trials` trials of `suite` for every `n` in `n_range` and every
/// coupling in `x_list`. Trials run in parallel; the report lists checks in
/// `(n, x, trial)` order and is identical for identical arguments.
pub fn run_suite(
    suite: &str,
    n_range: RangeInclusive<usize>,
    x_list: &[f64],
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<VerificationReport> {
    if !REGISTRY.iter().any(|(s, _)| *s == suite) {
        return Err(Error::UnknownSuite(suite.to_string()));
    }
    if *n_range.start() == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    for &x in x_list {
        Coupling::new(x)?;
    }
    let start = Instant::now();
    let jobs: Vec<(usize, usize, usize)> = n_range
        .flat_map(|n| (0..x_list.len()).flat_map(move |xi| (0..trials).map(move |t| (n, xi, t))))
        .collect();
    let per_trial: Vec<Vec<CheckRecord>> = jobs
        .par_iter()
        .map(|&(n, xi, trial)| {
            let id = TrialId {
                n,
                x: x_list[xi],
                seed,
                trial,
            };
            let mut rng = sampling::trial_rng(seed, n, xi, trial);
            suites::run_trial(suite, id, &mut rng, tol)
        })
        .collect::<Result<_>>()?;
    Ok(VerificationReport::new(
        suite,
        per_trial.into_iter().flatten().collect(),
        start.elapsed(),
    ))
}

/// Runs every suite in registry order.
pub fn run_all(
    n_range: RangeInclusive<usize>,
    x_list: &[f64],
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<VerificationReport>> {
    suite_names()
        .map(|s| run_suite(s, n_range.clone(), x_list, trials, seed, tol))
        .collect()
}
