// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! `rsdual verify`

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use rsdual::verify::{run_all, run_suite, suite_names};
use rsdual::{ToleranceConfig, VerificationReport};

use crate::{malformed, CliResult, Failure};

#[derive(clap::Args)]
pub struct Args {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Particle numbers a:b, inclusive.
    #[arg(long, default_value = "1:4")]
    n_range: String,
    /// Comma-separated couplings.
    #[arg(
        long,
        default_value = "0.1,0.7,-1.3,2.2,-3",
        allow_hyphen_values = true
    )]
    x_list: String,
    /// Trials per (n, x).
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || malformed(format!("--n-range '{s}': expected a:b with 1 ≤ a ≤ b"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn parse_x_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|v| {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| malformed(format!("--x-list entry '{v}'")))?;
            rsdual::Coupling::new(x).map_err(malformed)?;
            Ok(x)
        })
        .collect()
}

fn summarize(report: &VerificationReport) {
    println!(
        "suite {}: {} ({} checks)",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len()
    );
    let mut seen = BTreeSet::new();
    for c in &report.checks {
        if !seen.insert(c.check.as_str()) {
            continue;
        }
        let records: Vec<_> = report
            .checks
            .iter()
            .filter(|r| r.check == c.check)
            .collect();
        let failed = records.iter().filter(|r| !r.pass).count();
        let max = records
            .iter()
            .filter_map(|r| r.residual)
            .fold(0.0, f64::max);
        println!(
            "  {:<30} {:>6} records  {:>4} failed  max {:.3e}  tol {:.0e}",
            c.check,
            records.len(),
            failed,
            max,
            c.tolerance
        );
    }
    let ranks: BTreeSet<(usize, &str)> = report
        .checks
        .iter()
        .filter(|c| c.check == "moment-rank")
        .filter_map(|c| c.note.as_deref().map(|r| (c.n, r)))
        .collect();
    for (n, note) in ranks {
        println!("  n = {n}: {note}");
    }
    for f in report.failures().take(10) {
        println!(
            "  failed {} n={} x={} trial={} residual={} {}",
            f.check,
            f.n,
            f.x,
            f.trial,
            f.residual
                .map_or("none".to_string(), |r| format!("{r:.3e}")),
            f.note.as_deref().unwrap_or("")
        );
    }
}

pub fn run(args: &Args, tol: &ToleranceConfig) -> CliResult {
    let n_range = parse_range(&args.n_range)?;
    let xs = parse_x_list(&args.x_list)?;
    if args.suite != "all" && !suite_names().any(|s| s == args.suite) {
        return Err(malformed(format!(
            "unknown suite '{}'; known: all, {}",
            args.suite,
            suite_names().collect::<Vec<_>>().join(", ")
        )));
    }
    let reports = if args.suite == "all" {
        run_all(n_range, &xs, args.trials, args.seed, tol)
    } else {
        run_suite(&args.suite, n_range, &xs, args.trials, args.seed, tol).map(|r| vec![r])
    }
    .map_err(malformed)?;
    for r in &reports {
        summarize(r);
    }
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
        fs::write(path, json).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_range("2:3").unwrap(), 2..=3);
        assert!(
            parse_range("0:3").is_err() && parse_range("3:2").is_err() && parse_range("3").is_err()
        );
        assert_eq!(parse_x_list("0.5,-1").unwrap(), vec![0.5, -1.0]);
        assert!(parse_x_list("0.5,0").is_err() && parse_x_list("a").is_err());
    }
}
