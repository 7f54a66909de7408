// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! `rsdual dualize`

use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use rsdual::duality::{
    duality_forward, duality_forward_completed, duality_inverse, duality_inverse_completed,
};
use rsdual::{Coupling, DualityResult, Residuals, ToleranceConfig};
use serde::Serialize;

use crate::pointfile::{Point, PointFile, Space};
use crate::{malformed, CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// (q, p) to (q̂, p̂).
    Fwd,
    /// (q̂, p̂) or (z, Z) to (q, p).
    Inv,
    /// (q, p) to (z, Z).
    FwdCompleted,
}

#[derive(clap::Args)]
pub struct Args {
    /// Input point file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    direction: Direction,
    /// Coupling; must agree with the point file when given.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Output point file.
    #[arg(long)]
    out: PathBuf,
    /// JSON diagnostics report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct PointReport {
    index: usize,
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Residuals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Report {
    direction: Direction,
    n: usize,
    x: f64,
    certified: usize,
    failed: usize,
    points: Vec<PointReport>,
}

fn map_point(
    pt: &Point,
    dir: Direction,
    x: Coupling,
    tol: &ToleranceConfig,
) -> rsdual::Result<DualityResult<Point>> {
    fn wrap<T>(r: DualityResult<T>, f: impl Fn(T) -> Point) -> DualityResult<Point> {
        DualityResult {
            target: f(r.target),
            gauge: r.gauge,
            residuals: r.residuals,
        }
    }
    match (dir, pt) {
        (Direction::Fwd, Point::P(p)) => duality_forward(p, x, tol).map(|r| wrap(r, Point::Phat)),
        (Direction::FwdCompleted, Point::P(p)) => {
            duality_forward_completed(p, x, tol).map(|r| wrap(r, Point::PhatC))
        }
        (Direction::Inv, Point::Phat(d)) => duality_inverse(d, x, tol).map(|r| wrap(r, Point::P)),
        (Direction::Inv, Point::PhatC(c)) => {
            duality_inverse_completed(c, x, tol).map(|r| wrap(r, Point::P))
        }
        _ => unreachable!("space checked before mapping"),
    }
}

pub fn run(args: &Args, tol: &ToleranceConfig) -> CliResult {
    let file = PointFile::read(&args.input, tol)?;
    if let Some(x) = args.x {
        if x != file.x.get() {
            return Err(malformed(format!(
                "--x {x} disagrees with the point file's x = {}",
                file.x.get()
            )));
        }
    }
    let (expected, target) = match args.direction {
        Direction::Fwd => (&[Space::P][..], Space::Phat),
        Direction::FwdCompleted => (&[Space::P][..], Space::PhatC),
        Direction::Inv => (&[Space::Phat, Space::PhatC][..], Space::P),
    };
    if !expected.contains(&file.space) {
        return Err(malformed(format!(
            "direction {:?} cannot take {:?} points",
            args.direction, file.space
        )));
    }
    let mut mapped = Vec::new();
    let mut reports = Vec::new();
    for (index, pt) in file.points.iter().enumerate() {
        match map_point(pt, args.direction, file.x, tol) {
            Ok(r) => {
                mapped.push(r.target);
                reports.push(PointReport {
                    index,
                    certified: true,
                    residuals: Some(r.residuals),
                    error: None,
                });
            }
            Err(e) => reports.push(PointReport {
                index,
                certified: false,
                residuals: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let failed = reports.iter().filter(|r| !r.certified).count();
    let first_error = reports.iter().find(|r| !r.certified).map(|r| {
        format!(
            "; point {}: {}",
            r.index,
            r.error.clone().unwrap_or_default()
        )
    });
    PointFile {
        n: file.n,
        x: file.x,
        space: target,
        points: mapped,
    }
    .write(&args.out)?;
    if let Some(path) = &args.report {
        let report = Report {
            direction: args.direction,
            n: file.n,
            x: file.x.get(),
            certified: reports.len() - failed,
            failed,
            points: reports,
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        fs::write(path, json)
            .map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))?;
    }
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} of {} points not certified{}",
            file.points.len(),
            first_error.unwrap_or_default()
        )));
    }
    Ok(())
}
