// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! `rsdual flow`

use std::path::PathBuf;

use clap::ValueEnum;
use rsdual::double::conserved_traces;
use rsdual::dual::{ihat, k_x};
use rsdual::duality::{
    completed_flow_reduced, dual_flow_reduced, dual_flow_spectral, dual_flow_spectral_lax,
    original_flow_reduced,
};
use rsdual::reduction::itilde;
use rsdual::rs_model::{canonicalize, wrap_two_pi};
use rsdual::verify::ode::{ode_oracle, reduced_hamiltonian_p, reduced_hamiltonian_phat};
use rsdual::{CMat, Coupling, HamiltonianSelector, PointP, PointPhat, ToleranceConfig};

use crate::pointfile::{Point, PointFile, Space};
use crate::{malformed, CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Slice embedding, unreduced flow, reduction.
    Exact,
    /// Eigenvalue formulas for p̂ on the dual side.
    Spectral,
    /// Numerical integration of the reduced Hamiltonian.
    Ode,
}

#[derive(clap::Args)]
pub struct Args {
    /// Input point file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Hamiltonian: f:k, phi:k or chi:re,im;re,im;...
    #[arg(long)]
    ham: String,
    /// Sample times start:stop:steps (steps ≥ 1 samples, endpoints included).
    #[arg(long, allow_hyphen_values = true)]
    t_grid: String,
    #[arg(long, value_enum, default_value = "exact")]
    route: Route,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || malformed(format!("--t-grid '{s}': expected start:stop:steps"));
    let [a, b, c] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = a.trim().parse().map_err(|_| bad())?;
    let stop: f64 = b.trim().parse().map_err(|_| bad())?;
    let steps: usize = c.trim().parse().map_err(|_| bad())?;
    if steps == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn coordinate_names(space: Space, n: usize, route: Route) -> Vec<String> {
    let indexed = |name: &'static str| (1..=n).map(move |j| format!("{name}_{j}"));
    match (space, route) {
        (_, Route::Spectral) => indexed("phat").collect(),
        (Space::P, _) => indexed("q").chain(indexed("p")).collect(),
        (Space::Phat, _) => indexed("qhat").chain(indexed("phat")).collect(),
        (Space::PhatC, _) => (1..n)
            .flat_map(|j| [format!("z_{j}_re"), format!("z_{j}_im")])
            .chain(["Z_re".to_string(), "Z_im".to_string()])
            .collect(),
    }
}

fn conserved_names(sel: &HamiltonianSelector, n: usize) -> Vec<String> {
    if sel.is_xi_family() {
        (1..=n)
            .flat_map(|k| [format!("trLhat{k}_re"), format!("trLhat{k}_im")])
            .collect()
    } else {
        (1..=n).map(|k| format!("trL{k}")).collect()
    }
}

fn coordinates(pt: &Point) -> Vec<f64> {
    match pt {
        Point::P(p) => [p.q.clone(), p.p.clone()].concat(),
        Point::Phat(d) => [d.q_hat.clone(), d.p_hat.clone()].concat(),
        Point::PhatC(c) => {
            c.z.iter()
                .flat_map(|z| [z.re, z.im])
                .chain([c.z_big.re, c.z_big.im])
                .collect()
        }
    }
}

fn embed(pt: &Point, x: Coupling, tol: &ToleranceConfig) -> rsdual::Result<CMat> {
    match pt {
        Point::P(p) => itilde(p, x, tol),
        Point::Phat(d) => k_x(d, x, tol),
        Point::PhatC(c) => ihat(c, x, tol),
    }
}

fn conserved(
    pt: &Point,
    sel: &HamiltonianSelector,
    x: Coupling,
    tol: &ToleranceConfig,
) -> rsdual::Result<Vec<f64>> {
    let traces = conserved_traces(sel, &embed(pt, x, tol)?, tol)?;
    Ok(if sel.is_xi_family() {
        traces.iter().flat_map(|c| [c.re, c.im]).collect()
    } else {
        traces.iter().map(|c| c.re).collect()
    })
}

fn exact(
    pt: &Point,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
    tol: &ToleranceConfig,
) -> rsdual::Result<Point> {
    Ok(match pt {
        Point::P(p) => Point::P(original_flow_reduced(p, sel, t, x, tol)?),
        Point::Phat(d) => Point::Phat(dual_flow_reduced(d, sel, t, x, tol)?),
        Point::PhatC(c) => Point::PhatC(completed_flow_reduced(c, sel, t, x, tol)?),
    })
}

/// ODE samples at `grid`, integrating forward and backward from `t = 0`.
fn ode(
    pt: &Point,
    sel: &HamiltonianSelector,
    grid: &[f64],
    x: Coupling,
    tol: &ToleranceConfig,
) -> Vec<rsdual::Result<Point>> {
    let (y0, n) = match pt {
        Point::P(p) => ([p.q.clone(), p.p.clone()].concat(), p.q.len()),
        Point::Phat(d) => ([d.q_hat.clone(), d.p_hat.clone()].concat(), d.q_hat.len()),
        Point::PhatC(_) => unreachable!("route checked before sampling"),
    };
    let to_point = |y: &[f64]| match pt {
        Point::P(_) => Point::P(
            canonicalize(&PointP {
                q: y[..n].to_vec(),
                p: y[n..].to_vec(),
            })
            .0,
        ),
        _ => Point::Phat(PointPhat {
            q_hat: y[..n].iter().map(|q| wrap_two_pi(*q)).collect(),
            p_hat: y[n..].to_vec(),
        }),
    };
    let mut out: Vec<rsdual::Result<Point>> = grid
        .iter()
        .map(|_| Err(rsdual::Error::StepUnderflow(0.0)))
        .collect();
    for forward in [true, false] {
        let mut idx: Vec<usize> = (0..grid.len())
            .filter(|&i| (grid[i] >= 0.0) == forward)
            .collect();
        idx.sort_by(|&a, &b| grid[a].abs().partial_cmp(&grid[b].abs()).unwrap());
        if idx.is_empty() {
            continue;
        }
        let times: Vec<f64> = std::iter::once(0.0)
            .chain(idx.iter().map(|&i| grid[i]))
            .collect();
        let traj = match pt {
            Point::P(_) => ode_oracle(&y0, &reduced_hamiltonian_p(sel, x, tol), &times),
            _ => ode_oracle(&y0, &reduced_hamiltonian_phat(sel, x, tol), &times),
        };
        match traj {
            Ok(ys) => {
                for (&i, y) in idx.iter().zip(&ys[1..]) {
                    out[i] = Ok(to_point(y));
                }
            }
            Err(e) => {
                for &i in &idx {
                    out[i] = Err(e.clone());
                }
            }
        }
    }
    out
}

pub fn run(args: &Args, tol: &ToleranceConfig) -> CliResult {
    let file = PointFile::read(&args.input, tol)?;
    let sel = HamiltonianSelector::parse(&args.ham).map_err(malformed)?;
    let grid = parse_grid(&args.t_grid)?;
    match (args.route, file.space) {
        (Route::Spectral, Space::P) => {
            return Err(malformed("the spectral route needs Phat or PhatC points"))
        }
        (Route::Spectral, _) if !sel.is_xi_family() => {
            return Err(malformed(
                "the spectral route needs a phi or chi Hamiltonian",
            ))
        }
        (Route::Ode, Space::PhatC) => {
            return Err(malformed("the ode route needs P or Phat points"))
        }
        _ => {}
    }
    let x = file.x;
    let mut header = vec!["t".to_string(), "point".to_string()];
    header.extend(coordinate_names(file.space, file.n, args.route));
    if args.route != Route::Spectral {
        header.extend(conserved_names(&sel, file.n));
    }
    header.push("status".into());
    let width = header.len() - 3;
    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| Failure::Numerical(format!("{}: {e}", args.out.display())))?;
    let io = |e: csv::Error| Failure::Numerical(format!("{}: {e}", args.out.display()));
    writer.write_record(&header).map_err(io)?;
    let mut failed = 0;
    for (index, pt) in file.points.iter().enumerate() {
        let samples: Vec<rsdual::Result<Vec<f64>>> = match args.route {
            Route::Spectral => grid
                .iter()
                .map(|&t| match pt {
                    Point::Phat(d) => dual_flow_spectral_lax(d, &sel, t, x),
                    Point::PhatC(c) => dual_flow_spectral(c, &sel, t, x),
                    Point::P(_) => unreachable!("route checked above"),
                })
                .collect(),
            Route::Exact | Route::Ode => {
                let points: Vec<rsdual::Result<Point>> = if args.route == Route::Exact {
                    grid.iter().map(|&t| exact(pt, &sel, t, x, tol)).collect()
                } else {
                    ode(pt, &sel, &grid, x, tol)
                };
                points
                    .into_iter()
                    .map(|p| {
                        p.and_then(|p| Ok([coordinates(&p), conserved(&p, &sel, x, tol)?].concat()))
                    })
                    .collect()
            }
        };
        for (&t, sample) in grid.iter().zip(samples) {
            let mut row = vec![t.to_string(), index.to_string()];
            match sample {
                Ok(values) => {
                    row.extend(values.iter().map(f64::to_string));
                    row.push("ok".into());
                }
                Err(e) => {
                    failed += 1;
                    row.extend(std::iter::repeat_n(String::new(), width));
                    row.push(e.to_string());
                }
            }
            writer.write_record(&row).map_err(io)?;
        }
    }
    writer
        .flush()
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} samples failed; see the status column"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_grid("0:2:5").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        for bad in ["0:1", "0:1:0", "a:1:2", "0:1:2:3", "0:inf:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
