// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Finite-difference checks that the embeddings pull back `ω₊` (or `ω̂_c`)
//! to the symplectic form of their source.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::double::{omega_plus, richardson, TangentVector};
use crate::dual::{ihat, k_x, omega_hat_c, zx_embed, PhatCTangent};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::points::{Coupling, PointP, PointPhat, PointPhatC};
use crate::reduction::itilde;
use crate::tolerance::ToleranceConfig;
use crate::verify::sampling::random_vector;

/// Embedding under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PullbackMap {
    /// `Ĩ` from the original phase space, against `Σ dp ∧ dq`.
    Itilde,
    /// `Î` from the completed dual space, against `ω̂_c`.
    Ihat,
    /// `k_x` from the dual space, against `Σ dp̂ ∧ dq̂`.
    Kx,
    /// `Z_x` from the dual space into the completed space, against `Σ dp̂ ∧ dq̂`.
    Zx,
}

/// Source point of a pullback check.
#[derive(Debug, Clone)]
pub enum SourcePoint {
    P(PointP),
    Phat(PointPhat),
    PhatC(PointPhatC),
}

impl SourcePoint {
    fn coords(&self) -> Vec<f64> {
        match self {
            SourcePoint::P(pt) => pt.q.iter().chain(&pt.p).cloned().collect(),
            SourcePoint::Phat(pt) => pt.q_hat.iter().chain(&pt.p_hat).cloned().collect(),
            SourcePoint::PhatC(pc) => {
                pc.z.iter()
                    .map(|z| z.re)
                    .chain(pc.z.iter().map(|z| z.im))
                    .chain([pc.z_big.re, pc.z_big.im])
                    .collect()
            }
        }
    }

    fn with_coords(&self, c: &[f64]) -> SourcePoint {
        match self {
            SourcePoint::P(pt) => {
                let n = pt.n();
                SourcePoint::P(PointP {
                    q: c[..n].to_vec(),
                    p: c[n..].to_vec(),
                })
            }
            SourcePoint::Phat(pt) => {
                let n = pt.n();
                SourcePoint::Phat(PointPhat {
                    q_hat: c[..n].to_vec(),
                    p_hat: c[n..].to_vec(),
                })
            }
            SourcePoint::PhatC(pc) => SourcePoint::PhatC(phatc_from(c, pc.z.len())),
        }
    }
}

fn phatc_from(c: &[f64], m: usize) -> PointPhatC {
    PointPhatC {
        z: (0..m).map(|j| C64::new(c[j], c[m + j])).collect(),
        z_big: C64::new(c[2 * m], c[2 * m + 1]),
    }
}

fn phatc_tangent(c: &[f64], m: usize) -> PhatCTangent {
    let p = phatc_from(c, m);
    PhatCTangent {
        dz: p.z,
        dz_big: p.z_big,
    }
}

/// `Σ_j (u_{p_j} w_{q_j} - w_{p_j} u_{q_j})` in coordinates `(q, p)`.
fn canonical_form(u: &[f64], w: &[f64]) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|j| u[n + j] * w[j] - w[n + j] * u[j]).sum()
}

fn source_form(pt: &SourcePoint, u: &[f64], w: &[f64], x: Coupling) -> f64 {
    match pt {
        SourcePoint::PhatC(pc) => omega_hat_c(
            pc,
            &phatc_tangent(u, pc.z.len()),
            &phatc_tangent(w, pc.z.len()),
            x,
        ),
        _ => canonical_form(u, w),
    }
}

fn image(map: PullbackMap, pt: &SourcePoint, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    match (map, pt) {
        (PullbackMap::Itilde, SourcePoint::P(p)) => itilde(p, x, tol),
        (PullbackMap::Ihat, SourcePoint::PhatC(p)) => ihat(p, x, tol),
        (PullbackMap::Kx, SourcePoint::Phat(p)) => k_x(p, x, tol),
        (PullbackMap::Zx, SourcePoint::Phat(p)) => {
            let pc = zx_embed(p, x, tol)?;
            let c = SourcePoint::PhatC(pc).coords();
            Ok(CMat::from_fn(c.len(), 1, |i, _| C64::new(c[i], 0.0)))
        }
        _ => Err(Error::InvalidInput(format!(
            "{map:?} is not defined on this point type"
        ))),
    }
}

fn push(
    map: PullbackMap,
    pt: &SourcePoint,
    dir: &[f64],
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<CMat> {
    let base = pt.coords();
    let h = tol.fd_step / dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    let d = richardson(h, |s| {
        let c: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + s * d).collect();
        Ok(vec![image(map, &pt.with_coords(&c), x, tol)?])
    })?;
    Ok(d.into_iter().next().expect("one output"))
}

/// Worst relative residual of a pullback identity.
#[derive(Debug, Clone, Serialize)]
pub struct PullbackRecord {
    pub map: PullbackMap,
    pub pairs: usize,
    /// `max |ω_target(J u, J w) - ω_source(u, w)| / (|u| |w|)`.
    pub residual: f64,
}

/// Pushes `pairs` random tangent pairs through a finite-difference Jacobian
/// of `map` and compares the target form with the source form.
pub fn pullback_check<R: Rng>(
    map: PullbackMap,
    pt: &SourcePoint,
    x: Coupling,
    pairs: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<PullbackRecord> {
    let dim = pt.coords().len();
    let base = image(map, pt, x, tol)?;
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u = random_vector(dim, rng);
        let w = random_vector(dim, rng);
        let ju = push(map, pt, &u, x, tol)?;
        let jw = push(map, pt, &w, x, tol)?;
        let target = if map == PullbackMap::Zx {
            let c: Vec<f64> = base.iter().map(|v| v.re).collect();
            let pc = phatc_from(&c, (c.len() - 2) / 2);
            let m = pc.z.len();
            let tu: Vec<f64> = ju.iter().map(|v| v.re).collect();
            let tw: Vec<f64> = jw.iter().map(|v| v.re).collect();
            omega_hat_c(&pc, &phatc_tangent(&tu, m), &phatc_tangent(&tw, m), x)
        } else {
            omega_plus(
                &TangentVector::new(base.clone(), ju),
                &TangentVector::new(base.clone(), jw),
                tol,
            )?
        };
        let scale = u.iter().map(|a| a * a).sum::<f64>().sqrt()
            * w.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max((target - source_form(pt, &u, &w, x)).abs() / scale);
    }
    Ok(PullbackRecord {
        map,
        pairs,
        residual: worst,
    })
}
