// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded samplers for the verification suites.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::dual::zx_embed;
use crate::error::Result;
use crate::linalg::{CMat, C64};
use crate::points::{Coupling, PointP, PointPhat, PointPhatC};
use crate::tolerance::ToleranceConfig;

/// Smallest separation of sampled positions, modulo π.
pub const MIN_Q_GAP: f64 = 0.15;
/// Sampled momenta lie in `[-P_BOUND, P_BOUND]`.
pub const P_BOUND: f64 = 1.5;
/// Standard deviation of `ln b_jj` and of the parts of `b_jk`, `j < k`.
pub const B_SCALE: f64 = 0.25;
/// Mean of the exponential part of sampled chamber gaps.
pub const GAP_SCALE: f64 = 0.5;
/// Cap on the exponential part of sampled chamber gaps.
pub const GAP_CAP: f64 = 1.5;

/// Independent stream for one trial, determined by the run seed and the trial coordinates.
pub fn trial_rng(seed: u64, n: usize, x_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 48) | ((x_index as u64) << 32) | trial as u64);
    rng
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Standard complex Gaussian matrix.
pub fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        C64::new(normal(rng), normal(rng)) / 2f64.sqrt()
    })
}

/// Haar unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let qr = gaussian_matrix(n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let ph: Vec<C64> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    q * crate::linalg::diag_c(&ph)
}

/// Element of `B` with moderate diagonal and off-diagonal entries.
pub fn random_b<R: Rng>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new((B_SCALE * normal(rng)).exp(), 0.0)
        } else if i < j {
            C64::new(normal(rng), normal(rng)) * B_SCALE
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Random invertible element `b u^{-1}` of the double.
pub fn random_double_point<R: Rng>(n: usize, rng: &mut R) -> CMat {
    random_b(n, rng) * random_unitary(n, rng).adjoint()
}

/// Coupling with `|x|` uniform in `[0.1, 3]` and a random sign.
pub fn random_coupling<R: Rng>(rng: &mut R) -> Coupling {
    let mag = rng.gen_range(0.1..3.0);
    Coupling::new(if rng.gen_bool(0.5) { mag } else { -mag }).expect("nonzero")
}

/// Canonical point of the original phase space with positions at least
/// `MIN_Q_GAP` apart modulo π.
pub fn random_point_p<R: Rng>(n: usize, rng: &mut R) -> PointP {
    let room = PI - n as f64 * MIN_Q_GAP;
    let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..room)).collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut q: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, v)| v + i as f64 * MIN_Q_GAP + MIN_Q_GAP / 2.0)
        .collect();
    q.reverse();
    let p = (0..n).map(|_| rng.gen_range(-P_BOUND..P_BOUND)).collect();
    PointP { q, p }
}

fn gap<R: Rng>(x: Coupling, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    x.get().abs() / 2.0 + (GAP_SCALE * e).min(GAP_CAP)
}

fn build_chamber<R: Rng>(gaps: &[f64], rng: &mut R) -> Vec<f64> {
    let n = gaps.len() + 1;
    let mut p = vec![0.0; n];
    for j in 1..n {
        p[j] = p[j - 1] - gaps[j - 1];
    }
    let shift = -p.iter().sum::<f64>() / n as f64 + 0.5 * normal(rng);
    p.iter().map(|v| v + shift).collect()
}

/// Point of the open chamber with gaps `|x|/2 + min(GAP_SCALE Exp(1), GAP_CAP)`.
pub fn random_chamber<R: Rng>(n: usize, x: Coupling, rng: &mut R) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n.saturating_sub(1)).map(|_| gap(x, rng)).collect();
    build_chamber(&gaps, rng)
}

/// Point of the closed chamber where each face is active with probability 1/3.
pub fn random_closed_chamber<R: Rng>(n: usize, x: Coupling, rng: &mut R) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| {
            if rng.gen_bool(1.0 / 3.0) {
                x.get().abs() / 2.0
            } else {
                gap(x, rng)
            }
        })
        .collect();
    build_chamber(&gaps, rng)
}

/// Point of the dual phase space.
pub fn random_point_phat<R: Rng>(n: usize, x: Coupling, rng: &mut R) -> PointPhat {
    let q_hat = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    PointPhat {
        q_hat,
        p_hat: random_chamber(n, x, rng),
    }
}

/// Point of the completed dual phase space; with `boundary`, at least one
/// `z_j` vanishes when `n ≥ 2`.
pub fn random_point_phatc<R: Rng>(
    n: usize,
    x: Coupling,
    boundary: bool,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<PointPhatC> {
    let mut pc = zx_embed(&random_point_phat(n, x, rng), x, tol)?;
    if boundary && n >= 2 {
        let forced = rng.gen_range(0..n - 1);
        for j in 0..n - 1 {
            if j == forced || rng.gen_bool(0.25) {
                pc.z[j] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(pc)
}

/// Gaussian real vector.
pub fn random_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| normal(rng)).collect()
}
