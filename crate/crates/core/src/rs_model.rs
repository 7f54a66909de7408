// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lax matrices and Hamiltonians of the trigonometric Ruijsenaars-Schneider
//! model and of its dual, plus the permutation action on coordinates.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{sinh_ratio, CMat, C64};
use crate::points::{Coupling, PointP, PointPhat};
use crate::tolerance::ToleranceConfig;

/// `1 + sinh²(x/2) / sin²(q_j - q_m)`.
pub fn pair_factor(x: Coupling, qj: f64, qm: f64, tol: &ToleranceConfig) -> Result<f64> {
    let s = (qj - qm).sin();
    if s.abs() < tol.collision {
        return Err(Error::Collision(format!(
            "|sin(q_j - q_m)| = {:e}",
            s.abs()
        )));
    }
    Ok(1.0 + (x.half().sinh() / s).powi(2))
}

/// `1 - sinh²(x/2) / sinh²(a)`, written as a product of ratios.
pub fn dual_pair_factor(x: Coupling, a: f64) -> f64 {
    sinh_ratio(a - x.half(), a) * sinh_ratio(a + x.half(), a)
}

fn check_open_chamber(pt: &PointPhat, x: Coupling) -> Result<()> {
    for (j, w) in pt.p_hat.windows(2).enumerate() {
        if w[0] - w[1] <= x.get().abs() / 2.0 {
            return Err(Error::ChamberViolation(format!(
                "p̂_{} - p̂_{} = {} ≤ |x|/2",
                j + 1,
                j + 2,
                w[0] - w[1]
            )));
        }
    }
    Ok(())
}

/// Products `Π_{m≠j} (1 + sinh²(x/2)/sin²(q_j - q_m))` for every `j`.
fn rs_products(q: &[f64], x: Coupling, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = q.len();
    let mut out = vec![1.0; n];
    for j in 0..n {
        for m in 0..n {
            if m != j {
                out[j] *= pair_factor(x, q[j], q[m], tol)?;
            }
        }
    }
    Ok(out)
}

fn dual_products(p_hat: &[f64], x: Coupling) -> Vec<f64> {
    let n = p_hat.len();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&m| m != j)
                .map(|m| dual_pair_factor(x, p_hat[j] - p_hat[m]))
                .product()
        })
        .collect()
}

/// Ruijsenaars-Schneider Lax matrix
/// `L_jk = e^{p_k} sinh(x/2) / sinh(i q_j - i q_k + x/2) · F_j^{1/4} F_k^{1/4}`.
pub fn lax_rs(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let n = pt.n();
    let f = rs_products(&pt.q, x, tol)?;
    let sh = C64::new(x.half().sinh(), 0.0);
    Ok(CMat::from_fn(n, n, |j, k| {
        let den = C64::new(x.half(), pt.q[j] - pt.q[k]).sinh();
        C64::new(pt.p[k].exp() * (f[j] * f[k]).powf(0.25), 0.0) * sh / den
    }))
}

/// Hermitian matrix `e^{p/2} C e^{p/2}` similar to `L = C e^{p}`.
pub fn lax_rs_hermitian(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let l = lax_rs(pt, x, tol)?;
    Ok(CMat::from_fn(pt.n(), pt.n(), |j, k| {
        l[(j, k)] * (0.5 * (pt.p[j] - pt.p[k])).exp()
    }))
}

/// Dual Lax matrix
/// `L̂_jk = e^{i q̂_k} sinh(-x/2) / sinh(p̂_j - p̂_k - x/2) · F̂_j^{1/4} F̂_k^{1/4}`.
/// Requires `p̂` in the open chamber.
pub fn lax_dual(pt: &PointPhat, x: Coupling) -> Result<CMat> {
    check_open_chamber(pt, x)?;
    let n = pt.n();
    let f = dual_products(&pt.p_hat, x);
    Ok(CMat::from_fn(n, n, |j, k| {
        let r = if j == k {
            1.0
        } else {
            sinh_ratio(-x.half(), pt.p_hat[j] - pt.p_hat[k] - x.half())
        };
        C64::from_polar(r * (f[j] * f[k]).powf(0.25), pt.q_hat[k])
    }))
}

/// `H = Σ_j cosh(p_j) Π_{m≠j} (1 + sinh²(x/2)/sin²(q_j - q_m))^{1/2}`.
pub fn ham_rs(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<f64> {
    let f = rs_products(&pt.q, x, tol)?;
    Ok(pt
        .p
        .iter()
        .zip(f.iter())
        .map(|(p, fj)| p.cosh() * fj.sqrt())
        .sum())
}

/// `Ĥ = Σ_j cos(q̂_j) Π_{m≠j} (1 - sinh²(x/2)/sinh²(p̂_j - p̂_m))^{1/2}`.
pub fn ham_dual(pt: &PointPhat, x: Coupling) -> Result<f64> {
    check_open_chamber(pt, x)?;
    let f = dual_products(&pt.p_hat, x);
    Ok(pt
        .q_hat
        .iter()
        .zip(f.iter())
        .map(|(q, fj)| q.cos() * fj.sqrt())
        .sum())
}

/// Applies a permutation: the new `j`-th particle is the old `perm[j]`-th.
pub fn sn_act(perm: &[usize], pt: &PointP) -> Result<PointP> {
    let n = pt.n();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::InvalidInput(
            "not a permutation of the particle labels".into(),
        ));
    }
    Ok(PointP {
        q: perm.iter().map(|&i| pt.q[i]).collect(),
        p: perm.iter().map(|&i| pt.p[i]).collect(),
    })
}

/// Reduces `q` modulo π into `[0, π)` and orders it decreasingly; returns the
/// canonical point and the permutation used.
pub fn canonicalize(pt: &PointP) -> (PointP, Vec<usize>) {
    let wrapped: Vec<f64> = pt.q.iter().map(|q| wrap_pi(*q)).collect();
    let mut perm: Vec<usize> = (0..pt.n()).collect();
    perm.sort_by(|&a, &b| wrapped[b].partial_cmp(&wrapped[a]).unwrap());
    let q = perm.iter().map(|&i| wrapped[i]).collect();
    let p = perm.iter().map(|&i| pt.p[i]).collect();
    (PointP { q, p }, perm)
}

/// `q mod π` in `[0, π)`.
pub fn wrap_pi(q: f64) -> f64 {
    let r = q.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// `q mod 2π` in `[0, 2π)`.
pub fn wrap_two_pi(q: f64) -> f64 {
    let r = q.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Signed distance between two angles modulo `period`, in `(-period/2, period/2]`.
pub fn angle_diff(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    if d > period / 2.0 {
        d - period
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_spectrum;

    fn x(v: f64) -> Coupling {
        Coupling::new(v).unwrap()
    }

    #[test]
    fn single_particle() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![0.3], vec![0.7]).unwrap();
        let l = lax_rs(&pt, x(1.0), &tol).unwrap();
        assert!((l[(0, 0)].re - 0.7f64.exp()).abs() < 1e-14);
        assert!((ham_rs(&pt, x(1.0), &tol).unwrap() - 0.7f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_is_half_trace_of_l_plus_inverse() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![2.5, 1.4, 0.3], vec![0.2, -0.4, 0.9]).unwrap();
        for xv in [0.8, -1.3] {
            let l = lax_rs(&pt, x(xv), &tol).unwrap();
            let li = l.clone().try_inverse().unwrap();
            let tr = 0.5 * (l.trace() + li.trace());
            let h = ham_rs(&pt, x(xv), &tol).unwrap();
            assert!((tr.re - h).abs() < 1e-11 * h.abs() && tr.im.abs() < 1e-11 * h.abs());
        }
        let dp = PointPhat::new(vec![0.3, 2.0, 4.1], vec![2.0, 0.4, -1.5]).unwrap();
        let l = lax_dual(&dp, x(1.1)).unwrap();
        let li = l.clone().try_inverse().unwrap();
        let tr = 0.5 * (l.trace() + li.trace());
        let h = ham_dual(&dp, x(1.1)).unwrap();
        assert!((tr.re - h).abs() < 1e-11 && tr.im.abs() < 1e-11);
    }

    #[test]
    fn free_limit() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![2.0, 1.0, 0.2], vec![0.5, -0.1, 1.2]).unwrap();
        let h = ham_rs(&pt, x(1e-4), &tol).unwrap();
        let free: f64 = pt.p.iter().map(|p| p.cosh()).sum();
        assert!((h - free).abs() < 1e-6);
    }

    #[test]
    fn rs_spectrum_is_real_positive() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![2.6, 1.7, 0.9, 0.1], vec![0.1, 0.8, -0.6, 0.3]).unwrap();
        let l = lax_rs(&pt, x(0.9), &tol).unwrap();
        for z in complex_spectrum(&l) {
            assert!(z.re > 0.0 && z.im.abs() < 1e-10 * z.re);
        }
    }

    #[test]
    fn collision_and_chamber_errors() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![0.5, 0.5 + 1e-9], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            lax_rs(&pt, x(1.0), &tol),
            Err(Error::Collision(_))
        ));
        let dp = PointPhat::new(vec![0.0, 0.0], vec![0.0, -0.4]).unwrap();
        assert!(matches!(
            lax_dual(&dp, x(1.0)),
            Err(Error::ChamberViolation(_))
        ));
    }

    #[test]
    fn canonicalize_sorts_and_wraps() {
        let pt = PointP::new(vec![0.2, 4.0, 1.0], vec![1.0, 2.0, 3.0]).unwrap();
        let (c, perm) = canonicalize(&pt);
        assert!((c.q[0] - 1.0).abs() < 1e-15);
        assert!((c.q[1] - (4.0 - PI)).abs() < 1e-15);
        assert_eq!(c.p, vec![3.0, 2.0, 1.0]);
        assert_eq!(perm, vec![2, 1, 0]);
        assert_eq!(sn_act(&perm, &pt).unwrap().p, c.p);
        assert!(sn_act(&[0, 0, 1], &pt).is_err());
    }
}
