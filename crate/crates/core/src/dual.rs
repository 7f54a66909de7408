// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Structure matrices of the dual gauge slice, the embedding `K_x`, the map
//! `Z_x` onto the completed dual phase space and the embedding `Î` of the
//! completed space into the constraint surface.

use crate::double::quasi_adjoint;
use crate::error::{Error, Result};
use crate::linalg::{diag_c, j_fn, sinh_ratio, sqrt_radicand, to_complex, CMat, RMat, C64};
use crate::points::{Coupling, PointPhat, PointPhatC};
use crate::reduction::v_vec;
use crate::tolerance::ToleranceConfig;

/// Checks `p̂_j - p̂_{j+1} ≥ |x|/2 - tol.chamber`.
pub fn check_closed_chamber(p_hat: &[f64], x: Coupling, tol: &ToleranceConfig) -> Result<()> {
    for (j, w) in p_hat.windows(2).enumerate() {
        if w[0] - w[1] < x.get().abs() / 2.0 - tol.chamber {
            return Err(Error::ChamberViolation(format!(
                "p̂_{} - p̂_{} = {} < |x|/2",
                j + 1,
                j + 2,
                w[0] - w[1]
            )));
        }
    }
    Ok(())
}

/// Moves points within `tol.chamber` outside a face onto it.
fn onto_closed_chamber(p_hat: &[f64], x: Coupling, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    check_closed_chamber(p_hat, x, tol)?;
    let mut p = p_hat.to_vec();
    for j in 1..p.len() {
        if p[j - 1] - p[j] < x.get().abs() / 2.0 {
            p[j] = p[j - 1] - x.get().abs() / 2.0;
        }
    }
    Ok(p)
}

/// Special index: last for `x > 0`, first for `x < 0` (0-based).
pub fn special_index(x: Coupling, n: usize) -> usize {
    if x.is_positive() {
        n - 1
    } else {
        0
    }
}

const RADICAND_SLACK: f64 = 1e-10;

/// Orthogonal matrix `θ(x, p̂)` diagonalizing the dual Lax matrix structure.
pub fn theta(x: Coupling, p_hat: &[f64], tol: &ToleranceConfig) -> Result<RMat> {
    let p_hat = &onto_closed_chamber(p_hat, x, tol)?;
    let n = p_hat.len();
    let h = x.half();
    let mut t = RMat::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                let mut r = 1.0;
                for m in (0..n).filter(|&m| m != j) {
                    let a = p_hat[j] - p_hat[m];
                    r *= sinh_ratio(a - h, a) * sinh_ratio(a + h, a);
                }
                t[(j, j)] = sqrt_radicand(r, RADICAND_SLACK)?;
            } else {
                let mut r = 1.0;
                for m in (0..n).filter(|&m| m != j && m != k) {
                    let a = p_hat[j] - p_hat[m];
                    let b = p_hat[k] - p_hat[m];
                    r *= sinh_ratio(a - h, a) * sinh_ratio(b + h, b);
                }
                t[(j, k)] = sinh_ratio(h, p_hat[k] - p_hat[j]) * sqrt_radicand(r, RADICAND_SLACK)?;
            }
        }
    }
    Ok(t)
}

/// `(1 - e^{u-x}) / (1 - e^{u})` evaluated without overflow.
fn exp_ratio(u: f64, x: f64) -> f64 {
    if u > 0.0 {
        (-x).exp() * (x - u).exp_m1() / (-u).exp_m1()
    } else {
        (u - x).exp_m1() / u.exp_m1()
    }
}

/// Unit vector `r(x, p̂)`.
pub fn r_vec(x: Coupling, p_hat: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let p_hat = &onto_closed_chamber(p_hat, x, tol)?;
    let n = p_hat.len();
    let xv = x.get();
    // (1 - e^{-x}) / (1 - e^{-nx}) = e^{(n-1)x/2} sinh(x/2) / sinh(nx/2)
    let pref = ((n as f64 - 1.0) * xv / 2.0).exp() * sinh_ratio(xv / 2.0, n as f64 * xv / 2.0);
    let mut r = Vec::with_capacity(n);
    for j in 0..n {
        let mut prod = pref;
        for k in (0..n).filter(|&k| k != j) {
            prod *= exp_ratio(2.0 * (p_hat[j] - p_hat[k]), xv);
        }
        r.push(sqrt_radicand(prod, RADICAND_SLACK)?);
    }
    Ok(r)
}

/// `Ξ = sqrt((e^{nx} - 1)/(e^x - 1)) e^{p̂} r`.
pub fn xi_vec(x: Coupling, p_hat: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = p_hat.len() as f64;
    let xv = x.get();
    let c = ((n * xv).exp_m1() / xv.exp_m1()).sqrt();
    Ok(r_vec(x, p_hat, tol)?
        .iter()
        .zip(p_hat)
        .map(|(r, p)| c * p.exp() * r)
        .collect())
}

/// Orthogonal matrix with `a`-th column `u` (a unit vector with `u_a ≥ 0`).
fn householder_like(u: &[f64], a: usize) -> RMat {
    let n = u.len();
    RMat::from_fn(n, n, |i, j| {
        if i == a && j == a {
            u[a]
        } else if j == a {
            u[i]
        } else if i == a {
            -u[j]
        } else {
            let d = if i == j { 1.0 } else { 0.0 };
            d - u[i] * u[j] / (1.0 + u[a])
        }
    })
}

/// Orthogonal `ζ(x, p̂)` whose special column is `r(x, p̂)`.
pub fn zeta(x: Coupling, p_hat: &[f64], tol: &ToleranceConfig) -> Result<RMat> {
    let r = r_vec(x, p_hat, tol)?;
    Ok(householder_like(&r, special_index(x, p_hat.len())))
}

/// Orthogonal `κ_L(x)` whose special column is `v(x)/√n`.
pub fn kappa_l(x: Coupling, n: usize) -> RMat {
    let s = (n as f64).sqrt();
    let u: Vec<f64> = v_vec(x, n).iter().map(|v| v / s).collect();
    householder_like(&u, special_index(x, n))
}

/// Cyclic permutation `κ_R(x)`.
pub fn kappa_r(x: Coupling, n: usize) -> RMat {
    let m = RMat::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
    if x.is_positive() {
        m
    } else {
        m.transpose()
    }
}

/// `τ_(x)`: `diag(τ_2, …, τ_n, 1)` for `x > 0`, `diag(1, τ_1, …, τ_{n-1})` for `x < 0`.
pub fn tau_x(x: Coupling, tau: &[C64]) -> Vec<C64> {
    let n = tau.len();
    let one = C64::new(1.0, 0.0);
    if x.is_positive() {
        tau[1..]
            .iter()
            .cloned()
            .chain(std::iter::once(one))
            .collect()
    } else {
        std::iter::once(one)
            .chain(tau[..n - 1].iter().cloned())
            .collect()
    }
}

/// `τ̃_(x)`: `diag(1, τ_2, …, τ_n)` for `x > 0`, `diag(τ_1, …, τ_{n-1}, 1)` for `x < 0`.
pub fn tau_tilde_x(x: Coupling, tau: &[C64]) -> Vec<C64> {
    let n = tau.len();
    let one = C64::new(1.0, 0.0);
    if x.is_positive() {
        std::iter::once(one)
            .chain(tau[1..].iter().cloned())
            .collect()
    } else {
        tau[..n - 1]
            .iter()
            .cloned()
            .chain(std::iter::once(one))
            .collect()
    }
}

/// `ℵ(x, τ)`: suffix products of `τ^{-1}` for `x > 0`, prefix products for `x < 0`.
pub fn aleph(x: Coupling, tau: &[C64]) -> Vec<C64> {
    let n = tau.len();
    let mut out = vec![C64::new(1.0, 0.0); n];
    if x.is_positive() {
        let mut acc = C64::new(1.0, 0.0);
        for j in (0..n).rev() {
            acc /= tau[j];
            out[j] = acc;
        }
    } else {
        let mut acc = C64::new(1.0, 0.0);
        for j in 0..n {
            acc /= tau[j];
            out[j] = acc;
        }
    }
    out
}

/// `K_x(h, τ, p̂) = (h κ_L τ_(x) ζ^{-1}) ▷ (e^{-p̂} τ τ_(x)^{-1} θ^{-1})`.
pub fn k_big_x(
    h: &CMat,
    tau: &[C64],
    p_hat: &[f64],
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<CMat> {
    let n = p_hat.len();
    if tau.len() != n || h.nrows() != n {
        return Err(Error::DimensionMismatch(
            "h, τ and p̂ must have the same size".into(),
        ));
    }
    let th = to_complex(&theta(x, p_hat, tol)?);
    let ze = to_complex(&zeta(x, p_hat, tol)?);
    let tx = tau_x(x, tau);
    let left = h * to_complex(&kappa_l(x, n)) * diag_c(&tx) * ze.transpose();
    let d: Vec<C64> = (0..n)
        .map(|j| C64::new((-p_hat[j]).exp(), 0.0) * tau[j] / tx[j])
        .collect();
    let right = diag_c(&d) * th.transpose();
    quasi_adjoint(&left, &right, tol)
}

/// Dual slice embedding `k_x(q̂, p̂) = K_x(1, ℵ(x, e^{iq̂}), p̂)`.
pub fn k_x(pt: &PointPhat, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let n = pt.n();
    let e: Vec<C64> = pt.q_hat.iter().map(|&q| C64::from_polar(1.0, q)).collect();
    k_big_x(&CMat::identity(n, n), &aleph(x, &e), &pt.p_hat, x, tol)
}

/// Map `Z_x` from `T_n × C̄_x` onto the completed space.
pub fn zx_embed(pt: &PointPhat, x: Coupling, tol: &ToleranceConfig) -> Result<PointPhatC> {
    check_closed_chamber(&pt.p_hat, x, tol)?;
    let n = pt.n();
    let h = x.half();
    let total: f64 = pt.q_hat.iter().sum();
    let mut z = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let gap = pt.p_hat[j] - pt.p_hat[j + 1];
        let (modulus, phase) = if x.is_positive() {
            (
                sqrt_radicand(gap - h, tol.chamber)?,
                -pt.q_hat[j + 1..].iter().sum::<f64>(),
            )
        } else {
            (
                sqrt_radicand(gap + h, tol.chamber)?,
                -pt.q_hat[..=j].iter().sum::<f64>(),
            )
        };
        z.push(C64::from_polar(modulus, phase));
    }
    let lead = if x.is_positive() {
        pt.p_hat[0]
    } else {
        pt.p_hat[n - 1]
    };
    Ok(PointPhatC {
        z,
        z_big: C64::from_polar((-lead).exp(), -total),
    })
}

/// `p̂` of a completed point (always defined).
pub fn p_hat_of(pc: &PointPhatC, x: Coupling) -> Vec<f64> {
    let n = pc.n();
    let h = x.half();
    let mut p = vec![0.0; n];
    if x.is_positive() {
        p[0] = -pc.z_big.norm().ln();
        for j in 0..n - 1 {
            p[j + 1] = p[j] - pc.z[j].norm_sqr() - h;
        }
    } else {
        p[n - 1] = -pc.z_big.norm().ln();
        for j in (0..n - 1).rev() {
            p[j] = p[j + 1] + pc.z[j].norm_sqr() - h;
        }
    }
    p
}

/// Inverse of `Z_x` on points with all `z_j ≠ 0`; angles in `[0, 2π)`.
pub fn zx_invert(pc: &PointPhatC, x: Coupling, tol: &ToleranceConfig) -> Result<PointPhat> {
    let n = pc.n();
    if let Some(j) = pc.z.iter().position(|z| z.norm() <= tol.degeneracy) {
        return Err(Error::BoundaryPoint(format!("z_{} = 0", j + 1)));
    }
    let p_hat = p_hat_of(pc, x);
    let mut q = vec![0.0; n];
    if x.is_positive() {
        // -arg z_j = Σ_{k>j} q̂_k and -arg Z = Σ_k q̂_k.
        let mut suffix: Vec<f64> = std::iter::once(-pc.z_big.arg())
            .chain(pc.z.iter().map(|z| -z.arg()))
            .collect();
        suffix.push(0.0);
        for j in 0..n {
            q[j] = suffix[j] - suffix[j + 1];
        }
    } else {
        let mut prefix = vec![0.0];
        prefix.extend(pc.z.iter().map(|z| -z.arg()));
        prefix.push(-pc.z_big.arg());
        for j in 0..n {
            q[j] = prefix[j + 1] - prefix[j];
        }
    }
    let q_hat = q.into_iter().map(crate::rs_model::wrap_two_pi).collect();
    Ok(PointPhat { q_hat, p_hat })
}

/// `Q_jk(x, z)` (0-based indices, `j ≠ k`).
pub fn q_fn(x: Coupling, z: &[C64], j: usize, k: usize) -> f64 {
    if j > k {
        return q_fn(x.negate(), z, k, j);
    }
    let s: f64 =
        z[j..k].iter().map(|v| v.norm_sqr()).sum::<f64>() + (k - j) as f64 * x.get().abs() / 2.0;
    sinh_ratio(s - x.half(), s).max(0.0).sqrt()
}

/// Unitary `ζ̂(x, z)`.
pub fn zeta_hat(x: Coupling, z: &[C64]) -> CMat {
    let n = z.len() + 1;
    let a = special_index(x, n);
    let h = x.half();
    let c = sinh_ratio(h, n as f64 * h).sqrt();
    let mut m = CMat::zeros(n, n);
    let prod_q = |j: usize, skip: &[usize]| -> f64 {
        (0..n)
            .filter(|l| *l != j && !skip.contains(l))
            .map(|l| q_fn(x, z, j, l))
            .product()
    };
    m[(a, a)] = C64::new(c * prod_q(a, &[]), 0.0);
    for j in (0..n).filter(|&j| j != a) {
        let (zz, den, skip) = if x.is_positive() {
            (z[j], z[j].norm_sqr() + h, [j + 1])
        } else {
            (z[j - 1], z[j - 1].norm_sqr() - h, [j - 1])
        };
        let y = zz.norm_sqr();
        m[(j, a)] = zz * (c * j_fn(y) / den.sinh().sqrt() * prod_q(j, &skip));
        m[(a, j)] = -m[(j, a)].conj();
    }
    let daa = C64::new(1.0, 0.0) + m[(a, a)];
    for j in (0..n).filter(|&j| j != a) {
        for k in (0..n).filter(|&k| k != a) {
            let d = if j == k { 1.0 } else { 0.0 };
            m[(j, k)] = C64::new(d, 0.0) + m[(j, a)] * m[(a, k)] / daa;
        }
    }
    m
}

/// Unitary `θ̂(x, z)`.
pub fn theta_hat(x: Coupling, z: &[C64]) -> CMat {
    if !x.is_positive() {
        return theta_hat(x.negate(), z).adjoint();
    }
    let n = z.len() + 1;
    let h = x.half();
    let zp = zeta_hat(x, z);
    let zm = zeta_hat(x.negate(), z);
    CMat::from_fn(n, n, |j, k| {
        if k == j + 1 {
            let prod: f64 = (0..n)
                .filter(|&l| l != j && l != j + 1)
                .map(|l| q_fn(x, z, j, l) * q_fn(x.negate(), z, j + 1, l))
                .product();
            C64::new(-sinh_ratio(h, z[j].norm_sqr() + h) * prod, 0.0)
        } else {
            let (lo, hi) = (j.min(k), j.max(k));
            let s: f64 = z[lo..hi].iter().map(|v| v.norm_sqr()).sum::<f64>()
                + (k as f64 - j as f64 - 1.0).abs() * h;
            // The first column takes a positive sign so that θ̂ = τ_(x) θ τ̃_(x)^{-1}
            // on the image of Z_x.
            let sign = if k > j + 1 || k == 0 { 1.0 } else { -1.0 };
            zp[(j, n - 1)] * zm[(0, k)] * (sign * sinh_ratio(n as f64 * h, s))
        }
    })
}

/// Diagonal `Δ(x, z, Z)`.
pub fn delta(x: Coupling, pc: &PointPhatC) -> Vec<C64> {
    let n = pc.n();
    let h = x.half();
    let az = pc.z_big.norm();
    let mut d = vec![C64::new(0.0, 0.0); n];
    if x.is_positive() {
        d[0] = pc.z_big;
        let mut s = 0.0;
        for (j, (dj, zj)) in d[1..].iter_mut().zip(&pc.z).enumerate() {
            s += zj.norm_sqr();
            *dj = C64::new(az * (s + (j + 1) as f64 * h).exp(), 0.0);
        }
    } else {
        d[n - 1] = pc.z_big;
        let mut s = 0.0;
        for j in (0..n - 1).rev() {
            s += pc.z[j].norm_sqr();
            d[j] = C64::new(az * (-s + (n - 1 - j) as f64 * h).exp(), 0.0);
        }
    }
    d
}

/// Embedding `Î(z, Z) = (κ_L ζ̂^{-1}) ▷ (Δ θ̂^{-1})` of the completed space.
pub fn ihat(pc: &PointPhatC, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let n = pc.n();
    let left = to_complex(&kappa_l(x, n)) * zeta_hat(x, &pc.z).adjoint();
    let right = diag_c(&delta(x, pc)) * theta_hat(x, &pc.z).adjoint();
    quasi_adjoint(&left, &right, tol)
}

/// Tangent vector of the completed space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhatCTangent {
    pub dz: Vec<C64>,
    pub dz_big: C64,
}

/// `ω̂_c = i dZ ∧ dZ̄ / (2 Z̄ Z) + sign(x) Σ_j i dz_j ∧ dz̄_j`.
pub fn omega_hat_c(pc: &PointPhatC, u: &PhatCTangent, w: &PhatCTangent, x: Coupling) -> f64 {
    let im = |a: C64, b: C64| (a * b.conj()).im;
    let big = -im(u.dz_big, w.dz_big) / pc.z_big.norm_sqr();
    let small: f64 =
        u.dz.iter()
            .zip(w.dz.iter())
            .map(|(a, b)| -2.0 * im(*a, *b))
            .sum();
    big + x.get().signum() * small
}
