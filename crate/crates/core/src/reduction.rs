// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Moment map constraint, the global gauge slice of the original model and
//! the reduction of constrained double elements to it.

use nalgebra::DMatrix;

use crate::double::{moment, quasi_adjoint, richardson};
use crate::error::{Error, Result};
use crate::linalg::{diag_c, iwasawa_left, unitary_eig, BElement, CMat, C64};
use crate::points::{Coupling, PointP};
use crate::rs_model::pair_factor;
use crate::tolerance::ToleranceConfig;

/// Moment map value `ν(x)`: unit diagonal and `(1 - e^{-x}) e^{(l-k)x/2}` above it.
pub fn nu(x: Coupling, n: usize) -> CMat {
    let xv = x.get();
    CMat::from_fn(n, n, |k, l| {
        if k == l {
            C64::new(1.0, 0.0)
        } else if k < l {
            C64::new(-(-xv).exp_m1() * ((l - k) as f64 * xv / 2.0).exp(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Vector `v(x)` with `v_k = sqrt(n (e^x - 1) / (1 - e^{-nx})) e^{-kx/2}`, `k = 1..n`.
pub fn v_vec(x: Coupling, n: usize) -> Vec<f64> {
    let xv = x.get();
    let c = (n as f64 * xv.exp_m1() / -(-(n as f64) * xv).exp_m1()).sqrt();
    (1..=n)
        .map(|k| c * (-(k as f64) * xv / 2.0).exp())
        .collect()
}

/// Frobenius distance `‖Λ(K) - ν(x)‖`.
pub fn constraint_residual(k: &CMat, x: Coupling, tol: &ToleranceConfig) -> Result<f64> {
    Ok((moment(k, tol)? - nu(x, k.nrows())).norm())
}

/// Double element satisfying `Λ(K) = ν(x)`.
#[derive(Debug, Clone)]
pub struct ConstraintPoint {
    pub k: CMat,
    pub x: Coupling,
    pub residual: f64,
}

impl ConstraintPoint {
    /// Accepts `k` when its residual is below `tol.constraint (1 + ‖ν‖)`.
    pub fn new(k: CMat, x: Coupling, tol: &ToleranceConfig) -> Result<Self> {
        let residual = constraint_residual(&k, x, tol)?;
        if residual > tol.constraint * (1.0 + nu(x, k.nrows()).norm()) {
            return Err(Error::ConstraintViolated(residual));
        }
        Ok(Self { k, x, residual })
    }
}

/// Upper triangular matrix `𝒩(T)` with unit diagonal and
/// `𝒩_kl = Π_{m=1}^{l-k} (e^{x/2} T_l - e^{-x/2} T_{k+m}) / (T_l - T_{k+m-1})`.
pub fn cal_n(t: &[C64], x: Coupling) -> Result<CMat> {
    let n = t.len();
    let (ep, em) = (x.half().exp(), (-x.half()).exp());
    let mut m = CMat::identity(n, n);
    for k in 0..n {
        for l in k + 1..n {
            let mut prod = C64::new(1.0, 0.0);
            for s in 1..=l - k {
                let den = t[l] - t[k + s - 1];
                if den.norm() == 0.0 {
                    return Err(Error::DegenerateSpectrum("coinciding entries of T".into()));
                }
                prod *= (t[l] * ep - t[k + s] * em) / den;
            }
            m[(k, l)] = prod;
        }
    }
    Ok(m)
}

/// Slice parameters `a_j = e^{-p_j/2} Π_{m<j} F_jm^{-1/4} Π_{m>j} F_jm^{1/4}`.
pub fn slice_a(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let n = pt.n();
    let mut a = Vec::with_capacity(n);
    for j in 0..n {
        let mut l = -pt.p[j] / 2.0;
        for m in 0..n {
            if m != j {
                let f = pair_factor(x, pt.q[j], pt.q[m], tol)?.ln() / 4.0;
                l += if m < j { -f } else { f };
            }
        }
        a.push(l.exp());
    }
    Ok(a)
}

fn torus(q: &[f64]) -> Vec<C64> {
    q.iter().map(|&qj| C64::from_polar(1.0, 2.0 * qj)).collect()
}

/// Slice embedding `Ĩ(q, p) = 𝒩(T) a T^{-1}` with `T = e^{2iq}`.
pub fn itilde(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let t = torus(&pt.q);
    let a = slice_a(pt, x, tol)?;
    let d: Vec<C64> = a.iter().zip(t.iter()).map(|(aj, tj)| *aj / tj).collect();
    Ok(cal_n(&t, x)? * diag_c(&d))
}

/// Entrywise form of the slice embedding: the diagonal entry
/// `e^{-p_k/2 - 2iq_k} Π_{m<k} F^{-1/4} Π_{m>k} F^{1/4}` and, above the
/// diagonal, the column's diagonal entry times the product of ratios.
pub fn itilde_entrywise(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let n = pt.n();
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        let mut l = -pt.p[k] / 2.0;
        for s in 0..n {
            if s != k {
                let f = pair_factor(x, pt.q[k], pt.q[s], tol)?.ln() / 4.0;
                l += if s < k { -f } else { f };
            }
        }
        m[(k, k)] = C64::from_polar(l.exp(), -2.0 * pt.q[k]);
    }
    let e2 = |q: f64| C64::from_polar(1.0, 2.0 * q);
    for l in 0..n {
        for k in 0..l {
            let mut prod = m[(l, l)];
            for s in 1..=l - k {
                prod *= (e2(pt.q[l]) * x.half().exp() - e2(pt.q[k + s]) * (-x.half()).exp())
                    / (e2(pt.q[l]) - e2(pt.q[k + s - 1]));
            }
            m[(k, l)] = prod;
        }
    }
    Ok(m)
}

/// Restriction of the unreduced Lax matrix to the slice,
/// `T a^{-1} 𝒩^{-1} 𝒩^{-†} a^{-1} T^{-1}`.
pub fn slice_lax(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<CMat> {
    let t = torus(&pt.q);
    let a = slice_a(pt, x, tol)?;
    let ninv = BElement::from_trusted(cal_n(&t, x)?).inverse().into_inner();
    let ta: Vec<C64> = t.iter().zip(a.iter()).map(|(tj, aj)| tj / *aj).collect();
    let d = diag_c(&ta);
    Ok(&d * &ninv * ninv.adjoint() * d.adjoint())
}

/// Unitary `g_k(γ)` of the stabilizer of `v(x)` that maps the slice point at
/// `(q, p)` to the slice point with particles `k` and `k+1` (0-based) exchanged.
pub fn residual_gauge(k: usize, q: &[f64], x: Coupling) -> Result<CMat> {
    let n = q.len();
    if k + 1 >= n {
        return Err(Error::InvalidInput(format!(
            "transposition index {k} out of range for n = {n}"
        )));
    }
    let c = x.half().tanh() / (q[k] - q[k + 1]).tan();
    let gamma = f64::atan2(1.0, c);
    let big = C64::from_polar(1.0, gamma);
    let alpha = C64::new(gamma.cos(), gamma.sin() * x.half().tanh());
    let beta = C64::new(0.0, gamma.sin() / x.half().cosh());
    let mut g = CMat::identity(n, n) * big;
    g[(k, k)] = alpha;
    g[(k, k + 1)] = beta;
    g[(k + 1, k)] = beta;
    g[(k + 1, k + 1)] = alpha.conj();
    Ok(g)
}

/// Gauge transforms a constrained element into the slice. Returns the
/// canonical coordinates (`q` decreasing in `[0, π)`) and the gauge element
/// `g` of the stabilizer of `v(x)` with `g ▷ K = Ĩ(q, p)`.
pub fn reduce_to_slice(k: &CMat, x: Coupling, tol: &ToleranceConfig) -> Result<(PointP, CMat)> {
    let n = k.nrows();
    ConstraintPoint::new(k.clone(), x, tol)?;
    let (bl, gr) = iwasawa_left(k, tol)?;
    let (ang, u) = unitary_eig(gr.matrix(), tol)?;
    for j in 0..n {
        let next = if j + 1 < n {
            ang[j + 1]
        } else {
            ang[0] - 2.0 * std::f64::consts::PI
        };
        if n > 1 && ang[j] - next < tol.degeneracy {
            return Err(Error::DegenerateSpectrum(
                "Ξ_R(K) has a repeated eigenvalue".into(),
            ));
        }
    }
    // g0 = Ξ_R(u^{-1} Λ_L(K)^{-1})^{-1} makes Ξ_R(g0 ▷ K) diagonal.
    let m = u.matrix().adjoint() * bl.inverse().matrix();
    let (_, w) = iwasawa_left(&m, tol)?;
    let g0 = w.matrix().adjoint();
    let k1 = quasi_adjoint(&g0, k, tol)?;
    let d = moment(&k1, tol)?;
    let nv = nu(x, n);
    let mut tau = vec![C64::new(1.0, 0.0); n];
    for j in (0..n.saturating_sub(1)).rev() {
        let r = d[(j, j + 1)] / nv[(j, j + 1)];
        tau[j] = tau[j + 1] * r / r.norm();
    }
    let tinv: Vec<C64> = tau.iter().map(|t| t.conj()).collect();
    let g = diag_c(&tinv) * g0;
    let ks = quasi_adjoint(&g, k, tol)?;
    let (bs, _) = iwasawa_left(&ks, tol)?;
    let q: Vec<f64> = ang.iter().map(|a| a / 2.0).collect();
    let mut p = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = -2.0 * bs.matrix()[(j, j)].re.ln();
        for s in 0..n {
            if s != j {
                let f = pair_factor(x, q[j], q[s], tol)?.ln() / 2.0;
                v += if s < j { -f } else { f };
            }
        }
        p.push(v);
    }
    let pt = PointP { q, p };
    let rebuilt = itilde(&pt, x, tol)?;
    let err = (&rebuilt - &ks).norm();
    if err > tol.duality * ks.norm().max(1.0) {
        return Err(Error::GaugeSolveFailed(format!(
            "slice reconstruction off by {err:e}"
        )));
    }
    Ok((pt, g))
}

/// Numerical rank of the differential of the moment map at `K`, measured in
/// the `n² - 1` real coordinates of the traceless Lie algebra of `B`.
pub fn moment_rank(k: &CMat, tol: &ToleranceConfig) -> Result<(usize, Vec<f64>)> {
    let n = k.nrows();
    let dim = n * n - 1;
    if dim == 0 {
        return Ok((0, Vec::new()));
    }
    let lam_inv = BElement::from_trusted(moment(k, tol)?)
        .inverse()
        .into_inner();
    let h = tol.fd_step * k.norm().max(1.0);
    let mut jac = DMatrix::<f64>::zeros(dim, 2 * n * n);
    let mut col = 0;
    for i in 0..n {
        for j in 0..n {
            for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = unit;
                let d = richardson(h, |s| Ok(vec![moment(&(k + &e * C64::new(s, 0.0)), tol)?]))?;
                let xm = &lam_inv * &d[0];
                let mut row = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        jac[(row, col)] = xm[(a, b)].re;
                        jac[(row + 1, col)] = xm[(a, b)].im;
                        row += 2;
                    }
                }
                for a in 0..n - 1 {
                    jac[(row, col)] = xm[(a, a)].re;
                    row += 1;
                }
                col += 1;
            }
        }
    }
    let sv: Vec<f64> = jac
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > tol.rank * smax).count();
    Ok((rank, sv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_spectrum, herm_spectrum};
    use crate::rs_model::{lax_rs, sn_act};

    fn x(v: f64) -> Coupling {
        Coupling::new(v).unwrap()
    }

    fn pt3() -> PointP {
        PointP::new(vec![2.7, 1.6, 0.4], vec![0.3, -0.5, 0.8]).unwrap()
    }

    #[test]
    fn nu_and_v_identities() {
        for &xv in &[0.7, -1.2, 2.5] {
            for n in 1..=5 {
                let nv = nu(x(xv), n);
                let v = v_vec(x(xv), n);
                let vv = CMat::from_fn(n, n, |i, j| C64::new(v[i] * v[j], 0.0));
                let rhs = (CMat::identity(n, n)
                    + vv * C64::new((n as f64 * xv).exp_m1() / n as f64, 0.0))
                    * C64::new((-xv).exp(), 0.0);
                assert!((&nv * nv.adjoint() - &rhs).norm() < 1e-12 * rhs.norm());
                let norm2: f64 = v.iter().map(|a| a * a).sum();
                assert!((norm2 - n as f64).abs() < 1e-12 * n as f64);
            }
        }
        let v = v_vec(x(1.0), 2);
        let c = (2.0 * 1f64.exp_m1() / (1.0 - (-2f64).exp())).sqrt();
        assert!((v[0] - c * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v[1] - c * (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_particle_slice() {
        let tol = ToleranceConfig::default();
        let pt = PointP::new(vec![0.4], vec![1.0]).unwrap();
        let k = itilde(&pt, x(0.8), &tol).unwrap();
        assert!((k[(0, 0)] - C64::from_polar((-0.5f64).exp(), -0.8)).norm() < 1e-15);
    }

    #[test]
    fn slice_satisfies_constraint() {
        let tol = ToleranceConfig::default();
        for &xv in &[0.9, -1.4] {
            let k = itilde(&pt3(), x(xv), &tol).unwrap();
            assert!(constraint_residual(&k, x(xv), &tol).unwrap() < 1e-11);
            let e = itilde_entrywise(&pt3(), x(xv), &tol).unwrap();
            assert!((&e - &k).norm() < 1e-13 * k.norm());
        }
    }

    #[test]
    fn slice_lax_is_unreduced_lax_and_similar_to_rs() {
        let tol = ToleranceConfig::default();
        let xv = x(0.9);
        let k = itilde(&pt3(), xv, &tol).unwrap();
        let (l_unred, _) = crate::double::unreduced_lax(&k, &tol).unwrap();
        let ls = slice_lax(&pt3(), xv, &tol).unwrap();
        assert!((&l_unred - &ls).norm() < 1e-12 * ls.norm());
        let spec_s = herm_spectrum(&ls);
        let mut spec_l: Vec<f64> = complex_spectrum(&lax_rs(&pt3(), xv, &tol).unwrap())
            .iter()
            .map(|z| z.re)
            .collect();
        spec_l.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in spec_s.iter().zip(spec_l.iter()) {
            assert!((a - b).abs() < 1e-11 * a.abs());
        }
    }

    #[test]
    fn slice_lax_entries_from_solved_commutation_relation() {
        let tol = ToleranceConfig::default();
        let xv = x(1.1);
        let pt = pt3();
        let n = 3;
        let t = torus(&pt.q);
        let a = slice_a(&pt, xv, &tol).unwrap();
        let ninv = cal_n(&t, xv).unwrap().try_inverse().unwrap();
        let v = v_vec(xv, n);
        let c = ((-xv.half()).exp() * (n as f64 * xv.get()).exp_m1()
            / (2.0 * n as f64 * xv.half().sinh()))
        .sqrt();
        let vc = nalgebra::DVector::from_iterator(n, v.iter().map(|&s| C64::new(s, 0.0)));
        let u = (&ninv * vc) * C64::new(c, 0.0);
        for j in 0..n {
            let expected: f64 = (j + 1..n)
                .map(|m| pair_factor(xv, pt.q[j], pt.q[m], &tol).unwrap().sqrt())
                .product();
            assert!((u[j].norm() - expected).abs() < 1e-12 * expected);
        }
        let ls = slice_lax(&pt, xv, &tol).unwrap();
        for j in 0..n {
            for k in 0..n {
                let val = u[j] * u[k].conj() * (2.0 * xv.half().sinh() / (a[j] * a[k]))
                    / (C64::new(xv.half().exp(), 0.0) - t[k] / t[j] * (-xv.half()).exp());
                assert!((val - ls[(j, k)]).norm() < 1e-11 * ls.norm());
            }
        }
    }

    #[test]
    fn residual_gauge_stabilizes_v_and_swaps_particles() {
        let tol = ToleranceConfig::default();
        for &xv in &[0.9, -1.3] {
            let pt = pt3();
            for k in 0..2 {
                let g = residual_gauge(k, &pt.q, x(xv)).unwrap();
                assert!(crate::linalg::unitary_deviation(&g) < 1e-14);
                let v = v_vec(x(xv), 3);
                let vc = nalgebra::DVector::from_iterator(3, v.iter().map(|&s| C64::new(s, 0.0)));
                let gv = &g * &vc;
                let ph = gv[0] / vc[0];
                assert!((gv - vc * ph).norm() < 1e-13);
                let mut perm = vec![0, 1, 2];
                perm.swap(k, k + 1);
                let swapped = sn_act(&perm, &pt).unwrap();
                let lhs = quasi_adjoint(&g, &itilde(&pt, x(xv), &tol).unwrap(), &tol).unwrap();
                let rhs = itilde(&swapped, x(xv), &tol).unwrap();
                assert!((&lhs - &rhs).norm() < 1e-11 * rhs.norm(), "x={xv} k={k}");
                // Swapping back returns to the start.
                let g2 = residual_gauge(k, &swapped.q, x(xv)).unwrap();
                let back = quasi_adjoint(&g2, &lhs, &tol).unwrap();
                assert!((back - itilde(&pt, x(xv), &tol).unwrap()).norm() < 1e-11 * rhs.norm());
            }
        }
    }

    #[test]
    fn reduce_recovers_slice_coordinates() {
        let tol = ToleranceConfig::default();
        for &xv in &[0.9, -1.3] {
            let pt = pt3();
            let k = itilde(&pt, x(xv), &tol).unwrap();
            let h =
                residual_gauge(0, &pt.q, x(xv)).unwrap() * residual_gauge(1, &pt.q, x(xv)).unwrap();
            let moved = quasi_adjoint(&h, &k, &tol).unwrap();
            let (back, g) = reduce_to_slice(&moved, x(xv), &tol).unwrap();
            for j in 0..3 {
                assert!((back.q[j] - pt.q[j]).abs() < 1e-10);
                assert!((back.p[j] - pt.p[j]).abs() < 1e-10);
            }
            let ks = quasi_adjoint(&g, &moved, &tol).unwrap();
            assert!((ks - k).norm() < 1e-10);
        }
    }

    #[test]
    fn reduce_rejects_off_constraint() {
        let tol = ToleranceConfig::default();
        let k = CMat::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(matches!(
            reduce_to_slice(&k, x(1.0), &tol),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn moment_rank_is_full() {
        let tol = ToleranceConfig::default();
        let k = itilde(&pt3(), x(0.7), &tol).unwrap();
        assert_eq!(moment_rank(&k, &tol).unwrap().0, 8);
        let one = itilde(&PointP::new(vec![0.3], vec![0.1]).unwrap(), x(0.7), &tol).unwrap();
        assert_eq!(moment_rank(&one, &tol).unwrap().0, 0);
    }
}
