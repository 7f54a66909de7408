// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! The Heisenberg double of U(n): Iwasawa maps, quasi-adjoint action,
//! moment map, dressing, the symplectic form and the Poisson bracket of
//! spectral invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_apply, int_pow, iwasawa_left, iwasawa_right, pairing_im_trace, unitary_eig, BElement,
    CMat, Unitary, C64, I,
};
use crate::tolerance::ToleranceConfig;

/// The four Iwasawa maps of a double element.
#[derive(Debug, Clone)]
pub struct XiMaps {
    /// `Λ_L(K) = b_L`
    pub lambda_l: BElement,
    /// `Ξ_R(K) = g_R`
    pub xi_r: Unitary,
    /// `Ξ_L(K) = g_L`
    pub xi_l: Unitary,
    /// `Λ_R(K) = b_R`
    pub lambda_r: BElement,
}

/// Evaluates `Λ_L, Ξ_R, Ξ_L, Λ_R` at `K`.
pub fn xi_maps(k: &CMat, tol: &ToleranceConfig) -> Result<XiMaps> {
    let (lambda_l, xi_r) = iwasawa_left(k, tol)?;
    let (xi_l, lambda_r) = iwasawa_right(k, tol)?;
    Ok(XiMaps {
        lambda_l,
        xi_r,
        xi_l,
        lambda_r,
    })
}

/// Quasi-adjoint action `g ▷ K = g K Ξ_R(g Λ_L(K))`.
pub fn quasi_adjoint(g: &CMat, k: &CMat, tol: &ToleranceConfig) -> Result<CMat> {
    if g.nrows() != k.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "g is {}x{}, K is {}x{}",
            g.nrows(),
            g.ncols(),
            k.nrows(),
            k.ncols()
        )));
    }
    let (bl, _) = iwasawa_left(k, tol)?;
    let (_, gam) = iwasawa_left(&(g * bl.matrix()), tol)?;
    Ok(g * k * gam.matrix())
}

/// Dressing action `Dress_g(b) = Λ_L(g b)`.
pub fn dress(g: &CMat, b: &CMat, tol: &ToleranceConfig) -> Result<CMat> {
    let (bl, _) = iwasawa_left(&(g * b), tol)?;
    Ok(bl.into_inner())
}

/// Moment map `Λ(K) = Λ_L(K) Λ_R(K)`.
pub fn moment(k: &CMat, tol: &ToleranceConfig) -> Result<CMat> {
    let (bl, _) = iwasawa_left(k, tol)?;
    let (_, br) = iwasawa_right(k, tol)?;
    Ok(bl.matrix() * br.matrix())
}

/// Splits `X` into its anti-Hermitian part and its part in the Lie algebra
/// of `B` (upper triangular, real diagonal); returns `(π_g X, π_b X)`.
pub fn split(x: &CMat) -> (CMat, CMat) {
    let n = x.nrows();
    let mut g = CMat::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = C64::new(0.0, x[(i, i)].im);
        for j in 0..i {
            g[(i, j)] = x[(i, j)];
            g[(j, i)] = -x[(i, j)].conj();
        }
    }
    let b = x - &g;
    (g, b)
}

/// The r-matrix `ρ = (π_g - π_b) / 2`.
pub fn rho(x: &CMat) -> CMat {
    let (g, b) = split(x);
    (g - b) * C64::new(0.5, 0.0)
}

/// Tangent vector `delta` at `base`, both as matrices in gl(n, C).
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub base: CMat,
    pub delta: CMat,
}

impl TangentVector {
    pub fn new(base: CMat, delta: CMat) -> Self {
        Self { base, delta }
    }
}

/// Log-derivatives of the Iwasawa maps along a direction.
struct LogDerivs {
    a_l: CMat,
    x_l: CMat,
    a_r: CMat,
    x_r: CMat,
}

fn iwasawa_stack(k: &CMat, tol: &ToleranceConfig) -> Result<[CMat; 4]> {
    let m = xi_maps(k, tol)?;
    Ok([
        m.lambda_l.into_inner(),
        m.xi_l.into_inner(),
        m.lambda_r.into_inner(),
        m.xi_r.into_inner(),
    ])
}

/// Central difference with one Richardson extrapolation step.
pub(crate) fn richardson<F>(h: f64, f: F) -> Result<Vec<CMat>>
where
    F: Fn(f64) -> Result<Vec<CMat>>,
{
    let d = |s: f64| -> Result<Vec<CMat>> {
        let p = f(s)?;
        let m = f(-s)?;
        Ok(p.iter()
            .zip(m.iter())
            .map(|(a, b)| (a - b) / C64::new(2.0 * s, 0.0))
            .collect())
    };
    let d1 = d(h)?;
    let d2 = d(h / 2.0)?;
    Ok(d1
        .iter()
        .zip(d2.iter())
        .map(|(a, b)| (b * C64::new(4.0, 0.0) - a) / C64::new(3.0, 0.0))
        .collect())
}

fn log_derivs(v: &TangentVector, tol: &ToleranceConfig) -> Result<LogDerivs> {
    let dn = v.delta.norm();
    let n = v.base.nrows();
    if dn == 0.0 {
        let z = CMat::zeros(n, n);
        return Ok(LogDerivs {
            a_l: z.clone(),
            x_l: z.clone(),
            a_r: z.clone(),
            x_r: z,
        });
    }
    let h = tol.fd_step * v.base.norm().max(1.0) / dn;
    let d = richardson(h, |s| {
        Ok(iwasawa_stack(&(&v.base + &v.delta * C64::new(s, 0.0)), tol)?.to_vec())
    })?;
    let at = iwasawa_stack(&v.base, tol)?;
    let lam_l_inv = BElement::from_trusted(at[0].clone()).inverse().into_inner();
    let lam_r_inv = BElement::from_trusted(at[2].clone()).inverse().into_inner();
    Ok(LogDerivs {
        a_l: &d[0] * lam_l_inv,
        x_l: &d[1] * at[1].adjoint(),
        a_r: &d[2] * lam_r_inv,
        x_r: &d[3] * at[3].adjoint(),
    })
}

/// Symplectic form of the double,
/// `½ Im tr(dΛ_L Λ_L^{-1} ∧ dΞ_L Ξ_L^{-1}) + ½ Im tr(dΛ_R Λ_R^{-1} ∧ dΞ_R Ξ_R^{-1})`,
/// evaluated with `(α ∧ β)(V, W) = α(V) β(W) - α(W) β(V)`. Derivatives of
/// the Iwasawa maps are taken by Richardson-extrapolated central differences.
pub fn omega_plus(v: &TangentVector, w: &TangentVector, tol: &ToleranceConfig) -> Result<f64> {
    if v.base.shape() != w.base.shape()
        || (&v.base - &w.base).norm() > 1e-14 * v.base.norm().max(1.0)
    {
        return Err(Error::DimensionMismatch(
            "tangent vectors must share their base point".into(),
        ));
    }
    let dv = log_derivs(v, tol)?;
    let dw = log_derivs(w, tol)?;
    let left = pairing_im_trace(&dv.a_l, &dw.x_l) - pairing_im_trace(&dw.a_l, &dv.x_l);
    let right = pairing_im_trace(&dv.a_r, &dw.x_r) - pairing_im_trace(&dw.a_r, &dv.x_r);
    Ok(0.5 * (left + right))
}

/// Largest power accepted in a `Chi` series.
pub const CHI_MAX_POWER: usize = 16;

/// Spectral invariant used as a Hamiltonian on the double.
///
/// * `F(k)`: `f_k(b) = tr((b b^†)^k) / (2k)` pulled back by `Λ_R`.
/// * `Phi(k)`, `k > 0`: `tr(g^k + g^{-k}) / (2k)` pulled back by `Ξ_R`.
/// * `Phi(-k)`: `tr(g^k - g^{-k}) / (2ki)` pulled back by `Ξ_R`.
/// * `Chi(ψ)`: `tr χ(g) + c.c.` with `z χ'(z) = Σ_k ψ_k z^k`, pulled back by `Ξ_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HamiltonianSelector {
    F(i32),
    Phi(i32),
    Chi(Vec<C64>),
}

impl HamiltonianSelector {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::F(0) | Self::Phi(0) => Err(Error::UnsupportedSelector(
                "generator index must be nonzero".into(),
            )),
            Self::Chi(c) if c.is_empty() => Err(Error::UnsupportedSelector("empty series".into())),
            Self::Chi(c) if c.len() > CHI_MAX_POWER => Err(Error::UnsupportedSelector(format!(
                "series longer than {CHI_MAX_POWER} terms"
            ))),
            _ => Ok(()),
        }
    }

    /// True for the family that depends on `Ξ_R` only.
    pub fn is_xi_family(&self) -> bool {
        !matches!(self, Self::F(_))
    }

    /// Parses `F:k`, `PHI:k` or `CHI:re,im;re,im;...`.
    pub fn parse(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::UnsupportedSelector(format!("'{s}': expected FAMILY:ARGS")))?;
        let bad = || Error::UnsupportedSelector(format!("'{s}'"));
        let sel = match head.to_ascii_uppercase().as_str() {
            "F" => Self::F(tail.trim().parse().map_err(|_| bad())?),
            "PHI" => Self::Phi(tail.trim().parse().map_err(|_| bad())?),
            "CHI" => {
                let mut c = Vec::new();
                for term in tail.split(';') {
                    let (re, im) = term.split_once(',').unwrap_or((term, "0"));
                    c.push(C64::new(
                        re.trim().parse().map_err(|_| bad())?,
                        im.trim().parse().map_err(|_| bad())?,
                    ));
                }
                Self::Chi(c)
            }
            _ => return Err(bad()),
        };
        sel.validate()?;
        Ok(sel)
    }
}

/// `ψ(g) = Σ_k ψ_k g^k`.
fn series(coeffs: &[C64], g: &CMat) -> CMat {
    let n = g.nrows();
    let mut acc = CMat::zeros(n, n);
    let mut pow = CMat::identity(n, n);
    for c in coeffs {
        pow = &pow * g;
        acc += &pow * *c;
    }
    acc
}

/// Value of a `Ξ_R`-family invariant at a unitary (or unitary-similar) `g`.
pub fn phi_value(sel: &HamiltonianSelector, g: &CMat) -> Result<f64> {
    sel.validate()?;
    match sel {
        HamiltonianSelector::Phi(k) => {
            let m = k.unsigned_abs() as i32;
            let gp = int_pow(g, m)?.trace();
            let gm = int_pow(g, -m)?.trace();
            if *k > 0 {
                Ok(((gp + gm) / C64::new(2.0 * m as f64, 0.0)).re)
            } else {
                Ok(((gp - gm) / (I * 2.0 * m as f64)).re)
            }
        }
        HamiltonianSelector::Chi(c) => {
            let chi: Vec<C64> = c
                .iter()
                .enumerate()
                .map(|(k, ck)| ck / (k as f64 + 1.0))
                .collect();
            Ok(2.0 * series(&chi, g).trace().re)
        }
        HamiltonianSelector::F(_) => Err(Error::UnsupportedSelector(
            "F family does not depend on Ξ_R".into(),
        )),
    }
}

/// Derivative `𝐃φ(g)` of a `Ξ_R`-family invariant, defined by
/// `d/ds φ(g e^{sY}) = tr(Y 𝐃φ(g))`.
pub fn d_phi(sel: &HamiltonianSelector, g: &CMat) -> Result<CMat> {
    sel.validate()?;
    match sel {
        HamiltonianSelector::Phi(k) => {
            let m = k.unsigned_abs() as i32;
            let gp = int_pow(g, m)?;
            let gm = int_pow(g, -m)?;
            if *k > 0 {
                Ok((gp - gm) * C64::new(0.5, 0.0))
            } else {
                Ok((gp + gm) / (I * 2.0))
            }
        }
        HamiltonianSelector::Chi(c) => {
            let psi = series(c, g);
            let n = g.nrows();
            let psi_inv = psi_tilde_inverse(c, g)?;
            debug_assert_eq!(psi_inv.nrows(), n);
            Ok(psi - psi_inv)
        }
        HamiltonianSelector::F(_) => Err(Error::UnsupportedSelector(
            "F family does not depend on Ξ_R".into(),
        )),
    }
}

/// `ψ̃(g^{-1}) = Σ_k conj(ψ_k) g^{-k}`, which equals `ψ(g)^†` for unitary `g`.
pub(crate) fn psi_tilde_inverse(c: &[C64], g: &CMat) -> Result<CMat> {
    let gi = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularInput("g is singular".into()))?;
    let conj: Vec<C64> = c.iter().map(|z| z.conj()).collect();
    Ok(series(&conj, &gi))
}

/// Value of `f_k` at `b`.
pub fn f_value(k: i32, b: &CMat) -> Result<f64> {
    if k == 0 {
        return Err(Error::UnsupportedSelector(
            "generator index must be nonzero".into(),
        ));
    }
    let bb = b * b.adjoint();
    let ev = crate::linalg::herm_spectrum(&bb);
    Ok(ev.iter().map(|l| l.powi(k)).sum::<f64>() / (2.0 * k as f64))
}

/// `d^R f_k(b) = i (b^† b)^k`.
pub fn d_r_f(k: i32, b: &CMat) -> CMat {
    let bb = b.adjoint() * b;
    herm_apply(&bb, |l| I * l.powi(k))
}

/// `d^R φ(g) = π_b(i 𝐃φ(g))`.
pub fn d_r_phi(sel: &HamiltonianSelector, g: &CMat) -> Result<CMat> {
    let d = d_phi(sel, g)?;
    Ok(split(&(d * I)).1)
}

/// Value of a Hamiltonian at `K`.
pub fn hamiltonian_value(
    sel: &HamiltonianSelector,
    k: &CMat,
    tol: &ToleranceConfig,
) -> Result<f64> {
    sel.validate()?;
    match sel {
        HamiltonianSelector::F(j) => {
            let (_, br) = iwasawa_right(k, tol)?;
            f_value(*j, br.matrix())
        }
        _ => {
            let (_, gr) = iwasawa_left(k, tol)?;
            phi_value(sel, gr.matrix())
        }
    }
}

/// Left and right gradients `(∇^L H, ∇^R H)` at `K`.
pub fn grad_pair(
    sel: &HamiltonianSelector,
    k: &CMat,
    tol: &ToleranceConfig,
) -> Result<(CMat, CMat)> {
    sel.validate()?;
    let m = xi_maps(k, tol)?;
    match sel {
        HamiltonianSelector::F(j) => {
            let br = m.lambda_r.matrix();
            let gl = m.xi_l.matrix();
            let d = d_r_f(*j, br);
            let gl_grad = -(gl * &d * gl.adjoint());
            let gr_grad = -(br * &d * m.lambda_r.inverse().matrix());
            Ok((gl_grad, gr_grad))
        }
        _ => {
            let bl = m.lambda_l.matrix();
            let gr = m.xi_r.matrix();
            let d = d_r_phi(sel, gr)?;
            let gl_grad = -(bl * &d * m.lambda_l.inverse().matrix());
            let gr_grad = -(gr * &d * gr.adjoint());
            Ok((gl_grad, gr_grad))
        }
    }
}

/// Poisson bracket `{H1, H2}(K) = (∇^R H1, ρ ∇^R H2) + (∇^L H1, ρ ∇^L H2)`.
pub fn poisson_plus(
    h1: &HamiltonianSelector,
    h2: &HamiltonianSelector,
    k: &CMat,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let (l1, r1) = grad_pair(h1, k, tol)?;
    let (l2, r2) = grad_pair(h2, k, tol)?;
    Ok(pairing_im_trace(&r1, &rho(&r2)) + pairing_im_trace(&l1, &rho(&l2)))
}

/// Hamiltonian vector field `K ρ(∇^R H) + ρ(∇^L H) K`.
pub fn hamiltonian_vector_field(
    sel: &HamiltonianSelector,
    k: &CMat,
    tol: &ToleranceConfig,
) -> Result<CMat> {
    let (l, r) = grad_pair(sel, k, tol)?;
    Ok(k * rho(&r) + rho(&l) * k)
}

/// Unreduced Lax matrices `(b_R b_R^†, g_R)`.
pub fn unreduced_lax(k: &CMat, tol: &ToleranceConfig) -> Result<(CMat, Unitary)> {
    let m = xi_maps(k, tol)?;
    let br = m.lambda_r.matrix();
    Ok((br * br.adjoint(), m.xi_r))
}

/// `tr M^j` for `j = 1..=n`, where `M` is the unreduced Lax matrix whose
/// spectrum the flows of `sel` conserve: `b_R b_R^†` for the `F` family and
/// `g_R` otherwise.
pub fn conserved_traces(
    sel: &HamiltonianSelector,
    k: &CMat,
    tol: &ToleranceConfig,
) -> Result<Vec<C64>> {
    let (l, g) = unreduced_lax(k, tol)?;
    let m = if sel.is_xi_family() {
        g.matrix().clone()
    } else {
        l
    };
    let mut power = m.clone();
    let mut out = Vec::with_capacity(m.nrows());
    for _ in 0..m.nrows() {
        out.push(power.trace());
        power = &power * &m;
    }
    Ok(out)
}

/// Eigen-angles of `Ξ_R(K)`, descending in `[0, 2π)`.
pub fn xi_r_angles(k: &CMat, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let (_, gr) = iwasawa_left(k, tol)?;
    Ok(unitary_eig(gr.matrix(), tol)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{phase_diag, unitary_deviation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rand_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        let h = rand_mat(rng, n);
        herm_apply(&(&h + h.adjoint()), |l| C64::from_polar(1.0, 2.0 * l))
    }

    fn rand_k(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        rand_mat(rng, n) + CMat::identity(n, n).scale(1.5)
    }

    #[test]
    fn split_is_a_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = rand_mat(&mut rng, 4);
        let (g, b) = split(&x);
        assert!((&g + g.adjoint()).norm() < 1e-15);
        for i in 0..4 {
            assert!(b[(i, i)].im.abs() < 1e-15);
            for j in 0..i {
                assert!(b[(i, j)].norm() < 1e-15);
            }
        }
        assert!((g + b - x).norm() < 1e-14);
    }

    #[test]
    fn both_summands_are_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (g1, b1) = split(&rand_mat(&mut rng, 3));
        let (g2, b2) = split(&rand_mat(&mut rng, 3));
        assert!(pairing_im_trace(&g1, &g2).abs() < 1e-14);
        assert!(pairing_im_trace(&b1, &b2).abs() < 1e-14);
    }

    #[test]
    fn quasi_adjoint_composes_and_ignores_center() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let k = rand_k(&mut rng, 3);
        let g1 = rand_unitary(&mut rng, 3);
        let g2 = rand_unitary(&mut rng, 3);
        let lhs = quasi_adjoint(&(&g1 * &g2), &k, &tol).unwrap();
        let rhs = quasi_adjoint(&g1, &quasi_adjoint(&g2, &k, &tol).unwrap(), &tol).unwrap();
        assert!((&lhs - &rhs).norm() < 1e-12 * k.norm());
        let c = CMat::identity(3, 3) * C64::from_polar(1.0, 0.7);
        assert!((quasi_adjoint(&c, &k, &tol).unwrap() - &k).norm() < 1e-13 * k.norm());
    }

    #[test]
    fn moment_is_equivariant_and_unimodular() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=4 {
            let k = rand_k(&mut rng, n);
            let g = rand_unitary(&mut rng, n);
            let lam = moment(&k, &tol).unwrap();
            assert!((lam.determinant() - C64::new(1.0, 0.0)).norm() < 1e-12);
            let lhs = moment(&quasi_adjoint(&g, &k, &tol).unwrap(), &tol).unwrap();
            let rhs = dress(&g, &lam, &tol).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lam.norm());
        }
    }

    #[test]
    fn dressing_intertwines_with_conjugation() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (b, _) = iwasawa_left(&rand_k(&mut rng, 4), &tol).unwrap();
        let g = rand_unitary(&mut rng, 4);
        let d = dress(&g, b.matrix(), &tol).unwrap();
        let lhs = &d * d.adjoint();
        let rhs = &g * b.matrix() * b.matrix().adjoint() * g.adjoint();
        assert!((lhs - &rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn moment_of_b_times_torus() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (b, _) = iwasawa_left(&rand_k(&mut rng, 3), &tol).unwrap();
        let t = phase_diag(&[0.3, 1.9, -0.8]);
        let k = b.matrix() * t.adjoint();
        let lhs = moment(&k, &tol).unwrap();
        let rhs = b.matrix() * &t * b.inverse().matrix() * t.adjoint();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn iwasawa_maps_transform_under_quasi_adjoint() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let k = rand_k(&mut rng, 3);
        let g = rand_unitary(&mut rng, 3);
        let m = xi_maps(&k, &tol).unwrap();
        let gk = quasi_adjoint(&g, &k, &tol).unwrap();
        let mg = xi_maps(&gk, &tol).unwrap();
        let d = dress(&g, m.lambda_l.matrix(), &tol).unwrap();
        assert!((mg.lambda_l.matrix() - d).norm() < 1e-12);
        let (_, gam) = iwasawa_left(&(&g * m.lambda_l.matrix()), &tol).unwrap();
        let xr = gam.matrix().adjoint() * m.xi_r.matrix() * gam.matrix();
        assert!((mg.xi_r.matrix() - xr).norm() < 1e-12);
    }

    #[test]
    fn omega_on_scalar_coordinates() {
        // n = 1, K = e^{-p/2 - 2iq}: the form evaluates to 1 on (∂_p, ∂_q).
        let tol = ToleranceConfig::default();
        let (q, p) = (0.4, 0.3);
        let k = CMat::from_element(1, 1, C64::from_polar((-p / 2.0f64).exp(), -2.0 * q));
        let dp = k.clone() * C64::new(-0.5, 0.0);
        let dq = k.clone() * C64::new(0.0, -2.0);
        let v = TangentVector::new(k.clone(), dp);
        let w = TangentVector::new(k.clone(), dq);
        let val = omega_plus(&v, &w, &tol).unwrap();
        assert!((val - 1.0).abs() < 1e-9, "{val}");
        assert!((omega_plus(&w, &v, &tol).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn omega_is_antisymmetric_and_bilinear() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = rand_k(&mut rng, 3);
        let (a, b, c) = (
            rand_mat(&mut rng, 3),
            rand_mat(&mut rng, 3),
            rand_mat(&mut rng, 3),
        );
        let t = |d: &CMat| TangentVector::new(k.clone(), d.clone());
        let ab = omega_plus(&t(&a), &t(&b), &tol).unwrap();
        let ba = omega_plus(&t(&b), &t(&a), &tol).unwrap();
        assert!((ab + ba).abs() < 1e-8);
        let ac = omega_plus(&t(&a), &t(&c), &tol).unwrap();
        let sum = omega_plus(&t(&a), &t(&(&b * C64::new(2.0, 0.0) + &c)), &tol).unwrap();
        assert!((sum - 2.0 * ab - ac).abs() < 1e-7);
    }

    fn fd_directional(
        sel: &HamiltonianSelector,
        k: &CMat,
        x: &CMat,
        left: bool,
        tol: &ToleranceConfig,
    ) -> f64 {
        let h = 1e-4;
        let f = |s: f64| {
            let e = crate::linalg::expm(&(x * C64::new(s, 0.0)));
            let kk = if left { &e * k } else { k * &e };
            hamiltonian_value(sel, &kk, tol).unwrap()
        };
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
        (4.0 * d2 - d1) / 3.0
    }

    #[test]
    fn gradients_match_finite_differences() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let sels = [
            HamiltonianSelector::F(1),
            HamiltonianSelector::F(-2),
            HamiltonianSelector::Phi(1),
            HamiltonianSelector::Phi(-2),
            HamiltonianSelector::Chi(vec![C64::new(0.3, -0.2), C64::new(0.0, 0.5)]),
        ];
        for sel in &sels {
            let k = rand_k(&mut rng, 3);
            let (gl, gr) = grad_pair(sel, &k, &tol).unwrap();
            for _ in 0..3 {
                let x = rand_mat(&mut rng, 3);
                let fl = fd_directional(sel, &k, &x, true, &tol);
                let fr = fd_directional(sel, &k, &x, false, &tol);
                assert!(
                    (fl - pairing_im_trace(&x, &gl)).abs() < 1e-7 * (1.0 + fl.abs()),
                    "{sel:?} left {fl}"
                );
                assert!(
                    (fr - pairing_im_trace(&x, &gr)).abs() < 1e-7 * (1.0 + fr.abs()),
                    "{sel:?} right {fr}"
                );
            }
        }
    }

    #[test]
    fn families_are_in_involution() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 2..=4 {
            let k = rand_k(&mut rng, n);
            for i in [-2, -1, 1, 2, 3] {
                for j in [-2, -1, 1, 2, 3] {
                    let ff = poisson_plus(
                        &HamiltonianSelector::F(i),
                        &HamiltonianSelector::F(j),
                        &k,
                        &tol,
                    )
                    .unwrap();
                    let pp = poisson_plus(
                        &HamiltonianSelector::Phi(i),
                        &HamiltonianSelector::Phi(j),
                        &k,
                        &tol,
                    )
                    .unwrap();
                    assert!(ff.abs() < 1e-9, "F {i} {j}: {ff}");
                    assert!(pp.abs() < 1e-9, "Phi {i} {j}: {pp}");
                }
            }
        }
    }

    #[test]
    fn unreduced_lax_of_identity() {
        let tol = ToleranceConfig::default();
        let (l, g) = unreduced_lax(&CMat::identity(2, 2), &tol).unwrap();
        assert!((l - CMat::identity(2, 2)).norm() < 1e-15);
        assert!(unitary_deviation(g.matrix()) < 1e-15);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(
            HamiltonianSelector::parse("F:2").unwrap(),
            HamiltonianSelector::F(2)
        );
        assert_eq!(
            HamiltonianSelector::parse("phi:-1").unwrap(),
            HamiltonianSelector::Phi(-1)
        );
        assert_eq!(
            HamiltonianSelector::parse("CHI:0.5,0;0,1").unwrap(),
            HamiltonianSelector::Chi(vec![C64::new(0.5, 0.0), C64::new(0.0, 1.0)])
        );
        assert!(HamiltonianSelector::parse("F:0").is_err());
        assert!(HamiltonianSelector::parse("G:1").is_err());
    }
}
