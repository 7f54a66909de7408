// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! The action-angle duality between the original and the dual model, its
//! extension to the completed dual phase space, and reduced flows.

use std::f64::consts::PI;

use serde::Serialize;

use crate::double::{d_phi, HamiltonianSelector};
use crate::dual::{check_closed_chamber, delta, ihat, k_x, theta, theta_hat, zx_embed};
use crate::error::{Error, Result};
use crate::flows::flow;
use crate::linalg::{
    balance, cartan_modified, complex_spectrum, diag_c, diag_r, expm, herm_apply, herm_spectrum,
    jacobi_singular_values, svd_ordered, CMat, C64,
};
use crate::points::{Coupling, PointP, PointPhat, PointPhatC};
use crate::reduction::{itilde, reduce_to_slice};
use crate::rs_model::{lax_dual, lax_rs_hermitian, wrap_two_pi};
use crate::tolerance::ToleranceConfig;

/// `p̂ = π̂(K)` with `K K^† ~ e^{-2p̂}`, non-increasing.
pub fn pi_hat(k: &CMat, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    Ok(svd_ordered(k, tol)?.1.iter().map(|s| -s.ln()).collect())
}

/// Dual coordinates of a constrained element whose `π̂` lies in the open chamber.
pub fn dual_coordinates(k: &CMat, x: Coupling, tol: &ToleranceConfig) -> Result<PointPhat> {
    let c = cartan_modified(k, tol)?;
    check_closed_chamber(&c.p_hat, x, tol)?;
    if let Some(j) = c
        .p_hat
        .windows(2)
        .position(|w| w[0] - w[1] - x.get().abs() / 2.0 < tol.degeneracy)
    {
        return Err(Error::BoundaryPoint(format!(
            "p̂_{} - p̂_{} = |x|/2",
            j + 1,
            j + 2
        )));
    }
    let th = theta(x, &c.p_hat, tol)?;
    let kr = c.k_r.matrix();
    let q_hat = (0..c.p_hat.len())
        .map(|j| wrap_two_pi((kr[(j, j)] / th[(j, j)]).arg()))
        .collect();
    Ok(PointPhat {
        q_hat,
        p_hat: c.p_hat,
    })
}

/// Deviation of the sorted spectrum of `L(q, p)` from `e^{2p̂}`, relative to
/// the spectral radius.
pub fn lemma_residual_original(
    pt: &PointP,
    dual: &PointPhat,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let ev = herm_spectrum(&lax_rs_hermitian(pt, x, tol)?);
    let top = ev[0].max((2.0 * dual.p_hat[0]).exp());
    Ok(ev
        .iter()
        .zip(dual.p_hat.iter())
        .map(|(l, p)| (l - (2.0 * p).exp()).abs() / top)
        .fold(0.0, f64::max))
}

/// Largest deviation between the spectrum of `L̂(q̂, p̂)` and `e^{2iq}`.
pub fn lemma_residual_dual(pt: &PointP, dual: &PointPhat, x: Coupling) -> Result<f64> {
    let ev = complex_spectrum(&lax_dual(dual, x)?);
    let mut worst: f64 = 0.0;
    for q in &pt.q {
        let target = C64::from_polar(1.0, 2.0 * q);
        let d = ev
            .iter()
            .map(|z| (z - target).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Certification record attached to every duality output.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// Relative deviation of the spectrum of `L(q, p)` from `e^{2p̂}`.
    pub spectral_original: Option<f64>,
    /// Deviation of the spectrum of `L̂(q̂, p̂)` from `e^{2iq}`.
    pub spectral_dual: Option<f64>,
    /// Distance of the reconstructed original point from the input.
    pub round_trip: Option<f64>,
}

/// A certified duality image.
#[derive(Clone, Debug)]
pub struct DualityResult<T> {
    pub target: T,
    /// Gauge taking the constrained element onto the slice, when one was computed.
    pub gauge: Option<CMat>,
    pub residuals: Residuals,
}

/// Forward duality map `(q, p) ↦ (q̂, p̂)`, certified by the spectral identities.
pub fn duality_forward(
    pt: &PointP,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<DualityResult<PointPhat>> {
    let k = itilde(pt, x, tol)?;
    let dual = dual_coordinates(&k, x, tol)?;
    let residuals = certify(pt, &dual, x, tol)?;
    Ok(DualityResult {
        target: dual,
        gauge: None,
        residuals,
    })
}

fn certify(pt: &PointP, dual: &PointPhat, x: Coupling, tol: &ToleranceConfig) -> Result<Residuals> {
    let r1 = lemma_residual_original(pt, dual, x, tol)?;
    let r2 = lemma_residual_dual(pt, dual, x)?;
    if !(r1 <= tol.duality && r2 <= tol.duality) {
        return Err(Error::VerificationFailed(format!(
            "spectral residuals {r1:e}, {r2:e}"
        )));
    }
    Ok(Residuals {
        spectral_original: Some(r1),
        spectral_dual: Some(r2),
        round_trip: None,
    })
}

/// Inverse duality map `(q̂, p̂) ↦ (q, p)` on the open chamber; `q` is canonical.
pub fn duality_inverse(
    dual: &PointPhat,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<DualityResult<PointP>> {
    if !dual.in_open_chamber(x) {
        return Err(Error::ChamberViolation(
            "p̂ must lie in the open chamber".into(),
        ));
    }
    let k = k_x(dual, x, tol)?;
    let (pt, gauge) = reduce_to_slice(&k, x, tol)?;
    let residuals = certify(&pt, dual, x, tol)?;
    Ok(DualityResult {
        target: pt,
        gauge: Some(gauge),
        residuals,
    })
}

/// Union-find root with path halving.
fn root(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Completed dual coordinates of any constrained element.
///
/// Solves `k_R = δ_l θ δ_r` for diagonal unitaries along a maximum-weight
/// spanning forest of the nonzero entries of `θ`, then maps `e^{iq̂} = δ_l δ_r`
/// through `Z_x`. Entries of `θ` that vanish on boundary faces only affect
/// phases that multiply vanishing `z_j`.
pub fn completed_coordinates(k: &CMat, x: Coupling, tol: &ToleranceConfig) -> Result<PointPhatC> {
    let c = cartan_modified(k, tol)?;
    check_closed_chamber(&c.p_hat, x, tol)?;
    let n = c.p_hat.len();
    let th = theta(x, &c.p_hat, tol)?;
    let kr = c.k_r.matrix();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            edges.push((th[(j, l)].abs(), j, l));
        }
    }
    edges.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    // Nodes 0..n are left indices, n..2n right indices.
    let mut parent: Vec<usize> = (0..2 * n).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); 2 * n];
    for &(w, j, l) in &edges {
        if w == 0.0 {
            break;
        }
        let (a, b) = (root(&mut parent, j), root(&mut parent, n + l));
        if a != b {
            parent[a] = b;
            let phase = (kr[(j, l)] / th[(j, l)]).arg();
            adj[j].push((n + l, phase));
            adj[n + l].push((j, phase));
        }
    }
    let mut ang: Vec<Option<f64>> = vec![None; 2 * n];
    for start in 0..2 * n {
        if ang[start].is_some() {
            continue;
        }
        ang[start] = Some(0.0);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let au = ang[u].unwrap();
            for &(v, phase) in &adj[u] {
                if ang[v].is_none() {
                    ang[v] = Some(phase - au);
                    stack.push(v);
                }
            }
        }
    }
    let q_hat: Vec<f64> = (0..n)
        .map(|j| wrap_two_pi(ang[j].unwrap() + ang[n + j].unwrap()))
        .collect();
    zx_embed(
        &PointPhat {
            q_hat,
            p_hat: c.p_hat,
        },
        x,
        tol,
    )
}

/// Forward map onto the completed space, certified by mapping back.
pub fn duality_forward_completed(
    pt: &PointP,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<DualityResult<PointPhatC>> {
    let k = itilde(pt, x, tol)?;
    let pc = completed_coordinates(&k, x, tol)?;
    let (back, gauge) = reduce_to_slice(&ihat(&pc, x, tol)?, x, tol)?;
    let (canon, _) = crate::rs_model::canonicalize(pt);
    let err = point_distance(&canon, &back);
    if err.is_nan() || err > tol.completion {
        return Err(Error::VerificationFailed(format!(
            "completed round trip off by {err:e}"
        )));
    }
    let residuals = Residuals {
        round_trip: Some(err),
        ..Residuals::default()
    };
    Ok(DualityResult {
        target: pc,
        gauge: Some(gauge),
        residuals,
    })
}

/// Inverse map from the completed space; `q` is canonical.
pub fn duality_inverse_completed(
    pc: &PointPhatC,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<DualityResult<PointP>> {
    let (pt, gauge) = reduce_to_slice(&ihat(pc, x, tol)?, x, tol)?;
    Ok(DualityResult {
        target: pt,
        gauge: Some(gauge),
        residuals: Residuals::default(),
    })
}

/// Distance between two canonical points, with `q` compared modulo π.
pub fn point_distance(a: &PointP, b: &PointP) -> f64 {
    let dq =
        a.q.iter()
            .zip(&b.q)
            .map(|(u, v)| crate::rs_model::angle_diff(*u, *v, PI).abs());
    let dp = a.p.iter().zip(&b.p).map(|(u, v)| (u - v).abs());
    dq.chain(dp).fold(0.0, f64::max)
}

/// Largest `|t| ‖𝐃φ‖` handled by the spectral formulas.
const SPECTRAL_EXP_LIMIT: f64 = 300.0;

fn sorted_p_hat(mut ev: Vec<f64>) -> Result<Vec<f64>> {
    if ev.iter().any(|l| *l <= 0.0 || !l.is_finite()) {
        return Err(Error::Overflow(
            "non-positive eigenvalue in spectral flow".into(),
        ));
    }
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev.iter().map(|l| -0.5 * l.ln()).collect())
}

/// `p̂(t)` along a `Ξ_R`-family flow from a completed point:
/// `e^{-2p̂(t)} ~ e^{-2p̂(0)} exp(2it 𝐃φ(θ̂(x, z_0) Ξ_R(Δ_0)))`.
pub fn dual_flow_spectral(
    pc: &PointPhatC,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
) -> Result<Vec<f64>> {
    if !sel.is_xi_family() {
        return Err(Error::UnsupportedSelector(
            "spectral dual flow needs a PHI or CHI selector".into(),
        ));
    }
    let d = delta(x, pc);
    let b: Vec<f64> = d.iter().map(|v| v.norm()).collect();
    let g_r: Vec<C64> = d.iter().map(|v| (v / v.norm()).conj()).collect();
    let g0 = theta_hat(x, &pc.z) * diag_c(&g_r);
    let dp = d_phi(sel, &g0)?;
    let gen = &dp * C64::new(0.0, 2.0 * t);
    if gen.norm() > SPECTRAL_EXP_LIMIT {
        return Err(Error::Overflow(format!("exponent norm {:e}", gen.norm())));
    }
    // B e^{gen} B = G G^† with G = B e^{gen/2}, whose adjoint is column scaled.
    let half = herm_apply(&gen, |l| C64::new((l / 2.0).exp(), 0.0));
    let sigma = jacobi_singular_values(&(half * diag_r(&b)));
    sorted_p_hat(sigma.iter().map(|s| s * s).collect())
}

/// Same flow from an interior dual point through the dual Lax matrix:
/// `e^{-2p̂(t)} ~ e^{-2p̂(0)} exp(2it (ψ(L̂_0) - ψ̃(L̂_0^{-1})))`.
pub fn dual_flow_spectral_lax(
    pt: &PointPhat,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
) -> Result<Vec<f64>> {
    if !sel.is_xi_family() {
        return Err(Error::UnsupportedSelector(
            "spectral dual flow needs a PHI or CHI selector".into(),
        ));
    }
    // A diagonal similarity of L̂_0 commutes with e^{-2p̂(0)} and keeps the spectrum.
    let l = balance(&lax_dual(pt, x)?);
    let gen = d_phi(sel, &l)? * C64::new(0.0, 2.0 * t);
    if gen.norm() > SPECTRAL_EXP_LIMIT {
        return Err(Error::Overflow(format!("exponent norm {:e}", gen.norm())));
    }
    let e2 = diag_r(
        &pt.p_hat
            .iter()
            .map(|p| (-2.0 * p).exp())
            .collect::<Vec<_>>(),
    );
    let m = e2 * expm(&gen);
    sorted_p_hat(complex_spectrum(&m).iter().map(|z| z.re).collect())
}

/// Reduced flow on the original phase space through the unreduced flow.
pub fn original_flow_reduced(
    pt: &PointP,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<PointP> {
    let k = flow(&itilde(pt, x, tol)?, sel, t, tol)?;
    Ok(reduce_to_slice(&k, x, tol)?.0)
}

/// Reduced flow on the dual phase space through the unreduced flow.
pub fn dual_flow_reduced(
    pt: &PointPhat,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<PointPhat> {
    let k = flow(&k_x(pt, x, tol)?, sel, t, tol)?;
    dual_coordinates(&k, x, tol)
}

/// Reduced flow on the completed dual phase space through the unreduced flow.
pub fn completed_flow_reduced(
    pc: &PointPhatC,
    sel: &HamiltonianSelector,
    t: f64,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<PointPhatC> {
    let k = flow(&ihat(pc, x, tol)?, sel, t, tol)?;
    completed_coordinates(&k, x, tol)
}
