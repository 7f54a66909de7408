// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form Hamiltonian flows of the two families of spectral invariants
//! on the double.

use crate::double::{d_phi, d_r_f, HamiltonianSelector};
use crate::error::{Error, Result};
use crate::linalg::{herm_apply, iwasawa_left, iwasawa_right, CMat, C64};
use crate::tolerance::ToleranceConfig;

/// Largest exponent accepted by the direct (unchunked) formulas.
const DIRECT_EXP_LIMIT: f64 = 600.0;

/// Flow of `f_k ∘ Λ_R`: `K(t) = g_L(0) exp(-t d^R f_k(b_R(0))) b_R(0)^{-1}`.
pub fn flow_lambda(k0: &CMat, gen: i32, t: f64, tol: &ToleranceConfig) -> Result<CMat> {
    if gen == 0 {
        return Err(Error::UnsupportedSelector(
            "generator index must be nonzero".into(),
        ));
    }
    let (gl, br) = iwasawa_right(k0, tol)?;
    let d = d_r_f(gen, br.matrix());
    // d = i H with H Hermitian positive, so exp(-t d) = exp(-i t H).
    let h = &d * C64::new(0.0, -1.0);
    let e = herm_apply(&h, |l| C64::from_polar(1.0, -t * l));
    Ok(gl.matrix() * e * br.inverse().matrix())
}

/// Spectral norm of `𝐃φ(g_R)`, which is constant along the flow.
fn d_phi_norm(d: &CMat) -> f64 {
    let h = d * C64::new(0.0, 1.0);
    crate::linalg::herm_spectrum(&h)
        .iter()
        .fold(0.0, |m, l| m.max(l.abs()))
}

fn xi_step(k: &CMat, sel: &HamiltonianSelector, dt: f64, tol: &ToleranceConfig) -> Result<CMat> {
    let (bl, gr) = iwasawa_left(k, tol)?;
    let d = d_phi(sel, gr.matrix())?;
    // i dt 𝐃φ is Hermitian since 𝐃φ is anti-Hermitian.
    let m = herm_apply(&(&d * C64::new(0.0, dt)), |l| C64::new(l.exp(), 0.0));
    let (beta, gamma_inv) = iwasawa_left(&m, tol)?;
    let gamma = gamma_inv.matrix().adjoint();
    let g_t = &gamma * gr.matrix() * gamma.adjoint();
    let b_t = bl.matrix() * beta.matrix();
    Ok(b_t * g_t.adjoint())
}

/// Flow of `φ ∘ Ξ_R`: with `e^{it𝐃φ(g_R(0))} = β γ`, `g_R(t) = γ g_R(0) γ^{-1}`
/// and `b_L(t) = b_L(0) β`.
///
/// The time interval is split so that the exponent norm of every
/// factorization step stays below `tol.exp_cap`.
pub fn flow_xi(
    k0: &CMat,
    sel: &HamiltonianSelector,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<CMat> {
    if !sel.is_xi_family() {
        return Err(Error::UnsupportedSelector(
            "flow_xi needs a PHI or CHI selector".into(),
        ));
    }
    sel.validate()?;
    let (_, gr) = iwasawa_left(k0, tol)?;
    let norm = d_phi_norm(&d_phi(sel, gr.matrix())?);
    let steps = ((t.abs() * norm) / tol.exp_cap).ceil().max(1.0);
    if !steps.is_finite() || steps > 1e7 {
        return Err(Error::Overflow(format!("|t| ‖𝐃φ‖ = {:e}", t.abs() * norm)));
    }
    let steps = steps as usize;
    let dt = t / steps as f64;
    let mut k = k0.clone();
    for _ in 0..steps {
        k = xi_step(&k, sel, dt, tol)?;
    }
    Ok(k)
}

/// Flow of either family.
pub fn flow(k0: &CMat, sel: &HamiltonianSelector, t: f64, tol: &ToleranceConfig) -> Result<CMat> {
    sel.validate()?;
    match sel {
        HamiltonianSelector::F(j) => flow_lambda(k0, *j, t, tol),
        _ => flow_xi(k0, sel, t, tol),
    }
}

/// `K(t) K(t)^† = b_L(0) e^{2it𝐃φ(g_R(0))} b_L(0)^†` for the `Ξ_R` family.
pub fn cartan_invariant_flow(
    k0: &CMat,
    sel: &HamiltonianSelector,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<CMat> {
    if !sel.is_xi_family() {
        return Err(Error::UnsupportedSelector(
            "needs a PHI or CHI selector".into(),
        ));
    }
    let (bl, gr) = iwasawa_left(k0, tol)?;
    let d = d_phi(sel, gr.matrix())?;
    if 2.0 * t.abs() * d_phi_norm(&d) > DIRECT_EXP_LIMIT {
        return Err(Error::Overflow(
            "exponent exceeds the direct evaluation range".into(),
        ));
    }
    let e = herm_apply(&(&d * C64::new(0.0, 2.0 * t)), |l| C64::new(l.exp(), 0.0));
    Ok(bl.matrix() * e * bl.matrix().adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::{hamiltonian_value, hamiltonian_vector_field, poisson_plus};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_k(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }) + CMat::identity(n, n).scale(1.5)
    }

    #[test]
    fn scalar_f1_flow_rotates_phase() {
        let tol = ToleranceConfig::default();
        let k = flow_lambda(&CMat::identity(1, 1), 1, 0.7, &tol).unwrap();
        assert!((k[(0, 0)] - C64::from_polar(1.0, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn flows_are_generated_by_the_vector_field() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let sels = [
            HamiltonianSelector::F(1),
            HamiltonianSelector::F(-1),
            HamiltonianSelector::Phi(1),
            HamiltonianSelector::Phi(-2),
            HamiltonianSelector::Chi(vec![C64::new(0.2, 0.1), C64::new(-0.3, 0.4)]),
        ];
        for sel in &sels {
            let k = rand_k(&mut rng, 3);
            let h = 1e-4;
            let fd = (flow(&k, sel, h, &tol).unwrap() - flow(&k, sel, -h, &tol).unwrap())
                / C64::new(2.0 * h, 0.0);
            let v = hamiltonian_vector_field(sel, &k, &tol).unwrap();
            assert!((&fd - &v).norm() < 1e-6 * v.norm().max(1.0), "{sel:?}");
        }
    }

    #[test]
    fn derivative_along_flow_is_the_bracket() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let k = rand_k(&mut rng, 3);
        let f = HamiltonianSelector::F(1);
        let phi = HamiltonianSelector::Phi(1);
        let h = 1e-4;
        let val = |t: f64| hamiltonian_value(&f, &flow(&k, &phi, t, &tol).unwrap(), &tol).unwrap();
        let fd = (val(h) - val(-h)) / (2.0 * h);
        let pb = poisson_plus(&f, &phi, &k, &tol).unwrap();
        assert!((fd - pb).abs() < 1e-6 * (1.0 + pb.abs()), "{fd} {pb}");
    }

    #[test]
    fn flows_conserve_their_family_and_have_group_property() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let k = rand_k(&mut rng, 4);
        for sel in [HamiltonianSelector::F(2), HamiltonianSelector::Phi(1)] {
            let kt = flow(&k, &sel, 1.3, &tol).unwrap();
            for j in [1, 2, -1] {
                let other = if sel.is_xi_family() {
                    HamiltonianSelector::Phi(j)
                } else {
                    HamiltonianSelector::F(j)
                };
                let a = hamiltonian_value(&other, &k, &tol).unwrap();
                let b = hamiltonian_value(&other, &kt, &tol).unwrap();
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{sel:?} {j}");
            }
            let two = flow(&flow(&k, &sel, 0.6, &tol).unwrap(), &sel, 0.7, &tol).unwrap();
            assert!((two - kt).norm() < 1e-11 * k.norm());
        }
    }

    #[test]
    fn flows_of_the_two_families_commute_in_cartan_invariant() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let k = rand_k(&mut rng, 3);
        let phi = HamiltonianSelector::Phi(2);
        let kt = flow_xi(&k, &phi, 0.9, &tol).unwrap();
        let direct = cartan_invariant_flow(&k, &phi, 0.9, &tol).unwrap();
        assert!((&kt * kt.adjoint() - &direct).norm() < 1e-10 * direct.norm());
    }

    #[test]
    fn long_flow_is_chunked() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let k = rand_k(&mut rng, 2);
        let phi = HamiltonianSelector::Phi(1);
        let kt = flow_xi(&k, &phi, 8.0, &tol).unwrap();
        let a = hamiltonian_value(&phi, &k, &tol).unwrap();
        let b = hamiltonian_value(&phi, &kt, &tol).unwrap();
        assert!((a - b).abs() < 1e-9);
        let direct = cartan_invariant_flow(&k, &phi, 8.0, &tol).unwrap();
        assert!((&kt * kt.adjoint() - &direct).norm() < 1e-8 * direct.norm());
    }
}
