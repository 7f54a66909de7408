// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! The verification suites. Each trial draws its own samples from a stream
//! determined by `(seed, n, x index, trial)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::double::{
    dress, moment, omega_plus, poisson_plus, quasi_adjoint, unreduced_lax, HamiltonianSelector,
    TangentVector,
};
use crate::dual::{
    ihat, k_x, kappa_l, kappa_r, theta, theta_hat, xi_vec, zeta, zeta_hat, zx_embed,
};
use crate::duality::{
    completed_flow_reduced, dual_flow_spectral, dual_flow_spectral_lax, duality_forward,
    duality_forward_completed, duality_inverse, duality_inverse_completed, original_flow_reduced,
    pi_hat, point_distance,
};
use crate::error::{Error, Result};
use crate::flows::{flow, flow_lambda};
use crate::linalg::{
    cartan_modified, complex_spectrum, diag_r, herm_spectrum, iwasawa_left, iwasawa_right,
    unitary_deviation, unitary_eig, CMat, RMat, C64,
};
use crate::points::{Coupling, PointP, PointPhatC};
use crate::reduction::{
    constraint_residual, itilde, itilde_entrywise, moment_rank, reduce_to_slice, residual_gauge,
};
use crate::rs_model::{angle_diff, canonicalize, ham_rs, lax_dual, lax_rs, sn_act};
use crate::tolerance::ToleranceConfig;
use crate::verify::ode::{ode_oracle, reduced_hamiltonian_p, reduced_hamiltonian_phat};
use crate::verify::pullback::{pullback_check, PullbackMap, SourcePoint};
use crate::verify::report::{CheckRecord, TrialId};
use crate::verify::sampling::{
    random_b, random_closed_chamber, random_double_point, random_point_p, random_point_phat,
    random_point_phatc, random_unitary,
};

/// Factor recovery and reconstruction bound for the factorizations.
pub const FACTOR_TOL: f64 = 1e-11;
/// Bound for exact algebraic identities of the double.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Bound on `|{H_i, H_j}₊|`.
pub const INVOLUTION_TOL: f64 = 1e-8;
/// Drift bound for spectral invariants along exact flows.
pub const CONSERVATION_TOL: f64 = 1e-10;
/// Bound for the group property and commutation of flows.
pub const FLOW_COMPOSITION_TOL: f64 = 1e-9;
/// Mutual bound for the three routes to the dual flow.
pub const SPECTRAL_ROUTE_TOL: f64 = 1e-8;
/// Bound between ODE trajectories and exact reduced flows.
pub const ODE_TOL: f64 = 1e-6;
/// Samples of the dual ODE comparison on `[0, 1]`.
const DUAL_ODE_STEPS: usize = 40;
/// Smallest distance to a chamber face kept in the dual ODE comparison.
const WALL_MARGIN: f64 = 0.02;
/// Relative bound for symplectic pullbacks through Iwasawa maps.
pub const PULLBACK_TOL: f64 = 1e-5;
/// Relative bound for the coordinate pullback of `Z_x`.
pub const PULLBACK_ZX_TOL: f64 = 1e-6;
/// Relative bound on `Jᵀ Ω̂ J - Ω` for the duality map.
pub const SYMPLECTO_TOL: f64 = 1e-4;
/// Bound on spectral identities of Lax matrices.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// `|z_j(t)|` that counts as having left a boundary face.
pub const EXIT_THRESHOLD: f64 = 1e-6;
/// Time at which boundary exit is tested.
pub const EXIT_TIME: f64 = 0.1;
/// Smallest relative distance `‖h ▷ K - K‖ / ‖K‖` counted as a free action.
pub const FREENESS_THRESHOLD: f64 = 1e-6;

/// Check ids emitted by each suite; every identity belongs to exactly one suite.
pub const REGISTRY: &[(&str, &[&str])] = &[
    (
        "factorizations",
        &[
            "iwasawa-left-round-trip",
            "iwasawa-right-round-trip",
            "cartan-vs-svd",
            "cartan-reconstruction",
            "factor-invariants",
        ],
    ),
    (
        "double-structure",
        &[
            "moment-equivariance",
            "moment-det",
            "omega-antisymmetry",
            "omega-bilinearity",
            "poisson-self",
            "central-triviality",
            "involution-f",
            "involution-phi",
        ],
    ),
    (
        "flows",
        &[
            "conservation-lambda",
            "conservation-xi",
            "group-property",
            "family-commutation",
            "dual-spectral-routes",
            "reduced-flow-ode",
            "dual-flow-ode",
        ],
    ),
    (
        "slice-original",
        &[
            "itilde-constraint",
            "itilde-entrywise",
            "slice-lax-spectrum",
            "lax-rs-positive",
            "lax-dual-unimodular",
            "sn-equivariance",
            "gauge-freeness",
            "slice-round-trip",
        ],
    ),
    (
        "slice-dual",
        &[
            "theta-orthogonality",
            "theta-inversion",
            "structure-orthogonality",
            "hat-unitarity",
            "theta-conjugation",
            "xi-magnitudes",
            "kx-constraint",
            "ihat-constraint",
            "kx-pi-hat",
            "chamber-confinement",
        ],
    ),
    (
        "duality",
        &[
            "duality-exchange",
            "round-trip-forward",
            "round-trip-inverse",
            "pi-hat-gauge-invariance",
            "hamiltonian-exchange",
            "symplectomorphism",
            "completed-boundary-recovery",
            "completion-exit",
        ],
    ),
    (
        "symplectic-pullbacks",
        &[
            "pullback-itilde",
            "pullback-ihat",
            "pullback-kx",
            "pullback-zx",
        ],
    ),
    ("appendix-a", &["moment-rank"]),
];

/// Names of all suites in registry order.
pub fn suite_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|(s, _)| *s)
}

/// Runs one trial of a suite.
pub(crate) fn run_trial(
    suite: &str,
    id: TrialId,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckRecord>> {
    let x = Coupling::new(id.x)?;
    let n = id.n;
    Ok(match suite {
        "factorizations" => factorizations(id, n, rng, tol),
        "double-structure" => double_structure(id, n, rng, tol),
        "flows" => flows(id, n, x, rng, tol),
        "slice-original" => slice_original(id, n, x, rng, tol),
        "slice-dual" => slice_dual(id, n, x, rng, tol),
        "duality" => duality(id, n, x, rng, tol),
        "symplectic-pullbacks" => pullbacks(id, n, x, rng, tol),
        "appendix-a" => appendix_a(id, n, x, rng, tol),
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn orth_dev(m: &RMat) -> f64 {
    (m.transpose() * m - RMat::identity(m.nrows(), m.nrows())).norm()
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Largest circular distance between two equally long angle lists after sorting.
fn angle_set_diff(a: &[f64], b: &[f64]) -> f64 {
    let ea: Vec<C64> = a.iter().map(|t| C64::from_polar(1.0, *t)).collect();
    b.iter()
        .map(|t| {
            let e = C64::from_polar(1.0, *t);
            ea.iter()
                .map(|u| (u - e).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn factorizations(
    id: TrialId,
    n: usize,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let b = random_b(n, rng);
    let u = random_unitary(n, rng);
    let mut out = Vec::new();
    out.push(
        id.record(
            "iwasawa-left-round-trip",
            iwasawa_left(&(&b * u.adjoint()), tol)
                .map(|(bl, gr)| rel(bl.matrix(), &b).max((gr.matrix() - &u).norm())),
            FACTOR_TOL,
        ),
    );
    let binv = crate::linalg::upper_triangular_inverse(&b);
    out.push(
        id.record(
            "iwasawa-right-round-trip",
            iwasawa_right(&(&u * &binv), tol)
                .map(|(gl, br)| rel(br.matrix(), &b).max((gl.matrix() - &u).norm())),
            FACTOR_TOL,
        ),
    );
    let k = random_double_point(n, rng);
    let cartan = cartan_modified(&k, tol);
    out.push(id.record(
        "cartan-vs-svd",
        cartan.as_ref().map_err(Clone::clone).map(|c| {
            // Singular values from the spectrum of the Hermitian dilation [[0, K], [K†, 0]].
            let mut dil = CMat::zeros(2 * n, 2 * n);
            dil.view_mut((0, n), (n, n)).copy_from(&k);
            dil.view_mut((n, 0), (n, n)).copy_from(&k.adjoint());
            let sv: Vec<f64> = herm_spectrum(&dil).into_iter().take(n).collect();
            let ours = sorted_desc(c.p_hat.iter().map(|p| (-p).exp()).collect());
            max_diff(&ours, &sv) / sv[0]
        }),
        FACTOR_TOL,
    ));
    out.push(id.record(
        "cartan-reconstruction",
        cartan.as_ref().map_err(Clone::clone).and_then(|c| {
            let e = diag_r(&c.p_hat.iter().map(|p| (-p).exp()).collect::<Vec<_>>());
            Ok(rel(
                &quasi_adjoint(c.k_l.matrix(), &(e * c.k_r.matrix().adjoint()), tol)?,
                &k,
            ))
        }),
        FACTOR_TOL,
    ));
    out.push(id.record(
        "factor-invariants",
        (|| {
            let (bl, gr) = iwasawa_left(&k, tol)?;
            let (gl, br) = iwasawa_right(&k, tol)?;
            let c = cartan.clone()?;
            let mut dev = [gr.matrix(), gl.matrix(), c.k_l.matrix(), c.k_r.matrix()]
                .iter()
                .map(|m| unitary_deviation(m))
                .fold(0.0, f64::max)
                / n as f64;
            for m in [bl.matrix(), br.matrix()] {
                for i in 0..n {
                    if m[(i, i)].im != 0.0
                        || m[(i, i)].re <= 0.0
                        || (0..i).any(|j| m[(i, j)] != C64::new(0.0, 0.0))
                    {
                        dev = f64::INFINITY;
                    }
                }
            }
            if c.p_hat.windows(2).any(|w| w[0] < w[1]) {
                dev = f64::INFINITY;
            }
            Ok(dev)
        })(),
        tol.unitarity,
    ));
    out
}

fn f_family(n: usize) -> Vec<HamiltonianSelector> {
    (1..=n as i32)
        .map(HamiltonianSelector::F)
        .chain([HamiltonianSelector::F(-1)])
        .collect()
}

fn phi_family(n: usize) -> Vec<HamiltonianSelector> {
    (1..=n as i32)
        .flat_map(|k| [HamiltonianSelector::Phi(k), HamiltonianSelector::Phi(-k)])
        .collect()
}

fn involution(
    id: TrialId,
    check: &str,
    family: &[HamiltonianSelector],
    k: &CMat,
    tol: &ToleranceConfig,
) -> CheckRecord {
    let r = (|| {
        let mut worst: f64 = 0.0;
        for (i, a) in family.iter().enumerate() {
            for b in &family[i + 1..] {
                worst = worst.max(poisson_plus(a, b, k, tol)?.abs());
            }
        }
        Ok(worst)
    })();
    id.record(check, r, INVOLUTION_TOL)
}

fn double_structure(
    id: TrialId,
    n: usize,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let k = random_double_point(n, rng);
    let g = random_unitary(n, rng);
    let mut out = Vec::new();
    out.push(id.record(
        "moment-equivariance",
        (|| {
            let lam = moment(&k, tol)?;
            Ok(rel(
                &moment(&quasi_adjoint(&g, &k, tol)?, tol)?,
                &dress(&g, &lam, tol)?,
            ))
        })(),
        STRUCTURE_TOL,
    ));
    out.push(id.record(
        "moment-det",
        moment(&k, tol).map(|l| (l.determinant() - C64::new(1.0, 0.0)).norm()),
        STRUCTURE_TOL,
    ));
    let dirs: Vec<CMat> = (0..3)
        .map(|_| crate::verify::sampling::gaussian_matrix(n, rng))
        .collect();
    let tv = |d: &CMat| TangentVector::new(k.clone(), d.clone());
    let scale = |a: &CMat, b: &CMat| a.norm() * b.norm();
    out.push(id.record(
        "omega-antisymmetry",
        (|| {
            let a = omega_plus(&tv(&dirs[0]), &tv(&dirs[1]), tol)?;
            let b = omega_plus(&tv(&dirs[1]), &tv(&dirs[0]), tol)?;
            let c = omega_plus(&tv(&dirs[0]), &tv(&dirs[0]), tol)?;
            Ok(((a + b).abs() + c.abs()) / scale(&dirs[0], &dirs[1]))
        })(),
        STRUCTURE_TOL,
    ));
    let (ca, cb) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    out.push(id.record(
        "omega-bilinearity",
        (|| {
            let mix = &dirs[1] * C64::new(ca, 0.0) + &dirs[2] * C64::new(cb, 0.0);
            let lhs = omega_plus(&tv(&dirs[0]), &tv(&mix), tol)?;
            let rhs = ca * omega_plus(&tv(&dirs[0]), &tv(&dirs[1]), tol)?
                + cb * omega_plus(&tv(&dirs[0]), &tv(&dirs[2]), tol)?;
            Ok((lhs - rhs).abs()
                / (dirs[0].norm() * (ca.abs() * dirs[1].norm() + cb.abs() * dirs[2].norm())))
        })(),
        tol.fd,
    ));
    out.push(id.record(
        "poisson-self",
        (|| {
            let mut worst: f64 = 0.0;
            for s in [
                HamiltonianSelector::F(1),
                HamiltonianSelector::Phi(1),
                HamiltonianSelector::Phi(-1),
            ] {
                worst = worst.max(poisson_plus(&s, &s, &k, tol)?.abs());
            }
            Ok(worst)
        })(),
        STRUCTURE_TOL,
    ));
    let alpha = rng.gen_range(0.0..2.0 * PI);
    out.push(
        id.record(
            "central-triviality",
            quasi_adjoint(
                &(CMat::identity(n, n) * C64::from_polar(1.0, alpha)),
                &k,
                tol,
            )
            .map(|m| rel(&m, &k)),
            STRUCTURE_TOL,
        ),
    );
    out.push(involution(id, "involution-f", &f_family(n), &k, tol));
    out.push(involution(id, "involution-phi", &phi_family(n), &k, tol));
    out
}

fn random_xi_selector<R: Rng>(rng: &mut R) -> HamiltonianSelector {
    match rng.gen_range(0..4) {
        0 => HamiltonianSelector::Phi(1),
        1 => HamiltonianSelector::Phi(-1),
        2 => HamiltonianSelector::Phi(2),
        _ => HamiltonianSelector::Chi(vec![
            C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
        ]),
    }
}

fn flows(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let k = random_double_point(n, rng);
    let mut out = Vec::new();
    let t = rng.gen_range(-2.0..2.0);
    out.push(id.record(
        "conservation-lambda",
        (|| {
            let before = herm_spectrum(&unreduced_lax(&k, tol)?.0);
            let mut worst: f64 = 0.0;
            for gen in [1, 2, -1] {
                let after = herm_spectrum(&unreduced_lax(&flow_lambda(&k, gen, t, tol)?, tol)?.0);
                worst = worst.max(max_diff(&before, &after) / before[0]);
            }
            Ok(worst)
        })(),
        CONSERVATION_TOL,
    ));
    let sel = random_xi_selector(rng);
    out.push(id.record(
        "conservation-xi",
        (|| {
            let before = unitary_eig(iwasawa_left(&k, tol)?.1.matrix(), tol)?.0;
            let after =
                unitary_eig(iwasawa_left(&flow(&k, &sel, t, tol)?, tol)?.1.matrix(), tol)?.0;
            Ok(angle_set_diff(&before, &after))
        })(),
        CONSERVATION_TOL,
    ));
    let s = rng.gen_range(-2.0..2.0);
    out.push(id.record(
        "group-property",
        (|| {
            let mut worst: f64 = 0.0;
            for sel in [HamiltonianSelector::F(1), HamiltonianSelector::Phi(1)] {
                let two = flow(&flow(&k, &sel, t, tol)?, &sel, s, tol)?;
                worst = worst.max(rel(&two, &flow(&k, &sel, t + s, tol)?));
            }
            Ok(worst)
        })(),
        FLOW_COMPOSITION_TOL,
    ));
    out.push(id.record(
        "family-commutation",
        (|| {
            let mut worst: f64 = 0.0;
            for (a, b) in [
                (HamiltonianSelector::F(1), HamiltonianSelector::F(2)),
                (HamiltonianSelector::Phi(1), HamiltonianSelector::Phi(-2)),
            ] {
                let ab = flow(&flow(&k, &a, t, tol)?, &b, s, tol)?;
                let ba = flow(&flow(&k, &b, s, tol)?, &a, t, tol)?;
                worst = worst.max(rel(&ab, &ba));
            }
            Ok(worst)
        })(),
        FLOW_COMPOSITION_TOL,
    ));
    let d = random_point_phat(n, x, rng);
    let sel = random_xi_selector(rng);
    let tt = rng.gen_range(-1.0..1.0);
    out.push(id.record(
        "dual-spectral-routes",
        (|| {
            let i2 = dual_flow_spectral(&zx_embed(&d, x, tol)?, &sel, tt, x)?;
            let i4 = dual_flow_spectral_lax(&d, &sel, tt, x)?;
            let unreduced = pi_hat(&flow(&k_x(&d, x, tol)?, &sel, tt, tol)?, tol)?;
            Ok(max_diff(&i2, &i4)
                .max(max_diff(&i2, &unreduced))
                .max(max_diff(&i4, &unreduced)))
        })(),
        SPECTRAL_ROUTE_TOL,
    ));
    if n == 2 {
        let times: Vec<f64> = (0..=4).map(|i| i as f64 * 0.25).collect();
        let pt = random_point_p(n, rng);
        let sel = HamiltonianSelector::F(1);
        out.push(id.record(
            "reduced-flow-ode",
            (|| {
                let y0 = [pt.q.clone(), pt.p.clone()].concat();
                let traj = ode_oracle(&y0, &reduced_hamiltonian_p(&sel, x, tol), &times)?;
                let mut worst: f64 = 0.0;
                for (t, y) in times.iter().zip(&traj) {
                    let exact = original_flow_reduced(&pt, &sel, *t, x, tol)?;
                    let (ode, _) = canonicalize(&PointP {
                        q: y[..n].to_vec(),
                        p: y[n..].to_vec(),
                    });
                    worst = worst.max(point_distance(&exact, &ode));
                }
                Ok(worst)
            })(),
            ODE_TOL,
        ));
        let sel = HamiltonianSelector::Phi(1);
        out.push(id.record_with_note(
            "dual-flow-ode",
            (|| {
                // (q̂, p̂) stop being good coordinates where the flow meets a
                // chamber face, so the comparison ends before that.
                let mut grid = Vec::new();
                let mut exact = Vec::new();
                for i in 0..=DUAL_ODE_STEPS {
                    let t = i as f64 / DUAL_ODE_STEPS as f64;
                    let p = dual_flow_spectral_lax(&d, &sel, t, x)?;
                    if p.windows(2)
                        .any(|w| w[0] - w[1] - x.get().abs() / 2.0 < WALL_MARGIN)
                    {
                        break;
                    }
                    grid.push(t);
                    exact.push(p);
                }
                let note = (grid.len() <= DUAL_ODE_STEPS)
                    .then(|| format!("window ends at t = {}", grid.last().copied().unwrap_or(0.0)));
                if grid.len() < 2 {
                    return Ok((0.0, note));
                }
                let y0 = [d.q_hat.clone(), d.p_hat.clone()].concat();
                let traj = ode_oracle(&y0, &reduced_hamiltonian_phat(&sel, x, tol), &grid)?;
                Ok((
                    exact
                        .iter()
                        .zip(&traj)
                        .map(|(p, y)| max_diff(p, &y[n..]))
                        .fold(0.0, f64::max),
                    note,
                ))
            })(),
            ODE_TOL,
        ));
    }
    out
}

fn slice_original(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let pt = random_point_p(n, rng);
    let mut out = Vec::new();
    let k = itilde(&pt, x, tol);
    let kk = || k.clone();
    out.push(id.record(
        "itilde-constraint",
        kk().and_then(|k| constraint_residual(&k, x, tol)),
        tol.constraint,
    ));
    out.push(id.record(
        "itilde-entrywise",
        kk().and_then(|k| Ok(rel(&itilde_entrywise(&pt, x, tol)?, &k))),
        STRUCTURE_TOL,
    ));
    out.push(id.record(
        "slice-lax-spectrum",
        kk().and_then(|k| {
            let a = herm_spectrum(&unreduced_lax(&k, tol)?.0);
            let b = sorted_desc(
                complex_spectrum(&lax_rs(&pt, x, tol)?)
                    .iter()
                    .map(|z| z.re)
                    .collect(),
            );
            Ok(max_diff(&a, &b) / a[0])
        }),
        SPECTRAL_TOL,
    ));
    out.push(id.record(
        "lax-rs-positive",
        lax_rs(&pt, x, tol).map(|l| {
            let ev = complex_spectrum(&l);
            let radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
            ev.iter()
                .map(|z| {
                    if z.re > 0.0 {
                        z.im.abs() / radius
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
        }),
        SPECTRAL_TOL,
    ));
    let d = random_point_phat(n, x, rng);
    out.push(id.record(
        "lax-dual-unimodular",
        lax_dual(&d, x).map(|l| {
            complex_spectrum(&l)
                .iter()
                .map(|z| (z.norm() - 1.0).abs())
                .fold(0.0, f64::max)
        }),
        STRUCTURE_TOL,
    ));
    if n >= 2 {
        let j = rng.gen_range(0..n - 1);
        out.push(id.record(
            "sn-equivariance",
            kk().and_then(|k| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(j, j + 1);
                let moved = quasi_adjoint(&residual_gauge(j, &pt.q, x)?, &k, tol)?;
                Ok(rel(&moved, &itilde(&sn_act(&perm, &pt)?, x, tol)?))
            }),
            STRUCTURE_TOL,
        ));
        let h = random_unitary(n, rng);
        out.push(id.record(
            "gauge-freeness",
            kk().and_then(|k| Ok(FREENESS_THRESHOLD / rel(&quasi_adjoint(&h, &k, tol)?, &k))),
            1.0,
        ));
    }
    out.push(id.record(
        "slice-round-trip",
        kk().and_then(|k| {
            let mut h = CMat::identity(n, n);
            for j in 0..n.saturating_sub(1) {
                if rng.gen_bool(0.5) {
                    h = residual_gauge(j, &pt.q, x)? * h;
                    break;
                }
            }
            let (back, _) = reduce_to_slice(&quasi_adjoint(&h, &k, tol)?, x, tol)?;
            Ok(point_distance(&back, &canonicalize(&pt).0))
        }),
        tol.duality,
    ));
    out
}

/// `max(0, |x|/2 - min gap)` of `π̂(K)`.
fn chamber_excess(k: &CMat, x: Coupling, tol: &ToleranceConfig) -> Result<f64> {
    let p = pi_hat(k, tol)?;
    Ok(p.windows(2)
        .map(|w| x.get().abs() / 2.0 - (w[0] - w[1]))
        .fold(0.0, f64::max))
}

fn slice_dual(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let p = random_closed_chamber(n, x, rng);
    let mut out = Vec::new();
    let th = theta(x, &p, tol);
    out.push(id.record(
        "theta-orthogonality",
        th.clone().map(|t| orth_dev(&t)),
        STRUCTURE_TOL,
    ));
    out.push(
        id.record(
            "theta-inversion",
            th.clone()
                .and_then(|t| Ok((theta(x.negate(), &p, tol)? * t - RMat::identity(n, n)).norm())),
            STRUCTURE_TOL,
        ),
    );
    out.push(id.record(
        "structure-orthogonality",
        zeta(x, &p, tol).map(|z| {
            orth_dev(&z)
                .max(orth_dev(&kappa_l(x, n)))
                .max(orth_dev(&kappa_r(x, n)))
        }),
        STRUCTURE_TOL,
    ));
    let pc = random_point_phatc(n, x, true, rng, tol);
    out.push(id.record(
        "hat-unitarity",
        pc.clone().map(|pc| {
            unitary_deviation(&zeta_hat(x, &pc.z)).max(unitary_deviation(&theta_hat(x, &pc.z)))
        }),
        STRUCTURE_TOL,
    ));
    let xv = x.get();
    let e2 = diag_r(&p.iter().map(|v| (2.0 * v).exp()).collect::<Vec<_>>());
    let xi_outer = || -> Result<CMat> {
        let xi = xi_vec(x, &p, tol)?;
        Ok(CMat::from_fn(n, n, |i, j| C64::new(xi[i] * xi[j], 0.0)))
    };
    let rhs = || -> Result<CMat> {
        Ok(&e2 * C64::new((-xv / 2.0).exp(), 0.0)
            + xi_outer()? * C64::new(2.0 * (xv / 2.0).sinh(), 0.0))
    };
    out.push(id.record(
        "theta-conjugation",
        th.clone().and_then(|t| {
            let tc = crate::linalg::to_complex(&t);
            let lhs = &tc * &e2 * tc.transpose() * C64::new((xv / 2.0).exp(), 0.0);
            Ok(rel(&lhs, &rhs()?))
        }),
        SPECTRAL_TOL,
    ));
    out.push(id.record(
        "xi-magnitudes",
        rhs().map(|m| {
            let ev = herm_spectrum(&m);
            let expected: Vec<f64> = p.iter().map(|v| (2.0 * v + xv / 2.0).exp()).collect();
            max_diff(&ev, &expected) / expected[0]
        }),
        SPECTRAL_TOL,
    ));
    let d = random_point_phat(n, x, rng);
    let kx = k_x(&d, x, tol);
    out.push(id.record(
        "kx-constraint",
        kx.clone().and_then(|k| constraint_residual(&k, x, tol)),
        tol.constraint,
    ));
    let ih = pc.clone().and_then(|pc| ihat(&pc, x, tol));
    out.push(id.record(
        "ihat-constraint",
        ih.clone().and_then(|k| constraint_residual(&k, x, tol)),
        tol.constraint,
    ));
    out.push(
        id.record(
            "kx-pi-hat",
            kx.clone()
                .and_then(|k| Ok(max_diff(&pi_hat(&k, tol)?, &d.p_hat))),
            STRUCTURE_TOL,
        ),
    );
    out.push(id.record(
        "chamber-confinement",
        (|| {
            let pt = random_point_p(n, rng);
            let slice = itilde(&pt, x, tol)?;
            let flowed = flow(
                &slice,
                &HamiltonianSelector::Phi(1),
                rng.gen_range(-1.0..1.0),
                tol,
            )?;
            let mut worst: f64 = 0.0;
            for k in [slice, flowed, kx.clone()?, ih.clone()?] {
                worst = worst.max(chamber_excess(&k, x, tol)?);
            }
            Ok(worst)
        })(),
        tol.chamber,
    ));
    out
}

/// Finite-difference Jacobian of the forward duality map in coordinates
/// `(q, p) ↦ (q̂, p̂)`.
fn duality_jacobian(pt: &PointP, x: Coupling, tol: &ToleranceConfig) -> Result<RMat> {
    let n = pt.n();
    let base = duality_forward(pt, x, tol)?.target;
    let eval = |c: &[f64]| -> Result<Vec<f64>> {
        let d = duality_forward(
            &PointP {
                q: c[..n].to_vec(),
                p: c[n..].to_vec(),
            },
            x,
            tol,
        )?
        .target;
        let q: Vec<f64> = d
            .q_hat
            .iter()
            .zip(&base.q_hat)
            .map(|(a, b)| b + angle_diff(*a, *b, 2.0 * PI))
            .collect();
        Ok([q, d.p_hat].concat())
    };
    let y0: Vec<f64> = [pt.q.clone(), pt.p.clone()].concat();
    let h = tol.fd_step;
    let mut jac = RMat::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let at = |s: f64| {
            let mut c = y0.clone();
            c[col] += s;
            eval(&c)
        };
        let d1: Vec<f64> = at(h)?
            .iter()
            .zip(at(-h)?)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        let d2: Vec<f64> = at(h / 2.0)?
            .iter()
            .zip(at(-h / 2.0)?)
            .map(|(a, b)| (a - b) / h)
            .collect();
        for row in 0..2 * n {
            jac[(row, col)] = (4.0 * d2[row] - d1[row]) / 3.0;
        }
    }
    Ok(jac)
}

fn canonical_matrix(n: usize) -> RMat {
    // Ω(u, w) = uᵀ Ω w for Σ dp ∧ dq in coordinates (q, p).
    RMat::from_fn(2 * n, 2 * n, |i, j| {
        if i >= n && j == i - n {
            1.0
        } else if j >= n && i == j - n {
            -1.0
        } else {
            0.0
        }
    })
}

fn duality(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let pt = random_point_p(n, rng);
    let mut out = Vec::new();
    let fwd = duality_forward(&pt, x, tol);
    out.push(id.record(
        "duality-exchange",
        fwd.as_ref().map_err(Clone::clone).map(|r| {
            r.residuals
                .spectral_original
                .unwrap_or(f64::INFINITY)
                .max(r.residuals.spectral_dual.unwrap_or(f64::INFINITY))
        }),
        tol.duality,
    ));
    out.push(id.record(
        "round-trip-forward",
        fwd.as_ref().map_err(Clone::clone).and_then(|r| {
            Ok(point_distance(
                &duality_inverse(&r.target, x, tol)?.target,
                &pt,
            ))
        }),
        tol.duality,
    ));
    let d = random_point_phat(n, x, rng);
    out.push(id.record(
        "round-trip-inverse",
        (|| {
            let back = duality_forward(&duality_inverse(&d, x, tol)?.target, x, tol)?.target;
            let dq = back
                .q_hat
                .iter()
                .zip(&d.q_hat)
                .map(|(a, b)| angle_diff(*a, *b, 2.0 * PI).abs())
                .fold(0.0, f64::max);
            Ok(dq.max(max_diff(&back.p_hat, &d.p_hat)))
        })(),
        tol.duality,
    ));
    let h = random_unitary(n, rng);
    out.push(id.record(
        "pi-hat-gauge-invariance",
        (|| {
            let k = itilde(&pt, x, tol)?;
            Ok(max_diff(
                &pi_hat(&quasi_adjoint(&h, &k, tol)?, tol)?,
                &pi_hat(&k, tol)?,
            ))
        })(),
        STRUCTURE_TOL,
    ));
    out.push(id.record(
        "hamiltonian-exchange",
        (|| {
            let image = duality_inverse(&d, x, tol)?.target;
            let expected: f64 = d.p_hat.iter().map(|p| (2.0 * p).cosh()).sum();
            Ok((ham_rs(&image, x, tol)? - expected).abs() / expected)
        })(),
        SPECTRAL_TOL,
    ));
    out.push(id.record(
        "symplectomorphism",
        (|| {
            let j = duality_jacobian(&pt, x, tol)?;
            let om = canonical_matrix(n);
            Ok((j.transpose() * &om * &j - &om).norm() / om.norm())
        })(),
        SYMPLECTO_TOL,
    ));
    let pc = random_point_phatc(n, x, true, rng, tol);
    out.push(id.record(
        "completed-boundary-recovery",
        pc.clone().and_then(|pc| {
            let image = duality_inverse_completed(&pc, x, tol)?.target;
            let back = duality_forward_completed(&image, x, tol)?.target;
            Ok(back
                .z
                .iter()
                .zip(&pc.z)
                .map(|(a, b)| (a - b).norm())
                .fold((back.z_big - pc.z_big).norm(), f64::max))
        }),
        tol.completion,
    ));
    if n >= 2 {
        out.push(id.record_with_note(
            "completion-exit",
            pc.and_then(|pc| completion_exit(&pc, x, tol)),
            1.0,
        ));
    }
    out
}

/// Flows a boundary point for `EXIT_TIME` under `Phi(1)` and measures how far
/// the vanishing `z_j` moved: returns `EXIT_THRESHOLD / min |z_j(t)|`, or
/// infinity if the trajectory left the closed chamber.
pub fn completion_exit(
    pc: &PointPhatC,
    x: Coupling,
    tol: &ToleranceConfig,
) -> Result<(f64, Option<String>)> {
    let sel = HamiltonianSelector::Phi(1);
    let p = dual_flow_spectral(pc, &sel, EXIT_TIME, x)?;
    let moved = completed_flow_reduced(pc, &sel, EXIT_TIME, x, tol)?;
    let h = x.get().abs() / 2.0;
    if p.windows(2).any(|w| w[0] - w[1] < h - tol.chamber) {
        return Ok((f64::INFINITY, Some("left the closed chamber".into())));
    }
    let zeros: Vec<usize> = (0..pc.z.len()).filter(|&j| pc.z[j].norm() == 0.0).collect();
    let smallest = zeros
        .iter()
        .map(|&j| moved.z[j].norm())
        .fold(f64::INFINITY, f64::min);
    Ok((
        EXIT_THRESHOLD / smallest,
        Some(format!("min |z_j({EXIT_TIME})| = {smallest:.3e}")),
    ))
}

fn pullbacks(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let pairs = 2;
    let p = SourcePoint::P(random_point_p(n, rng));
    let d = SourcePoint::Phat(random_point_phat(n, x, rng));
    let boundary = rng.gen_bool(0.5);
    let c = random_point_phatc(n, x, boundary, rng, tol).map(SourcePoint::PhatC);
    vec![
        id.record(
            "pullback-itilde",
            pullback_check(PullbackMap::Itilde, &p, x, pairs, rng, tol).map(|r| r.residual),
            PULLBACK_TOL,
        ),
        id.record(
            "pullback-ihat",
            c.and_then(|c| pullback_check(PullbackMap::Ihat, &c, x, pairs, rng, tol))
                .map(|r| r.residual),
            PULLBACK_TOL,
        ),
        id.record(
            "pullback-kx",
            pullback_check(PullbackMap::Kx, &d, x, pairs, rng, tol).map(|r| r.residual),
            PULLBACK_TOL,
        ),
        id.record(
            "pullback-zx",
            pullback_check(PullbackMap::Zx, &d, x, pairs, rng, tol).map(|r| r.residual),
            PULLBACK_ZX_TOL,
        ),
    ]
}

fn appendix_a(
    id: TrialId,
    n: usize,
    x: Coupling,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Vec<CheckRecord> {
    let k = if rng.gen_bool(0.5) {
        itilde(&random_point_p(n, rng), x, tol)
    } else {
        k_x(&random_point_phat(n, x, rng), x, tol)
    };
    let r = k.and_then(|k| moment_rank(&k, tol)).map(|(rank, _)| {
        (
            (rank as f64 - (n * n - 1) as f64).abs(),
            Some(format!("rank {rank}")),
        )
    });
    vec![id.record_with_note("moment-rank", r, 0.0)]
}
