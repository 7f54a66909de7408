// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Independent integration of Hamilton's equations on reduced coordinates.

use std::cell::RefCell;

use ode_solvers::{DVector, Dop853, OutputType, System};

use crate::double::{hamiltonian_value, HamiltonianSelector};
use crate::dual::k_x;
use crate::error::{Error, Result};
use crate::points::{Coupling, PointP, PointPhat};
use crate::reduction::itilde;
use crate::tolerance::ToleranceConfig;

/// Step of the fourth-order central difference used for gradients.
const GRAD_STEP: f64 = 2e-4;
const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-12;

struct Canonical<'a, H> {
    ham: &'a H,
    err: &'a RefCell<Option<Error>>,
}

impl<H: Fn(&[f64]) -> Result<f64>> Canonical<'_, H> {
    fn partial(&self, y: &[f64], i: usize) -> Result<f64> {
        let mut z = y.to_vec();
        let mut at = |s: f64| {
            z[i] = y[i] + s;
            (self.ham)(&z)
        };
        let h = GRAD_STEP;
        Ok((8.0 * (at(h)? - at(-h)?) - (at(2.0 * h)? - at(-2.0 * h)?)) / (12.0 * h))
    }
}

impl<H: Fn(&[f64]) -> Result<f64>> System<f64, DVector<f64>> for Canonical<'_, H> {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let n = y.len() / 2;
        let ys = y.as_slice();
        for j in 0..n {
            match (self.partial(ys, n + j), self.partial(ys, j)) {
                (Ok(dp), Ok(dq)) => {
                    dy[j] = dp;
                    dy[n + j] = -dq;
                }
                (Err(e), _) | (_, Err(e)) => {
                    self.err.borrow_mut().get_or_insert(e);
                    dy.fill(0.0);
                    return;
                }
            }
        }
    }
}

/// Integrates `q̇ = ∂H/∂p`, `ṗ = -∂H/∂q` (the flow of `H` for `Σ dp ∧ dq`)
/// from `y0 = (q, p)` and returns the state at each time of `times`, which
/// must start at 0 and be monotone.
pub fn ode_oracle<H>(y0: &[f64], ham: &H, times: &[f64]) -> Result<Vec<Vec<f64>>>
where
    H: Fn(&[f64]) -> Result<f64>,
{
    if !y0.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch("state must hold (q, p)".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut y = DVector::from_column_slice(y0);
    let mut t = 0.0;
    for &target in times {
        if target != t {
            let err = RefCell::new(None);
            let sys = Canonical { ham, err: &err };
            let mut stepper = Dop853::new(sys, t, target, target - t, y.clone(), RTOL, ATOL);
            stepper.set_output(OutputType::Sparse);
            let res = stepper.integrate();
            let last = stepper.y_out().last().cloned();
            drop(stepper);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            res.map_err(|_| Error::StepUnderflow(t))?;
            y = last.ok_or(Error::StepUnderflow(t))?;
            t = target;
        }
        out.push(y.as_slice().to_vec());
    }
    Ok(out)
}

/// `H ∘ Ĩ` in coordinates `(q, p)`.
pub fn reduced_hamiltonian_p<'a>(
    sel: &'a HamiltonianSelector,
    x: Coupling,
    tol: &'a ToleranceConfig,
) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |y: &[f64]| {
        let n = y.len() / 2;
        let pt = PointP {
            q: y[..n].to_vec(),
            p: y[n..].to_vec(),
        };
        hamiltonian_value(sel, &itilde(&pt, x, tol)?, tol)
    }
}

/// `H ∘ k_x` in coordinates `(q̂, p̂)`.
pub fn reduced_hamiltonian_phat<'a>(
    sel: &'a HamiltonianSelector,
    x: Coupling,
    tol: &'a ToleranceConfig,
) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |y: &[f64]| {
        let n = y.len() / 2;
        let pt = PointPhat {
            q_hat: y[..n].to_vec(),
            p_hat: y[n..].to_vec(),
        };
        hamiltonian_value(sel, &k_x(&pt, x, tol)?, tol)
    }
}
