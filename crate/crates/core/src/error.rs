// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input matrix is singular or too ill-conditioned ({0})")]
    SingularInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("particle collision: {0}")]
    Collision(String),
    #[error("point outside the chamber: {0}")]
    ChamberViolation(String),
    #[error("negative radicand {0:e}")]
    NegativeRadicand(f64),
    #[error("point lies on the boundary of the chamber: {0}")]
    BoundaryPoint(String),
    #[error("moment map constraint violated (residual {0:e})")]
    ConstraintViolated(f64),
    #[error("gauge solve failed: {0}")]
    GaugeSolveFailed(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("exponent too large: {0}")]
    Overflow(String),
    #[error("integrator step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("unsupported Hamiltonian selector: {0}")]
    UnsupportedSelector(String),
    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
