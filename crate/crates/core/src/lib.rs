// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Symplectic reduction of the Heisenberg double of U(n) to the
//! trigonometric Ruijsenaars-Schneider system and its action-angle dual.

pub mod double;
pub mod dual;
pub mod duality;
pub mod error;
pub mod flows;
pub mod linalg;
pub mod points;
pub mod reduction;
pub mod rs_model;
pub mod tolerance;
pub mod verify;

pub use double::HamiltonianSelector;
pub use duality::{DualityResult, Residuals};
pub use error::{Error, Result};
pub use linalg::{BElement, CMat, RMat, Unitary, C64};
pub use points::{Coupling, PointP, PointPhat, PointPhatC};
pub use tolerance::ToleranceConfig;
pub use verify::{CheckRecord, VerificationReport};
