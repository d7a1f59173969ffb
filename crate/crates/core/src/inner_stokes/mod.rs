//! Closed-form inner solutions near the col and their exponentially small
//! branch differences.

mod airy;
mod brusselator;
mod quad;
mod vdp;

pub use airy::{airy, airy_log_derivative, airy_origin_constants, airy_series, AiryBranch, SERIES_RADIUS};
pub use brusselator::{
    brusselator_identity_integral, brusselator_inner_j, brusselator_inner_j_quadrature, brusselator_inner_t,
    brusselator_inner_y0, brusselator_inner_y0_ode, brusselator_stokes_diff, brusselator_stokes_formula,
    BrusselatorBranch,
};
pub use quad::{integrate_polyline, integrate_segment};
pub use vdp::{vdp_inner_y0, vdp_inner_y0_ode, vdp_stokes_diff, vdp_stokes_formula, InnerSolutionVdp};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::complex_ode::OdeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InnerError {
    #[error("Newton iteration did not converge for X = {x}")]
    NewtonDivergence { x: Complex64 },
    #[error("Newton reached a zero of Y0 (pole of the Airy quotient) for X = {x}")]
    ZeroOfY0 { x: Complex64 },
    #[error("argument {v} lies outside the sector of the requested branch")]
    SectorViolation { v: Complex64 },
    #[error("difference {diff:e} is below the resolution of {digits} digits")]
    PrecisionLoss { diff: f64, digits: u32 },
    #[error("X must be a finite positive real, got {0}")]
    BadArgument(f64),
    #[error("cross-check integration failed: {0}")]
    Ode(#[from] OdeError),
}

/// Two-branch difference Y₀⁺ − Y₀⁻ at a real point, with the leading
/// asymptotic formula for comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StokesDiff {
    pub x: f64,
    pub diff: Complex64,
    /// Imaginary coefficient of the leading formula.
    pub formula: f64,
    /// ℑ(diff) / formula
    pub ratio: f64,
    /// True when the difference would be unresolvable in double precision.
    pub precision_loss: bool,
    /// Working digits used for the evaluation.
    pub digits: u32,
}

impl StokesDiff {
    fn new(x: f64, diff: Complex64, formula: f64, magnitude: f64, digits: u32) -> Self {
        StokesDiff {
            x,
            diff,
            formula,
            ratio: diff.im / formula,
            precision_loss: diff.norm() < 1e3 * f64::EPSILON * magnitude,
            digits,
        }
    }
}

/// Validates X ∈ (0, ∞).
fn positive(x: f64) -> Result<(), InnerError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(InnerError::BadArgument(x))
    }
}
