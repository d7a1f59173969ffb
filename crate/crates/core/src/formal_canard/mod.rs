//! Formal canard series: the Van der Pol recurrence and the generic
//! construction for equations linear in the parameter.

mod normal_form;
mod vdp;

pub use normal_form::{brusselator_normal_form, canard_formal, formal_residual, vdp_normal_form, CanardFormalSolution, NormalFormProblem};
pub use vdp::{vdp_bn, vdp_bn_with_precision, vdp_series, vdp_theoretical_constant, VdpSeries, DEFAULT_BN_BITS};

use thiserror::Error;

use crate::exact_algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("requested {digits} digits exceeds what {bits}-bit working precision supports")]
    InsufficientPrecision { digits: u32, bits: u32 },
    #[error("index {n} outside 1..={max}")]
    IndexOutOfRange { n: usize, max: usize },
    #[error("Q(0,0,0) vanishes")]
    DegenerateQ,
    #[error("f(0) vanishes")]
    DegenerateF,
    #[error("x-order {given} too small, need {needed}")]
    InsufficientXOrder { needed: usize, given: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
