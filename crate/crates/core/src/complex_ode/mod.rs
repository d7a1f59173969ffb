//! Adaptive integration of holomorphic ODEs along complex polylines.

mod field;
mod integrator;

pub use field::{Field, FieldKind, OdeField};
pub use integrator::{
    integrate_along_path, integrate_raw, order_convergence_probe, DenseKnot, IntegratorConfig, RawTrajectory,
    Trajectory,
};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("state came too close to zero near x = {at}")]
    PoleEncountered { at: Complex64 },
    #[error("step size underflow near x = {at}")]
    StepUnderflow { at: Complex64 },
    #[error("more than {steps} steps, stopped near x = {at}")]
    MaxStepsExceeded { steps: usize, at: Complex64 },
    #[error("initial value is not finite")]
    NonFiniteInitial,
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}
