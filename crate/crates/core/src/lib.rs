//! Canard solutions of singularly perturbed complex ODEs.
//!
//! Exact formal series, relief-guided integration along complex paths,
//! shooting for canard values and numerical checks of Stokes constants for
//! the Van der Pol and Brusselator equations.

pub mod exact_algebra;

pub use exact_algebra::{
    AlgebraError, DensePolynomial, ExactRational, PoleRationalFunction, TruncatedBiSeries, TruncatedSeries,
};
pub mod formal_canard;
pub mod scalar;
pub mod relief;
pub mod complex_ode;
pub mod shooter;
pub mod inner_stokes;
pub mod asymptotics;
pub mod report;
