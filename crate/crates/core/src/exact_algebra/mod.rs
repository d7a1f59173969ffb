//! Exact rational, polynomial, pole-form rational function and truncated series arithmetic.

mod polynomial;
mod ratfunc;
mod rational;
mod series;

pub use polynomial::DensePolynomial;
pub use ratfunc::PoleRationalFunction;
pub use rational::ExactRational;
pub use series::{TruncatedBiSeries, TruncatedSeries};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division left a nonzero remainder {remainder}")]
    NonzeroRemainder { remainder: ExactRational },
    #[error("pole locations differ: {left} vs {right}")]
    PoleMismatch { left: ExactRational, right: ExactRational },
    #[error("evaluation at the pole u = {0}")]
    EvalAtPole(ExactRational),
    #[error("series divisor has a zero constant term")]
    ZeroConstantTerm,
    #[error("coefficient of x^{index} must vanish before dividing by x^p")]
    NonzeroLowOrder { index: usize },
    #[error("truncation order exhausted")]
    OrderExhausted,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}
