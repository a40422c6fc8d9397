//! Exact arithmetic: integer polynomials in `N`, rational functions of `N`
//! and fraction-free linear solving. Nothing here touches floating point.

mod linsolve;
mod poly;
mod ratfunc;

pub use linsolve::{determinant, solve_linear_system};
pub use poly::Polynomial;
pub use ratfunc::{ArithOp, AsymptoticOrder, RationalFunction};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("evaluation at a pole: factor ({factor}) vanishes at N = {at}")]
    Pole { factor: String, at: String },
    #[error("singular system")]
    SingularSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
