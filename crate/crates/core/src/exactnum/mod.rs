//! Exact arithmetic over Q(sqrt 2), the LaTeX notation used for exact
//! coordinates, and the exact-or-approximate [`Scalar`] carried by geometry.

mod latex;
mod scalar;
mod value;

pub use latex::{format_latex, parse_latex, LatexError};
pub use scalar::{parse_scalar, Scalar, ScalarParseError};
pub use value::{ArithmeticError, ExactValue, Rational, SqrtError};

