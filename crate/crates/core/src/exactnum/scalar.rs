use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::latex::parse_latex;
use super::value::{ArithmeticError, ExactValue};

/// A coordinate that is either exact or a binary64 approximation.
///
/// Any operation with an `Approx` operand produces `Approx`.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(ExactValue),
    Approx(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{input}` is neither an exact LaTeX value nor a decimal literal")]
pub struct ScalarParseError {
    pub input: String,
    /// The LaTeX parser's complaint, kept for diagnostics.
    pub latex: super::LatexError,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactValue::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactValue> {
        match self {
            Scalar::Exact(v) => Some(v),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(v) => v.to_f64(),
            Scalar::Approx(x) => *x,
        }
    }

    /// Sign with a dead band of `tol` for approximate values.
    pub fn signum_tol(&self, tol: f64) -> i8 {
        match self {
            Scalar::Exact(v) => v.signum(),
            Scalar::Approx(x) if x.abs() <= tol => 0,
            Scalar::Approx(x) if *x > 0.0 => 1,
            Scalar::Approx(_) => -1,
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ArithmeticError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.checked_div(b).map(Scalar::Exact),
            _ => {
                let d = rhs.to_f64();
                if d == 0.0 {
                    Err(ArithmeticError::DivisionByZero)
                } else {
                    Ok(Scalar::Approx(self.to_f64() / d))
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(v) => Scalar::Exact(v.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    /// Square root, exact when the root lies in Q(sqrt 2).
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(v) => match v.exact_sqrt() {
                Ok(Some(r)) => Scalar::Exact(r),
                _ => Scalar::Approx(v.to_f64().max(0.0).sqrt()),
            },
            Scalar::Approx(x) => Scalar::Approx(x.max(0.0).sqrt()),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(v) => write!(f, "Exact({v})"),
            Scalar::Approx(x) => write!(f, "Approx({x:?})"),
        }
    }
}

/// Exact values print as canonical LaTeX; approximate ones as the shortest
/// round-tripping decimal, always with a `.` or exponent so they re-parse as
/// approximate.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(v) => write!(f, "{v}"),
            Scalar::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

impl From<ExactValue> for Scalar {
    fn from(v: ExactValue) -> Self {
        Scalar::Exact(v)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Approx(x)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Exact(ExactValue::from_integer(v))
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$m(b)),
                    _ => Scalar::Approx(self.to_f64().$m(rhs.to_f64())),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(v) => Scalar::Exact(-v),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Parses a coordinate string: exact LaTeX first, then a plain decimal that
/// carries a decimal point or exponent.
pub fn parse_scalar(s: &str) -> Result<Scalar, ScalarParseError> {
    let latex = match parse_latex(s) {
        Ok(v) => return Ok(Scalar::Exact(v)),
        Err(e) => e,
    };
    let t = s.trim();
    let decimal_shaped = !t.contains('\\') && t.contains(['.', 'e', 'E']);
    if decimal_shaped {
        if let Ok(x) = t.parse::<f64>() {
            if x.is_finite() {
                return Ok(Scalar::Approx(x));
            }
        }
    }
    Err(ScalarParseError {
        input: s.to_owned(),
        latex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_parsing() {
        assert_eq!(parse_scalar("0.7071").unwrap(), Scalar::Approx(0.7071));
        assert_eq!(parse_scalar("\\sqrt{2}").unwrap(), Scalar::Exact(ExactValue::sqrt2()));
        assert!(parse_scalar("abc").is_err());
        assert_eq!(parse_scalar("3").unwrap(), Scalar::Exact(ExactValue::from_integer(3)));
        assert_eq!(parse_scalar("-2.5e-3").unwrap(), Scalar::Approx(-2.5e-3));
        assert!(parse_scalar("1.5\\sqrt{2}").is_err());
        assert!(parse_scalar("NaN").is_err());
    }

    #[test]
    fn approx_is_contagious() {
        let a = Scalar::Exact(ExactValue::sqrt2());
        let b = Scalar::Approx(1.0);
        assert!(!(&a + &b).is_exact());
        assert!(!(&b * &a).is_exact());
        assert!((&a * &a).is_exact());
    }

    #[test]
    fn approx_display_reparses_as_approx() {
        for x in [3.0, 0.1, -1e-7, 123456789.0] {
            let s = Scalar::Approx(x).to_string();
            assert_eq!(parse_scalar(&s).unwrap(), Scalar::Approx(x), "{s}");
        }
    }
}
