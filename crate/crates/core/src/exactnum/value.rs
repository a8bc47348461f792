use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Low word of the double-double expansion of sqrt(2): `SQRT_2 + SQRT2_LO`
/// is accurate to ~2^-106.
const SQRT2_LO: f64 = -9.667_293_313_452_913e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SqrtError {
    #[error("square root of a negative value")]
    Negative,
}

/// An element `rat + rad * sqrt(2)` of the field Q(sqrt 2).
///
/// Both coefficients are canonical rationals, so structural equality is
/// numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactValue {
    rat: Rational,
    rad: Rational,
}

impl Default for ExactValue {
    fn default() -> Self {
        Self::zero()
    }
}

impl ExactValue {
    pub fn new(rat: Rational, rad: Rational) -> Self {
        Self { rat, rad }
    }

    pub fn zero() -> Self {
        Self {
            rat: Rational::zero(),
            rad: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn sqrt2() -> Self {
        Self {
            rat: Rational::zero(),
            rad: Rational::one(),
        }
    }

    /// `sqrt(2) / 2`, the sine and cosine of 45 degrees.
    pub fn half_sqrt2() -> Self {
        Self::from_parts((0, 1), (1, 2))
    }

    pub fn from_integer(v: i64) -> Self {
        Self {
            rat: Rational::from_integer(BigInt::from(v)),
            rad: Rational::zero(),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self {
            rat: r,
            rad: Rational::zero(),
        }
    }

    /// Builds `n1/d1 + (n2/d2) sqrt(2)` from small integer parts.
    ///
    /// Panics if either denominator is zero.
    pub fn from_parts(rat: (i64, i64), rad: (i64, i64)) -> Self {
        Self {
            rat: Rational::new(BigInt::from(rat.0), BigInt::from(rat.1)),
            rad: Rational::new(BigInt::from(rad.0), BigInt::from(rad.1)),
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rat
    }

    pub fn radical_part(&self) -> &Rational {
        &self.rad
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    /// `rat - rad sqrt(2)`.
    pub fn conjugate(&self) -> Self {
        Self {
            rat: self.rat.clone(),
            rad: -self.rad.clone(),
        }
    }

    /// Field norm `rat^2 - 2 rad^2`; zero only for zero.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - Rational::from_integer(BigInt::from(2)) * &self.rad * &self.rad
    }

    /// Exact sign of the real number this value denotes.
    pub fn signum(&self) -> i8 {
        let sp = rational_sign(&self.rat);
        let sq = rational_sign(&self.rad);
        if sp >= 0 && sq >= 0 {
            return if sp == 0 && sq == 0 { 0 } else { 1 };
        }
        if sp <= 0 && sq <= 0 {
            return -1;
        }
        // Opposite signs: the larger of p^2 and 2q^2 wins.
        let p2 = &self.rat * &self.rat;
        let q2 = Rational::from_integer(BigInt::from(2)) * &self.rad * &self.rad;
        match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithmeticError> {
        let n = rhs.norm();
        if n.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        let num = self * &rhs.conjugate();
        Ok(Self {
            rat: num.rat / &n,
            rad: num.rad / n,
        })
    }

    pub fn recip(&self) -> Result<Self, ArithmeticError> {
        Self::one().checked_div(self)
    }

    /// Square root inside Q(sqrt 2), if one exists.
    ///
    /// Solves `u^2 + 2v^2 = p`, `2uv = q`; `u^2` is a root of
    /// `t^2 - p t + q^2/2`, so the discriminant `p^2 - 2q^2` and the chosen
    /// root must both be rational squares.
    pub fn exact_sqrt(&self) -> Result<Option<Self>, SqrtError> {
        match self.signum() {
            -1 => return Err(SqrtError::Negative),
            0 => return Ok(Some(Self::zero())),
            _ => {}
        }
        let two = Rational::from_integer(BigInt::from(2));
        if self.rad.is_zero() {
            if let Some(u) = rational_sqrt(&self.rat) {
                return Ok(Some(Self::from_rational(u)));
            }
            if let Some(v) = rational_sqrt(&(&self.rat / &two)) {
                return Ok(Some(Self {
                    rat: Rational::zero(),
                    rad: v,
                }));
            }
            return Ok(None);
        }
        let disc = self.norm();
        let Some(d) = rational_sqrt(&disc) else {
            return Ok(None);
        };
        for t in [(&self.rat + &d) / &two, (&self.rat - &d) / &two] {
            if !t.is_positive() {
                continue;
            }
            if let Some(u) = rational_sqrt(&t) {
                let v = &self.rad / (&two * &u);
                let mut root = Self { rat: u, rad: v };
                if root.signum() < 0 {
                    root = -root;
                }
                debug_assert_eq!(&root * &root, *self);
                return Ok(Some(root));
            }
        }
        Ok(None)
    }

    /// Nearest binary64, accurate to within two units in the last place.
    pub fn to_f64(&self) -> f64 {
        let sp = rational_sign(&self.rat);
        let sq = rational_sign(&self.rad);
        if sq == 0 {
            return rational_to_f64(&self.rat);
        }
        if sp == 0 || sp == sq {
            let p = rational_to_f64(&self.rat);
            let q = rational_to_f64(&self.rad);
            let hi = q * std::f64::consts::SQRT_2;
            let lo = q.mul_add(std::f64::consts::SQRT_2, -hi) + q * SQRT2_LO;
            return p + (hi + lo);
        }
        self.to_f64_cancelling()
    }

    /// Fixed-point evaluation for the cancelling case: `floor(x 2^k)` is
    /// computed to within 2 units, with `k` grown until the integer carries
    /// well over 53 significant bits.
    fn to_f64_cancelling(&self) -> f64 {
        let estimate = {
            let n = rational_to_f64(&self.norm()).abs();
            let d = (rational_to_f64(&self.rat) - rational_to_f64(&self.rad) * std::f64::consts::SQRT_2).abs();
            n / d
        };
        let mut k: i64 = if estimate.is_finite() && estimate > 0.0 {
            72 - estimate.log2().floor() as i64
        } else {
            128
        };
        k = k.max(64);
        loop {
            let scale = BigInt::one() << (k as usize);
            let rat_scaled = (&self.rat * Rational::from_integer(scale.clone())).floor().to_integer();
            let n = self.rad.numer().abs();
            let d = self.rad.denom();
            let m = BigInt::from(2) * &n * &n * &scale * &scale;
            let mut rad_scaled = m.sqrt() / d;
            if self.rad.is_negative() {
                rad_scaled = -rad_scaled;
            }
            let total = rat_scaled + rad_scaled;
            if total.bits() >= 62 || k > 4096 {
                let f = total.to_f64().unwrap_or(0.0);
                return scale_by_pow2(f, -k);
            }
            k += 64;
        }
    }
}

fn scale_by_pow2(mut f: f64, mut e: i64) -> f64 {
    while e < -1000 {
        f *= 2f64.powi(-1000);
        e += 1000;
    }
    while e > 1000 {
        f *= 2f64.powi(1000);
        e -= 1000;
    }
    f * 2f64.powi(e as i32)
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Square root of a non-negative rational when both numerator and denominator
/// are perfect squares.
pub(crate) fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Debug for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactValue({} + {}*sqrt2)", self.rat, self.rad)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format_latex(self))
    }
}

impl From<i64> for ExactValue {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<Rational> for ExactValue {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a ExactValue> for &'a ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: &ExactValue) -> ExactValue {
        ExactValue {
            rat: &self.rat + &rhs.rat,
            rad: &self.rad + &rhs.rad,
        }
    }
}

impl<'a> Sub<&'a ExactValue> for &'a ExactValue {
    type Output = ExactValue;
    fn sub(self, rhs: &ExactValue) -> ExactValue {
        ExactValue {
            rat: &self.rat - &rhs.rat,
            rad: &self.rad - &rhs.rad,
        }
    }
}

impl<'a> Mul<&'a ExactValue> for &'a ExactValue {
    type Output = ExactValue;
    fn mul(self, rhs: &ExactValue) -> ExactValue {
        // (a + b r)(c + d r) = (ac + 2bd) + (ad + bc) r
        let two = Rational::from_integer(BigInt::from(2));
        ExactValue {
            rat: &self.rat * &rhs.rat + two * &self.rad * &rhs.rad,
            rad: &self.rat * &rhs.rad + &self.rad * &rhs.rat,
        }
    }
}

/// Panics on a zero divisor; use [`ExactValue::checked_div`] for untrusted
/// operands.
impl<'a> Div<&'a ExactValue> for &'a ExactValue {
    type Output = ExactValue;
    fn div(self, rhs: &ExactValue) -> ExactValue {
        self.checked_div(rhs).expect("ExactValue division by zero")
    }
}

impl Neg for &ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        ExactValue {
            rat: -self.rat.clone(),
            rad: -self.rad.clone(),
        }
    }
}

impl Neg for ExactValue {
    type Output = ExactValue;
    fn neg(self) -> ExactValue {
        ExactValue {
            rat: -self.rat,
            rad: -self.rad,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<ExactValue> for ExactValue {
            type Output = ExactValue;
            fn $m(self, rhs: ExactValue) -> ExactValue {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactValue> for ExactValue {
            type Output = ExactValue;
            fn $m(self, rhs: &ExactValue) -> ExactValue {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<ExactValue> for &'a ExactValue {
            type Output = ExactValue;
            fn $m(self, rhs: ExactValue) -> ExactValue {
                self.$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);
