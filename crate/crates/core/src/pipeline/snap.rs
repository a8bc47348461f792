use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::exactnum::{ExactValue, Scalar};
use crate::geom::Point;

pub const SNAP_TOL: f64 = 1e-3;
pub const SNAP_BOUND: i64 = 64;
pub const SNAP_DENOMINATORS: [i64; 3] = [1, 2, 4];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("cannot snap {value}: nearest lattice value is {residual:e} away")]
pub struct SnapError {
    pub value: f64,
    pub residual: f64,
}

/// Nearest `(a + b√2)/d` with `|a|, |b| ≤ 64` and `d ∈ {1, 2, 4}`, within
/// `tol`. Ties go to the smaller `d`, then the smaller `|b|`.
pub fn snap_scalar(x: f64, tol: f64) -> Result<ExactValue, SnapError> {
    if !x.is_finite() {
        return Err(SnapError { value: x, residual: f64::INFINITY });
    }
    let mut best: Option<(f64, i64, i64, i64)> = None;
    for d in SNAP_DENOMINATORS {
        for mag in 0..=SNAP_BOUND {
            for b in if mag == 0 { vec![0] } else { vec![mag, -mag] } {
                let a = (x * d as f64 - b as f64 * SQRT_2).round().clamp(-SNAP_BOUND as f64, SNAP_BOUND as f64) as i64;
                let r = (x - (a as f64 + b as f64 * SQRT_2) / d as f64).abs();
                if best.is_none_or(|(br, ..)| r < br) {
                    best = Some((r, a, b, d));
                }
            }
        }
    }
    let (residual, a, b, d) = best.expect("lattice is non-empty");
    if residual > tol {
        return Err(SnapError { value: x, residual });
    }
    Ok(ExactValue::from_parts((a, d), (b, d)))
}

pub fn snap_point(x: f64, y: f64, tol: f64) -> Result<Point, SnapError> {
    Ok(Point::exact(snap_scalar(x, tol)?, snap_scalar(y, tol)?))
}

/// Snaps an approximate scalar; exact scalars pass through.
pub fn snap(s: &Scalar, tol: f64) -> Result<ExactValue, SnapError> {
    match s {
        Scalar::Exact(v) => Ok(v.clone()),
        Scalar::Approx(x) => snap_scalar(*x, tol),
    }
}
