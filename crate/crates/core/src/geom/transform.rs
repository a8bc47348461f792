use crate::exactnum::{ExactValue, Scalar};

use super::{GeomError, Point, Polygon, COINCIDENCE_TOL};

/// Homogeneous 3×3 rigid motion `[R(θ)·F | t]`, where `F = diag(−1, 1)` when
/// the motion reflects.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidTransform {
    rows: [[Scalar; 3]; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Rotation in degrees, a multiple of 45 in `0..360`.
    pub angle_deg: u16,
    pub reflected: bool,
    pub translation: Point,
}

/// `(cos, sin)` of `steps · 45°`.
pub fn rotation_entries(steps: u8) -> (ExactValue, ExactValue) {
    let h = ExactValue::half_sqrt2;
    let one = ExactValue::one;
    let z = ExactValue::zero;
    match steps % 8 {
        0 => (one(), z()),
        1 => (h(), h()),
        2 => (z(), one()),
        3 => (-h(), h()),
        4 => (-one(), z()),
        5 => (-h(), -h()),
        6 => (z(), -one()),
        _ => (h(), -h()),
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self::from_parts(0, false, Scalar::zero(), Scalar::zero())
    }

    /// Rotation by `steps · 45°` after an optional reflection across the
    /// y-axis, then translation.
    pub fn from_parts(steps: u8, reflected: bool, tx: Scalar, ty: Scalar) -> Self {
        let (c, s) = rotation_entries(steps);
        let f = if reflected { -ExactValue::one() } else { ExactValue::one() };
        let e = |v: ExactValue| Scalar::Exact(v);
        RigidTransform {
            rows: [
                [e(&c * &f), e(-&s), tx],
                [e(&s * &f), e(c), ty],
                [Scalar::zero(), Scalar::zero(), Scalar::from(1)],
            ],
        }
    }

    /// Validates a row-major matrix: last row `(0, 0, 1)` and an orthogonal
    /// upper-left block (exact, or within 1e-9 when any entry is approximate).
    pub fn from_rows(rows: [[Scalar; 3]; 3]) -> Result<Self, GeomError> {
        let t = RigidTransform { rows };
        let tol = if t.is_exact() { 0.0 } else { COINCIDENCE_TOL };
        let r = &t.rows;
        let zero_at = |v: &Scalar, target: i64| (v - &Scalar::from(target)).signum_tol(tol) == 0;
        if !zero_at(&r[2][0], 0) || !zero_at(&r[2][1], 0) || !zero_at(&r[2][2], 1) {
            return Err(GeomError::NonRigid("last row must be (0, 0, 1)".into()));
        }
        let (a, b, c, d) = (&r[0][0], &r[0][1], &r[1][0], &r[1][1]);
        let col0 = &(a * a) + &(c * c);
        let col1 = &(b * b) + &(d * d);
        let cross = &(a * b) + &(c * d);
        if !zero_at(&col0, 1) || !zero_at(&col1, 1) || !zero_at(&cross, 0) {
            return Err(GeomError::NonRigid("rotation block is not orthogonal".into()));
        }
        Ok(t)
    }

    pub fn rows(&self) -> &[[Scalar; 3]; 3] {
        &self.rows
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().flatten().all(Scalar::is_exact)
    }

    /// +1 for proper motions, −1 for reflections.
    pub fn det_sign(&self) -> i8 {
        let r = &self.rows;
        let det = &(&r[0][0] * &r[1][1]) - &(&r[0][1] * &r[1][0]);
        det.signum_tol(0.0)
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let r = &self.rows;
        Point {
            x: &(&(&r[0][0] * &p.x) + &(&r[0][1] * &p.y)) + &r[0][2],
            y: &(&(&r[1][0] * &p.x) + &(&r[1][1] * &p.y)) + &r[1][2],
        }
    }

    /// Image of `p`; reflections are re-oriented counterclockwise keeping the
    /// image of the first vertex first.
    pub fn apply_polygon(&self, p: &Polygon) -> Polygon {
        let mut v: Vec<Point> = p.vertices().iter().map(|q| self.apply_point(q)).collect();
        if self.det_sign() < 0 {
            v[1..].reverse();
        }
        Polygon::from_points_unchecked(v)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        let (a, b) = (&self.rows, &other.rows);
        let rows = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).fold(Scalar::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
        });
        RigidTransform { rows }
    }

    pub fn decompose(&self) -> Result<Decomposition, GeomError> {
        let r = &self.rows;
        let reflected = self.det_sign() < 0;
        let (cos, sin) = if reflected { (-&r[0][0], -&r[1][0]) } else { (r[0][0].clone(), r[1][0].clone()) };
        let tol = if self.is_exact() { 0.0 } else { COINCIDENCE_TOL };
        let steps = (0..8u8)
            .find(|&k| {
                let (c, s) = rotation_entries(k);
                (&cos - &Scalar::Exact(c)).signum_tol(tol) == 0 && (&sin - &Scalar::Exact(s)).signum_tol(tol) == 0
            })
            .ok_or(GeomError::NonCanonicalAngle)?;
        Ok(Decomposition {
            angle_deg: u16::from(steps) * 45,
            reflected,
            translation: Point {
                x: r[0][2].clone(),
                y: r[1][2].clone(),
            },
        })
    }
}
