use std::fmt;

use crate::exactnum::{ExactValue, Scalar};
use crate::geom::{polygon_area, GeomError, Point, Polygon, RigidTransform};

/// The seven tangram pieces. The two large and two small triangles are
/// distinct kinds so that every state holds each kind exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKind {
    LargeTriangle1,
    LargeTriangle2,
    MediumTriangle,
    SmallTriangle1,
    SmallTriangle2,
    Square,
    Parallelogram,
}

/// Congruence class of a piece kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    LargeTriangle,
    MediumTriangle,
    SmallTriangle,
    Square,
    Parallelogram,
}

impl PieceKind {
    pub const ALL: [PieceKind; 7] = [
        PieceKind::LargeTriangle1,
        PieceKind::LargeTriangle2,
        PieceKind::MediumTriangle,
        PieceKind::SmallTriangle1,
        PieceKind::SmallTriangle2,
        PieceKind::Square,
        PieceKind::Parallelogram,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn type_name(self) -> &'static str {
        match self {
            PieceKind::LargeTriangle1 => "large_triangle_1",
            PieceKind::LargeTriangle2 => "large_triangle_2",
            PieceKind::MediumTriangle => "medium_triangle",
            PieceKind::SmallTriangle1 => "small_triangle_1",
            PieceKind::SmallTriangle2 => "small_triangle_2",
            PieceKind::Square => "square",
            PieceKind::Parallelogram => "parallelogram",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PieceKind::LargeTriangle1 => "LT1",
            PieceKind::LargeTriangle2 => "LT2",
            PieceKind::MediumTriangle => "MT",
            PieceKind::SmallTriangle1 => "ST1",
            PieceKind::SmallTriangle2 => "ST2",
            PieceKind::Square => "SQ",
            PieceKind::Parallelogram => "PG",
        }
    }

    /// Accepts a type name or a label.
    pub fn parse(s: &str) -> Option<PieceKind> {
        let t = s.trim();
        PieceKind::ALL.into_iter().find(|k| k.type_name().eq_ignore_ascii_case(t) || k.label().eq_ignore_ascii_case(t))
    }

    pub fn shape(self) -> Shape {
        match self {
            PieceKind::LargeTriangle1 | PieceKind::LargeTriangle2 => Shape::LargeTriangle,
            PieceKind::MediumTriangle => Shape::MediumTriangle,
            PieceKind::SmallTriangle1 | PieceKind::SmallTriangle2 => Shape::SmallTriangle,
            PieceKind::Square => Shape::Square,
            PieceKind::Parallelogram => Shape::Parallelogram,
        }
    }

    /// Only the parallelogram has a mirror image that differs from a rotation.
    pub fn reflection_distinct(self) -> bool {
        self == PieceKind::Parallelogram
    }

    pub fn canonical_vertices(self) -> Vec<Point> {
        self.shape().canonical_vertices()
    }

    pub fn canonical_polygon(self) -> Polygon {
        Polygon::new(self.canonical_vertices()).expect("canonical pieces are valid polygons")
    }

    pub fn canonical_area(self) -> ExactValue {
        match polygon_area(&self.canonical_polygon()) {
            Scalar::Exact(v) => v,
            Scalar::Approx(_) => unreachable!("canonical coordinates are exact"),
        }
    }

    /// Sorted squared edge lengths of the canonical polygon.
    pub fn canonical_squared_edges(self) -> Vec<ExactValue> {
        let mut v: Vec<ExactValue> = self
            .canonical_polygon()
            .squared_edge_lengths()
            .into_iter()
            .map(|s| s.as_exact().cloned().expect("canonical coordinates are exact"))
            .collect();
        v.sort();
        v
    }

    pub fn canonical_perimeter(self) -> Scalar {
        crate::geom::polygon_perimeter(&self.canonical_polygon())
    }
}

impl Shape {
    pub fn canonical_vertices(self) -> Vec<Point> {
        let i = |v: i64| ExactValue::from_integer(v);
        let r = |num: i64, den: i64| ExactValue::from_parts((0, 1), (num, den));
        let pts: Vec<(ExactValue, ExactValue)> = match self {
            Shape::LargeTriangle => vec![(i(0), i(0)), (i(2), i(0)), (i(0), i(2))],
            Shape::MediumTriangle => vec![(i(0), i(0)), (r(1, 1), i(0)), (i(0), r(1, 1))],
            Shape::SmallTriangle => vec![(i(0), i(0)), (i(1), i(0)), (i(0), i(1))],
            Shape::Square => vec![(i(0), i(0)), (i(1), i(0)), (i(1), i(1)), (i(0), i(1))],
            Shape::Parallelogram => vec![(i(0), i(0)), (r(1, 1), i(0)), (r(3, 2), r(1, 2)), (r(1, 2), r(1, 2))],
        };
        pts.into_iter().map(|(x, y)| Point::exact(x, y)).collect()
    }
}

impl fmt::Display for PieceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.type_name())
    }
}

/// One piece in a state: its kind, its counterclockwise vertex ring and an
/// optional rigid motion from the canonical placement.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceState {
    pub kind: PieceKind,
    pub polygon: Polygon,
    pub transform: Option<RigidTransform>,
}

impl PieceState {
    pub fn new(kind: PieceKind, polygon: Polygon) -> Self {
        Self {
            kind,
            polygon,
            transform: None,
        }
    }

    /// The canonical piece moved by `t`.
    pub fn placed(kind: PieceKind, t: RigidTransform) -> Self {
        let polygon = t.apply_polygon(&kind.canonical_polygon());
        Self {
            kind,
            polygon,
            transform: Some(t),
        }
    }

    pub fn canonical(kind: PieceKind) -> Self {
        Self::placed(kind, RigidTransform::identity())
    }

    /// Edge relations `(i, i+1, length)` around the ring.
    pub fn edges(&self) -> Vec<(usize, usize, Scalar)> {
        ring_edges(&self.polygon)
    }

    pub fn center(&self) -> Point {
        self.polygon.vertex_centroid()
    }

    /// Whether the stored transform maps the canonical piece onto the stored
    /// ring (as a cyclic sequence); `None` without a transform.
    pub fn transform_consistent(&self) -> Option<bool> {
        let t = self.transform.as_ref()?;
        let img = t.apply_polygon(&self.kind.canonical_polygon());
        Some(same_cycle(img.vertices(), self.polygon.vertices()))
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> PieceState {
        let shift = RigidTransform::from_parts(0, false, dx.clone(), dy.clone());
        PieceState {
            kind: self.kind,
            polygon: self.polygon.translate(dx, dy),
            transform: self.transform.as_ref().map(|t| shift.compose(t)),
        }
    }
}

pub(crate) fn ring_edges(p: &Polygon) -> Vec<(usize, usize, Scalar)> {
    let n = p.len();
    p.squared_edge_lengths().iter().enumerate().map(|(i, sq)| (i, (i + 1) % n, sq.sqrt())).collect()
}

fn same_cycle(a: &[Point], b: &[Point]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i]))
}

/// The seven pieces at their canonical coordinates, in [`PieceKind::ALL`]
/// order, without transforms.
pub fn canonical_pieces() -> Vec<PieceState> {
    PieceKind::ALL.into_iter().map(|k| PieceState::new(k, k.canonical_polygon())).collect()
}

/// Recovers the rigid motion carrying `kind`'s canonical polygon onto
/// `polygon`, if one with a 45° multiple rotation exists.
pub fn recover_transform(kind: PieceKind, polygon: &Polygon) -> Result<RigidTransform, GeomError> {
    let canon = kind.canonical_polygon();
    let anchor = &canon.vertices()[0];
    for reflected in [false, true] {
        for steps in 0..8u8 {
            let rot = RigidTransform::from_parts(steps, reflected, Scalar::zero(), Scalar::zero());
            let moved = rot.apply_point(anchor);
            for target in polygon.vertices() {
                let t = RigidTransform::from_parts(steps, reflected, &target.x - &moved.x, &target.y - &moved.y);
                if same_cycle(t.apply_polygon(&canon).vertices(), polygon.vertices()) {
                    return Ok(t);
                }
            }
        }
    }
    Err(GeomError::NonCanonicalAngle)
}
