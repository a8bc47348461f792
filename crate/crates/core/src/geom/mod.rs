//! Planar primitives over [`Scalar`] coordinates.
//!
//! Each operation runs on the exact track when every input coordinate is
//! exact and falls back to binary64 with a coincidence tolerance otherwise.

pub mod kernel;
mod metrics;
mod transform;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{ExactValue, Scalar};
use kernel::{Num, XY};

pub use kernel::Location;
pub use metrics::{hausdorff, iou, DEFAULT_HAUSDORFF_RESOLUTION};
pub use transform::{rotation_entries, Decomposition, RigidTransform};

/// Absolute coincidence tolerance for approximate coordinates.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    Degenerate(usize),
    #[error("polygon is not convex")]
    NonConvex,
    #[error("matrix is not a rigid motion: {0}")]
    NonRigid(String),
    #[error("rotation is not a multiple of 45 degrees")]
    NonCanonicalAngle,
    #[error("empty input")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: impl Into<Scalar>, y: impl Into<Scalar>) -> Self {
        Self { x: x.into(), y: y.into() }
    }

    pub fn exact(x: ExactValue, y: ExactValue) -> Self {
        Self {
            x: Scalar::Exact(x),
            y: Scalar::Exact(y),
        }
    }

    pub fn origin() -> Self {
        Self::exact(ExactValue::zero(), ExactValue::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact() && self.y.is_exact()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub(crate) fn exact_xy(&self) -> Option<XY<ExactValue>> {
        Some(XY::new(self.x.as_exact()?.clone(), self.y.as_exact()?.clone()))
    }

    pub(crate) fn approx_xy(&self) -> XY<f64> {
        XY::new(self.x.to_f64(), self.y.to_f64())
    }

    pub(crate) fn from_xy<T: Num>(p: &XY<T>) -> Self {
        Self {
            x: p.x.to_scalar(),
            y: p.y.to_scalar(),
        }
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> Point {
        Point {
            x: &self.x + dx,
            y: &self.y + dy,
        }
    }
}

/// A counterclockwise vertex ring without repeated consecutive vertices.
///
/// Zero-area rings are representable so that malformed submissions can still
/// be measured; they fail rigidity checks downstream.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

/// A point set's coordinates on one of the two numeric tracks.
pub(crate) enum Ring {
    Exact(Vec<XY<ExactValue>>),
    Approx(Vec<XY<f64>>),
}

impl Polygon {
    /// Builds a polygon, dropping repeated consecutive vertices (and a closing
    /// repeat of the first vertex) and reversing clockwise input.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeomError> {
        Self::with_source_order(vertices).map(|(p, _)| p)
    }

    /// Like [`Polygon::new`], also returning, for each stored vertex, its index
    /// in the input.
    pub fn with_source_order(vertices: Vec<Point>) -> Result<(Self, Vec<usize>), GeomError> {
        let mut kept: Vec<(usize, Point)> = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.into_iter().enumerate() {
            if kept.last().is_some_and(|(_, last)| *last == v) {
                continue;
            }
            kept.push((i, v));
        }
        while kept.len() > 1 && kept[0].1 == kept[kept.len() - 1].1 {
            kept.pop();
        }
        if kept.len() < 3 {
            return Err(GeomError::Degenerate(kept.len()));
        }
        let mut poly = Polygon {
            vertices: kept.iter().map(|(_, p)| p.clone()).collect(),
        };
        let mut order: Vec<usize> = kept.iter().map(|(i, _)| *i).collect();
        if poly.signed_area().signum_tol(0.0) < 0 {
            poly.vertices[1..].reverse();
            order[1..].reverse();
        }
        Ok((poly, order))
    }

    pub(crate) fn from_points_unchecked(vertices: Vec<Point>) -> Self {
        Polygon { vertices }
    }

    pub(crate) fn from_ring_unchecked<T: Num>(ring: &[XY<T>]) -> Self {
        Polygon {
            vertices: ring.iter().map(Point::from_xy).collect(),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.vertices.iter().all(Point::is_exact)
    }

    pub(crate) fn exact_ring(&self) -> Option<Vec<XY<ExactValue>>> {
        self.vertices.iter().map(Point::exact_xy).collect()
    }

    pub(crate) fn approx_ring(&self) -> Vec<XY<f64>> {
        self.vertices.iter().map(Point::approx_xy).collect()
    }

    pub(crate) fn ring(&self) -> Ring {
        match self.exact_ring() {
            Some(r) => Ring::Exact(r),
            None => Ring::Approx(self.approx_ring()),
        }
    }

    /// Shoelace signed area.
    pub fn signed_area(&self) -> Scalar {
        match self.ring() {
            Ring::Exact(r) => Scalar::Exact(kernel::signed_area2(&r).half()),
            Ring::Approx(r) => Scalar::Approx(kernel::signed_area2(&r) * 0.5),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn squared_edge_lengths(&self) -> Vec<Scalar> {
        self.edges()
            .map(|(a, b)| {
                let dx = &b.x - &a.x;
                let dy = &b.y - &a.y;
                &(&dx * &dx) + &(&dy * &dy)
            })
            .collect()
    }

    pub fn is_convex(&self) -> bool {
        match self.ring() {
            Ring::Exact(r) => kernel::is_convex(&r, 0.0),
            Ring::Approx(r) => kernel::is_convex(&r, COINCIDENCE_TOL),
        }
    }

    pub fn is_simple(&self) -> bool {
        match self.ring() {
            Ring::Exact(r) => kernel::is_simple(&r, 0.0),
            Ring::Approx(r) => kernel::is_simple(&r, COINCIDENCE_TOL),
        }
    }

    /// Vertex centroid (mean of the vertices).
    pub fn vertex_centroid(&self) -> Point {
        let n = Scalar::from(self.vertices.len() as i64);
        let (sx, sy) = self.vertices.iter().fold((Scalar::zero(), Scalar::zero()), |(sx, sy), p| (&sx + &p.x, &sy + &p.y));
        Point {
            x: sx.checked_div(&n).expect("non-empty"),
            y: sy.checked_div(&n).expect("non-empty"),
        }
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| p.translate(dx, dy)).collect(),
        }
    }

    /// Same ring started at vertex `k`.
    pub fn rotate_start(&self, k: usize) -> Polygon {
        let mut v = self.vertices.clone();
        let n = v.len().max(1);
        v.rotate_left(k % n);
        Polygon { vertices: v }
    }

    /// Binary64 copy of this polygon.
    pub fn to_approx(&self) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| Point::new(p.x.to_f64(), p.y.to_f64())).collect(),
        }
    }

    pub fn boundary(&self) -> SegmentSet {
        SegmentSet {
            segments: self.edges().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }
}

/// A list of boundary segments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<(Point, Point)>,
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub(crate) fn approx(&self) -> Vec<(XY<f64>, XY<f64>)> {
        self.segments.iter().map(|(a, b)| (a.approx_xy(), b.approx_xy())).collect()
    }
}

pub fn polygon_area(p: &Polygon) -> Scalar {
    p.signed_area().abs()
}

/// Sum of edge lengths; exact when every edge length lies in Q(sqrt 2).
pub fn polygon_perimeter(p: &Polygon) -> Scalar {
    p.squared_edge_lengths().iter().map(Scalar::sqrt).fold(Scalar::zero(), |acc, l| &acc + &l)
}

pub fn point_in_polygon(pt: &Point, p: &Polygon) -> Location {
    match (pt.exact_xy(), p.exact_ring()) {
        (Some(q), Some(r)) => kernel::locate(&q, &r, 0.0),
        _ => kernel::locate(&pt.approx_xy(), &p.approx_ring(), COINCIDENCE_TOL),
    }
}

/// Intersection of two convex polygons; `None` when they are interior-disjoint.
pub fn convex_clip(a: &Polygon, b: &Polygon) -> Result<Option<Polygon>, GeomError> {
    if !a.is_convex() || !b.is_convex() {
        return Err(GeomError::NonConvex);
    }
    Ok(match (a.exact_ring(), b.exact_ring()) {
        (Some(ra), Some(rb)) => clip_track(&ra, &rb, 0.0),
        _ => clip_track(&a.approx_ring(), &b.approx_ring(), COINCIDENCE_TOL),
    })
}

fn clip_track<T: Num>(a: &[XY<T>], b: &[XY<T>], tol: f64) -> Option<Polygon> {
    let out = kernel::clip_convex(a, b, tol);
    if out.len() < 3 {
        return None;
    }
    let tol_area = if T::EXACT { 0.0 } else { tol * tol };
    if kernel::signed_area2(&out).sign_tol(tol_area) <= 0 {
        return None;
    }
    Some(Polygon::from_ring_unchecked(&out))
}

fn bbox_f64(p: &Polygon) -> (f64, f64, f64, f64) {
    p.vertices.iter().fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |(x0, y0, x1, y1), v| {
        let (x, y) = v.to_f64();
        (x0.min(x), y0.min(y), x1.max(x), y1.max(y))
    })
}

/// Area of `a ∩ b`. Convex pairs are clipped directly; anything else goes
/// through the slab sweep.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> Scalar {
    let (ax0, ay0, ax1, ay1) = bbox_f64(a);
    let (bx0, by0, bx1, by1) = bbox_f64(b);
    let exact = a.is_exact() && b.is_exact();
    let zero = || if exact { Scalar::zero() } else { Scalar::Approx(0.0) };
    if ax1 < bx0 - 1e-6 || bx1 < ax0 - 1e-6 || ay1 < by0 - 1e-6 || by1 < ay0 - 1e-6 {
        return zero();
    }
    if a.is_convex() && b.is_convex() {
        return match convex_clip(a, b) {
            Ok(Some(p)) => polygon_area(&p),
            _ => zero(),
        };
    }
    let both = |c: &[bool]| c[0] && c[1];
    match (a.exact_ring(), b.exact_ring()) {
        (Some(ra), Some(rb)) => {
            let m = kernel::region_measures(&[(0, &ra[..]), (1, &rb[..])], 2, &[&both]);
            Scalar::Exact(m[0].clone())
        }
        _ => {
            let (ra, rb) = (a.approx_ring(), b.approx_ring());
            let m = kernel::region_measures(&[(0, &ra[..]), (1, &rb[..])], 2, &[&both]);
            Scalar::Approx(m[0].max(0.0))
        }
    }
}

/// Boundary-sharing test between two polygons: exact positive overlap on the
/// exact track, overlap longer than `min_len` within distance `gap` otherwise.
pub fn shares_boundary(a: &Polygon, b: &Polygon, gap: f64, min_len: f64) -> bool {
    match (a.exact_ring(), b.exact_ring()) {
        (Some(ra), Some(rb)) => kernel::shared_boundary(&ra, &rb, 0.0).0,
        _ => kernel::shared_boundary(&a.approx_ring(), &b.approx_ring(), gap).1 > min_len,
    }
}

#[derive(Clone, Debug)]
pub struct UnionInfo {
    pub area: Scalar,
    pub components: usize,
    /// Merged boundary loops; outer loops counterclockwise, holes clockwise.
    pub loops: Vec<Vec<Point>>,
    pub boundary: SegmentSet,
    pub holes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnionTolerances {
    /// Coincidence tolerance for vertex snapping on the approximate track.
    pub coincidence: f64,
    /// Maximum gap between edges still counted as shared.
    pub adjacency_gap: f64,
    /// Minimum shared length for adjacency on the approximate track.
    pub adjacency_len: f64,
}

impl Default for UnionTolerances {
    fn default() -> Self {
        Self {
            coincidence: COINCIDENCE_TOL,
            adjacency_gap: COINCIDENCE_TOL,
            adjacency_len: COINCIDENCE_TOL,
        }
    }
}

pub fn union_info(pieces: &[Polygon]) -> Result<UnionInfo, GeomError> {
    union_info_with(pieces, UnionTolerances::default())
}

/// Union summary: area (sum of areas minus pairwise overlaps), connected
/// components under positive-length boundary sharing, boundary loops from
/// edge splitting and cancellation, and hole count (clockwise loops).
pub fn union_info_with(pieces: &[Polygon], tol: UnionTolerances) -> Result<UnionInfo, GeomError> {
    if pieces.is_empty() {
        return Err(GeomError::Empty);
    }
    let mut area = pieces.iter().map(polygon_area).fold(Scalar::zero(), |a, b| &a + &b);
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            let ov = intersection_area(&pieces[i], &pieces[j]);
            area = &area - &ov;
        }
    }
    let components = count_components(pieces, |a, b| shares_boundary(a, b, tol.adjacency_gap, tol.adjacency_len));
    let exact: Option<Vec<Vec<XY<ExactValue>>>> = pieces.iter().map(Polygon::exact_ring).collect();
    let loops: Vec<Vec<Point>> = match exact {
        Some(rings) => boundary_loops(&rings, 0.0),
        None => {
            let rings: Vec<Vec<XY<f64>>> = pieces.iter().map(Polygon::approx_ring).collect();
            boundary_loops(&rings, tol.coincidence)
        }
    };
    let holes = loops
        .iter()
        .filter(|l| match Polygon::new((*l).clone()) {
            Ok(_) => ring_signed_area(l).signum_tol(0.0) < 0,
            Err(_) => false,
        })
        .count();
    let mut boundary = SegmentSet::default();
    for l in &loops {
        let n = l.len();
        for i in 0..n {
            boundary.segments.push((l[i].clone(), l[(i + 1) % n].clone()));
        }
    }
    Ok(UnionInfo {
        area,
        components,
        loops,
        boundary,
        holes,
    })
}

fn ring_signed_area(points: &[Point]) -> Scalar {
    Polygon {
        vertices: points.to_vec(),
    }
    .signed_area()
}

fn boundary_loops<T: Num>(rings: &[Vec<XY<T>>], tol: f64) -> Vec<Vec<Point>> {
    let frags = kernel::union_boundary(rings, tol);
    kernel::trace_loops(&frags, tol)
        .into_iter()
        .map(|l| kernel::merge_collinear(&l, tol))
        .filter(|l| l.len() >= 3)
        .map(|l| l.iter().map(Point::from_xy).collect())
        .collect()
}

/// Connected components of `items` under a symmetric adjacency relation.
pub fn count_components<T>(items: &[T], adjacent: impl Fn(&T, &T) -> bool) -> usize {
    let n = items.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if find(&mut parent, i) != find(&mut parent, j) && adjacent(&items[i], &items[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Boundary of the union of `pieces` as a segment set, tolerant of overlaps
/// and small gaps on the approximate track.
pub fn union_boundary(pieces: &[Polygon], coincidence: f64) -> SegmentSet {
    let exact: Option<Vec<Vec<XY<ExactValue>>>> = pieces.iter().map(Polygon::exact_ring).collect();
    let frags: Vec<(Point, Point)> = match exact {
        Some(rings) => kernel::union_boundary(&rings, 0.0)
            .iter()
            .map(|(a, b)| (Point::from_xy(a), Point::from_xy(b)))
            .collect(),
        None => {
            let rings: Vec<Vec<XY<f64>>> = pieces.iter().map(Polygon::approx_ring).collect();
            kernel::union_boundary(&rings, coincidence)
                .iter()
                .map(|(a, b)| (Point::from_xy(a), Point::from_xy(b)))
                .collect()
        }
    };
    SegmentSet { segments: frags }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(p: (i64, i64), q: (i64, i64)) -> ExactValue {
        ExactValue::from_parts(p, q)
    }

    fn ipoly(pts: &[(i64, i64)]) -> Polygon {
        Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn fpoly(pts: &[(f64, f64)]) -> Polygon {
        Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn unit_square() -> Polygon {
        ipoly(&[(0, 0), (1, 0), (1, 1), (0, 1)])
    }

    fn parallelogram() -> Polygon {
        Polygon::new(vec![
            Point::exact(ev((0, 1), (0, 1)), ev((0, 1), (0, 1))),
            Point::exact(ev((0, 1), (1, 1)), ev((0, 1), (0, 1))),
            Point::exact(ev((0, 1), (3, 2)), ev((0, 1), (1, 2))),
            Point::exact(ev((0, 1), (1, 2)), ev((0, 1), (1, 2))),
        ])
        .unwrap()
    }

    #[test]
    fn areas() {
        assert_eq!(polygon_area(&unit_square()), Scalar::from(1));
        assert_eq!(polygon_area(&ipoly(&[(0, 0), (2, 0), (0, 2)])), Scalar::from(2));
        assert_eq!(polygon_area(&parallelogram()), Scalar::from(1));
    }

    #[test]
    fn perimeters() {
        assert_eq!(polygon_perimeter(&unit_square()), Scalar::from(4));
        assert_eq!(polygon_perimeter(&ipoly(&[(0, 0), (1, 0), (0, 1)])), Scalar::Exact(ev((2, 1), (1, 1))));
        assert_eq!(polygon_perimeter(&parallelogram()), Scalar::Exact(ev((2, 1), (2, 1))));
    }

    #[test]
    fn degenerate_polygons_are_rejected() {
        assert_eq!(Polygon::new(vec![Point::new(0, 0), Point::new(1, 0)]), Err(GeomError::Degenerate(2)));
        assert_eq!(Polygon::new(vec![Point::new(0, 0), Point::new(0, 0), Point::new(0, 0)]), Err(GeomError::Degenerate(1)));
    }

    #[test]
    fn clockwise_input_is_reoriented_keeping_first_vertex() {
        let (p, order) = Polygon::with_source_order(vec![Point::new(0, 0), Point::new(0, 1), Point::new(1, 1), Point::new(1, 0)]).unwrap();
        assert_eq!(order, vec![0, 3, 2, 1]);
        assert_eq!(p.vertices()[1], Point::new(1, 0));
        assert_eq!(p.signed_area(), Scalar::from(1));
    }

    #[test]
    fn convex_clipping() {
        let a = fpoly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let b = fpoly(&[(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)]);
        let c = convex_clip(&a, &b).unwrap().unwrap();
        assert!((polygon_area(&c).to_f64() - 0.25).abs() < 1e-12);
        let far = fpoly(&[(5.0, 5.0), (6.0, 5.0), (6.0, 6.0), (5.0, 6.0)]);
        assert_eq!(convex_clip(&a, &far).unwrap(), None);
        let same = convex_clip(&unit_square(), &unit_square()).unwrap().unwrap();
        assert_eq!(polygon_area(&same), Scalar::from(1));
        let l = ipoly(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]);
        assert_eq!(convex_clip(&l, &unit_square()), Err(GeomError::NonConvex));
    }

    #[test]
    fn intersection_areas() {
        let t = ipoly(&[(0, 0), (2, 0), (0, 2)]);
        assert_eq!(intersection_area(&t, &t), Scalar::from(2));
        let right = ipoly(&[(1, 0), (2, 0), (2, 1), (1, 1)]);
        assert_eq!(intersection_area(&unit_square(), &right), Scalar::zero());
        let off = Polygon::new(vec![
            Point::exact(ev((1, 2), (0, 1)), ev((1, 2), (0, 1))),
            Point::exact(ev((3, 2), (0, 1)), ev((1, 2), (0, 1))),
            Point::exact(ev((3, 2), (0, 1)), ev((3, 2), (0, 1))),
            Point::exact(ev((1, 2), (0, 1)), ev((3, 2), (0, 1))),
        ])
        .unwrap();
        assert_eq!(intersection_area(&unit_square(), &off), Scalar::Exact(ev((1, 4), (0, 1))));
        // Non-convex path.
        let l = ipoly(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]);
        let big = ipoly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert_eq!(intersection_area(&l, &big), Scalar::from(3));
        assert_eq!(intersection_area(&big, &l), Scalar::from(3));
    }

    #[test]
    fn point_location() {
        let sq = fpoly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(point_in_polygon(&Point::new(0.5, 0.5), &sq), Location::Inside);
        assert_eq!(point_in_polygon(&Point::new(0, 0), &unit_square()), Location::Boundary);
        assert_eq!(point_in_polygon(&Point::new(5, 5), &unit_square()), Location::Outside);
    }

    #[test]
    fn union_of_far_pieces_has_two_components() {
        let a = unit_square();
        let b = ipoly(&[(10, 0), (11, 0), (11, 1), (10, 1)]);
        let info = union_info(&[a, b]).unwrap();
        assert_eq!(info.components, 2);
        assert_eq!(info.holes, 0);
        assert_eq!(info.area, Scalar::from(2));
    }

    #[test]
    fn ring_of_squares_has_a_hole() {
        let mut pieces = Vec::new();
        for (x, y) in [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)] {
            pieces.push(ipoly(&[(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]));
        }
        let info = union_info(&pieces).unwrap();
        assert_eq!(info.components, 1);
        assert_eq!(info.holes, 1);
        assert_eq!(info.loops.len(), 2);
        assert_eq!(info.area, Scalar::from(8));
    }

    #[test]
    fn gap_pinched_at_a_vertex_is_a_hole() {
        let pieces = [
            ipoly(&[(0, 0), (1, 0), (0, 1)]),
            ipoly(&[(0, 1), (1, 1), (1, 2), (0, 2)]),
            ipoly(&[(1, 0), (3, 2), (1, 2)]),
            ipoly(&[(-1, 0), (0, 0), (0, 2), (-1, 2)]),
        ];
        let info = union_info(&pieces).unwrap();
        assert_eq!((info.components, info.holes, info.loops.len()), (1, 1, 2));
    }

    #[test]
    fn empty_union_is_an_error() {
        assert!(matches!(union_info(&[]), Err(GeomError::Empty)));
    }

    #[test]
    fn corner_touching_pieces_are_separate_components() {
        let a = unit_square();
        let b = ipoly(&[(1, 1), (2, 1), (2, 2), (1, 2)]);
        let info = union_info(&[a, b]).unwrap();
        assert_eq!(info.components, 2);
        assert_eq!(info.holes, 0);
    }
}
