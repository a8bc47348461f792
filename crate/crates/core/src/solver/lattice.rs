//! Lattice frames and quarter-square atoms.
//!
//! A frame maps world coordinates to an integer grid, either directly or after
//! a −45° rotation. Every unit cell of the grid is cut by both diagonals into
//! four atoms of area 1/4, so each piece placed on the grid covers a fixed
//! set of atoms: large triangles 8, medium triangle, square and
//! parallelogram 4, small triangles 2.

use num_traits::ToPrimitive;

use crate::exactnum::{ExactValue, Scalar};
use crate::geom::{Point, Polygon};
use crate::tangram::Shape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameKind {
    /// Grid axes along the world axes.
    Axis,
    /// Grid axes along the world diagonals.
    Diagonal,
}

/// A lattice frame anchored at a world point.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub origin: Point,
}

impl Frame {
    pub fn new(kind: FrameKind, origin: Point) -> Self {
        Self { kind, origin }
    }

    /// Integer frame coordinates of a world point, if it is a lattice point.
    pub fn to_grid(&self, p: &Point) -> Option<(i64, i64)> {
        let dx = (&p.x - &self.origin.x).as_exact()?.clone();
        let dy = (&p.y - &self.origin.y).as_exact()?.clone();
        let (u, v) = match self.kind {
            FrameKind::Axis => (dx, dy),
            FrameKind::Diagonal => {
                let h = ExactValue::half_sqrt2();
                (&(&dx + &dy) * &h, &(&dy - &dx) * &h)
            }
        };
        Some((exact_integer(&u)?, exact_integer(&v)?))
    }

    pub fn to_world(&self, (u, v): (i64, i64)) -> Point {
        let (u, v) = (ExactValue::from_integer(u), ExactValue::from_integer(v));
        let (x, y) = match self.kind {
            FrameKind::Axis => (u, v),
            FrameKind::Diagonal => {
                let h = ExactValue::half_sqrt2();
                (&(&u - &v) * &h, &(&u + &v) * &h)
            }
        };
        Point {
            x: &Scalar::Exact(x) + &self.origin.x,
            y: &Scalar::Exact(y) + &self.origin.y,
        }
    }

    pub fn polygon_to_world(&self, ring: &[(i64, i64)]) -> Polygon {
        Polygon::new(ring.iter().map(|&g| self.to_world(g)).collect()).expect("lattice rings are polygons")
    }
}

fn exact_integer(v: &ExactValue) -> Option<i64> {
    if !v.is_rational() || !v.rational_part().is_integer() {
        return None;
    }
    v.rational_part().to_integer().to_i64()
}

/// Quarter of unit cell `(i, j)`: 0 bottom, 1 right, 2 top, 3 left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub i: i64,
    pub j: i64,
    pub q: u8,
}

impl Atom {
    /// Centroid scaled by 6 (integral, never on a lattice line).
    pub fn centroid6(&self) -> (i64, i64) {
        let (x, y) = (6 * self.i, 6 * self.j);
        match self.q {
            0 => (x + 3, y + 1),
            1 => (x + 5, y + 3),
            2 => (x + 3, y + 5),
            _ => (x + 1, y + 3),
        }
    }

    /// The four atoms sharing a side with this one.
    pub fn neighbours(&self) -> [Atom; 4] {
        let Atom { i, j, q } = *self;
        let a = |i, j, q| Atom { i, j, q };
        let across = match q {
            0 => a(i, j - 1, 2),
            1 => a(i + 1, j, 3),
            2 => a(i, j + 1, 0),
            _ => a(i - 1, j, 1),
        };
        [a(i, j, (q + 1) % 4), a(i, j, (q + 3) % 4), across, across]
    }
}

/// Winding-number containment for a point strictly off the boundary of an
/// integer ring given at scale 6.
fn inside6(p: (i64, i64), ring: &[(i64, i64)]) -> bool {
    let n = ring.len();
    let mut wn = 0;
    for k in 0..n {
        let a = (ring[k].0 * 6, ring[k].1 * 6);
        let b = (ring[(k + 1) % n].0 * 6, ring[(k + 1) % n].1 * 6);
        let orient = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        if a.1 <= p.1 {
            if b.1 > p.1 && orient > 0 {
                wn += 1;
            }
        } else if b.1 <= p.1 && orient < 0 {
            wn -= 1;
        }
    }
    wn != 0
}

/// Atoms inside an integer ring whose edges run along lattice lines.
pub fn atoms_in(ring: &[(i64, i64)]) -> Vec<Atom> {
    let (x0, x1) = (ring.iter().map(|p| p.0).min().unwrap_or(0), ring.iter().map(|p| p.0).max().unwrap_or(0));
    let (y0, y1) = (ring.iter().map(|p| p.1).min().unwrap_or(0), ring.iter().map(|p| p.1).max().unwrap_or(0));
    let mut out = Vec::new();
    for i in x0..x1 {
        for j in y0..y1 {
            for q in 0..4 {
                let a = Atom { i, j, q };
                if inside6(a.centroid6(), ring) {
                    out.push(a);
                }
            }
        }
    }
    out
}

/// Whether every edge of an integer ring is axis-parallel or diagonal.
pub fn lattice_edges(ring: &[(i64, i64)]) -> bool {
    let n = ring.len();
    (0..n).all(|k| {
        let (a, b) = (ring[k], ring[(k + 1) % n]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        dx == 0 || dy == 0 || dx.abs() == dy.abs()
    })
}

/// Grid ring of each shape in its base orientation.
pub fn base_ring(shape: Shape) -> Vec<(i64, i64)> {
    match shape {
        Shape::LargeTriangle => vec![(0, 0), (2, 0), (0, 2)],
        Shape::MediumTriangle => vec![(0, 0), (2, 0), (1, 1)],
        Shape::SmallTriangle => vec![(0, 0), (1, 0), (0, 1)],
        Shape::Square => vec![(0, 0), (1, 0), (1, 1), (0, 1)],
        Shape::Parallelogram => vec![(0, 0), (1, 0), (2, 1), (1, 1)],
    }
}

/// Distinct orientations of a shape under the 8 grid symmetries, each
/// translated so that its bounding box starts at the origin and returned with
/// its atoms.
pub fn orientations(shape: Shape) -> Vec<(Vec<(i64, i64)>, Vec<Atom>)> {
    let base = base_ring(shape);
    let mut out: Vec<(Vec<(i64, i64)>, Vec<Atom>)> = Vec::new();
    for refl in [false, true] {
        for rot in 0..4 {
            let mut ring: Vec<(i64, i64)> = base
                .iter()
                .map(|&(x, y)| {
                    let (x, y) = if refl { (-x, y) } else { (x, y) };
                    match rot {
                        0 => (x, y),
                        1 => (-y, x),
                        2 => (-x, -y),
                        _ => (y, -x),
                    }
                })
                .collect();
            let mx = ring.iter().map(|p| p.0).min().unwrap();
            let my = ring.iter().map(|p| p.1).min().unwrap();
            ring.iter_mut().for_each(|p| *p = (p.0 - mx, p.1 - my));
            if refl {
                ring.reverse();
            }
            let mut atoms = atoms_in(&ring);
            atoms.sort();
            if !out.iter().any(|(_, a)| *a == atoms) {
                out.push((ring, atoms));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangram::PieceKind;

    #[test]
    fn atom_counts_match_areas() {
        for k in PieceKind::ALL {
            let expect = match k.shape() {
                Shape::LargeTriangle => 8,
                Shape::SmallTriangle => 2,
                _ => 4,
            };
            for (_, atoms) in orientations(k.shape()) {
                assert_eq!(atoms.len(), expect, "{k}");
            }
        }
    }

    #[test]
    fn orientation_counts() {
        assert_eq!(orientations(Shape::Square).len(), 1);
        assert_eq!(orientations(Shape::LargeTriangle).len(), 4);
        assert_eq!(orientations(Shape::MediumTriangle).len(), 4);
        assert_eq!(orientations(Shape::SmallTriangle).len(), 4);
        assert_eq!(orientations(Shape::Parallelogram).len(), 4);
    }

    #[test]
    fn frames_round_trip() {
        let o = Point::new(Scalar::from(1), Scalar::Exact(ExactValue::sqrt2()));
        for kind in [FrameKind::Axis, FrameKind::Diagonal] {
            let f = Frame::new(kind, o.clone());
            for g in [(0, 0), (3, -2), (-5, 7)] {
                assert_eq!(f.to_grid(&f.to_world(g)), Some(g));
            }
        }
        let f = Frame::new(FrameKind::Axis, Point::origin());
        assert_eq!(f.to_grid(&Point::new(Scalar::Exact(ExactValue::half_sqrt2()), Scalar::zero())), None);
    }

    #[test]
    fn neighbours_are_symmetric() {
        let a = Atom { i: 2, j: -1, q: 0 };
        for b in a.neighbours() {
            assert!(b.neighbours().contains(&a));
        }
    }
}
