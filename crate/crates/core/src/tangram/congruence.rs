use thiserror::Error;

use crate::exactnum::ExactValue;
use crate::geom::kernel::{merge_collinear, XY};
use crate::geom::{Point, Polygon, RigidTransform};

use super::document::Outline;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("congruence keys need exact outline coordinates")]
pub struct ApproximateOutline;

/// Canonical text for the ring of `points`: collinear vertices merged,
/// counterclockwise, translated so the smallest (x, then y) vertex sits at the
/// origin and starts the ring.
fn ring_key(points: Vec<Point>) -> String {
    let poly = Polygon::new(points).expect("images of an outline are polygons");
    let ring: Vec<XY<ExactValue>> = poly.exact_ring().expect("exact outline");
    let ring = merge_collinear(&ring, 0.0);
    let start = (0..ring.len()).min_by(|&i, &j| (&ring[i].x, &ring[i].y).cmp(&(&ring[j].x, &ring[j].y))).expect("non-empty ring");
    let origin = ring[start].clone();
    let mut key = String::new();
    for k in 0..ring.len() {
        let p = ring[(start + k) % ring.len()].sub(&origin);
        key.push_str(&format!("({},{})", p.x, p.y));
    }
    key
}

/// A string shared by exactly the outlines congruent under the 16 lattice
/// symmetries (45° rotations with optional reflection) and translation.
pub fn silhouette_key(o: &Outline) -> Result<String, ApproximateOutline> {
    if !o.is_exact() {
        return Err(ApproximateOutline);
    }
    let mut best: Option<String> = None;
    for reflected in [false, true] {
        for steps in 0..8 {
            let t = RigidTransform::from_parts(steps, reflected, Default::default(), Default::default());
            let key = ring_key(o.polygon.vertices().iter().map(|p| t.apply_point(p)).collect());
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    Ok(best.expect("sixteen candidates"))
}

pub fn congruent_silhouettes(a: &Outline, b: &Outline) -> Result<bool, ApproximateOutline> {
    Ok(silhouette_key(a)? == silhouette_key(b)?)
}
