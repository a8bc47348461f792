use super::kernel::{self, XY};
use super::{Polygon, SegmentSet};

pub const DEFAULT_HAUSDORFF_RESOLUTION: f64 = 0.01;

/// Area of `∪u ∩ t` over area of `∪u ∪ t`, in binary64; 0 when the union has
/// no area.
pub fn iou(u: &[Polygon], t: &Polygon) -> f64 {
    let tr = t.approx_ring();
    let ur: Vec<Vec<XY<f64>>> = u.iter().map(Polygon::approx_ring).collect();
    let mut rings: Vec<(usize, &[XY<f64>])> = ur.iter().map(|r| (0, &r[..])).collect();
    rings.push((1, &tr[..]));
    let both = |c: &[bool]| c[0] && c[1];
    let either = |c: &[bool]| c[0] || c[1];
    let m = kernel::region_measures(&rings, 2, &[&both, &either]);
    if m[1] <= 0.0 {
        return 0.0;
    }
    (m[0] / m[1]).clamp(0.0, 1.0)
}

fn directed(from: &[(XY<f64>, XY<f64>)], to: &[(XY<f64>, XY<f64>)], resolution: f64) -> f64 {
    let nearest = |p: &XY<f64>| to.iter().map(|(a, b)| kernel::point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min);
    let mut worst = 0.0f64;
    for (a, b) in from {
        let len = (b.x - a.x).hypot(b.y - a.y);
        let n = ((len / resolution).ceil() as usize).max(1);
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let p = XY::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
            worst = worst.max(nearest(&p));
        }
    }
    worst
}

/// Symmetric Hausdorff distance between two boundaries, sampling each segment
/// at spacing `resolution`; the estimate is within `resolution / 2` of the
/// true value. Infinite when either set is empty.
pub fn hausdorff(a: &SegmentSet, b: &SegmentSet, resolution: f64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let (sa, sb) = (a.approx(), b.approx());
    directed(&sa, &sb, resolution).max(directed(&sb, &sa, resolution))
}
