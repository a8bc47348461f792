//! Number-generic planar kernel shared by the exact and binary64 tracks.
//!
//! Every predicate takes a coincidence tolerance; exact coordinates ignore it
//! and decide signs exactly.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Debug;

use crate::exactnum::{ExactValue, Scalar};

pub trait Num: Clone + PartialEq + Debug + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn from_int(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `o` must be non-zero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn half(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn to_scalar(&self) -> Scalar;
    /// Sign with a dead band of `tol` (ignored by exact numbers).
    fn sign_tol(&self, tol: f64) -> i8;
    fn cmp_num(&self, o: &Self) -> Ordering;
}

impl Num for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn half(&self) -> Self {
        self * 0.5
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Approx(*self)
    }
    fn sign_tol(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn cmp_num(&self, o: &Self) -> Ordering {
        self.total_cmp(o)
    }
}

impl Num for ExactValue {
    const EXACT: bool = true;
    fn zero() -> Self {
        ExactValue::zero()
    }
    fn from_int(v: i64) -> Self {
        ExactValue::from_integer(v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn half(&self) -> Self {
        self * &ExactValue::from_parts((1, 2), (0, 1))
    }
    fn to_f64(&self) -> f64 {
        ExactValue::to_f64(self)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn sign_tol(&self, _tol: f64) -> i8 {
        self.signum()
    }
    fn cmp_num(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct XY<T> {
    pub x: T,
    pub y: T,
}

impl<T: Num> XY<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
    pub fn sub(&self, o: &Self) -> Self {
        XY::new(self.x.sub(&o.x), self.y.sub(&o.y))
    }
    pub fn add(&self, o: &Self) -> Self {
        XY::new(self.x.add(&o.x), self.y.add(&o.y))
    }
    pub fn scale(&self, t: &T) -> Self {
        XY::new(self.x.mul(t), self.y.mul(t))
    }
    pub fn to_f64(&self) -> XY<f64> {
        XY::new(self.x.to_f64(), self.y.to_f64())
    }
}

pub fn cross<T: Num>(u: &XY<T>, v: &XY<T>) -> T {
    u.x.mul(&v.y).sub(&u.y.mul(&v.x))
}

pub fn dot<T: Num>(u: &XY<T>, v: &XY<T>) -> T {
    u.x.mul(&v.x).add(&u.y.mul(&v.y))
}

/// Twice the signed area of triangle `abc`.
pub fn orient<T: Num>(a: &XY<T>, b: &XY<T>, c: &XY<T>) -> T {
    cross(&b.sub(a), &c.sub(a))
}

pub fn length_f64<T: Num>(a: &XY<T>, b: &XY<T>) -> f64 {
    let d = b.sub(a).to_f64();
    d.x.hypot(d.y)
}

/// Which side of line `ab` point `c` lies on; zero when the distance is within
/// `tol` (approximate track) or exactly zero (exact track).
pub fn side<T: Num>(a: &XY<T>, b: &XY<T>, c: &XY<T>, tol: f64) -> i8 {
    let o = orient(a, b, c);
    if T::EXACT {
        o.sign_tol(0.0)
    } else {
        o.sign_tol(tol * length_f64(a, b))
    }
}

pub fn same_point<T: Num>(a: &XY<T>, b: &XY<T>, tol: f64) -> bool {
    if T::EXACT {
        a == b
    } else {
        a.x.sub(&b.x).sign_tol(tol) == 0 && a.y.sub(&b.y).sign_tol(tol) == 0
    }
}

pub fn midpoint<T: Num>(a: &XY<T>, b: &XY<T>) -> XY<T> {
    XY::new(a.x.add(&b.x).half(), a.y.add(&b.y).half())
}

/// Parameter of the projection of `c` onto segment `ab` (`ab` non-degenerate).
pub fn param<T: Num>(a: &XY<T>, b: &XY<T>, c: &XY<T>) -> T {
    let d = b.sub(a);
    dot(&c.sub(a), &d).div(&dot(&d, &d))
}

pub fn edges<T>(ring: &[XY<T>]) -> impl Iterator<Item = (&XY<T>, &XY<T>)> {
    let n = ring.len();
    (0..n).map(move |i| (&ring[i], &ring[(i + 1) % n]))
}

/// Twice the signed (shoelace) area.
pub fn signed_area2<T: Num>(ring: &[XY<T>]) -> T {
    edges(ring).fold(T::zero(), |acc, (a, b)| acc.add(&cross(a, b)))
}

pub fn is_convex<T: Num>(ring: &[XY<T>], tol: f64) -> bool {
    let n = ring.len();
    let area_sign = signed_area2(ring).sign_tol(0.0);
    (0..n).all(|i| {
        let s = side(&ring[i], &ring[(i + 1) % n], &ring[(i + 2) % n], tol);
        s == 0 || s == area_sign
    })
}

/// True when no two non-adjacent edges touch and adjacent edges meet only at
/// their shared vertex.
pub fn is_simple<T: Num>(ring: &[XY<T>], tol: f64) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (&ring[j], &ring[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Folding back onto the previous edge.
                let (p, q, r) = if j == i + 1 { (a, b, d) } else { (c, a, b) };
                if side(p, q, r, tol) == 0 && dot(&q.sub(p), &r.sub(q)).sign_tol(0.0) < 0 {
                    return false;
                }
                continue;
            }
            if segments_touch(a, b, c, d, tol) {
                return false;
            }
        }
    }
    true
}

fn on_segment<T: Num>(a: &XY<T>, b: &XY<T>, p: &XY<T>, tol: f64) -> bool {
    if side(a, b, p, tol) != 0 {
        return false;
    }
    let d = b.sub(a);
    let t = dot(&p.sub(a), &d);
    let len2 = dot(&d, &d);
    let slack = if T::EXACT { 0.0 } else { tol * length_f64(a, b) };
    t.sign_tol(slack) >= 0 && len2.sub(&t).sign_tol(slack) >= 0
}

pub fn segments_touch<T: Num>(a: &XY<T>, b: &XY<T>, c: &XY<T>, d: &XY<T>, tol: f64) -> bool {
    let s1 = side(a, b, c, tol);
    let s2 = side(a, b, d, tol);
    let s3 = side(c, d, a, tol);
    let s4 = side(c, d, b, tol);
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    on_segment(a, b, c, tol) || on_segment(a, b, d, tol) || on_segment(c, d, a, tol) || on_segment(c, d, b, tol)
}

/// Parameter along `ab` of a proper crossing with `cd`.
fn crossing_param<T: Num>(a: &XY<T>, b: &XY<T>, c: &XY<T>, d: &XY<T>, tol: f64) -> Option<T> {
    let s1 = side(a, b, c, tol);
    let s2 = side(a, b, d, tol);
    let s3 = side(c, d, a, tol);
    let s4 = side(c, d, b, tol);
    if s1 * s2 >= 0 || s3 * s4 >= 0 {
        return None;
    }
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = cross(&r, &s);
    Some(cross(&c.sub(a), &s).div(&denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Winding-number point location with an explicit boundary class.
pub fn locate<T: Num>(pt: &XY<T>, ring: &[XY<T>], tol: f64) -> Location {
    for (a, b) in edges(ring) {
        if on_segment(a, b, pt, tol) {
            return Location::Boundary;
        }
    }
    let mut wn = 0i32;
    for (a, b) in edges(ring) {
        let a_le = a.y.cmp_num(&pt.y) != Ordering::Greater;
        let b_le = b.y.cmp_num(&pt.y) != Ordering::Greater;
        if a_le && !b_le {
            if orient(a, b, pt).sign_tol(0.0) > 0 {
                wn += 1;
            }
        } else if !a_le && b_le && orient(a, b, pt).sign_tol(0.0) < 0 {
            wn -= 1;
        }
    }
    if wn != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

fn dedup_ring<T: Num>(pts: &mut Vec<XY<T>>, tol: f64) {
    pts.dedup_by(|b, a| same_point(a, b, tol));
    while pts.len() > 1 && same_point(&pts[0], pts.last().unwrap(), tol) {
        pts.pop();
    }
}

/// Sutherland-Hodgman clip of `subject` by the counterclockwise convex ring
/// `clip`. Returns the (possibly degenerate) clipped ring.
pub fn clip_convex<T: Num>(subject: &[XY<T>], clip: &[XY<T>], tol: f64) -> Vec<XY<T>> {
    let mut out: Vec<XY<T>> = subject.to_vec();
    for (a, b) in edges(clip) {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let prev = &input[(i + n - 1) % n];
            let cur = &input[i];
            let cur_in = side(a, b, cur, tol) >= 0;
            let prev_in = side(a, b, prev, tol) >= 0;
            if cur_in != prev_in {
                let op = orient(a, b, prev);
                let oc = orient(a, b, cur);
                let t = op.div(&op.sub(&oc));
                out.push(prev.add(&cur.sub(prev).scale(&t)));
            }
            if cur_in {
                out.push(cur.clone());
            }
        }
        dedup_ring(&mut out, tol);
    }
    out
}

/// Areas of the regions selected by each predicate, where a predicate sees,
/// per group, whether the point is covered (non-zero winding) by any ring of
/// that group. Computed by an exact vertical-slab sweep: within a slab no
/// edges cross, so the covered region is a stack of trapezoids.
pub fn region_measures<T: Num>(rings: &[(usize, &[XY<T>])], n_groups: usize, preds: &[&dyn Fn(&[bool]) -> bool]) -> Vec<T> {
    struct Edge<T> {
        a: XY<T>,
        b: XY<T>,
        ring: usize,
        dir: i32,
    }
    let mut edges_v: Vec<Edge<T>> = Vec::new();
    let mut xs: Vec<T> = Vec::new();
    for (ri, (_, ring)) in rings.iter().enumerate() {
        for (p, q) in edges(ring) {
            xs.push(p.x.clone());
            match p.x.cmp_num(&q.x) {
                Ordering::Less => edges_v.push(Edge { a: p.clone(), b: q.clone(), ring: ri, dir: 1 }),
                Ordering::Greater => edges_v.push(Edge { a: q.clone(), b: p.clone(), ring: ri, dir: -1 }),
                Ordering::Equal => {}
            }
        }
    }
    for i in 0..edges_v.len() {
        for j in (i + 1)..edges_v.len() {
            let (e, f) = (&edges_v[i], &edges_v[j]);
            if e.b.x.cmp_num(&f.a.x) != Ordering::Greater || f.b.x.cmp_num(&e.a.x) != Ordering::Greater {
                continue;
            }
            if let Some(t) = crossing_param(&e.a, &e.b, &f.a, &f.b, 0.0) {
                xs.push(e.a.x.add(&e.b.x.sub(&e.a.x).mul(&t)));
            }
        }
    }
    xs.sort_by(|a, b| a.cmp_num(b));
    xs.dedup_by(|a, b| a.cmp_num(b) == Ordering::Equal);

    let y_at = |e: &Edge<T>, x: &T| -> T {
        let t = x.sub(&e.a.x).div(&e.b.x.sub(&e.a.x));
        e.a.y.add(&e.b.y.sub(&e.a.y).mul(&t))
    };

    let mut totals = vec![T::zero(); preds.len()];
    let mut winding = vec![0i32; rings.len()];
    let mut covered = vec![false; n_groups];
    for w in xs.windows(2) {
        let (x0, x1) = (&w[0], &w[1]);
        let width = x1.sub(x0);
        let mut active: Vec<(T, T, T, usize, i32)> = edges_v
            .iter()
            .filter(|e| e.a.x.cmp_num(x0) != Ordering::Greater && e.b.x.cmp_num(x1) != Ordering::Less)
            .map(|e| {
                let y0 = y_at(e, x0);
                let y1 = y_at(e, x1);
                let ym = y0.add(&y1);
                (ym, y0, y1, e.ring, e.dir)
            })
            .collect();
        if active.len() < 2 {
            continue;
        }
        active.sort_by(|a, b| a.0.cmp_num(&b.0));
        winding.iter_mut().for_each(|w| *w = 0);
        for k in 0..active.len() - 1 {
            winding[active[k].3] += active[k].4;
            covered.iter_mut().for_each(|c| *c = false);
            for (ri, (g, _)) in rings.iter().enumerate() {
                if winding[ri] != 0 {
                    covered[*g] = true;
                }
            }
            let (lo, hi) = (&active[k], &active[k + 1]);
            let h = hi.1.sub(&lo.1).add(&hi.2.sub(&lo.2)).half().mul(&width);
            for (pi, pred) in preds.iter().enumerate() {
                if pred(&covered) {
                    totals[pi] = totals[pi].add(&h);
                }
            }
        }
    }
    totals
}

/// Boundary of the union of `rings` as directed fragments (interior on the
/// left). Every edge is split at other rings' vertices and proper crossings;
/// fragments interior to another ring, or coincident with an oppositely
/// directed fragment, are dropped; same-direction duplicates are kept once.
pub fn union_boundary<T: Num>(rings: &[Vec<XY<T>>], tol: f64) -> Vec<(XY<T>, XY<T>)> {
    let mut out = Vec::new();
    for (i, ring) in rings.iter().enumerate() {
        for (a, b) in edges(ring) {
            let len = length_f64(a, b);
            let mut cuts: Vec<(T, XY<T>)> = vec![(T::zero(), a.clone()), (T::from_int(1), b.clone())];
            for (j, other) in rings.iter().enumerate() {
                if j == i {
                    continue;
                }
                for v in other {
                    if side(a, b, v, tol) != 0 {
                        continue;
                    }
                    let t = param(a, b, v);
                    let inside = if T::EXACT {
                        t.sign_tol(0.0) > 0 && T::from_int(1).sub(&t).sign_tol(0.0) > 0
                    } else {
                        let tf = t.to_f64();
                        tf * len > tol && (1.0 - tf) * len > tol
                    };
                    if inside {
                        cuts.push((t, v.clone()));
                    }
                }
                for (c, d) in edges(other) {
                    if let Some(t) = crossing_param(a, b, c, d, tol) {
                        let p = a.add(&b.sub(a).scale(&t));
                        cuts.push((t, p));
                    }
                }
            }
            cuts.sort_by(|x, y| x.0.cmp_num(&y.0));
            cuts.dedup_by(|y, x| same_point(&x.1, &y.1, tol));
            for w in cuts.windows(2) {
                let (p, q) = (&w[0].1, &w[1].1);
                if same_point(p, q, tol) {
                    continue;
                }
                if keep_fragment(rings, i, p, q, tol) {
                    out.push((p.clone(), q.clone()));
                }
            }
        }
    }
    out
}

fn keep_fragment<T: Num>(rings: &[Vec<XY<T>>], owner: usize, p: &XY<T>, q: &XY<T>, tol: f64) -> bool {
    let m = midpoint(p, q);
    let dir = q.sub(p);
    for (j, other) in rings.iter().enumerate() {
        if j == owner {
            continue;
        }
        match locate(&m, other, tol) {
            Location::Outside => {}
            Location::Inside => return false,
            Location::Boundary => {
                let along = edges(other).find(|(c, d)| on_segment(c, d, &m, tol) && side(c, d, p, tol) == 0 && side(c, d, q, tol) == 0);
                // No collinear edge means the midpoint merely touches the
                // other boundary; keep it.
                if let Some((c, d)) = along {
                    if dot(&dir, &d.sub(c)).sign_tol(0.0) < 0 || j < owner {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn heading(v: &XY<f64>) -> f64 {
    v.y.atan2(v.x)
}

/// Chains directed fragments into closed loops. At a vertex with several
/// outgoing fragments the walk takes the first one counterclockwise from the
/// reversed incoming direction (the sharpest right turn), so a region pinched
/// off at a single vertex comes out as its own clockwise loop.
pub fn trace_loops<T: Num>(frags: &[(XY<T>, XY<T>)], tol: f64) -> Vec<Vec<XY<T>>> {
    let n = frags.len();
    let mut used = vec![false; n];
    let mut loops = Vec::new();
    for start in 0..n {
        if used[start] {
            continue;
        }
        let mut pts = Vec::new();
        let mut cur = start;
        loop {
            used[cur] = true;
            pts.push(frags[cur].0.clone());
            let (from, to) = (&frags[cur].0, &frags[cur].1);
            let back = from.sub(to).to_f64();
            let back_h = heading(&back);
            let mut best: Option<(f64, usize)> = None;
            for k in 0..n {
                if (used[k] && k != start) || !same_point(&frags[k].0, to, tol) {
                    continue;
                }
                let out = frags[k].1.sub(&frags[k].0).to_f64();
                let mut ccw = heading(&out) - back_h;
                while ccw <= 1e-12 {
                    ccw += 2.0 * PI;
                }
                while ccw > 2.0 * PI + 1e-12 {
                    ccw -= 2.0 * PI;
                }
                if best.is_none_or(|(b, _)| ccw < b) {
                    best = Some((ccw, k));
                }
            }
            match best {
                Some((_, k)) if k != start => cur = k,
                _ => break,
            }
        }
        loops.push(pts);
    }
    loops
}

/// Drops vertices whose neighbours continue in the same direction.
pub fn merge_collinear<T: Num>(ring: &[XY<T>], tol: f64) -> Vec<XY<T>> {
    let mut pts: Vec<XY<T>> = ring.to_vec();
    dedup_ring(&mut pts, tol);
    let mut changed = true;
    while changed && pts.len() > 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = &pts[(i + n - 1) % n];
            let next = &pts[(i + 1) % n];
            let cur = &pts[i];
            if side(prev, next, cur, tol) == 0 && dot(&cur.sub(prev), &next.sub(cur)).sign_tol(0.0) > 0 {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Total length of collinear overlap between the boundaries of two rings, and
/// whether any overlap is strictly positive (exact on the exact track).
pub fn shared_boundary<T: Num>(a: &[XY<T>], b: &[XY<T>], tol: f64) -> (bool, f64) {
    let mut positive = false;
    let mut total = 0.0;
    for (p, q) in edges(a) {
        let len = length_f64(p, q);
        for (c, d) in edges(b) {
            if side(p, q, c, tol) != 0 || side(p, q, d, tol) != 0 {
                continue;
            }
            let tc = param(p, q, c);
            let td = param(p, q, d);
            let (lo_t, hi_t) = if tc.cmp_num(&td) == Ordering::Less { (tc, td) } else { (td, tc) };
            let zero = T::zero();
            let one = T::from_int(1);
            let lo = if lo_t.cmp_num(&zero) == Ordering::Less { zero } else { lo_t };
            let hi = if hi_t.cmp_num(&one) == Ordering::Greater { one } else { hi_t };
            let span = hi.sub(&lo);
            if span.sign_tol(0.0) > 0 {
                let l = span.to_f64() * len;
                total += l;
                if T::EXACT || l > tol {
                    positive = true;
                }
            }
        }
    }
    (positive, total)
}

/// Distance from `p` to segment `ab`.
pub fn point_segment_distance(p: &XY<f64>, a: &XY<f64>, b: &XY<f64>) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let cx = a.x + t * dx;
    let cy = a.y + t * dy;
    (p.x - cx).hypot(p.y - cy)
}
