//! Deterministic SVG documents for outlines, assemblies and Task-1 items.

use std::fmt::Write;

use super::task1::McItem;
use crate::geom::Point;
use crate::tangram::{Outline, PieceKind, PieceState};

const SIZE: f64 = 512.0;
const MARGIN: f64 = 0.05;

struct Viewport {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Viewport {
    fn around<'a>(points: impl Iterator<Item = &'a Point>) -> Viewport {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            let (x, y) = p.to_f64();
            (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
        }
        if !x0.is_finite() {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let m = MARGIN * (x1 - x0).max(y1 - y0).max(1e-9);
        Viewport { x0: x0 - m, y0: y0 - m, w: x1 - x0 + 2.0 * m, h: y1 - y0 + 2.0 * m }
    }

    /// Document coordinates with y pointing down.
    fn map(&self, p: &Point) -> (f64, f64) {
        let (x, y) = p.to_f64();
        (x, 2.0 * self.y0 + self.h - y)
    }

    fn view_box(&self) -> String {
        format!("{} {} {} {}", num(self.x0), num(self.y0), num(self.w), num(self.h))
    }

    fn pixel_size(&self) -> (f64, f64) {
        let s = SIZE / self.w.max(self.h);
        (self.w * s, self.h * s)
    }

    fn unit(&self) -> f64 {
        self.w.max(self.h) / SIZE
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" { "0.0000".into() } else { s }
}

fn path(vp: &Viewport, pts: &[Point]) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = vp.map(p);
        let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, num(x), num(y));
    }
    d.push('Z');
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(vp: &Viewport) -> String {
    let (w, h) = vp.pixel_size();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{}\">\n",
        num(w),
        num(h),
        vp.view_box()
    )
}

fn outline_body(vp: &Viewport, o: &Outline) -> String {
    format!("<path d=\"{}\" fill=\"#000000\" stroke=\"none\"/>\n", path(vp, o.polygon.vertices()))
}

/// Filled silhouette. With `annotate`, every vertex carries its exact
/// coordinates as a text label.
pub fn render_outline(o: &Outline, annotate: bool) -> String {
    let vp = Viewport::around(o.polygon.vertices().iter());
    let mut s = open(&vp);
    s.push_str(&outline_body(&vp, o));
    if annotate {
        let fs = 12.0 * vp.unit();
        for v in o.polygon.vertices() {
            let (x, y) = vp.map(v);
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#d62728\"/><text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"monospace\" fill=\"#d62728\">{}</text>",
                num(x),
                num(y),
                num(fs / 4.0),
                num(x + fs / 3.0),
                num(y - fs / 3.0),
                num(fs),
                escape(&format!("({}, {})", v.x, v.y))
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn colour(k: PieceKind) -> &'static str {
    match k {
        PieceKind::LargeTriangle1 => "#1f77b4",
        PieceKind::LargeTriangle2 => "#ff7f0e",
        PieceKind::MediumTriangle => "#2ca02c",
        PieceKind::SmallTriangle1 => "#d62728",
        PieceKind::SmallTriangle2 => "#9467bd",
        PieceKind::Square => "#e6c229",
        PieceKind::Parallelogram => "#17becf",
    }
}

/// Assembly with one outlined, coloured path per piece.
pub fn render_pieces(pieces: &[PieceState]) -> String {
    let vp = Viewport::around(pieces.iter().flat_map(|p| p.polygon.vertices()));
    let mut s = open(&vp);
    let sw = num(1.5 * vp.unit());
    for p in pieces {
        let _ = writeln!(
            s,
            "<path data-piece=\"{}\" d=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{sw}\" stroke-linejoin=\"round\"/>",
            p.kind.label(),
            path(&vp, p.polygon.vertices()),
            colour(p.kind)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The four options in a labeled 2×2 grid, A and B on top.
pub fn render_mc(item: &McItem) -> String {
    let panel = SIZE / 2.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n<rect width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n",
        num(SIZE)
    );
    for (k, opt) in item.options.iter().enumerate() {
        let (px, py) = ((k % 2) as f64 * panel, (k / 2) as f64 * panel);
        let vp = Viewport::around(opt.outline.polygon.vertices().iter());
        let inner = panel * 0.8;
        let _ = write!(
            s,
            "<g class=\"panel\" data-label=\"{label}\">\n<rect x=\"{x}\" y=\"{y}\" width=\"{p}\" height=\"{p}\" fill=\"none\" stroke=\"#888888\"/>\n<text x=\"{tx}\" y=\"{ty}\" font-size=\"24\" font-family=\"sans-serif\">{label}</text>\n<svg x=\"{ix}\" y=\"{iy}\" width=\"{i}\" height=\"{i}\" viewBox=\"{vb}\">\n{body}</svg>\n</g>\n",
            label = opt.label,
            x = num(px),
            y = num(py),
            p = num(panel),
            tx = num(px + 8.0),
            ty = num(py + 28.0),
            ix = num(px + panel * 0.15),
            iy = num(py + panel * 0.15),
            i = num(inner * 0.9),
            vb = vp.view_box(),
            body = outline_body(&vp, &opt.outline),
        );
    }
    s.push_str("</svg>\n");
    s
}
