//! Deterministic SVG drawings of tiling windows and pinecones.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::ops::RangeInclusive;

use crate::galerob::GRSpec;
use crate::matching::Matching;
use crate::pinecone::{is_white, Pinecone};
use crate::tiling::{Shape, Tiling, TilingError};

const UNIT: i64 = 40;
const MARGIN: i64 = 20;

/// Accumulates SVG elements in drawing coordinates (x right, y down, in
/// units of one cell).
struct Canvas {
    body: String,
    min: (i64, i64),
    max: (i64, i64),
    touched: bool,
}

impl Canvas {
    fn new() -> Self {
        Canvas { body: String::new(), min: (0, 0), max: (0, 0), touched: false }
    }

    fn extend(&mut self, x: i64, y: i64) {
        if !self.touched {
            self.min = (x, y);
            self.max = (x, y);
            self.touched = true;
        }
        self.min = (self.min.0.min(x), self.min.1.min(y));
        self.max = (self.max.0.max(x), self.max.1.max(y));
    }

    fn rect(&mut self, x: i64, y: i64, w: i64, fill: &str) {
        self.extend(x, y);
        self.extend(x + w, y + 1);
        writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{UNIT}" fill="{fill}"/>"#,
            x * UNIT,
            y * UNIT,
            w * UNIT
        )
        .unwrap();
    }

    fn line(&mut self, a: (i64, i64), b: (i64, i64), stroke: &str, width: u32) {
        self.extend(a.0, a.1);
        self.extend(b.0, b.1);
        writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{width}"/>"#,
            a.0 * UNIT,
            a.1 * UNIT,
            b.0 * UNIT,
            b.1 * UNIT
        )
        .unwrap();
    }

    fn dot(&mut self, p: (i64, i64), white: bool) {
        self.extend(p.0, p.1);
        let fill = if white { "white" } else { "black" };
        writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="5" fill="{fill}" stroke="black" stroke-width="1.5"/>"#,
            p.0 * UNIT,
            p.1 * UNIT
        )
        .unwrap();
    }

    /// Text centred at `x2 / 2, y2 / 2` (half-cell resolution).
    fn label(&mut self, x2: i64, y2: i64, text: &str) {
        writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="central">{text}</text>"#,
            x2 * UNIT / 2,
            y2 * UNIT / 2
        )
        .unwrap();
    }

    fn finish(self) -> String {
        let (x0, y0) = (self.min.0 * UNIT - MARGIN, self.min.1 * UNIT - MARGIN);
        let (w, h) = if self.touched {
            ((self.max.0 - self.min.0) * UNIT + 2 * MARGIN, (self.max.1 - self.min.1) * UNIT + 2 * MARGIN)
        } else {
            (0, 0)
        };
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {w} {h}" width="{w}" height="{h}">"#,
            if self.touched { x0 } else { 0 },
            if self.touched { y0 } else { 0 }
        )
        .unwrap();
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn shape_fill(shape: Shape) -> &'static str {
    match shape {
        Shape::Square => "#dbe9f6",
        Shape::Hexagon => "#f6ecd0",
    }
}

/// The tiling cells with rows in `rows` and columns in `cols`: faces tinted by
/// shape and labeled, tiling edges, and vertices colored black or white.
/// Cell `(y, p)` is drawn with its upper-left corner at tiling vertex `(y, p)`.
pub fn render_window(
    spec: GRSpec,
    rows: RangeInclusive<i64>,
    cols: RangeInclusive<i64>,
) -> Result<String, TilingError> {
    let tiling = Tiling::new(spec)?;
    let mut canvas = Canvas::new();
    let at = |vy: i64, vx: i64| (vx, -vy);
    let mut faces = BTreeSet::new();
    for y in rows.clone().rev() {
        for p in cols.clone() {
            let f = tiling.face_at(y, p);
            canvas.rect(p, -y, 1, shape_fill(f.shape));
            faces.insert(f);
        }
    }
    let mut segments = BTreeSet::new();
    for y in rows.clone() {
        for p in cols.clone() {
            // Top and bottom sides are always edges; left and right sides are
            // edges unless interior to a hexagon.
            segments.insert((at(y, p), at(y, p + 1)));
            segments.insert((at(y - 1, p), at(y - 1, p + 1)));
            for vx in [p, p + 1] {
                if tiling.has_vertical_edge(y, vx) {
                    segments.insert((at(y, vx), at(y - 1, vx)));
                }
            }
        }
    }
    for (a, b) in segments {
        canvas.line(a, b, "black", 2);
    }
    for f in &faces {
        let inside: Vec<i64> = f.cells().filter(|c| rows.contains(&c.0) && cols.contains(&c.1)).map(|c| c.1).collect();
        let (lo, hi) = (inside[0], inside[inside.len() - 1]);
        canvas.label(lo + hi + 1, -2 * f.anchor.0 + 1, &f.label.to_string());
    }
    for vy in rows.clone().map(|y| y - 1).chain(rows.clone().last()) {
        for vx in cols.clone().chain(cols.clone().last().map(|p| p + 1)) {
            canvas.dot(at(vy, vx), tiling.is_white(vy, vx));
        }
    }
    Ok(canvas.finish())
}

/// A pinecone in its own frame (row up, column leftward): face labels, edges,
/// black and white vertices, and optionally a matching drawn in red.
pub fn render_pinecone(g: &Pinecone, highlight: Option<&Matching>) -> String {
    let mut canvas = Canvas::new();
    let at = |v: (i64, i64)| (-v.1, -v.0);
    for f in g.faces() {
        let (i, j) = f.anchor;
        canvas.rect(-j - 1, -i, f.width(), shape_fill(f.shape));
    }
    for e in g.edges() {
        let marked = highlight.is_some_and(|m| m.contains(e));
        let (stroke, width) = if marked { ("#d0021b", 6) } else { ("black", 2) };
        canvas.line(at(e.0), at(e.1), stroke, width);
    }
    for f in g.faces() {
        let (i, j) = f.anchor;
        canvas.label(-2 * j - 2 + f.width(), -2 * i + 1, &f.label.to_string());
    }
    for &v in g.vertices() {
        canvas.dot(at(v), is_white(v));
    }
    canvas.finish()
}
