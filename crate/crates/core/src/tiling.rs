//! The doubly periodic brane tiling of a Gale-Robinson quiver.
//!
//! The unfolded quiver lives on `Z^2` with vertex `(A, B)` labeled
//! `1 + A r + B s mod N`. Its planar dual is drawn on the unit grid: every
//! quiver row becomes a row of cells, square faces take one cell and hexagons
//! two horizontally adjacent cells. Cell rows and quiver rows share the index
//! `y`; moving right along a row adds `r` to the label.
//!
//! Grid conventions (all `i64`):
//! - vertex `(vy, vx)`, `vy` upward, `vx` rightward;
//! - cell `(y, p)` is the unit square with top-left vertex `(y, p)`, i.e. it sits
//!   between vertex rows `y - 1` and `y` and vertex columns `p` and `p + 1`.

use serde::Serialize;
use thiserror::Error;

use crate::galerob::GRSpec;
use crate::quiver::gale_robinson_arrows;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("the tiling needs r < s, got r = s = {0}")]
    EqualSteps(usize),
    #[error("vertex {label} has degree {degree} in the unfolded quiver; expected 4 or 6")]
    Degree { label: usize, degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Hexagon,
}

impl Shape {
    pub fn width(self) -> i64 {
        match self {
            Shape::Square => 1,
            Shape::Hexagon => 2,
        }
    }
}

/// One face of the tiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TilingFace {
    pub label: usize,
    pub shape: Shape,
    /// The face's left cell `(y, p)`.
    pub anchor: (i64, i64),
    /// Position `(A, B)` of the dual quiver vertex.
    pub quiver_pos: (i64, i64),
}

impl TilingFace {
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.shape.width()).map(move |k| (self.anchor.0, self.anchor.1 + k))
    }

    pub fn right_col(&self) -> i64 {
        self.anchor.1 + self.shape.width() - 1
    }
}

/// The four local configurations of a unit square of the unfolded quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrientationCase {
    pub case_id: u8,
    /// Diagonal arrow `(tail, head)` by label, present in cases 1 and 3.
    pub diagonal: Option<(usize, usize)>,
}

/// Label of the unfolded-quiver vertex `(A, B)`, in `1..=N`.
pub fn vertex_label(spec: GRSpec, a: i64, b: i64) -> usize {
    let n = spec.n as i64;
    ((a * spec.r as i64 + b * spec.s as i64).rem_euclid(n) + 1) as usize
}

/// Configuration of the square whose lower-left corner is labeled `i`
/// (corners `i`, `i+s`, `i+r+s`, `i+r` clockwise from the lower left).
pub fn square_case(spec: GRSpec, i: usize) -> OrientationCase {
    let GRSpec { r, s, n } = spec;
    let wrap = |v: usize| (v - 1) % n + 1;
    if i + r + s <= n {
        OrientationCase { case_id: 1, diagonal: Some((i + r, i + s)) }
    } else if i + s <= n {
        OrientationCase { case_id: 2, diagonal: None }
    } else if i + r <= n {
        OrientationCase { case_id: 3, diagonal: Some((wrap(i + r + s), i)) }
    } else {
        OrientationCase { case_id: 4, diagonal: None }
    }
}

/// The brane tiling for a fixed `(r, s, N)`, with per-label shape and
/// row-offset tables.
#[derive(Debug, Clone)]
pub struct Tiling {
    spec: GRSpec,
    /// `shape[i - 1]` for label `i`.
    shape: Vec<Shape>,
    /// Shift of face boundaries from row `y` to row `y + 1` above the square
    /// with lower-left label `i`: +1 in case 1, -1 in case 3, 0 otherwise.
    delta: Vec<i64>,
    /// Quiver steps after which a row repeats its labels.
    row_period: i64,
}

impl Tiling {
    pub fn new(spec: GRSpec) -> Result<Self, TilingError> {
        if spec.r == spec.s {
            return Err(TilingError::EqualSteps(spec.r));
        }
        let n = spec.n;
        let mut degree = vec![0usize; n];
        for (i, j) in gale_robinson_arrows(spec, true) {
            degree[i - 1] += 1;
            degree[j - 1] += 1;
        }
        let shape = degree
            .iter()
            .enumerate()
            .map(|(k, &d)| match d {
                4 => Ok(Shape::Square),
                6 => Ok(Shape::Hexagon),
                _ => Err(TilingError::Degree { label: k + 1, degree: d }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let delta = (1..=n)
            .map(|i| match square_case(spec, i).case_id {
                1 => 1,
                3 => -1,
                _ => 0,
            })
            .collect();
        let row_period = (n / num_integer::gcd(spec.r, n)) as i64;
        Ok(Tiling { spec, shape, delta, row_period })
    }

    pub fn spec(&self) -> GRSpec {
        self.spec
    }

    pub fn shape_of(&self, label: usize) -> Shape {
        self.shape[label - 1]
    }

    pub fn label(&self, a: i64, b: i64) -> usize {
        vertex_label(self.spec, a, b)
    }

    fn width_at(&self, a: i64, b: i64) -> i64 {
        self.shape_of(self.label(a, b)).width()
    }

    fn delta_at(&self, a: i64, b: i64) -> i64 {
        self.delta[self.label(a, b) - 1]
    }

    /// Total width of one label period of row `b`.
    fn row_period_width(&self, b: i64) -> i64 {
        (1..=self.row_period).map(|a| self.width_at(a, b)).sum()
    }

    /// One past the right cell of the face dual to `(0, b)`.
    fn right_edge_origin(&self, b: i64) -> i64 {
        let mut x = 1;
        if b >= 0 {
            for y in 0..b {
                x += self.delta_at(0, y);
            }
        } else {
            for y in (b..0).rev() {
                x -= self.delta_at(0, y);
            }
        }
        x
    }

    /// One past the right cell of the face dual to `(a, b)`.
    pub fn right_edge(&self, a: i64, b: i64) -> i64 {
        let t = self.row_period;
        let q = a.div_euclid(t);
        let rem = a.rem_euclid(t);
        let mut x = self.right_edge_origin(b) + q * self.row_period_width(b);
        for k in 1..=rem {
            x += self.width_at(q * t + k, b);
        }
        x
    }

    fn face_from_quiver(&self, a: i64, b: i64, right: i64) -> TilingFace {
        let label = self.label(a, b);
        let shape = self.shape_of(label);
        TilingFace { label, shape, anchor: (b, right - shape.width()), quiver_pos: (a, b) }
    }

    pub fn face_of_quiver_vertex(&self, a: i64, b: i64) -> TilingFace {
        self.face_from_quiver(a, b, self.right_edge(a, b))
    }

    /// The face containing cell `(y, p)`.
    pub fn face_at(&self, y: i64, p: i64) -> TilingFace {
        let t = self.row_period;
        let origin = self.right_edge_origin(y);
        let period_w = self.row_period_width(y);
        let q = (p - origin).div_euclid(period_w);
        let mut a = q * t;
        let mut right = origin + q * period_w;
        // Now right <= p < right + period_w; walk to the covering face.
        while right <= p {
            a += 1;
            right += self.width_at(a, y);
        }
        while right - self.width_at(a, y) > p {
            right -= self.width_at(a, y);
            a -= 1;
        }
        self.face_from_quiver(a, y, right)
    }

    /// Whether the unit segment `(vy, vx) - (vy - 1, vx)` is an edge of the tiling
    /// (false only inside a hexagon).
    pub fn has_vertical_edge(&self, vy: i64, vx: i64) -> bool {
        self.face_at(vy, vx - 1).anchor != self.face_at(vy, vx).anchor
    }

    /// Some face with the given label, searching rows upward from 0.
    pub fn find_face(&self, label: usize) -> TilingFace {
        let n = self.spec.n as i64;
        for b in 0..n {
            for a in 0..self.row_period {
                if self.label(a, b) == label {
                    return self.face_of_quiver_vertex(a, b);
                }
            }
        }
        unreachable!("every label occurs within N rows")
    }

    /// Generators `(A, B)` of the translations preserving labels: `(T, 0)` and
    /// `(A_1, 1)` with `A_1 r + s ≡ 0 (mod N)` when it exists, else `(0, N)`.
    pub fn period_vectors(&self) -> Vec<(i64, i64)> {
        let n = self.spec.n as i64;
        let mut out = vec![(self.row_period, 0)];
        let mut b = 1;
        loop {
            if let Some(a) = (0..self.row_period).find(|&a| self.label(a, b) == 1) {
                out.push((a, b));
                break;
            }
            b += 1;
            assert!(b <= n, "label lattice has full rank");
        }
        out
    }

    /// Cell translation `(dy, dp)` induced by a quiver translation `(A, B)`.
    pub fn cell_shift(&self, a: i64, b: i64) -> (i64, i64) {
        (b, self.right_edge(a, b) - self.right_edge(0, 0))
    }

    /// Color of a tiling vertex under the convention that white lies to the
    /// right of every quiver arrow.
    pub fn is_white(&self, vy: i64, vx: i64) -> bool {
        // Fixed by the vertical edge on the right of the face labeled 1 at the
        // origin; consistency over the plane is checked in tests.
        let right = self.right_edge(0, 0);
        let arrow_east = self.label(0, 0) < self.label(1, 0);
        // Eastward arrow: the lower endpoint is white.
        let ref_white_parity = if arrow_east { (right - 1).rem_euclid(2) } else { right.rem_euclid(2) };
        (vx + vy).rem_euclid(2) == ref_white_parity
    }

    /// Arrow dual to a tiling edge, as `(tail label, head label)`.
    /// `vertical` selects the segment `(vy, vx)-(vy-1, vx)`, else `(vy, vx)-(vy, vx+1)`.
    pub fn dual_arrow(&self, vy: i64, vx: i64, vertical: bool) -> Option<(usize, usize)> {
        if vertical {
            if !self.has_vertical_edge(vy, vx) {
                return None;
            }
            let left = self.face_at(vy, vx - 1).label;
            let right = self.face_at(vy, vx).label;
            Some(if left < right { (left, right) } else { (right, left) })
        } else {
            let below = self.face_at(vy, vx);
            let above = self.face_at(vy + 1, vx);
            let (ba, bb) = below.quiver_pos;
            let (aa, ab) = above.quiver_pos;
            debug_assert_eq!(ab, bb + 1);
            Some(if aa == ba {
                // Vertical arrow: larger label to smaller.
                if below.label > above.label {
                    (below.label, above.label)
                } else {
                    (above.label, below.label)
                }
            } else if aa == ba - 1 {
                // Diagonal of case 1: lower right to upper left.
                (below.label, above.label)
            } else {
                debug_assert_eq!(aa, ba + 1);
                // Diagonal of case 3: upper right to lower left.
                (above.label, below.label)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn specs() -> Vec<GRSpec> {
        [(1, 2, 4), (1, 2, 5), (2, 3, 7), (1, 3, 7), (2, 5, 11), (3, 4, 11), (2, 3, 8), (1, 2, 6), (3, 5, 13)]
            .into_iter()
            .map(|(r, s, n)| GRSpec::new(r, s, n).unwrap())
            .collect()
    }

    fn spec(r: usize, s: usize, n: usize) -> GRSpec {
        GRSpec::new(r, s, n).unwrap()
    }

    #[test]
    fn labels() {
        let s = spec(2, 3, 7);
        assert_eq!(vertex_label(s, 0, 0), 1);
        assert_eq!(vertex_label(s, 1, 0), 3);
        assert_eq!(vertex_label(s, 0, 2), 7);
        assert_eq!(vertex_label(s, -1, 0), 6);
    }

    #[test]
    fn cases() {
        let s = spec(2, 3, 7);
        assert_eq!(square_case(s, 1), OrientationCase { case_id: 1, diagonal: Some((3, 4)) });
        assert_eq!(square_case(s, 4).case_id, 2);
        assert_eq!(square_case(spec(1, 2, 5), 5).case_id, 4);
        assert_eq!(square_case(s, 5), OrientationCase { case_id: 3, diagonal: Some((3, 5)) });
    }

    #[test]
    fn rejects_equal_steps() {
        assert_eq!(Tiling::new(spec(1, 1, 2)).unwrap_err(), TilingError::EqualSteps(1));
    }

    #[test]
    fn shapes_by_label() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            for i in 1..=s.n {
                let square = i <= s.r || i > s.n - s.r;
                assert_eq!(t.shape_of(i) == Shape::Square, square, "{s} label {i}");
            }
        }
        let t = Tiling::new(spec(2, 3, 7)).unwrap();
        let squares: Vec<usize> = (1..=7).filter(|&i| t.shape_of(i) == Shape::Square).collect();
        assert_eq!(squares, vec![1, 2, 6, 7]);
        let t = Tiling::new(spec(1, 2, 5)).unwrap();
        let squares: Vec<usize> = (1..=5).filter(|&i| t.shape_of(i) == Shape::Square).collect();
        assert_eq!(squares, vec![1, 5]);
    }

    /// The right edges of the four faces around each unit square of the
    /// quiver must agree whichever way round the square one walks.
    #[test]
    fn row_offsets_commute() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            for b in -8..8 {
                for a in -8..8 {
                    let up_then_right = t.right_edge(a, b + 1) + t.width_at(a + 1, b + 1);
                    let right_then_up = t.right_edge(a + 1, b) + t.delta_at(a + 1, b);
                    assert_eq!(up_then_right, right_then_up, "{s} at ({a},{b})");
                    assert_eq!(t.right_edge(a, b + 1), t.right_edge(a, b) + t.delta_at(a, b));
                }
            }
        }
    }

    #[test]
    fn face_lookup_round_trips() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            for y in -6..6 {
                for p in -20..20 {
                    let f = t.face_at(y, p);
                    assert!(f.anchor.1 <= p && p <= f.right_col());
                    assert_eq!(f, t.face_of_quiver_vertex(f.quiver_pos.0, f.quiver_pos.1));
                    for c in f.cells() {
                        assert_eq!(t.face_at(c.0, c.1), f);
                    }
                }
            }
        }
    }

    #[test]
    fn double_periodicity() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            for (a, b) in t.period_vectors() {
                assert_eq!(t.label(a, b), 1);
                let (dy, dp) = t.cell_shift(a, b);
                for y in -6..6 {
                    for p in -15..15 {
                        let f = t.face_at(y, p);
                        let g = t.face_at(y + dy, p + dp);
                        assert_eq!((f.label, f.shape), (g.label, g.shape), "{s}");
                        assert_eq!(g.anchor, (f.anchor.0 + dy, f.anchor.1 + dp));
                    }
                }
            }
        }
    }

    /// Folding the dual of the tiling back onto labels gives the three-step
    /// arrow multiset of the Gale-Robinson quiver (2-cycles included).
    #[test]
    fn fold_back() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            let mut got: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for label in 1..=s.n {
                let f = t.find_face(label);
                let y = f.anchor.0;
                // Right boundary of the face and the segments along its top.
                let right = f.right_col() + 1;
                *got.entry(t.dual_arrow(y, right, true).unwrap()).or_default() += 1;
                for c in f.cells() {
                    *got.entry(t.dual_arrow(y, c.1, false).unwrap()).or_default() += 1;
                }
            }
            let mut want: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for a in gale_robinson_arrows(s, true) {
                *want.entry(a).or_default() += 1;
            }
            assert_eq!(got, want, "{s}");
        }
    }

    #[test]
    fn every_square_has_one_case() {
        for s in specs() {
            for i in 1..=s.n {
                let c = square_case(s, i);
                assert!((1..=4).contains(&c.case_id));
                assert_eq!(c.diagonal.is_some(), c.case_id % 2 == 1);
            }
        }
    }

    /// White is on the right of every dual arrow, with one global coloring.
    #[test]
    fn white_on_the_right() {
        for s in specs() {
            let t = Tiling::new(s).unwrap();
            for vy in -5..5 {
                for vx in -12..12 {
                    if let Some((tail, _)) = t.dual_arrow(vy, vx, true) {
                        let left = t.face_at(vy, vx - 1).label;
                        // Eastward arrow has its right on the south.
                        let white_bottom = tail == left;
                        assert_eq!(t.is_white(vy - 1, vx), white_bottom, "{s} vertical ({vy},{vx})");
                        assert_ne!(t.is_white(vy, vx), t.is_white(vy - 1, vx));
                    }
                    let (tail, _) = t.dual_arrow(vy, vx, false).unwrap();
                    let below = t.face_at(vy, vx).label;
                    // Northward arrow has its right on the east.
                    let white_right = tail == below;
                    assert_eq!(t.is_white(vy, vx + 1), white_right, "{s} horizontal ({vy},{vx})");
                }
            }
        }
    }

    #[test]
    fn figure_rows_for_237() {
        let t = Tiling::new(spec(2, 3, 7)).unwrap();
        let row = |y: i64| -> Vec<usize> {
            let mut out = Vec::new();
            let mut p = t.face_of_quiver_vertex(0, y).anchor.1;
            for _ in 0..7 {
                let f = t.face_at(y, p);
                out.push(f.label);
                p = f.right_col() + 1;
            }
            out
        };
        assert_eq!(row(0), vec![1, 3, 5, 7, 2, 4, 6]);
        assert_eq!(row(1), vec![4, 6, 1, 3, 5, 7, 2]);
    }
}
