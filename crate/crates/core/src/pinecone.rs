//! Pinecones: finite Gale-Robinson subgraphs `G_n` of the brane tiling.
//!
//! Coordinates follow the pinecone frame: points are written `(row, col)`,
//! rows grow upward and columns grow leftward, and the upper vertex of the
//! rightmost edge of the central strip sits at `(0, 0)`. Cell `(i, j)` is the
//! unit square whose upper-right vertex is `(i, j)`, so the central strip
//! occupies cells `(0, 0), …, (0, 2k)`. A vertex is white iff `row + col` is
//! even.
//!
//! Every pinecone remembers the tiling vertex of its frame origin, so face
//! labels are always read from the ambient tiling.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::galerob::GRSpec;
use crate::matching;
use crate::tiling::{Shape, Tiling, TilingError, TilingFace};

pub type Vertex = (i64, i64);
pub type Cell = (i64, i64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PineconeError {
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("strip H_{n} does not end on a face boundary labeled {expected}")]
    StripEnd { n: usize, expected: usize },
    #[error("strip H_{n} in row {row} has {candidates} placements inside the row below it")]
    Placement { n: usize, row: i64, candidates: usize },
    #[error("the graph has no perfect matching")]
    Unmatchable,
    #[error("the pinecone has no central strip, so its corners are undefined")]
    NoCorners,
    #[error("Aztec construction needs n > N, got n = {0}")]
    AztecIndex(usize),
}

/// Whether a frame point is white.
pub fn is_white(v: Vertex) -> bool {
    (v.0 + v.1).rem_euclid(2) == 0
}

/// An undirected unit edge, stored with its endpoints in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        debug_assert_eq!((a.0 - b.0).abs() + (a.1 - b.1).abs(), 1, "unit edge");
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.0 .1 == self.1 .1
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if v == self.0 {
            self.1
        } else {
            self.0
        }
    }

    pub fn translated(&self, d: (i64, i64)) -> Self {
        Edge((self.0 .0 + d.0, self.0 .1 + d.1), (self.1 .0 + d.0, self.1 .1 + d.1))
    }

    /// The two cells on either side: `(upper, lower)` for a horizontal edge,
    /// `(left, right)` for a vertical one.
    pub fn cells(&self) -> (Cell, Cell) {
        if self.is_vertical() {
            let top = self.0 .0.max(self.1 .0);
            let j = self.0 .1;
            ((top, j), (top, j - 1))
        } else {
            let i = self.0 .0;
            let j = self.0 .1.min(self.1 .1);
            ((i + 1, j), (i, j))
        }
    }
}

/// A bounded face of a pinecone, which is always a whole tiling face.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub label: usize,
    pub shape: Shape,
    /// The face's left cell (largest column).
    pub anchor: Cell,
}

impl Face {
    pub fn width(&self) -> i64 {
        self.shape.width()
    }

    pub fn row(&self) -> i64 {
        self.anchor.0
    }

    /// Cells from right to left.
    pub fn cells(&self) -> Vec<Cell> {
        let (i, j) = self.anchor;
        (0..self.width()).rev().map(|k| (i, j - k)).collect()
    }

    pub fn right_col(&self) -> i64 {
        self.anchor.1 - self.width() + 1
    }

    /// Boundary vertices in clockwise order as drawn (columns grow to the
    /// left), starting at the upper-left corner.
    pub fn boundary(&self) -> Vec<Vertex> {
        let (i, left) = self.anchor;
        let right = self.right_col();
        let mut out = Vec::new();
        // Top edge, left to right: columns left+1 down to right.
        for c in (right..=left + 1).rev() {
            out.push((i, c));
        }
        // Bottom edge, right to left.
        for c in right..=left + 1 {
            out.push((i - 1, c));
        }
        out
    }

    pub fn boundary_edges(&self) -> Vec<Edge> {
        let b = self.boundary();
        (0..b.len()).map(|k| Edge::new(b[k], b[(k + 1) % b.len()])).collect()
    }

    /// Parity used by the twist table: even iff `i + j` is even for the face's
    /// left cell `(i, j)`. This equals the parity of the face's upper-left
    /// vertex measured from the upper-left vertex of the pinecone.
    pub fn is_even(&self) -> bool {
        (self.anchor.0 + self.anchor.1).rem_euclid(2) == 0
    }
}

/// One horizontal strip `H_n`: its faces from left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Strip {
    pub n: usize,
    pub faces: Vec<(usize, Shape)>,
}

impl Strip {
    pub fn width(&self) -> i64 {
        self.faces.iter().map(|f| f.1.width()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// `n̄ ∈ 1..=r` with `n ≡ N + n̄ (mod r)`.
pub fn n_bar(spec: GRSpec, n: usize) -> usize {
    let r = spec.r as i64;
    ((n as i64 - spec.n as i64 - 1).rem_euclid(r) + 1) as usize
}

/// `n̄̄ ∈ 1..=N−r` with `n ≡ N + n̄̄ (mod N−r)`.
pub fn n_bar_bar(spec: GRSpec, n: usize) -> usize {
    let m = (spec.n - spec.r) as i64;
    ((n as i64 - spec.n as i64 - 1).rem_euclid(m) + 1) as usize
}

/// Cell width of `H_n`: `2⌊(n−N−1)/r⌋ + 1`, or 0 when `n ≤ N`.
pub fn strip_width(spec: GRSpec, n: usize) -> i64 {
    if n <= spec.n {
        0
    } else {
        2 * ((n - spec.n - 1) / spec.r) as i64 + 1
    }
}

/// The strip `H_n`. Faces along a tiling row step their labels by `r`, so the
/// strip is determined by its leftmost label and its width.
pub fn build_strip(spec: GRSpec, n: usize) -> Result<Strip, PineconeError> {
    let tiling = Tiling::new(spec)?;
    let width = strip_width(spec, n);
    let mut faces = Vec::new();
    if width > 0 {
        let mut label = n_bar(spec, n);
        let mut used = 0;
        while used < width {
            let shape = tiling.shape_of(label);
            faces.push((label, shape));
            used += shape.width();
            label = (label - 1 + spec.r) % spec.n + 1;
        }
        let last = faces.last().map(|f| f.0).unwrap_or(0);
        if used != width || last != n_bar_bar(spec, n) {
            return Err(PineconeError::StripEnd { n, expected: n_bar_bar(spec, n) });
        }
    }
    Ok(Strip { n, faces })
}

/// The four Kuo corners of a pinecone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KuoCorners {
    pub a: Vertex,
    pub b: Vertex,
    pub c: Vertex,
    pub d: Vertex,
}

impl KuoCorners {
    /// Corners `a = (0,1)`, `b = (0,2k)`, `c = (−1,2k)`, `d = (−1,1)` of a
    /// central strip of length `2k + 1`.
    ///
    /// When `k = 0` this formula puts `b` to the right of `a`, which runs the
    /// four corners the other way round the square than for longer strips and
    /// swaps the two sides of the condensation. The square instead gets the
    /// only corners with `a, c` black that keep the rotational sense:
    /// `a = (0,1)`, `b = (−1,1)`, `c = (−1,0)`, `d = (0,0)`.
    pub fn for_half_length(k: i64) -> Self {
        if k == 0 {
            return KuoCorners { a: (0, 1), b: (-1, 1), c: (-1, 0), d: (0, 0) };
        }
        Self::declared(k)
    }

    /// The general corner formula applied verbatim, including `k = 0`.
    pub fn declared(k: i64) -> Self {
        KuoCorners { a: (0, 1), b: (0, 2 * k), c: (-1, 2 * k), d: (-1, 1) }
    }
}

/// A subgraph of the brane tiling drawn in a pinecone frame.
#[derive(Debug, Clone)]
pub struct Pinecone {
    tiling: Tiling,
    index: Option<usize>,
    /// Tiling vertex `(vy, vx)` at frame point `(0, 0)`.
    origin: (i64, i64),
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<Edge>,
    faces: Vec<Face>,
}

impl PartialEq for Pinecone {
    /// Same frame position in the tiling and the same vertices and edges.
    fn eq(&self, other: &Self) -> bool {
        self.tiling.spec() == other.tiling.spec()
            && self.origin == other.origin
            && self.vertices == other.vertices
            && self.edges == other.edges
    }
}

impl Pinecone {
    fn from_parts(
        tiling: Tiling,
        index: Option<usize>,
        origin: (i64, i64),
        vertices: BTreeSet<Vertex>,
        edges: BTreeSet<Edge>,
    ) -> Self {
        let mut g = Pinecone { tiling, index, origin, vertices, edges, faces: Vec::new() };
        g.faces = g.compute_faces();
        g
    }

    /// The empty pinecone attached to index `n`, framed at `origin`.
    fn empty(tiling: Tiling, n: usize, origin: (i64, i64)) -> Self {
        Pinecone::from_parts(tiling, Some(n), origin, BTreeSet::new(), BTreeSet::new())
    }

    pub fn spec(&self) -> GRSpec {
        self.tiling.spec()
    }

    pub fn tiling(&self) -> &Tiling {
        &self.tiling
    }

    /// Sequence index `n` for pinecones built as `G_n`.
    pub fn index(&self) -> Option<usize> {
        self.index
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Outer-face label declared for an empty `G_n`, `n ≤ N`.
    pub fn empty_label(&self) -> Option<usize> {
        match self.index {
            Some(n) if self.is_empty() && n <= self.spec().n => Some(n),
            _ => None,
        }
    }

    fn to_tiling_cell(&self, c: Cell) -> (i64, i64) {
        (self.origin.0 + c.0, self.origin.1 - c.1 - 1)
    }

    fn cell_from_tiling(&self, c: (i64, i64)) -> Cell {
        (c.0 - self.origin.0, self.origin.1 - 1 - c.1)
    }

    fn to_tiling_vertex(&self, v: Vertex) -> (i64, i64) {
        (self.origin.0 + v.0, self.origin.1 - v.1)
    }

    fn face_from_tiling(&self, f: &TilingFace) -> Face {
        Face { label: f.label, shape: f.shape, anchor: self.cell_from_tiling(f.anchor) }
    }

    /// The tiling face containing a frame cell.
    pub fn tiling_face(&self, c: Cell) -> Face {
        let (y, p) = self.to_tiling_cell(c);
        self.face_from_tiling(&self.tiling.face_at(y, p))
    }

    /// Whether the unit segment between two frame points is a tiling edge.
    pub fn is_tiling_edge(&self, e: &Edge) -> bool {
        if e.is_vertical() {
            let top = if e.0 .0 > e.1 .0 { e.0 } else { e.1 };
            let (vy, vx) = self.to_tiling_vertex(top);
            self.tiling.has_vertical_edge(vy, vx)
        } else {
            true
        }
    }

    /// The two tiling faces straddling an edge.
    pub fn edge_faces(&self, e: &Edge) -> (Face, Face) {
        let (c1, c2) = e.cells();
        (self.tiling_face(c1), self.tiling_face(c2))
    }

    fn compute_faces(&self) -> Vec<Face> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in &self.edges {
            let (c1, c2) = e.cells();
            for c in [c1, c2] {
                let f = self.tiling_face(c);
                if seen.insert(f.anchor) && f.boundary_edges().iter().all(|b| self.edges.contains(b)) {
                    out.push(f);
                }
            }
        }
        out.sort_by_key(|f| (std::cmp::Reverse(f.anchor.0), f.anchor.1));
        out
    }

    /// Cells covered by the bounded faces.
    pub fn cells(&self) -> BTreeSet<Cell> {
        self.faces.iter().flat_map(|f| f.cells()).collect()
    }

    /// For each row, the cell column range `(right, left)` covered by faces.
    pub fn row_extents(&self) -> BTreeMap<i64, (i64, i64)> {
        let mut out: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
        for (i, j) in self.cells() {
            let e = out.entry(i).or_insert((j, j));
            e.0 = e.0.min(j);
            e.1 = e.1.max(j);
        }
        out
    }

    /// Half-length `k` of the central strip (cells `0..=2k` in row 0).
    pub fn central_half_length(&self) -> Option<i64> {
        let (right, left) = *self.row_extents().get(&0)?;
        if right != 0 || (left - right) % 2 != 0 {
            return None;
        }
        Some(left / 2)
    }

    pub fn corners(&self) -> Result<KuoCorners, PineconeError> {
        self.central_half_length().map(KuoCorners::for_half_length).ok_or(PineconeError::NoCorners)
    }

    /// Faces of the central strip.
    pub fn central_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.row() == 0)
    }

    /// Delete vertices and their incident edges.
    pub fn remove_vertices(&self, vs: &[Vertex]) -> Pinecone {
        let vertices = self.vertices.iter().copied().filter(|v| !vs.contains(v)).collect();
        let edges = self.edges.iter().copied().filter(|e| !vs.contains(&e.0) && !vs.contains(&e.1)).collect();
        Pinecone::from_parts(self.tiling.clone(), None, self.origin, vertices, edges)
    }

    /// The subgraph spanned by a set of edges, keeping this frame.
    pub fn edge_subgraph(&self, edges: BTreeSet<Edge>) -> Pinecone {
        let vertices = edges.iter().flat_map(|e| [e.0, e.1]).collect();
        Pinecone::from_parts(self.tiling.clone(), None, self.origin, vertices, edges)
    }

    /// The same tiling subgraph re-expressed in a frame where this pinecone's
    /// origin sits at `offset`.
    pub fn shifted(&self, offset: (i64, i64)) -> Pinecone {
        let vertices = self.vertices.iter().map(|v| (v.0 + offset.0, v.1 + offset.1)).collect();
        let edges = self.edges.iter().map(|e| e.translated(offset)).collect();
        let origin = (self.origin.0 - offset.0, self.origin.1 + offset.1);
        Pinecone::from_parts(self.tiling.clone(), self.index, origin, vertices, edges)
    }

    /// This graph copied into `host`'s frame with its origin placed at
    /// `offset`; labels are then read at `host`'s position in the tiling.
    pub fn placed_in(&self, host: &Pinecone, offset: (i64, i64)) -> Pinecone {
        let vertices = self.vertices.iter().map(|v| (v.0 + offset.0, v.1 + offset.1)).collect();
        let edges = self.edges.iter().map(|e| e.translated(offset)).collect();
        Pinecone::from_parts(host.tiling.clone(), self.index, host.origin, vertices, edges)
    }

    /// Subgraph intersection in a common frame.
    pub fn intersection(&self, other: &Pinecone) -> Pinecone {
        let vertices = self.vertices.intersection(&other.vertices).copied().collect();
        let edges = self.edges.intersection(&other.edges).copied().collect();
        Pinecone::from_parts(self.tiling.clone(), None, self.origin, vertices, edges)
    }

    /// Face label multiset of the central strip.
    pub fn central_label_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for f in self.central_faces() {
            *out.entry(f.label).or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": 1,
            "spec": self.spec(),
            "n": self.index,
            "empty_label": self.empty_label(),
            "vertices": self.vertices.iter().map(|v| json!({
                "row": v.0, "col": v.1, "white": is_white(*v),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| [[e.0 .0, e.0 .1], [e.1 .0, e.1 .1]]).collect::<Vec<_>>(),
            "faces": self.faces,
        })
    }
}

/// An edge between two tiling vertices, in tiling coordinates.
type TilingEdge = ((i64, i64), (i64, i64));

/// A tiling row `(y, left cell, width)`.
type StripRow = (i64, i64, i64);

/// Corners of the given tiling cells, with every tiling edge between them.
fn induced_on_cells(tiling: &Tiling, cells: &BTreeSet<(i64, i64)>) -> (BTreeSet<(i64, i64)>, Vec<TilingEdge>) {
    let mut verts = BTreeSet::new();
    for &(y, p) in cells {
        for v in [(y, p), (y, p + 1), (y - 1, p), (y - 1, p + 1)] {
            verts.insert(v);
        }
    }
    let mut edges = Vec::new();
    for &(vy, vx) in &verts {
        if verts.contains(&(vy, vx + 1)) {
            edges.push(((vy, vx), (vy, vx + 1)));
        }
        if verts.contains(&(vy - 1, vx)) && tiling.has_vertical_edge(vy, vx) {
            edges.push(((vy, vx), (vy - 1, vx)));
        }
    }
    (verts, edges)
}

fn framed(
    tiling: Tiling,
    n: usize,
    origin: (i64, i64),
    verts: BTreeSet<(i64, i64)>,
    edges: Vec<TilingEdge>,
) -> Pinecone {
    let to_frame = |v: (i64, i64)| (v.0 - origin.0, origin.1 - v.1);
    let vertices = verts.into_iter().map(to_frame).collect();
    let edges = edges.into_iter().map(|(a, b)| Edge::new(to_frame(a), to_frame(b))).collect();
    Pinecone::from_parts(tiling, Some(n), origin, vertices, edges)
}

/// `G_n` by gluing strips outward from the central strip `H_n`.
pub fn build_pinecone_strips(spec: GRSpec, n: usize) -> Result<Pinecone, PineconeError> {
    let tiling = Tiling::new(spec)?;
    if n <= spec.n {
        return Ok(Pinecone::empty(tiling, n, (0, 0)));
    }
    let (rows, origin) = strip_rows(&tiling, n)?;
    let cells = rows.iter().flat_map(|&(y, left, width)| (left..left + width).map(move |p| (y, p))).collect();
    let (verts, edges) = induced_on_cells(&tiling, &cells);
    Ok(framed(tiling, n, origin, verts, edges))
}

/// Tiling rows `(y, left cell, width)` of `G_n`, and the frame origin.
fn strip_rows(tiling: &Tiling, n: usize) -> Result<(Vec<StripRow>, (i64, i64)), PineconeError> {
    let spec = tiling.spec();
    let centre = tiling.find_face(n_bar(spec, n));
    let (yc, c0) = centre.anchor;
    let w0 = strip_width(spec, n);
    build_strip(spec, n)?;
    let end = tiling.face_at(yc, c0 + w0 - 1);
    if end.right_col() != c0 + w0 - 1 {
        return Err(PineconeError::StripEnd { n, expected: n_bar_bar(spec, n) });
    }
    let mut rows = vec![(yc, c0, w0)];
    for (dir, step) in [(1i64, spec.n - spec.s), (-1i64, spec.s)] {
        let (mut prev_left, mut prev_w) = (c0, w0);
        let mut j = 1;
        while n > spec.n + j * step {
            let nj = n - j * step;
            let w = strip_width(spec, nj);
            let y = yc + dir * j as i64;
            let label = n_bar(spec, nj);
            let candidates: Vec<i64> = (prev_left + 1..=prev_left + prev_w - 1 - w)
                .filter(|&c| {
                    let f = tiling.face_at(y, c);
                    f.anchor.1 == c
                        && f.shape == Shape::Square
                        && f.label == label
                        && tiling.face_at(y, c + w - 1).right_col() == c + w - 1
                })
                .collect();
            if candidates.len() != 1 {
                return Err(PineconeError::Placement { n: nj, row: dir * j as i64, candidates: candidates.len() });
            }
            rows.push((y, candidates[0], w));
            prev_left = candidates[0];
            prev_w = w;
            j += 1;
        }
    }
    Ok((rows, (yc, c0 + w0)))
}

/// `G_n` as the core of the Aztec diamond of order `N' + 1` laid over the
/// tiling and centred on the face labeled `i`, for `n = rN' + N + i`.
///
/// The diamond's centre cell is `N'` cells to the right of the face's left
/// cell, so its central row starts exactly on that face. Trimming vertices of
/// degree one is not enough here: the diamond can carry whole closed faces
/// that every perfect matching avoids, so the forced and forbidden edges are
/// removed by matchability tests.
pub fn build_pinecone_aztec(spec: GRSpec, n: usize) -> Result<Pinecone, PineconeError> {
    let tiling = Tiling::new(spec)?;
    if n <= spec.n {
        return Err(PineconeError::AztecIndex(n));
    }
    let (verts, edges, origin) = aztec_superposition(&tiling, n);
    let mut g = core(&framed(tiling, n, origin, verts, edges))?;
    g.index = Some(n);
    Ok(g)
}

/// The Aztec diamond laid over the tiling before trimming, in `G_n`'s frame.
pub fn aztec_superposition_graph(spec: GRSpec, n: usize) -> Result<Pinecone, PineconeError> {
    let tiling = Tiling::new(spec)?;
    if n <= spec.n {
        return Err(PineconeError::AztecIndex(n));
    }
    let (verts, edges, origin) = aztec_superposition(&tiling, n);
    let mut g = framed(tiling, n, origin, verts, edges);
    g.index = None;
    Ok(g)
}

type TilingGraph = (BTreeSet<(i64, i64)>, Vec<TilingEdge>, (i64, i64));

fn aztec_superposition(tiling: &Tiling, n: usize) -> TilingGraph {
    let spec = tiling.spec();
    let i = n_bar(spec, n);
    let size = ((n - spec.n - i) / spec.r) as i64;
    let face = tiling.find_face(i);
    let (yc, p0) = face.anchor;
    let mut cells = BTreeSet::new();
    for j in -size..=size {
        for p in p0 + j.abs()..=p0 + 2 * size - j.abs() {
            cells.insert((yc + j, p));
        }
    }
    let (verts, all_edges) = induced_on_cells(tiling, &cells);
    // Keep only segments on the boundary of some diamond cell.
    let edges = all_edges
        .into_iter()
        .filter(|&((y1, x1), (y2, _))| {
            if y1 == y2 {
                cells.contains(&(y1, x1)) || cells.contains(&(y1 + 1, x1))
            } else {
                let vy = y1.max(y2);
                cells.contains(&(vy, x1 - 1)) || cells.contains(&(vy, x1))
            }
        })
        .collect();
    (verts, edges, (yc, p0 + 2 * size + 1))
}

/// Face label counts of the central strip of `G_n`.
pub fn central_strip_label_counts(spec: GRSpec, n: usize) -> Result<BTreeMap<usize, usize>, PineconeError> {
    let mut out: BTreeMap<usize, usize> = (1..=spec.n).map(|i| (i, 0)).collect();
    for (label, _) in build_strip(spec, n)?.faces {
        *out.get_mut(&label).unwrap() += 1;
    }
    Ok(out)
}

/// Edges of `g` lying in every perfect matching and in none.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeClasses {
    pub forced: BTreeSet<Edge>,
    pub forbidden: BTreeSet<Edge>,
}

/// Forced and forbidden edges by matchability tests: `e` is forbidden iff `g`
/// without `e`'s endpoints has no perfect matching, and forced iff `g`
/// without `e` has none.
pub fn classify_edges(g: &Pinecone) -> Result<EdgeClasses, PineconeError> {
    if matching::perfect_matching(g.vertices(), g.edges()).is_none() {
        return Err(PineconeError::Unmatchable);
    }
    let mut out = EdgeClasses::default();
    for e in g.edges() {
        let mut vs = g.vertices().clone();
        vs.remove(&e.0);
        vs.remove(&e.1);
        let es: BTreeSet<Edge> = g.edges().iter().copied().filter(|f| vs.contains(&f.0) && vs.contains(&f.1)).collect();
        if matching::perfect_matching(&vs, &es).is_none() {
            out.forbidden.insert(*e);
            continue;
        }
        let mut without = g.edges().clone();
        without.remove(e);
        if matching::perfect_matching(g.vertices(), &without).is_none() {
            out.forced.insert(*e);
        }
    }
    Ok(out)
}

/// The core: edges neither forced nor forbidden, with their endpoints.
pub fn core(g: &Pinecone) -> Result<Pinecone, PineconeError> {
    let classes = classify_edges(g)?;
    let keep =
        g.edges().iter().copied().filter(|e| !classes.forced.contains(e) && !classes.forbidden.contains(e)).collect();
    Ok(g.edge_subgraph(keep))
}

/// The core by the row sweep: starting from the leftmost black square of
/// row 0, each further row (outward in both directions) starts at its leftmost
/// black square strictly to the right of the previous row's start, and the
/// core consists of all faces weakly to the right of these starts.
///
/// A black square is a square face whose cell `(i, j)` has `i + j` even.
pub fn core_by_sweep(g: &Pinecone) -> Pinecone {
    let black_squares = |row: i64| -> Vec<i64> {
        g.faces()
            .iter()
            .filter(|f| f.row() == row && f.shape == Shape::Square && f.is_even())
            .map(|f| f.anchor.1)
            .collect()
    };
    let mut starts: BTreeMap<i64, i64> = BTreeMap::new();
    if let Some(&b0) = black_squares(0).iter().max() {
        starts.insert(0, b0);
        for dir in [1i64, -1] {
            let mut prev = b0;
            let mut row = dir;
            while let Some(&b) = black_squares(row).iter().filter(|&&c| c < prev).max() {
                starts.insert(row, b);
                prev = b;
                row += dir;
            }
        }
    }
    let mut edges = BTreeSet::new();
    for f in g.faces() {
        if let Some(&b) = starts.get(&f.row()) {
            if f.anchor.1 <= b {
                edges.extend(f.boundary_edges());
            }
        }
    }
    g.edge_subgraph(edges)
}

/// Which of the six graphs of a Kuo configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Which {
    A,
    C,
    N,
    S,
    W,
    E,
}

impl Which {
    pub const ALL: [Which; 6] = [Which::A, Which::C, Which::N, Which::S, Which::W, Which::E];

    /// Corners deleted from `G` to form `Ĝ_*`.
    pub fn deleted(self, k: &KuoCorners) -> Vec<Vertex> {
        match self {
            Which::A => vec![],
            Which::C => vec![k.a, k.b, k.c, k.d],
            Which::N => vec![k.c, k.d],
            Which::S => vec![k.a, k.b],
            Which::W => vec![k.b, k.c],
            Which::E => vec![k.a, k.d],
        }
    }

    /// Position of `G_*`'s frame origin inside `G`'s frame.
    pub fn placement(self) -> (i64, i64) {
        match self {
            Which::A | Which::W => (0, 0),
            Which::C | Which::E => (0, 2),
            Which::N => (1, 1),
            Which::S => (-1, 1),
        }
    }

    /// Sequence index of `G_*` when `G = G_n`. In this frame the north graph
    /// keeps `G`'s upper rows, which are the strips of `G_{n−N+s}`.
    pub fn index(self, spec: GRSpec, n: usize) -> i64 {
        let (n, big, r, s) = (n as i64, spec.n as i64, spec.r as i64, spec.s as i64);
        match self {
            Which::A => n,
            Which::C => n - big,
            Which::N => n - big + s,
            Which::S => n - s,
            Which::W => n - big + r,
            Which::E => n - r,
        }
    }

    /// Cell declared as the outer face of an empty `G_*`, in `G`'s frame.
    pub fn empty_outer_cell(self, k: i64) -> Cell {
        match self {
            Which::A | Which::C | Which::S => (0, 1),
            Which::N => (1, 0),
            Which::W => (0, 2 * k + 1),
            Which::E => (-1, 0),
        }
    }

    /// Cell whose tiling label equals the index of an empty `G_*`, in `G`'s
    /// frame, where `2k + 1` is the length of `G`'s central row. For S, W and
    /// E this differs from [`Which::empty_outer_cell`], and for C it differs
    /// when `k = 0`.
    pub fn labeled_outer_cell(self, k: i64) -> Cell {
        match self {
            Which::A | Which::C if k == 0 => (0, 0),
            Which::A | Which::C => (0, 1),
            Which::N => (1, 0),
            Which::S => (-1, 0),
            Which::W => (0, -1),
            Which::E => (0, 1),
        }
    }
}

/// `Ĝ_*` and its core, in `G`'s frame.
#[derive(Debug, Clone)]
pub struct SubPinecone {
    pub which: Which,
    /// Sequence index of `G_*`.
    pub index: i64,
    pub hat: Pinecone,
    pub core: Pinecone,
    pub placement: (i64, i64),
    pub forced: BTreeSet<Edge>,
    /// For an empty core: the declared outer cell and its tiling label.
    pub empty_outer: Option<(Cell, usize)>,
}

pub fn subpinecone(g: &Pinecone, which: Which) -> Result<SubPinecone, PineconeError> {
    let corners = g.corners()?;
    let k = g.central_half_length().ok_or(PineconeError::NoCorners)?;
    let hat = g.remove_vertices(&which.deleted(&corners));
    let classes = classify_edges(&hat)?;
    let keep =
        hat.edges().iter().copied().filter(|e| !classes.forced.contains(e) && !classes.forbidden.contains(e)).collect();
    let mut core = hat.edge_subgraph(keep);
    let index = g.index().map(|n| which.index(g.spec(), n)).unwrap_or(0);
    if index > 0 {
        core.index = Some(index as usize);
    }
    let empty_outer = if core.is_empty() {
        let cell = which.empty_outer_cell(k);
        Some((cell, g.tiling_face(cell).label))
    } else {
        None
    };
    Ok(SubPinecone { which, index, hat, core, placement: which.placement(), forced: classes.forced, empty_outer })
}

/// Checks the border agreements and intersection identity for `G_n`, using
/// the standard placements: `G_{n−r}` at `(0,2)` shares the western border,
/// `G_{n−N+r}` at `(0,0)` the eastern one, `G_{n−N+s}` at `(1,1)` everything
/// above row 0 and `G_{n−s}` at `(−1,1)` everything below it; the two
/// pairwise intersections are `G_{n−N}` at `(0,2)`.
pub fn verify_borders(spec: GRSpec, n: usize) -> Result<bool, PineconeError> {
    let g = build_pinecone_strips(spec, n)?;
    if g.is_empty() {
        return Ok(true);
    }
    let mut placed = BTreeMap::new();
    for which in [Which::C, Which::N, Which::S, Which::W, Which::E] {
        let idx = which.index(spec, n);
        if idx < 1 {
            return Ok(true);
        }
        let h = build_pinecone_strips(spec, idx as usize)?;
        let p = h.placed_in(&g, which.placement());
        // Labels must agree with the host's tiling position.
        let mut own: Vec<(usize, Cell)> = h
            .faces()
            .iter()
            .map(|f| (f.label, (f.anchor.0 + which.placement().0, f.anchor.1 + which.placement().1)))
            .collect();
        let mut host: Vec<(usize, Cell)> = p.faces().iter().map(|f| (f.label, f.anchor)).collect();
        own.sort();
        host.sort();
        if own != host {
            return Ok(false);
        }
        placed.insert(which, p);
    }
    let ext = g.row_extents();
    let rows_of = |w: Which| placed[&w].row_extents();

    // West: G_{n-r} keeps the left ends of all rows of length at least three.
    let east_graph = rows_of(Which::E);
    let want: BTreeMap<i64, (i64, i64)> =
        ext.iter().filter(|(_, &(a, b))| b - a >= 2).map(|(&i, &(a, b))| (i, (a + 2, b))).collect();
    if east_graph != want {
        return Ok(false);
    }
    // East: G_{n-N+r} keeps the right ends, each row shorter by an even amount.
    for (i, (a, b)) in rows_of(Which::W) {
        match ext.get(&i) {
            Some(&(ga, gb)) if ga == a && b <= gb && (gb - b) % 2 == 0 => {}
            _ => return Ok(false),
        }
    }
    // North and south keep G's rows above and below the central strip.
    let cells = g.cells();
    let north = placed[&Which::N].cells();
    let south = placed[&Which::S].cells();
    let above = |s: &BTreeSet<Cell>| s.iter().filter(|c| c.0 >= 1).copied().collect::<BTreeSet<_>>();
    let below = |s: &BTreeSet<Cell>| s.iter().filter(|c| c.0 <= -1).copied().collect::<BTreeSet<_>>();
    if above(&north) != above(&cells) || below(&south) != below(&cells) {
        return Ok(false);
    }
    let c = &placed[&Which::C];
    let we = placed[&Which::W].intersection(&placed[&Which::E]);
    let ns = placed[&Which::N].intersection(&placed[&Which::S]);
    let same = |x: &Pinecone| x.vertices() == c.vertices() && x.edges() == c.edges();
    Ok(same(&we) && same(&ns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerob::d;

    fn spec(r: usize, s: usize, n: usize) -> GRSpec {
        GRSpec::new(r, s, n).unwrap()
    }

    fn specs() -> Vec<GRSpec> {
        vec![spec(1, 2, 4), spec(1, 2, 5), spec(2, 3, 7), spec(1, 3, 7), spec(2, 5, 11), spec(3, 4, 11)]
    }

    #[test]
    fn strips_for_237() {
        let s = spec(2, 3, 7);
        assert_eq!(build_strip(s, 8).unwrap().faces, vec![(1, Shape::Square)]);
        assert_eq!(build_strip(s, 16).unwrap().width(), 9);
        assert!(build_strip(s, 7).unwrap().is_empty());
        for n in 8..=40 {
            let st = build_strip(s, n).unwrap();
            assert_eq!(st.faces[0], (n_bar(s, n), Shape::Square));
            assert_eq!(st.faces.last().unwrap().0, n_bar_bar(s, n));
            assert_eq!(st.width() % 2, 1);
        }
    }

    #[test]
    fn g16_rows_for_237() {
        let s = spec(2, 3, 7);
        let g = build_pinecone_strips(s, 16).unwrap();
        let ext = g.row_extents();
        let rows: Vec<i64> = ext.keys().rev().copied().collect();
        assert_eq!(rows, vec![2, 1, 0, -1, -2]);
        let widths: Vec<i64> = rows.iter().map(|i| ext[i].1 - ext[i].0 + 1).collect();
        let want: Vec<i64> = [8, 12, 16, 13, 10].iter().map(|&m| strip_width(s, m)).collect();
        assert_eq!(widths, want);
        for (&i, &m) in rows.iter().zip(&[8usize, 12, 16, 13, 10]) {
            let labels: Vec<usize> = {
                let mut fs: Vec<&Face> = g.faces().iter().filter(|f| f.row() == i).collect();
                fs.sort_by_key(|f| std::cmp::Reverse(f.anchor.1));
                fs.iter().map(|f| f.label).collect()
            };
            let strip: Vec<usize> = build_strip(s, m).unwrap().faces.iter().map(|f| f.0).collect();
            assert_eq!(labels, strip, "row {i}");
        }
    }

    #[test]
    fn small_and_empty() {
        let s = spec(2, 3, 7);
        let g = build_pinecone_strips(s, 8).unwrap();
        assert_eq!(g.faces().len(), 1);
        assert_eq!(g.faces()[0].label, 1);
        assert_eq!(g.vertices().len(), 4);
        let e = build_pinecone_strips(s, 7).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.empty_label(), Some(7));
    }

    #[test]
    fn frame_invariants() {
        for s in specs() {
            for n in s.n + 1..=s.n + 10 {
                let g = build_pinecone_strips(s, n).unwrap();
                let ext = g.row_extents();
                let k = g.central_half_length().expect("central strip");
                assert_eq!(ext[&0], (0, 2 * k));
                for (&i, &(a, b)) in &ext {
                    assert_eq!(a, i.abs(), "{s} n={n} row {i} right end");
                    assert_eq!((b - a) % 2, 0, "odd length");
                }
                for dir in [1i64, -1] {
                    let mut i = dir;
                    while let Some(&(a, b)) = ext.get(&i) {
                        let (pa, pb) = ext[&(i - dir)];
                        assert!(b - a < pb - pa && b < pb, "{s} n={n} row {i} strictly inside");
                        i += dir;
                    }
                }
                for (i, f) in g.faces().iter().enumerate() {
                    assert!(g.faces()[i + 1..].iter().all(|h| h.anchor != f.anchor));
                    for e in f.boundary_edges() {
                        assert!(g.has_edge(&e));
                    }
                }
                // Every edge is a tiling edge.
                assert!(g.edges().iter().all(|e| g.is_tiling_edge(e)));
            }
        }
    }

    #[test]
    fn aztec_agrees_with_strips() {
        for s in specs() {
            for n in s.n + 1..=s.n + 10 {
                let a = build_pinecone_aztec(s, n).unwrap();
                let b = build_pinecone_strips(s, n).unwrap();
                assert!(a == b, "{s} n={n}");
                assert_eq!(a.faces(), b.faces());
                let sup = aztec_superposition_graph(s, n).unwrap();
                assert_eq!(core_by_sweep(&sup).edges(), b.edges(), "{s} n={n} sweep");
            }
        }
    }

    #[test]
    fn label_counts_match_partition_function() {
        for s in specs() {
            for n in s.n + 1..=s.n + 30 {
                let counts = central_strip_label_counts(s, n).unwrap();
                for (&i, &c) in &counts {
                    let want = d(n as i64 - s.n as i64 - i as i64, s.r as i64, (s.n - s.r) as i64).unwrap();
                    assert_eq!(c as u64, want, "{s} n={n} i={i}");
                }
                let g = build_pinecone_strips(s, n).unwrap();
                let mut full = counts.clone();
                full.retain(|_, c| *c > 0);
                assert_eq!(g.central_label_counts(), full);
            }
        }
        let c = central_strip_label_counts(spec(2, 3, 7), 16).unwrap();
        assert_eq!(c[&6], 0);
        assert_eq!(c[&2], 1);
    }

    #[test]
    fn closed_pinecones_are_their_own_cores() {
        for s in [spec(1, 2, 4), spec(2, 3, 7)] {
            for n in s.n + 1..=s.n + 6 {
                let g = build_pinecone_strips(s, n).unwrap();
                let c = core(&g).unwrap();
                assert!(c == g, "{s} n={n}");
                assert!(core_by_sweep(&g) == g);
            }
        }
    }

    #[test]
    fn square_minus_opposite_corners() {
        let g = build_pinecone_strips(spec(1, 2, 4), 5).unwrap();
        let h = g.remove_vertices(&[(0, 1), (-1, 0)]);
        // Two remaining vertices are not adjacent, so no matching at all.
        assert_eq!(classify_edges(&h), Err(PineconeError::Unmatchable));
        let h = g.remove_vertices(&[(0, 1), (0, 0)]);
        let cls = classify_edges(&h).unwrap();
        assert_eq!(cls.forced.len(), 1);
        assert!(core(&h).unwrap().is_empty());
    }

    #[test]
    fn subpinecones_match_lower_indices() {
        for s in [spec(1, 2, 4), spec(1, 2, 5), spec(2, 3, 7), spec(1, 3, 7)] {
            for n in s.n + 1..=s.n + 9 {
                let g = build_pinecone_strips(s, n).unwrap();
                let mut cores = BTreeMap::new();
                for which in Which::ALL {
                    let sub = subpinecone(&g, which).unwrap();
                    let idx = sub.index;
                    assert!(idx >= 1);
                    let want = build_pinecone_strips(s, idx as usize).unwrap();
                    if want.is_empty() {
                        assert!(sub.core.is_empty(), "{s} n={n} {which:?}");
                        let (cell, label) = sub.empty_outer.unwrap();
                        let k = g.central_half_length().unwrap();
                        if label != idx as usize {
                            println!(
                                "flag: {s} n={n} {which:?} declared outer cell {cell:?} has label {label}, not {idx}"
                            );
                        }
                        if which == Which::N || (which == Which::C && k >= 1) {
                            assert_eq!(label, idx as usize, "{s} n={n} {which:?}");
                        }
                        let seen = g.tiling_face(which.labeled_outer_cell(k)).label;
                        assert_eq!(seen, idx as usize, "{s} n={n} {which:?} labeled outer cell");
                    } else {
                        let placed = want.placed_in(&g, which.placement());
                        assert!(placed.vertices() == sub.core.vertices(), "{s} n={n} {which:?}");
                        assert!(placed.edges() == sub.core.edges(), "{s} n={n} {which:?}");
                        let mut own: Vec<usize> = want.faces().iter().map(|f| f.label).collect();
                        let mut host: Vec<usize> = placed.faces().iter().map(|f| f.label).collect();
                        own.sort();
                        host.sort();
                        assert_eq!(own, host);
                    }
                    cores.insert(which, sub.core);
                }
                let ns = cores[&Which::N].intersection(&cores[&Which::S]);
                let we = cores[&Which::W].intersection(&cores[&Which::E]);
                assert_eq!(ns.edges(), cores[&Which::C].edges(), "{s} n={n}");
                assert_eq!(we.edges(), cores[&Which::C].edges(), "{s} n={n}");
            }
        }
    }

    #[test]
    fn borders() {
        assert!(verify_borders(spec(2, 3, 7), 16).unwrap());
        assert!(verify_borders(spec(1, 2, 4), 6).unwrap());
        for s in specs() {
            for n in s.n + 1..=s.n + 10 {
                assert!(verify_borders(s, n).unwrap(), "{s} n={n}");
            }
        }
    }

    #[test]
    fn rows_next_to_the_centre_start_with_a_square() {
        for s in specs() {
            for n in s.n + 1..=s.n + 12 {
                let g = build_pinecone_strips(s, n).unwrap();
                let ext = g.row_extents();
                let b = ext[&0].1;
                for i in [1i64, -1] {
                    let Some(&(_, bi)) = ext.get(&i) else { continue };
                    assert_eq!(g.tiling_face((i, bi + 1)).shape, Shape::Square, "{s} n={n} row {i}");
                    for j in bi + 2..=b {
                        assert_eq!(g.tiling_face((i, j)).shape, Shape::Hexagon, "{s} n={n} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn rows_beyond_the_ends_hold_only_rectangles() {
        for s in specs() {
            for n in s.n + 1..=s.n + 12 {
                let g = build_pinecone_strips(s, n).unwrap();
                let ext = g.row_extents();
                let (&top, &(ta, tb)) = ext.iter().next_back().unwrap();
                let (&bottom, &(ba, bb)) = ext.iter().next().unwrap();
                for (row, a, b) in [(top + 1, ta, tb), (bottom - 1, ba, bb)] {
                    for j in a + 1..=b {
                        assert_eq!(g.tiling_face((row, j)).shape, Shape::Hexagon, "{s} n={n} ({row},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn placements_are_even() {
        for w in Which::ALL {
            let (i, j) = w.placement();
            assert_eq!((i + j) % 2, 0);
        }
    }

    #[test]
    fn corners_colors() {
        let g = build_pinecone_strips(spec(2, 3, 7), 16).unwrap();
        let k = g.corners().unwrap();
        assert!(!is_white(k.a) && !is_white(k.c));
        assert!(is_white(k.b) && is_white(k.d));
    }
}
