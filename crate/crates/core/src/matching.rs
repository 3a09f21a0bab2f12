//! Perfect matchings of pinecones: enumeration, the twist lattice, minimal
//! matchings, heights, edge weights, covering monomials and graph weights.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{LaurentPolynomial, Monomial};
use crate::pinecone::{is_white, Edge, Face, Pinecone, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("the graph has no perfect matching")]
    Unmatchable,
    #[error("face {0} is not twistable for this matching")]
    NotTwistable(usize),
    #[error("an empty graph without a declared outer label has no weight")]
    EmptyWithoutLabel,
    #[error("edge set is not a perfect matching of the graph")]
    NotPerfect,
}

/// A perfect matching as a sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether this covers every vertex of `g` exactly once using edges of `g`.
    pub fn is_perfect_for(&self, g: &Pinecone) -> bool {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !g.has_edge(e) || !seen.insert(e.0) || !seen.insert(e.1) {
                return false;
            }
        }
        seen.len() == g.vertices().len()
    }
}

/// Vertices indexed in sorted order with adjacency lists.
struct Indexed {
    verts: Vec<Vertex>,
    /// `(neighbour, edge index)` pairs.
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<Edge>,
}

impl Indexed {
    fn new(vertices: &BTreeSet<Vertex>, edges: &BTreeSet<Edge>) -> Self {
        let verts: Vec<Vertex> = vertices.iter().copied().collect();
        let index: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); verts.len()];
        let edges: Vec<Edge> = edges.iter().copied().collect();
        for (k, e) in edges.iter().enumerate() {
            let (a, b) = (index[&e.0], index[&e.1]);
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        Indexed { verts, adj, edges }
    }
}

/// Some perfect matching, found by augmenting paths from the black side.
pub fn perfect_matching(vertices: &BTreeSet<Vertex>, edges: &BTreeSet<Edge>) -> Option<Vec<Edge>> {
    let g = Indexed::new(vertices, edges);
    let black: Vec<usize> = (0..g.verts.len()).filter(|&i| !is_white(g.verts[i])).collect();
    if 2 * black.len() != g.verts.len() {
        return None;
    }
    let mut mate: Vec<Option<usize>> = vec![None; g.verts.len()];

    fn augment(g: &Indexed, u: usize, mate: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &(w, _) in &g.adj[u] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if mate[w].is_none_or(|u2| augment(g, u2, mate, seen)) {
                mate[w] = Some(u);
                mate[u] = Some(w);
                return true;
            }
        }
        false
    }

    for &u in &black {
        let mut seen = vec![false; g.verts.len()];
        if !augment(&g, u, &mut mate, &mut seen) {
            return None;
        }
    }
    Some(black.iter().map(|&u| Edge::new(g.verts[u], g.verts[mate[u].unwrap()])).collect())
}

/// Calls `visit` with the edge indices of every perfect matching, branching on
/// the lowest uncovered vertex in sorted order.
fn for_each_matching(g: &Indexed, mut visit: impl FnMut(&[usize])) {
    fn rec(g: &Indexed, start: usize, covered: &mut [bool], chosen: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        let mut u = start;
        while u < covered.len() && covered[u] {
            u += 1;
        }
        if u == covered.len() {
            visit(chosen);
            return;
        }
        covered[u] = true;
        for &(w, k) in &g.adj[u] {
            if !covered[w] {
                covered[w] = true;
                chosen.push(k);
                rec(g, u + 1, covered, chosen, visit);
                chosen.pop();
                covered[w] = false;
            }
        }
        covered[u] = false;
    }
    let mut covered = vec![false; g.verts.len()];
    rec(g, 0, &mut covered, &mut Vec::new(), &mut visit);
}

/// All perfect matchings in a deterministic order; the empty graph has
/// exactly one (empty) matching.
pub fn enumerate_matchings(g: &Pinecone) -> Vec<Matching> {
    let ig = Indexed::new(g.vertices(), g.edges());
    let mut out = Vec::new();
    for_each_matching(&ig, |ks| out.push(Matching::new(ks.iter().map(|&k| ig.edges[k]).collect())));
    out
}

pub fn count_matchings(g: &Pinecone) -> u64 {
    let ig = Indexed::new(g.vertices(), g.edges());
    let mut count = 0;
    for_each_matching(&ig, |_| count += 1);
    count
}

/// Which alternate half of a face's boundary a matching uses: `Some(0)` for
/// the even-indexed edges of `Face::boundary_edges`, `Some(1)` for the odd.
fn twist_half(face: &Face, m: &Matching) -> Option<usize> {
    let b = face.boundary_edges();
    (0..2).find(|&h| b.iter().skip(h).step_by(2).all(|e| m.contains(e)))
}

pub fn is_twistable(face: &Face, m: &Matching) -> bool {
    twist_half(face, m).is_some()
}

/// Direction of the twist at `face` by the parity table: `+1` when the
/// matched half is the lower one. Boundary edges are indexed clockwise from
/// the upper-left corner, so for a square the even half is the horizontal
/// pair and for a rectangle it is {top-left, right side, bottom-left}. On an
/// even face the even half twists upward; on an odd face the odd half does.
pub fn twist_sign_table(face: &Face, m: &Matching) -> Option<i8> {
    let half = twist_half(face, m)?;
    let parity = if face.is_even() { 0 } else { 1 };
    Some(if half == parity { 1 } else { -1 })
}

/// The same sign from colors: `+1` iff the matched edges run black to white
/// in clockwise order around the face.
pub fn twist_sign_color(face: &Face, m: &Matching) -> Option<i8> {
    let half = twist_half(face, m)?;
    let b = face.boundary();
    let from = b[half];
    Some(if is_white(from) { -1 } else { 1 })
}

/// Twist `m` at face index `f` of `g`; returns the new matching and `+1` if it
/// lies above `m` in the lattice, `-1` if below.
pub fn twist(g: &Pinecone, m: &Matching, f: usize) -> Result<(Matching, i8), MatchingError> {
    let face = &g.faces()[f];
    let half = twist_half(face, m).ok_or(MatchingError::NotTwistable(f))?;
    let sign = twist_sign_table(face, m).expect("twistable");
    let b = face.boundary_edges();
    let old: BTreeSet<Edge> = b.iter().skip(half).step_by(2).copied().collect();
    let mut edges: Vec<Edge> = m.edges.iter().copied().filter(|e| !old.contains(e)).collect();
    edges.extend(b.iter().skip(1 - half).step_by(2).copied());
    Ok((Matching::new(edges), sign))
}

/// The bottom of the lattice, reached from `start` by downward twists.
pub fn minimal_matching_from(g: &Pinecone, start: &Matching) -> Matching {
    let mut m = start.clone();
    loop {
        let down = (0..g.faces().len()).find(|&f| twist_sign_table(&g.faces()[f], &m) == Some(-1));
        match down {
            Some(f) => m = twist(g, &m, f).expect("twistable").0,
            None => return m,
        }
    }
}

pub fn minimal_matching(g: &Pinecone) -> Result<Matching, MatchingError> {
    let start = perfect_matching(g.vertices(), g.edges()).ok_or(MatchingError::Unmatchable)?;
    Ok(minimal_matching_from(g, &Matching::new(start)))
}

/// Per-face heights `v_M`, aligned with `g.faces()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HeightFunction {
    pub values: Vec<u32>,
}

impl HeightFunction {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Heights keyed by face anchor cell.
    pub fn by_anchor(&self, g: &Pinecone) -> BTreeMap<(i64, i64), u32> {
        g.faces().iter().zip(&self.values).map(|(f, &v)| (f.anchor, v)).collect()
    }
}

/// Closed cycles of `M ⊕ M'`, each as its edge list; doubled edges drop out.
pub fn symmetric_difference_cycles(a: &Matching, b: &Matching) -> Vec<Vec<Edge>> {
    let diff: Vec<Edge> =
        a.edges.iter().filter(|e| !b.contains(e)).chain(b.edges.iter().filter(|e| !a.contains(e))).copied().collect();
    let mut at: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (k, e) in diff.iter().enumerate() {
        at.entry(e.0).or_default().push(k);
        at.entry(e.1).or_default().push(k);
    }
    let mut used = vec![false; diff.len()];
    let mut cycles = Vec::new();
    for k0 in 0..diff.len() {
        if used[k0] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut k = k0;
        let mut v = diff[k0].0;
        loop {
            used[k] = true;
            cycle.push(diff[k]);
            v = diff[k].other(v);
            match at[&v].iter().find(|&&j| !used[j]) {
                Some(&j) => k = j,
                None => break,
            }
        }
        cycles.push(cycle);
    }
    cycles
}

/// Heights of `m` against `base`: for every face, the number of cycles of
/// `m ⊕ base` enclosing it. Enclosure is decided by the parity of cycle edges
/// crossed by a horizontal ray from the face's anchor-cell centre towards
/// column −∞.
pub fn height_against(g: &Pinecone, m: &Matching, base: &Matching) -> HeightFunction {
    let mut values = vec![0u32; g.faces().len()];
    for cycle in symmetric_difference_cycles(m, base) {
        // Column positions of vertical edges per row of cells.
        let mut walls: HashMap<i64, Vec<i64>> = HashMap::new();
        for e in cycle.iter().filter(|e| e.is_vertical()) {
            walls.entry(e.0 .0.max(e.1 .0)).or_default().push(e.0 .1);
        }
        for (f, face) in g.faces().iter().enumerate() {
            let (i, j) = face.anchor;
            if let Some(ws) = walls.get(&i) {
                // The wall at column c lies between cells (i, c) and (i, c − 1).
                if ws.iter().filter(|&&c| c <= j).count() % 2 == 1 {
                    values[f] += 1;
                }
            }
        }
    }
    HeightFunction { values }
}

pub fn height(g: &Pinecone, m: &Matching) -> Result<HeightFunction, MatchingError> {
    Ok(height_against(g, m, &minimal_matching(g)?))
}

/// `x(e)` as an x-exponent vector: −1 at each straddled face label.
pub fn edge_weight_exps(g: &Pinecone, e: &Edge) -> Vec<i32> {
    let mut x = vec![0; g.spec().n];
    let (f1, f2) = g.edge_faces(e);
    x[f1.label - 1] -= 1;
    x[f2.label - 1] -= 1;
    x
}

pub fn edge_weight(g: &Pinecone, e: &Edge) -> LaurentPolynomial {
    let n = g.spec().n;
    LaurentPolynomial::monomial(&edge_weight_exps(g, e), &vec![0; n])
}

/// `x(M)` as an x-exponent vector.
pub fn matching_weight_exps(g: &Pinecone, m: &Matching) -> Vec<i32> {
    let mut x = vec![0; g.spec().n];
    for e in m.edges() {
        let (f1, f2) = g.edge_faces(e);
        x[f1.label - 1] -= 1;
        x[f2.label - 1] -= 1;
    }
    x
}

/// `y(M)` as a y-exponent vector.
pub fn height_exps(g: &Pinecone, h: &HeightFunction) -> Vec<i32> {
    let mut y = vec![0; g.spec().n];
    for (face, &v) in g.faces().iter().zip(&h.values) {
        y[face.label - 1] += v as i32;
    }
    y
}

/// `cm(G) = I(G) O(G)` as x-exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringMonomial {
    pub interior: Vec<i32>,
    pub outer: Vec<i32>,
}

impl CoveringMonomial {
    pub fn exps(&self) -> Vec<i32> {
        self.interior.iter().zip(&self.outer).map(|(a, b)| a + b).collect()
    }

    pub fn to_polynomial(&self) -> LaurentPolynomial {
        LaurentPolynomial::monomial(&self.exps(), &vec![0; self.interior.len()])
    }
}

/// Open faces: tiling faces outside `g` sharing at least one edge with it,
/// with the number of shared edges.
pub fn open_faces(g: &Pinecone) -> Vec<(Face, usize)> {
    let inner: BTreeSet<(i64, i64)> = g.faces().iter().map(|f| f.anchor).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in g.edges() {
        let (c1, c2) = e.cells();
        for c in [c1, c2] {
            let f = g.tiling_face(c);
            if inner.contains(&f.anchor) || !seen.insert(f.anchor) {
                continue;
            }
            let k = f.boundary_edges().iter().filter(|b| g.has_edge(b)).count();
            out.push((f, k));
        }
    }
    out
}

pub fn covering_monomial(g: &Pinecone) -> Result<CoveringMonomial, MatchingError> {
    let n = g.spec().n;
    let mut interior = vec![0; n];
    let mut outer = vec![0; n];
    if g.is_empty() {
        let label = g.empty_label().ok_or(MatchingError::EmptyWithoutLabel)?;
        outer[label - 1] = 1;
        return Ok(CoveringMonomial { interior, outer });
    }
    for f in g.faces() {
        interior[f.label - 1] += (f.boundary_edges().len() / 2 - 1) as i32;
    }
    for (f, k) in open_faces(g) {
        outer[f.label - 1] += k.div_ceil(2) as i32;
    }
    Ok(CoveringMonomial { interior, outer })
}

/// `w(G) = cm(G) Σ_M x(M) y(M)`.
pub fn graph_weight(g: &Pinecone) -> Result<LaurentPolynomial, MatchingError> {
    let cm = covering_monomial(g)?;
    let n = g.spec().n;
    if g.is_empty() {
        return Ok(cm.to_polynomial());
    }
    let base = minimal_matching(g)?;
    let cm_exps = cm.exps();
    let mut acc: HashMap<Vec<i32>, u64> = HashMap::new();
    for m in enumerate_matchings(g) {
        let h = height_against(g, &m, &base);
        let mut key = matching_weight_exps(g, &m);
        for (a, b) in key.iter_mut().zip(&cm_exps) {
            *a += b;
        }
        key.extend(height_exps(g, &h));
        *acc.entry(key).or_insert(0) += 1;
    }
    let terms = acc.into_iter().map(|(k, c)| (Monomial::from_parts(&k[..n], &k[n..]), BigInt::from(c)));
    Ok(LaurentPolynomial::from_terms(n, terms).expect("dimensions agree"))
}

/// Outcome of the lattice checks on one graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub matchings: usize,
    /// Twisting the same face twice restores the matching, for every
    /// matching and every twistable face.
    pub involution: bool,
    /// Every matching is reached from the minimal one by twists.
    pub connected: bool,
    /// Descent from random starts always ends at the same matching, and it is
    /// the only matching with no downward twist.
    pub minimal_unique: bool,
    /// The minimal matching has height zero, so `y(M₋) = 1`.
    pub minimal_height_zero: bool,
    /// Each sampled upward twist at face `F` raises the height by exactly `1_F`.
    pub cover_relation: bool,
    pub sampled_twists: usize,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.involution && self.connected && self.minimal_unique && self.minimal_height_zero && self.cover_relation
    }
}

/// Checks the distributive-lattice structure of the matchings of `g`, with
/// `starts` random descents and `samples` random twists drawn from `seed`.
pub fn verify_lattice(g: &Pinecone, starts: usize, samples: usize, seed: u64) -> Result<LatticeReport, MatchingError> {
    let ms = enumerate_matchings(g);
    if ms.is_empty() {
        return Err(MatchingError::Unmatchable);
    }
    let base = minimal_matching(g)?;
    let faces = g.faces().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = LatticeReport { matchings: ms.len(), involution: true, ..LatticeReport::default() };

    for m in &ms {
        for f in (0..faces).filter(|&f| is_twistable(&g.faces()[f], m)) {
            if &twist(g, &twist(g, m, f)?.0, f)?.0 != m {
                rep.involution = false;
            }
        }
    }

    let mut seen: BTreeSet<Matching> = BTreeSet::from([base.clone()]);
    let mut queue = vec![base.clone()];
    while let Some(m) = queue.pop() {
        for f in (0..faces).filter(|&f| is_twistable(&g.faces()[f], &m)) {
            let t = twist(g, &m, f)?.0;
            if seen.insert(t.clone()) {
                queue.push(t);
            }
        }
    }
    rep.connected = seen.len() == ms.len() && ms.iter().all(|m| seen.contains(m));

    let bottoms = ms.iter().filter(|m| (0..faces).all(|f| twist_sign_table(&g.faces()[f], m) != Some(-1))).count();
    rep.minimal_unique =
        bottoms == 1 && (0..starts).all(|_| minimal_matching_from(g, &ms[rng.gen_range(0..ms.len())]) == base);
    rep.minimal_height_zero = height_against(g, &base, &base).is_zero();

    rep.cover_relation = true;
    let twistable: Vec<(usize, usize)> = ms
        .iter()
        .enumerate()
        .flat_map(|(k, m)| (0..faces).filter(move |&f| is_twistable(&g.faces()[f], m)).map(move |f| (k, f)))
        .collect();
    if !twistable.is_empty() {
        for _ in 0..samples {
            let (k, f) = twistable[rng.gen_range(0..twistable.len())];
            let (t, sign) = twist(g, &ms[k], f)?;
            let (lower, upper) = if sign == 1 { (&ms[k], &t) } else { (&t, &ms[k]) };
            let hl = height_against(g, lower, &base);
            let hu = height_against(g, upper, &base);
            let ok = hl
                .values
                .iter()
                .zip(&hu.values)
                .enumerate()
                .all(|(j, (&a, &b))| b as i64 - a as i64 == i64::from(j == f));
            rep.cover_relation &= ok;
            rep.sampled_twists += 1;
        }
    }
    Ok(rep)
}
