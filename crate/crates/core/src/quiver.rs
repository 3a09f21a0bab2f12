//! Framed quivers as extended exchange matrices, seed mutation with principal
//! coefficients, periodicity, and c-vectors.
//!
//! Vertices are 1-based. Mutable vertices are `1..=N`; frozen vertex `N+j`
//! carries the coefficient `y_j`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galerob::{dd, GRSpec, SpecError};
use crate::laurent::{LaurentError, LaurentPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("vertex {k} is not a mutable vertex (1..={n})")]
    BadVertex { k: usize, n: usize },
    #[error("cluster has {got} entries for {n} mutable vertices")]
    ClusterLength { got: usize, n: usize },
    #[error("exchange relation at vertex {k}: {source}")]
    Exchange { k: usize, source: LaurentError },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// A quiver on `N` mutable and `N` frozen vertices.
///
/// `b[i][j]` counts arrows `i -> j` minus arrows `j -> i` between mutable
/// vertices; `c[j][i]` counts arrows `y_j -> x_i` minus arrows `x_i -> y_j`.
/// Column `i` of `c` is the c-vector of vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    n: usize,
    b: Vec<Vec<i32>>,
    c: Vec<Vec<i32>>,
}

/// A c-vector: entry `j` is the signed number of arrows `y_j -> x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CVector(pub Vec<i32>);

impl CVector {
    pub fn is_sign_coherent(&self) -> bool {
        self.0.iter().all(|&v| v >= 0) || self.0.iter().all(|&v| v <= 0)
    }
}

impl Quiver {
    /// Quiver with the given skew-symmetric mutable part and the principal
    /// framing `y_i -> x_i`.
    pub fn framed(b: Vec<Vec<i32>>) -> Self {
        let n = b.len();
        assert!(b.iter().all(|row| row.len() == n), "exchange matrix must be square");
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, -b[j][i], "exchange matrix must be skew-symmetric");
            }
        }
        let c = (0..n).map(|j| (0..n).map(|i| i32::from(i == j)).collect()).collect();
        Quiver { n, b, c }
    }

    /// Framed quiver from a list of arrows `(i, j)` meaning `i -> j`.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize)]) -> Self {
        let mut b = vec![vec![0; n]; n];
        for &(i, j) in arrows {
            b[i - 1][j - 1] += 1;
            b[j - 1][i - 1] -= 1;
        }
        Self::framed(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `b_ij` for mutable `i`, `j`.
    pub fn b(&self, i: usize, j: usize) -> i32 {
        self.b[i - 1][j - 1]
    }

    pub fn exchange_matrix(&self) -> &[Vec<i32>] {
        &self.b
    }

    pub fn c_vector(&self, i: usize) -> CVector {
        CVector((0..self.n).map(|j| self.c[j][i - 1]).collect())
    }

    /// Entry of the extended matrix: rows `1..=N` mutable, `N+1..=2N` frozen.
    fn ext(&self, row: usize, col: usize) -> i32 {
        if row < self.n {
            self.b[row][col]
        } else {
            self.c[row - self.n][col]
        }
    }

    pub fn mutate(&self, k: usize) -> Result<Quiver, QuiverError> {
        if k == 0 || k > self.n {
            return Err(QuiverError::BadVertex { k, n: self.n });
        }
        let k = k - 1;
        let n = self.n;
        let mut out = self.clone();
        for row in 0..2 * n {
            for col in 0..n {
                let v = if row == k || col == k {
                    -self.ext(row, col)
                } else {
                    let bik = self.ext(row, k);
                    let bkj = self.b[k][col];
                    self.ext(row, col) + (bik.abs() * bkj + bik * bkj.abs()) / 2
                };
                if row < n {
                    out.b[row][col] = v;
                } else {
                    out.c[row - n][col] = v;
                }
            }
        }
        Ok(out)
    }

    /// Relabel mutable vertices by `v -> v-1` (with `1 -> N`), applied `m` times.
    pub fn rho(&self, m: usize) -> Quiver {
        let n = self.n;
        let p = |v: usize| (v + n - m % n) % n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.b[p(i)][p(j)] = self.b[i][j];
                out.c[j][p(i)] = self.c[j][i];
            }
        }
        out
    }

    /// Whether mutating at `1, 2, ..., m` and relabeling by `rho^m` returns the
    /// same mutable part.
    pub fn is_periodic(&self, m: usize) -> Result<bool, QuiverError> {
        if m == 0 || m > self.n {
            return Err(QuiverError::BadVertex { k: m, n: self.n });
        }
        let mut q = self.clone();
        for k in 1..=m {
            q = q.mutate(k)?;
        }
        Ok(q.rho(m).b == self.b)
    }

    /// Arrows between mutable vertices as `(tail, head, multiplicity)`.
    pub fn arrows(&self) -> Vec<(usize, usize, i32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.b[i][j] > 0 {
                    out.push((i + 1, j + 1, self.b[i][j]));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("quiver serializes")
    }
}

/// Arrow multiset `(tail, head)` from the three drawing steps of the
/// Gale-Robinson quiver; with `keep_two_cycles = false` opposite pairs are cancelled.
pub fn gale_robinson_arrows(spec: GRSpec, keep_two_cycles: bool) -> Vec<(usize, usize)> {
    let GRSpec { r, s, n } = spec;
    let mut arrows = Vec::new();
    arrows.extend((1..=n - r).map(|i| (i, i + r)));
    arrows.extend((1..=r).map(|j| (j, n - r + j)));
    arrows.extend((1..=n - s).map(|i| (s + i, i)));
    arrows.extend((1..=s).map(|j| (n - s + j, j)));
    arrows.extend((1..=n - r - s).map(|i| (r + i, s + i)));
    arrows.extend((1..=s - r).map(|j| (r + j, n - s + j)));
    if !keep_two_cycles {
        let q = Quiver::from_arrows(n, &arrows);
        arrows = q.arrows().into_iter().flat_map(|(i, j, m)| std::iter::repeat_n((i, j), m as usize)).collect();
    }
    arrows.sort_unstable();
    arrows
}

/// The framed Gale-Robinson quiver for `(r, s, N)`.
pub fn build_gale_robinson(r: usize, s: usize, n: usize) -> Result<Quiver, QuiverError> {
    let spec = GRSpec::new(r, s, n)?;
    Ok(gale_robinson_quiver(spec))
}

pub fn gale_robinson_quiver(spec: GRSpec) -> Quiver {
    Quiver::from_arrows(spec.n, &gale_robinson_arrows(spec, true))
}

/// A framed quiver with a cluster of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub quiver: Quiver,
    pub cluster: Vec<LaurentPolynomial>,
}

impl Seed {
    pub fn new(quiver: Quiver, cluster: Vec<LaurentPolynomial>) -> Result<Self, QuiverError> {
        if cluster.len() != quiver.n {
            return Err(QuiverError::ClusterLength { got: cluster.len(), n: quiver.n });
        }
        Ok(Seed { quiver, cluster })
    }

    /// Initial seed `x_1..x_N` over the given quiver.
    pub fn initial(quiver: Quiver) -> Self {
        let n = quiver.n;
        let cluster = (1..=n).map(|i| LaurentPolynomial::x(n, i)).collect();
        Seed { quiver, cluster }
    }

    /// The exchange relation at `k`: in-arrows (including from frozen vertices)
    /// form one monomial, out-arrows the other.
    pub fn mutate(&self, k: usize) -> Result<Seed, QuiverError> {
        let q = &self.quiver;
        let n = q.n;
        if k == 0 || k > n {
            return Err(QuiverError::BadVertex { k, n });
        }
        let mut in_y = vec![0; n];
        let mut out_y = vec![0; n];
        for j in 0..n {
            let v = q.c[j][k - 1];
            if v > 0 {
                in_y[j] = v;
            } else {
                out_y[j] = -v;
            }
        }
        let mut incoming = LaurentPolynomial::monomial(&vec![0; n], &in_y);
        let mut outgoing = LaurentPolynomial::monomial(&vec![0; n], &out_y);
        let wrap = |source| QuiverError::Exchange { k, source };
        for i in 1..=n {
            let bik = q.b(i, k);
            if bik > 0 {
                incoming = incoming.try_mul(&self.cluster[i - 1].pow(bik).map_err(wrap)?).map_err(wrap)?;
            } else if bik < 0 {
                outgoing = outgoing.try_mul(&self.cluster[i - 1].pow(-bik).map_err(wrap)?).map_err(wrap)?;
            }
        }
        let new_var = incoming.try_add(&outgoing).and_then(|num| num.div_exact(&self.cluster[k - 1])).map_err(wrap)?;
        let mut cluster = self.cluster.clone();
        cluster[k - 1] = new_var;
        Ok(Seed { quiver: q.mutate(k)?, cluster })
    }
}

/// Iterator over the seeds reached by mutating periodically at `1, 2, ..., N, 1, ...`.
/// Item `t` (from 1) is the seed after `t` mutations, paired with the vertex mutated.
pub struct PeriodicMutations {
    seed: Seed,
    step: usize,
}

impl PeriodicMutations {
    pub fn new(spec: GRSpec) -> Self {
        PeriodicMutations { seed: Seed::initial(gale_robinson_quiver(spec)), step: 0 }
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    /// Mutate once more; returns the vertex that was mutated.
    pub fn advance(&mut self) -> Result<usize, QuiverError> {
        let k = self.step % self.seed.quiver.n + 1;
        self.seed = self.seed.mutate(k)?;
        self.step += 1;
        Ok(k)
    }
}

/// `x̂_n` by periodic mutation of the framed Gale-Robinson seed.
pub fn cluster_variable(r: usize, s: usize, n_total: usize, n: usize) -> Result<LaurentPolynomial, QuiverError> {
    let spec = GRSpec::new(r, s, n_total)?;
    Ok(cluster_variables(spec, n)?.pop().expect("n >= 1"))
}

/// `x̂_1..x̂_{n_max}` by periodic mutation.
pub fn cluster_variables(spec: GRSpec, n_max: usize) -> Result<Vec<LaurentPolynomial>, QuiverError> {
    let mut out: Vec<LaurentPolynomial> = (1..=spec.n.min(n_max)).map(|i| LaurentPolynomial::x(spec.n, i)).collect();
    let mut walk = PeriodicMutations::new(spec);
    while out.len() < n_max {
        let k = walk.advance()?;
        out.push(walk.seed().cluster[k - 1].clone());
    }
    Ok(out)
}

/// c-vector of vertex `i` after `l` periodic mutations, read off the quiver.
pub fn c_vector_direct(spec: GRSpec, i: usize, l: usize) -> CVector {
    c_vectors_direct(spec, l).swap_remove(i - 1)
}

/// All c-vectors after `l` periodic mutations.
pub fn c_vectors_direct(spec: GRSpec, l: usize) -> Vec<CVector> {
    let mut q = gale_robinson_quiver(spec);
    for t in 0..l {
        q = q.mutate(t % spec.n + 1).expect("vertex in range");
    }
    (1..=spec.n).map(|i| q.c_vector(i)).collect()
}

/// The shifted index `⌊(l + r - i)/N⌋ N + i`.
pub fn underline_index(spec: GRSpec, i: usize, l: usize) -> i64 {
    let n = spec.n as i64;
    (l as i64 + spec.r as i64 - i as i64).div_euclid(n) * n + i as i64
}

/// `E_m = sum_j d(m - j, r, N - r) e_j`.
pub fn e_vector(spec: GRSpec, m: i64) -> CVector {
    let (r, n) = (spec.r as i64, spec.n as i64);
    CVector((1..=n).map(|j| dd(m - j, r, n - r) as i32).collect())
}

/// `F_m = sum_j [j ≡ m + N mod N - r] e_j`.
pub fn f_vector(spec: GRSpec, m: i64) -> CVector {
    let (r, n) = (spec.r as i64, spec.n as i64);
    CVector((1..=n).map(|j| i32::from((j - m - n).rem_euclid(n - r) == 0)).collect())
}

/// Closed-form c-vector, valid for `l >= r`; smaller `l` falls back to mutation.
pub fn c_vector_closed_form(spec: GRSpec, i: usize, l: usize) -> CVector {
    if l < spec.r {
        return c_vector_direct(spec, i, l);
    }
    let (r, l_) = (spec.r as i64, l as i64);
    let u = underline_index(spec, i, l);
    if l_ + 1 - r <= u && u <= l_ {
        CVector(e_vector(spec, u).0.into_iter().map(|v| -v).collect())
    } else if l_ < u && u <= l_ + r {
        e_vector(spec, u)
    } else {
        f_vector(spec, u)
    }
}
