//! Gale-Robinson parameters, the restricted partition function `d(m, a, b)`,
//! and the two recurrences (plain integers and principal coefficients).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPolynomial, Monomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("need 1 <= r <= s <= N/2, got r={r}, s={s}, N={n}")]
    Order { r: usize, s: usize, n: usize },
    #[error("r = s is only allowed when r = s = N/2, got r=s={r}, N={n}")]
    EqualSteps { r: usize, n: usize },
    #[error("r, s and N share the common factor {g}; gcd(r, s, N) must be 1")]
    CommonFactor { g: usize },
    #[error("cannot parse spec {0:?}; expected r,s,N")]
    Parse(String),
}

/// The triple `(r, s, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct GRSpec {
    pub r: usize,
    pub s: usize,
    pub n: usize,
}

impl GRSpec {
    pub fn new(r: usize, s: usize, n: usize) -> Result<Self, SpecError> {
        if r == 0 || s == 0 || n == 0 {
            return Err(SpecError::Order { r, s, n });
        }
        let g = r.gcd(&s).gcd(&n);
        if g != 1 {
            return Err(SpecError::CommonFactor { g });
        }
        if r > s || 2 * s > n {
            return Err(SpecError::Order { r, s, n });
        }
        if r == s && 2 * s != n {
            return Err(SpecError::EqualSteps { r, n });
        }
        Ok(GRSpec { r, s, n })
    }
}

impl TryFrom<[usize; 3]> for GRSpec {
    type Error = SpecError;
    fn try_from(v: [usize; 3]) -> Result<Self, SpecError> {
        GRSpec::new(v[0], v[1], v[2])
    }
}

impl From<GRSpec> for [usize; 3] {
    fn from(s: GRSpec) -> Self {
        [s.r, s.s, s.n]
    }
}

impl std::str::FromStr for GRSpec {
    type Err = SpecError;
    fn from_str(text: &str) -> Result<Self, SpecError> {
        let parts: Vec<usize> = text
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| SpecError::Parse(text.to_string()))?;
        match parts.as_slice() {
            &[r, s, n] => GRSpec::new(r, s, n),
            _ => Err(SpecError::Parse(text.to_string())),
        }
    }
}

impl fmt::Display for GRSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.r, self.s, self.n)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive, got a={a}, b={b}")]
    NonPositive { a: i64, b: i64 },
    #[error("closed form needs gcd(a, b) = 1, got a={a}, b={b}")]
    NotCoprime { a: i64, b: i64 },
    #[error("closed form needs m >= 0, got {0}")]
    Negative(i64),
}

/// Number of pairs `(A, B)` of nonnegative integers with `m = A*a + B*b`.
pub fn d(m: i64, a: i64, b: i64) -> Result<u64, PartitionError> {
    if a <= 0 || b <= 0 {
        return Err(PartitionError::NonPositive { a, b });
    }
    if m < 0 {
        return Ok(0);
    }
    Ok((0..=m / a).filter(|big_a| (m - big_a * a) % b == 0).count() as u64)
}

/// `d` for parameters already known to be positive.
pub(crate) fn dd(m: i64, a: i64, b: i64) -> u64 {
    d(m, a, b).expect("positive parts")
}

fn mod_inverse(x: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let e = x.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Popoviciu's closed form `m/(ab) - {b' m / a} - {a' m / b} + 1`, where `b'` is
/// the inverse of `b` modulo `a` and `a'` the inverse of `a` modulo `b`.
pub fn d_popoviciu(m: i64, a: i64, b: i64) -> Result<u64, PartitionError> {
    if a <= 0 || b <= 0 {
        return Err(PartitionError::NonPositive { a, b });
    }
    if a.gcd(&b) != 1 {
        return Err(PartitionError::NotCoprime { a, b });
    }
    if m < 0 {
        return Err(PartitionError::Negative(m));
    }
    let b_inv = mod_inverse(b, a);
    let a_inv = mod_inverse(a, b);
    // Everything scaled by ab so the fractional parts become integers.
    let scaled = m - b * ((b_inv * m).rem_euclid(a)) - a * ((a_inv * m).rem_euclid(b)) + a * b;
    debug_assert_eq!(scaled.rem_euclid(a * b), 0);
    Ok((scaled / (a * b)) as u64)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("expected {expected} initial values, got {got}")]
    InitialLength { expected: usize, got: usize },
    #[error("initial values must be nonzero")]
    ZeroInitial,
    #[error("non-integral term at n={n}")]
    NotIntegral { n: usize },
    #[error("division by zero at n={n}")]
    ZeroDivisor { n: usize },
    #[error("exact division failed at n={n}: {source}")]
    Laurent { n: usize, source: LaurentError },
}

/// Values `x_1..x_{n_max}` of `x_n x_{n-N} = x_{n-r} x_{n-N+r} + x_{n-s} x_{n-N+s}`.
pub fn gr_sequence_plain(spec: GRSpec, n_max: usize, initial: &[BigInt]) -> Result<Vec<BigInt>, RecurrenceError> {
    let GRSpec { r, s, n: big_n } = spec;
    if initial.len() != big_n {
        return Err(RecurrenceError::InitialLength { expected: big_n, got: initial.len() });
    }
    if initial.iter().any(|v| v.is_zero()) {
        return Err(RecurrenceError::ZeroInitial);
    }
    // x[k] holds x_{k+1}.
    let mut x: Vec<BigInt> = initial.iter().take(n_max).cloned().collect();
    for n in big_n + 1..=n_max {
        let at = |k: usize| &x[k - 1];
        let num = at(n - r) * at(n - big_n + r) + at(n - s) * at(n - big_n + s);
        let den = at(n - big_n);
        if den.is_zero() {
            return Err(RecurrenceError::ZeroDivisor { n });
        }
        let (q, rem) = num.div_rem(den);
        if !rem.is_zero() {
            return Err(RecurrenceError::NotIntegral { n });
        }
        x.push(q);
    }
    Ok(x)
}

/// All-ones initial data.
pub fn gr_numbers(spec: GRSpec, n_max: usize) -> Vec<BigInt> {
    gr_sequence_plain(spec, n_max, &vec![BigInt::from(1); spec.n]).expect("all-ones data is integral")
}

/// The coefficient monomial `prod_i y_i^{d(n-N-i, r, N-r)}` attached to the
/// `x_{n-s} x_{n-N+s}` term at step `n`.
pub fn y_coefficient(spec: GRSpec, n: usize) -> Monomial {
    let GRSpec { r, n: big_n, .. } = spec;
    let y: Vec<i32> =
        (1..=big_n).map(|i| dd(n as i64 - big_n as i64 - i as i64, r as i64, (big_n - r) as i64) as i32).collect();
    Monomial::from_parts(&vec![0; big_n], &y)
}

/// `x̂_1..x̂_{n_max}` from the principal-coefficient recurrence; the first `N`
/// entries are the initial variables.
pub fn principal_sequence(spec: GRSpec, n_max: usize) -> Result<Vec<LaurentPolynomial>, RecurrenceError> {
    let GRSpec { r, s, n: big_n } = spec;
    let mut x: Vec<LaurentPolynomial> = (1..=big_n.min(n_max)).map(|i| LaurentPolynomial::x(big_n, i)).collect();
    for n in big_n + 1..=n_max {
        let at = |k: usize| &x[k - 1];
        let first = at(n - r) * at(n - big_n + r);
        let second = (at(n - s) * at(n - big_n + s)).mul_monomial(&y_coefficient(spec, n));
        let next =
            (&first + &second).div_exact(at(n - big_n)).map_err(|source| RecurrenceError::Laurent { n, source })?;
        x.push(next);
    }
    Ok(x)
}

/// `x̂_{N+1}..x̂_{n_max}` from the principal-coefficient recurrence.
pub fn gr_recurrence_principal(spec: GRSpec, n_max: usize) -> Result<Vec<LaurentPolynomial>, RecurrenceError> {
    let mut all = principal_sequence(spec, n_max)?;
    Ok(all.split_off(spec.n.min(all.len())))
}
