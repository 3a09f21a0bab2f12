//! Sparse multivariate Laurent polynomials in `x_1..x_N` and `y_1..y_N` with
//! arbitrary-precision integer coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by the concatenated exponent vector, so
//! iteration order is the canonical lexicographic order and structural equality
//! is polynomial equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("dimension mismatch: {left} variables vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    Inexact,
    #[error("zero assigned to {0}, which appears with a negative exponent")]
    ZeroToNegativePower(Var),
    #[error("no value assigned to {0}")]
    Unassigned(Var),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
}

/// A variable `x_i` or `y_i`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
        }
    }
}

/// Exponent vector: the first `N` entries are x-exponents, the last `N` are y-exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[i32]>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; 2 * n].into_boxed_slice())
    }

    pub fn from_parts(x: &[i32], y: &[i32]) -> Self {
        assert_eq!(x.len(), y.len(), "x and y exponent lists differ in length");
        let mut v = Vec::with_capacity(2 * x.len());
        v.extend_from_slice(x);
        v.extend_from_slice(y);
        Monomial(v.into_boxed_slice())
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn x_exps(&self) -> &[i32] {
        &self.0[..self.n()]
    }

    pub fn y_exps(&self) -> &[i32] {
        &self.0[self.n()..]
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn exp(&self, v: Var) -> i32 {
        match v {
            Var::X(i) => self.0[i - 1],
            Var::Y(i) => self.0[self.n() + i - 1],
        }
    }

    fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// A Laurent polynomial over `N` x-variables and `N` y-variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    n: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(n: usize) -> Self {
        LaurentPolynomial { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        Self::term(n, c, Monomial::one(n))
    }

    pub fn term(n: usize, c: impl Into<BigInt>, m: Monomial) -> Self {
        assert_eq!(m.n(), n, "monomial has the wrong number of variables");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { n, terms }
    }

    /// The monomial `v^e`.
    pub fn var_pow(n: usize, v: Var, e: i32) -> Self {
        let mut exps = vec![0; 2 * n];
        match v {
            Var::X(i) => {
                assert!((1..=n).contains(&i), "x index {i} out of range 1..={n}");
                exps[i - 1] = e
            }
            Var::Y(i) => {
                assert!((1..=n).contains(&i), "y index {i} out of range 1..={n}");
                exps[n + i - 1] = e
            }
        }
        Self::term(n, 1, Monomial(exps.into_boxed_slice()))
    }

    pub fn x(n: usize, i: usize) -> Self {
        Self::var_pow(n, Var::X(i), 1)
    }

    pub fn y(n: usize, i: usize) -> Self {
        Self::var_pow(n, Var::Y(i), 1)
    }

    /// The monomial with the given x- and y-exponent lists.
    pub fn monomial(x: &[i32], y: &[i32]) -> Self {
        Self::term(x.len(), 1, Monomial::from_parts(x, y))
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Result<Self, LaurentError> {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            if m.n() != n {
                return Err(LaurentError::DimensionMismatch { left: n, right: m.n() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), LaurentError> {
        if self.n != other.n {
            Err(LaurentError::DimensionMismatch { left: self.n, right: other.n })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.n));
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.add(mb)).or_default() += ca * cb;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LaurentPolynomial { n: self.n, terms })
    }

    /// Multiply by a single monomial (exponent shift).
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        assert_eq!(m.n(), self.n);
        LaurentPolynomial { n: self.n, terms: self.terms.iter().map(|(k, c)| (k.add(m), c.clone())).collect() }
    }

    /// `self^e` for `e >= 0`; negative exponents are allowed only for monomials.
    pub fn pow(&self, e: i32) -> Result<Self, LaurentError> {
        if e < 0 {
            let (m, c) = self.as_monomial().ok_or(LaurentError::Inexact)?;
            if !c.abs().is_one() {
                return Err(LaurentError::Inexact);
            }
            let k = -e;
            let inv = Monomial(m.0.iter().map(|&a| -a * k).collect());
            let sign = if c.is_negative() && k % 2 == 1 { -1 } else { 1 };
            return Ok(Self::term(self.n, sign, inv));
        }
        let mut out = Self::one(self.n);
        for _ in 0..e {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Exact division: returns `r` with `r * q == self`, or an error if no such
    /// Laurent polynomial exists.
    pub fn div_exact(&self, q: &Self) -> Result<Self, LaurentError> {
        self.check_dim(q)?;
        if q.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if let Some((qm, qc)) = q.as_monomial() {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                let (quot, rem) = num_integer::Integer::div_rem(c, qc);
                if !rem.is_zero() {
                    return Err(LaurentError::Inexact);
                }
                terms.insert(m.sub(qm), quot);
            }
            return Ok(LaurentPolynomial { n: self.n, terms });
        }
        // Leading-term elimination: the lexicographic order on exponent vectors is
        // compatible with multiplication, so the top term of a product is the
        // product of top terms and each quotient term is forced.
        let (q_lead_m, q_lead_c) = q.terms.iter().next_back().unwrap();
        let (q_low_m, _) = q.terms.iter().next().unwrap();
        let floor = match self.terms.iter().next() {
            Some((p_low, _)) => p_low.sub(q_low_m),
            None => return Ok(Self::zero(self.n)),
        };
        let mut rem = self.terms.clone();
        let mut quotient = BTreeMap::new();
        while let Some((lm, lc)) = rem.iter().next_back() {
            let tm = lm.sub(q_lead_m);
            if tm < floor {
                return Err(LaurentError::Inexact);
            }
            let (tc, r) = num_integer::Integer::div_rem(lc, q_lead_c);
            if !r.is_zero() {
                return Err(LaurentError::Inexact);
            }
            for (qm, qc) in &q.terms {
                let key = tm.add(qm);
                let delta = &tc * qc;
                use std::collections::btree_map::Entry;
                match rem.entry(key) {
                    Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                    Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            quotient.insert(tm, tc);
        }
        Ok(LaurentPolynomial { n: self.n, terms: quotient })
    }

    /// Evaluate at integer values for every variable that occurs.
    pub fn specialize(&self, assignment: &impl Fn(Var) -> Option<BigInt>) -> Result<BigInt, LaurentError> {
        let n = self.n;
        let vars: Vec<Var> = (1..=n).map(Var::X).chain((1..=n).map(Var::Y)).collect();
        let mut values: Vec<Option<BigInt>> = vec![None; 2 * n];
        let mut total = BigInt::zero();
        // Accumulate numerator and denominator separately so the result is exact.
        let mut num_terms: Vec<(BigInt, BigInt)> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut numer = c.clone();
            let mut denom = BigInt::one();
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if values[k].is_none() {
                    values[k] = Some(assignment(vars[k]).ok_or(LaurentError::Unassigned(vars[k]))?);
                }
                let v = values[k].as_ref().unwrap();
                if e > 0 {
                    numer *= num_traits::pow(v.clone(), e as usize);
                } else {
                    if v.is_zero() {
                        return Err(LaurentError::ZeroToNegativePower(vars[k]));
                    }
                    denom *= num_traits::pow(v.clone(), (-e) as usize);
                }
            }
            num_terms.push((numer, denom));
        }
        let common = num_terms.iter().fold(BigInt::one(), |acc, (_, d)| num_integer::Integer::lcm(&acc, d));
        for (numer, denom) in num_terms {
            total += numer * (&common / denom);
        }
        let (quot, rem) = num_integer::Integer::div_rem(&total, &common);
        if !rem.is_zero() {
            return Err(LaurentError::Inexact);
        }
        Ok(quot)
    }

    /// Evaluate with every variable set to 1.
    pub fn at_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Substitute `y_i = 1` for all `i`.
    pub fn y_to_one(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut v = m.0.to_vec();
            for e in &mut v[self.n..] {
                *e = 0;
            }
            out.add_term(Monomial(v.into_boxed_slice()), c.clone());
        }
        out
    }

    /// Smallest exponent of each variable across all terms (0 for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i32> {
        let mut mins = vec![0; 2 * self.n];
        for (i, m) in self.terms.keys().enumerate() {
            for (k, &e) in m.0.iter().enumerate() {
                if i == 0 || e < mins[k] {
                    mins[k] = e;
                }
            }
        }
        mins
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial serializes")
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mut factors = Vec::new();
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if k < self.n { format!("x{}", k + 1) } else { format!("y{}", k - self.n + 1) };
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&LaurentPolynomial> for &LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
                self.$inner(rhs).expect("operands have the same number of variables")
            }
        }
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    x: Vec<i32>,
    y: Vec<i32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr { coeff: c.to_string(), x: m.x_exps().to_vec(), y: m.y_exps().to_vec() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(d)?;
        let mut p = LaurentPolynomial::zero(repr.n);
        for t in repr.terms {
            if t.x.len() != repr.n || t.y.len() != repr.n {
                return Err(D::Error::custom(LaurentError::Malformed("exponent list length differs from n".into())));
            }
            let c: BigInt = t
                .coeff
                .parse()
                .map_err(|_| D::Error::custom(LaurentError::Malformed(format!("bad coefficient {:?}", t.coeff))))?;
            if c.is_zero() {
                return Err(D::Error::custom(LaurentError::Malformed("zero coefficient".into())));
            }
            let m = Monomial::from_parts(&t.x, &t.y);
            if p.terms.contains_key(&m) {
                return Err(D::Error::custom(LaurentError::Malformed("repeated monomial".into())));
            }
            p.terms.insert(m, c);
        }
        Ok(p)
    }
}
