//! Polynomials in the trace functions `t_i`, `t_ij`, `t_ijk` of a tuple.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::liecore::{Mat2, Sign};
use crate::C64;

/// A trace function of a tuple `(a_1, …, a_N)`, zero-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraceVar {
    /// `tr(a_i)`
    T(usize),
    /// `tr(a_i a_j)`
    T2(usize, usize),
    /// `tr(a_i a_j a_k)`
    T3(usize, usize, usize),
}

impl TraceVar {
    fn indices(&self) -> Vec<usize> {
        match *self {
            TraceVar::T(i) => vec![i],
            TraceVar::T2(i, j) => vec![i, j],
            TraceVar::T3(i, j, k) => vec![i, j, k],
        }
    }

    fn evaluate(&self, a: &[Mat2]) -> C64 {
        let m = match *self {
            TraceVar::T(i) => a[i],
            TraceVar::T2(i, j) => a[i] * a[j],
            TraceVar::T3(i, j, k) => a[i] * a[j] * a[k],
        };
        m[(0, 0)] + m[(1, 1)]
    }
}

impl fmt::Display for TraceVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TraceVar::T(i) => write!(f, "t{}", i + 1),
            TraceVar::T2(i, j) => write!(f, "t{}{}", i + 1, j + 1),
            TraceVar::T3(i, j, k) => write!(f, "t{}{}{}", i + 1, j + 1, k + 1),
        }
    }
}

/// A polynomial with complex coefficients in trace functions.
///
/// Monomials are sorted lists of variables; zero coefficients are dropped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TracePolynomial {
    terms: BTreeMap<Vec<TraceVar>, C64>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(c, vec![])
    }

    pub fn var(v: TraceVar) -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![v])
    }

    pub fn monomial(c: C64, mut vars: Vec<TraceVar>) -> Self {
        vars.sort();
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(vars, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[TraceVar], C64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let entry = terms.entry(k.clone()).or_insert(C64::new(0.0, 0.0));
            *entry += v;
        }
        terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        Self { terms }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out = out.add(&Self::monomial(v * c, k.clone()));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                out = out.add(&Self::monomial(v1 * v2, k1.iter().chain(k2).copied().collect()));
            }
        }
        out
    }

    /// Degree in the entries of `a_i`.
    pub fn degree_in(&self, i: usize) -> usize {
        self.terms.keys().map(|m| m.iter().flat_map(|v| v.indices()).filter(|&x| x == i).count()).max().unwrap_or(0)
    }

    /// Number of copies the polynomial refers to (largest index + 1).
    pub fn arity(&self) -> usize {
        self.terms.keys().flatten().flat_map(|v| v.indices()).map(|i| i + 1).max().unwrap_or(0)
    }

    pub fn evaluate(&self, a: &[Mat2]) -> C64 {
        self.terms.iter().map(|(m, c)| m.iter().map(|v| v.evaluate(a)).product::<C64>() * c).sum()
    }

    /// `r^T_ij = tr([a_i, a_j]²)` written in traces.
    pub fn torus_pair(i: usize, j: usize) -> Self {
        let (ti, tj, tij) = (Self::var(TraceVar::T(i)), Self::var(TraceVar::T(j)), Self::var(TraceVar::T2(i, j)));
        let two = C64::new(2.0, 0.0);
        tij.mul(&tij)
            .add(&ti.mul(&ti))
            .add(&tj.mul(&tj))
            .add(&ti.mul(&tj).mul(&tij).scale(C64::new(-1.0, 0.0)))
            .scale(two)
            .add(&Self::constant(C64::new(-8.0, 0.0)))
    }

    /// `r^T_ijk = tr([a_i, a_j]·a_k)` written in traces.
    pub fn torus_triple(i: usize, j: usize, k: usize) -> Self {
        let t = |x| Self::var(TraceVar::T(x));
        let t2 = |x, y| Self::var(TraceVar::T2(x, y));
        let minus = C64::new(-1.0, 0.0);
        Self::var(TraceVar::T3(i, j, k))
            .scale(C64::new(2.0, 0.0))
            .add(&t(i).mul(&t2(j, k)).scale(minus))
            .add(&t(j).mul(&t2(i, k)).scale(minus))
            .add(&t(k).mul(&t2(i, j)).scale(minus))
            .add(&t(i).mul(&t(j)).mul(&t(k)))
    }

    /// `r^ν_i = t_i − 2ν_i`.
    pub fn vertex_single(i: usize, nu: Sign) -> Self {
        Self::var(TraceVar::T(i)).add(&Self::constant(C64::new(-2.0 * nu.value(), 0.0)))
    }

    /// `r^ν_ij = t_ij − 2ν_iν_j`.
    pub fn vertex_pair(i: usize, j: usize, nu_i: Sign, nu_j: Sign) -> Self {
        Self::var(TraceVar::T2(i, j)).add(&Self::constant(C64::new(-2.0 * nu_i.value() * nu_j.value(), 0.0)))
    }
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for v in m {
                write!(f, "·{v}")?;
            }
        }
        Ok(())
    }
}
