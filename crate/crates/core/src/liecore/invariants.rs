use std::fmt;

use serde::{Deserialize, Serialize};

use super::Mat2;
use crate::{Error, Result, C64};

/// A sign ν ∈ {+1, −1}, labelling a central element ν·𝟙.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// All `2^n` sign sequences, `+` before `−` lexicographically.
    pub fn all_sequences(n: usize) -> Vec<Vec<Sign>> {
        (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> (n - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
            .collect()
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// `[+, −, +]` ↦ `"+-+"`.
pub fn format_signs(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

/// Inverse of [`format_signs`].
pub fn parse_signs(s: &str) -> Result<Vec<Sign>> {
    s.chars()
        .map(|ch| match ch {
            '+' | 'p' => Ok(Sign::Plus),
            '-' | 'm' => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("invalid sign character {other:?}"))),
        })
        .collect()
}

/// Trace invariants of a tuple of 2×2 matrices.
///
/// Indices are zero-based; pairs and triples are strictly increasing.
#[derive(Debug, Clone)]
pub struct TraceInvariants {
    /// `t_i = tr(a_i)`.
    pub t: Vec<C64>,
    /// `t_ij = tr(a_i a_j)`.
    pub t_pair: Vec<((usize, usize), C64)>,
    /// `t_ijk = tr(a_i a_j a_k)`.
    pub t_triple: Vec<((usize, usize, usize), C64)>,
    /// `r^T_ij = tr([a_i, a_j]²)`.
    pub r_torus_pair: Vec<((usize, usize), C64)>,
    /// `r^T_ijk = tr([a_i, a_j] a_k)`.
    pub r_torus_triple: Vec<((usize, usize, usize), C64)>,
}

/// Residuals of the vertex relations for a fixed sign sequence.
#[derive(Debug, Clone)]
pub struct VertexResiduals {
    /// `r^ν_i = tr(a_i) − 2ν_i`.
    pub single: Vec<C64>,
    /// `r^ν_ij = tr(a_i a_j) − 2ν_iν_j`.
    pub pair: Vec<((usize, usize), C64)>,
}

fn tr(m: &Mat2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

impl TraceInvariants {
    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn vertex_residuals(&self, nu: &[Sign]) -> VertexResiduals {
        assert_eq!(nu.len(), self.n(), "sign sequence length must match the tuple length");
        VertexResiduals {
            single: self.t.iter().zip(nu).map(|(t, s)| t - 2.0 * s.value()).collect(),
            pair: self.t_pair.iter().map(|&((i, j), t)| ((i, j), t - 2.0 * nu[i].value() * nu[j].value())).collect(),
        }
    }
}

pub fn trace_invariants(a: &[Mat2]) -> TraceInvariants {
    let n = a.len();
    let mut inv = TraceInvariants {
        t: a.iter().map(tr).collect(),
        t_pair: Vec::new(),
        t_triple: Vec::new(),
        r_torus_pair: Vec::new(),
        r_torus_triple: Vec::new(),
    };
    for i in 0..n {
        for j in i + 1..n {
            let comm = a[i] * a[j] - a[j] * a[i];
            inv.t_pair.push(((i, j), tr(&(a[i] * a[j]))));
            inv.r_torus_pair.push(((i, j), tr(&(comm * comm))));
            for k in j + 1..n {
                inv.t_triple.push(((i, j, k), tr(&(a[i] * a[j] * a[k]))));
                inv.r_torus_triple.push(((i, j, k), tr(&(comm * a[k]))));
            }
        }
    }
    inv
}
