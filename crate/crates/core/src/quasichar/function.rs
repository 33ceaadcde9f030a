//! Invariant functions as Peter-Weyl blocks, their products, and expansions
//! of trace polynomials.

use std::collections::BTreeMap;

use super::irrep::{coupling_matrix, coupling_offsets, irrep};
use super::poly::TracePolynomial;
use super::{block_dim, trace_product, FunctionVector, QuasiCharacterBasis};
use crate::liecore::{Mat2, ProductRule};
use crate::{CMatrix, Error, Result, C64};

/// `F(g) = Σ_b tr(Y_b ρ_b(g))` with one operator per spin assignment b.
///
/// Any invariant representative function has finitely many blocks. Points
/// may lie in SL(2,ℂ)^N, where this is the holomorphic extension.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFunction {
    n: usize,
    blocks: BTreeMap<Vec<u32>, CMatrix>,
}

/// Coefficients of a function in a basis together with what the cutoff lost.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub vector: FunctionVector,
    /// Squared norm of the part outside the cutoff.
    pub truncation_loss: f64,
    /// Squared norm of the whole function.
    pub norm_squared: f64,
}

impl Expansion {
    /// `truncation_loss / norm_squared`, zero for the zero function.
    pub fn relative_loss(&self) -> f64 {
        if self.norm_squared == 0.0 {
            0.0
        } else {
            self.truncation_loss / self.norm_squared
        }
    }

    pub fn cutoff_exceeded(&self) -> bool {
        self.truncation_loss > 0.0
    }
}

impl InvariantFunction {
    pub fn new(n: usize) -> Self {
        Self { n, blocks: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut f = Self::new(n);
        f.add_block(&vec![0; n], CMatrix::from_element(1, 1, c));
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&[u32], &CMatrix)> {
        self.blocks.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Adds `y` to the block of the given twice-spins.
    pub fn add_block(&mut self, spins: &[u32], y: CMatrix) {
        assert_eq!(spins.len(), self.n, "spin assignment length must equal N");
        match self.blocks.get_mut(spins) {
            Some(existing) => *existing += y,
            None => {
                self.blocks.insert(spins.to_vec(), y);
            }
        }
    }

    /// Expands a trace polynomial by exact Haar quadrature.
    ///
    /// A polynomial of degree d_i in copy i only has blocks with `2j_i ≤ d_i`,
    /// and `Y_b = D_b ∫ P(g) ρ_b(g)† dg` has degree `2d_i` in copy i.
    pub fn from_polynomial(poly: &TracePolynomial, n: usize) -> Result<Self> {
        if poly.arity() > n {
            return Err(Error::InvalidInput(format!("polynomial refers to {} copies, N = {n}", poly.arity())));
        }
        let degrees: Vec<u32> = (0..n).map(|i| poly.degree_in(i) as u32).collect();
        let rule = ProductRule::new(&degrees.iter().map(|&d| 2 * d as usize).collect::<Vec<_>>())?;
        let mut assignments = vec![vec![]];
        for &d in &degrees {
            assignments = assignments
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=d).map(move |m| {
                        let mut v = prefix.clone();
                        v.push(m);
                        v
                    })
                })
                .collect();
        }
        let sizes: Vec<usize> = assignments.iter().map(|s| block_dim(s)).collect();
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d * d;
                Some(o)
            })
            .collect();
        let total: usize = sizes.iter().map(|d| d * d).sum();
        let values = rule.integrate_many(total, |point, out| {
            let p = poly.evaluate(point);
            if p == C64::new(0.0, 0.0) {
                return;
            }
            let per_copy: Vec<Vec<CMatrix>> =
                point.iter().zip(&degrees).map(|(g, &d)| (0..=d).map(|m| irrep(m, g)).collect()).collect();
            for ((spins, &dim), &offset) in assignments.iter().zip(&sizes).zip(&offsets) {
                let mut rho = per_copy[0][spins[0] as usize].clone();
                for (i, &m) in spins.iter().enumerate().skip(1) {
                    rho = rho.kronecker(&per_copy[i][m as usize]);
                }
                // Y_{lk} accumulates P·conj(ρ_{kl}); stored row-major in l.
                for l in 0..dim {
                    for k in 0..dim {
                        out[offset + l * dim + k] = p * rho[(k, l)].conj();
                    }
                }
            }
        });
        let mut f = Self::new(n);
        for ((spins, &dim), &offset) in assignments.iter().zip(&sizes).zip(&offsets) {
            let y = CMatrix::from_row_slice(dim, dim, &values[offset..offset + dim * dim]) * C64::new(dim as f64, 0.0);
            if y.norm() > 1e-14 * poly_scale(poly) {
                f.add_block(spins, y);
            }
        }
        Ok(f)
    }

    pub fn evaluate(&self, point: &[Mat2]) -> Result<C64> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: point.len() });
        }
        let mut total = C64::new(0.0, 0.0);
        for (spins, y) in &self.blocks {
            let mut rho = irrep(spins[0], &point[0]);
            for (i, &m) in spins.iter().enumerate().skip(1) {
                rho = rho.kronecker(&irrep(m, &point[i]));
            }
            total += trace_product(y, &rho);
        }
        Ok(total)
    }

    /// `Σ_b ‖Y_b‖² / D_b`, the L² norm squared on SU(2)^N.
    pub fn l2_norm_squared(&self) -> f64 {
        self.blocks.iter().map(|(s, y)| y.norm_squared() / block_dim(s) as f64).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { n: self.n, blocks: self.blocks.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.blocks {
            out.add_block(k, v.clone());
        }
        out
    }

    /// Pointwise product, exact: each pair of blocks is recoupled copy by
    /// copy with Clebsch-Gordan matrices.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: other.n });
        }
        let mut out = Self::new(self.n);
        for (s1, y1) in &self.blocks {
            for (s2, y2) in &other.blocks {
                for (spins, z) in block_product(s1, y1, s2, y2) {
                    out.add_block(&spins, z);
                }
            }
        }
        Ok(out)
    }
}

fn poly_scale(poly: &TracePolynomial) -> f64 {
    poly.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max)
}

/// `tr(Y1 ρ_{s1}) · tr(Y2 ρ_{s2})` decomposed into blocks `tr(Z_L ρ_L)`.
fn block_product(s1: &[u32], y1: &CMatrix, s2: &[u32], y2: &CMatrix) -> Vec<(Vec<u32>, CMatrix)> {
    let n = s1.len();
    let pair_dims: Vec<usize> = s1.iter().zip(s2).map(|(&a, &b)| ((a + 1) * (b + 1)) as usize).collect();
    let total: usize = pair_dims.iter().product();
    // Interleave copies: index t over ⊗_i (V_{a_i} ⊗ V_{b_i}) maps to (x, x').
    let mut first = vec![0usize; total];
    let mut second = vec![0usize; total];
    for t in 0..total {
        let mut rest = t;
        let (mut x, mut x2, mut r1, mut r2) = (0, 0, 1, 1);
        for i in (0..n).rev() {
            let local = rest % pair_dims[i];
            rest /= pair_dims[i];
            let d2 = s2[i] as usize + 1;
            x += (local / d2) * r1;
            x2 += (local % d2) * r2;
            r1 *= s1[i] as usize + 1;
            r2 *= d2;
        }
        first[t] = x;
        second[t] = x2;
    }
    let m = CMatrix::from_fn(total, total, |t, u| y1[(first[t], first[u])] * y2[(second[t], second[u])]);
    let ws: Vec<CMatrix> = s1.iter().zip(s2).map(|(&a, &b)| coupling_matrix(a, b)).collect();
    let mut w = ws[0].clone();
    for wi in &ws[1..] {
        w = w.kronecker(wi);
    }
    let z = w.transpose() * m * &w;
    // Enumerate blocks L = (L_1, …, L_N) and their column index sets.
    let per_copy: Vec<Vec<(u32, usize)>> = s1.iter().zip(s2).map(|(&a, &b)| coupling_offsets(a, b)).collect();
    let mut combos: Vec<(Vec<u32>, Vec<usize>)> = vec![(vec![], vec![0])];
    for (i, offsets) in per_copy.iter().enumerate() {
        let mut next = Vec::new();
        for (ls, idx) in &combos {
            for &(l, offset) in offsets {
                let mut ls = ls.clone();
                ls.push(l);
                let width = pair_dims[i];
                let cols: Vec<usize> =
                    idx.iter().flat_map(|&base| (0..=l as usize).map(move |k| base * width + offset + k)).collect();
                next.push((ls, cols));
            }
        }
        combos = next;
    }
    combos
        .into_iter()
        .map(|(ls, cols)| {
            let d = cols.len();
            (ls, CMatrix::from_fn(d, d, |r, c| z[(cols[r], cols[c])]))
        })
        .filter(|(_, block)| block.norm() > 0.0)
        .collect()
}

/// Coefficients of a trace polynomial in the basis, on the basis' side.
pub fn expand_invariant_polynomial(basis: &QuasiCharacterBasis, poly: &TracePolynomial) -> Result<Expansion> {
    let f = InvariantFunction::from_polynomial(poly, basis.n())?;
    let expansion = basis.project(&f)?;
    if expansion.cutoff_exceeded() {
        log::warn!(
            "polynomial exceeds the spin cutoff: truncation loss {:.3e} of {:.3e}",
            expansion.truncation_loss,
            expansion.norm_squared
        );
    }
    Ok(expansion)
}

/// Pointwise product of two basis expansions, re-expanded in the basis.
pub fn multiply(basis: &QuasiCharacterBasis, f: &FunctionVector, g: &FunctionVector) -> Result<Expansion> {
    let product = basis.to_function(f)?.mul(&basis.to_function(g)?)?;
    basis.project(&product)
}
