//! Orthonormal bases of conjugation-invariant functions on SU(2)^N.
//!
//! For spins `j_1, …, j_N` put `ρ(g) = π_{j_1}(g_1) ⊗ … ⊗ π_{j_N}(g_N)` on the
//! space V of dimension `D = Π(2j_i + 1)`. Every operator Y on V that commutes
//! with the diagonal action `h ↦ ρ(h, …, h)` gives an invariant function
//! `f(g) = tr(Y ρ(g))`, and by Schur orthogonality
//!
//! ```text
//! ⟨f_Y, f_Y'⟩ = tr(Y† Y') / D.
//! ```
//!
//! The commutant is spanned by `Σ_M |p; J M⟩⟨p'; J M|` for pairs of coupling
//! paths p, p' ending in the same total spin J. Normalizing these gives the
//! quasi-characters; the spin-zero block is the constant function.
//!
//! The Segal-Bargmann transform maps the L² basis to an orthonormal basis of
//! the holomorphic invariants on SL(2,ℂ)^N. It acts on the spin-j part of each
//! copy by the factor `exp(−s((2j+1)² − 1)/2)` with `s = ℏβ²`, so that the
//! N = 1 basis consists of the characters `χ_n` scaled by `e^{−s(n+1)²/2}` up
//! to the global constant `e^{s/2}`.

mod function;
mod io;
mod irrep;
mod poly;

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::liecore::{Mat2, ProductRule};
use crate::linalg::hs_inner;
use crate::{CMatrix, CVector, Error, Result, C64};

pub use function::{expand_invariant_polynomial, multiply, Expansion, InvariantFunction};
pub use irrep::{clebsch_gordan, coupled_paths, coupling_matrix, coupling_offsets, irrep, irrep_matrix, CoupledPath};
pub use poly::{TracePolynomial, TraceVar};

/// Convention tag stored with serialized bases.
pub const SB_CONVENTION: &str = "sb-heat-kernel:exp(-s((2j+1)^2-1)/2),s=hbar*beta^2";

/// Spins `(j_1, …, j_N)`, stored as `2j_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinAssignment(pub Vec<u32>);

impl SpinAssignment {
    pub fn twice(&self) -> &[u32] {
        &self.0
    }

    pub fn spins(&self) -> Vec<f64> {
        self.0.iter().map(|&n| n as f64 / 2.0).collect()
    }

    /// `Π(2j_i + 1)`.
    pub fn dim(&self) -> usize {
        block_dim(&self.0)
    }

    pub fn total_twice(&self) -> u32 {
        self.0.iter().sum()
    }
}

fn block_dim(spins: &[u32]) -> usize {
    spins.iter().map(|&n| n as usize + 1).product()
}

/// Which Hilbert space the basis elements are read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    SquareIntegrable,
    Holomorphic,
}

/// Direction of [`sb_scaling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToHolomorphic,
    ToSquareIntegrable,
}

/// One basis function `f(g) = tr(Y ρ(g))`.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub spins: SpinAssignment,
    /// Twice the coupled total spin J.
    pub coupled: u32,
    /// Intermediate spins of the two coupling paths.
    pub paths: (Vec<u32>, Vec<u32>),
    /// The operator Y, normalized so that `tr(Y†Y) = D`.
    pub operator: CMatrix,
}

/// Coefficients of a function in a [`QuasiCharacterBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionVector {
    pub coefficients: CVector,
}

impl FunctionVector {
    pub fn new(coefficients: CVector) -> Self {
        Self { coefficients }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(CVector::zeros(len))
    }

    /// The basis vector with index `i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = CVector::zeros(len);
        v[i] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coefficients.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coefficients.dotc(&other.coefficients)
    }

    pub fn normalized(&self) -> Self {
        Self::new(&self.coefficients / C64::new(self.norm(), 0.0))
    }
}

/// Orthonormal basis of invariant functions up to a spin cutoff.
#[derive(Debug, Clone)]
pub struct QuasiCharacterBasis {
    n: usize,
    jmax_twice: u32,
    hbar: f64,
    beta: f64,
    side: Side,
    elements: Vec<BasisElement>,
    blocks: Vec<(SpinAssignment, Range<usize>)>,
}

/// Commutant basis of the diagonal action on `V_{n_1} ⊗ … ⊗ V_{n_N}`,
/// ordered by (J, path, path').
pub fn block_elements(spins: &[u32]) -> Vec<BasisElement> {
    let paths = coupled_paths(spins);
    let dim = block_dim(spins);
    let mut totals: Vec<u32> = paths.iter().map(|p| p.total).collect();
    totals.sort_unstable();
    totals.dedup();
    let mut out = Vec::new();
    for j in totals {
        let same: Vec<&CoupledPath> = paths.iter().filter(|p| p.total == j).collect();
        let norm = C64::new((dim as f64 / (j + 1) as f64).sqrt(), 0.0);
        for p in &same {
            for q in &same {
                out.push(BasisElement {
                    spins: SpinAssignment(spins.to_vec()),
                    coupled: j,
                    paths: (p.intermediates.clone(), q.intermediates.clone()),
                    operator: &p.vectors * q.vectors.adjoint() * norm,
                });
            }
        }
    }
    out
}

/// Number of invariants of the diagonal action on the block, by counting
/// multiplicities of each total spin.
pub fn block_invariant_count(spins: &[u32]) -> usize {
    let max: u32 = spins.iter().sum();
    let mut mult = vec![0usize; max as usize + 1];
    mult[spins[0] as usize] = 1;
    for &n in &spins[1..] {
        let mut next = vec![0usize; max as usize + 1];
        for (j, &m) in mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let j = j as u32;
            let mut l = j.abs_diff(n);
            while l <= j + n {
                next[l as usize] += m;
                l += 2;
            }
        }
        mult = next;
    }
    mult.iter().map(|m| m * m).sum()
}

/// All spin assignments with entries ≤ `jmax_twice`, by total spin then
/// lexicographically.
pub fn spin_assignments(n: usize, jmax_twice: u32) -> Vec<SpinAssignment> {
    let mut out: Vec<SpinAssignment> = (0..(jmax_twice as usize + 1).pow(n as u32))
        .map(|mut idx| {
            let mut spins = vec![0u32; n];
            for slot in spins.iter_mut().rev() {
                *slot = (idx % (jmax_twice as usize + 1)) as u32;
                idx /= jmax_twice as usize + 1;
            }
            SpinAssignment(spins)
        })
        .collect();
    out.sort_by(|a, b| (a.total_twice(), &a.0).cmp(&(b.total_twice(), &b.0)));
    out
}

/// The L² basis for N copies up to spin `jmax_twice / 2`.
pub fn invariant_basis(n: usize, jmax_twice: u32, hbar: f64, beta: f64) -> Result<QuasiCharacterBasis> {
    if n == 0 || jmax_twice == 0 {
        return Err(Error::InvalidInput("need N ≥ 1 and j_max ≥ 1/2".into()));
    }
    if !(hbar > 0.0 && beta > 0.0) {
        return Err(Error::InvalidInput(format!("ħ and β must be positive, got {hbar}, {beta}")));
    }
    let assignments = spin_assignments(n, jmax_twice);
    let per_block: Vec<Vec<BasisElement>> = assignments.par_iter().map(|s| block_elements(&s.0)).collect();
    let mut elements = Vec::new();
    let mut blocks = Vec::new();
    for (spins, block) in assignments.into_iter().zip(per_block) {
        let start = elements.len();
        elements.extend(block);
        blocks.push((spins, start..elements.len()));
    }
    Ok(QuasiCharacterBasis { n, jmax_twice, hbar, beta, side: Side::SquareIntegrable, elements, blocks })
}

/// Relabels the basis between the L² and holomorphic pictures.
pub fn sb_scaling(basis: &QuasiCharacterBasis, direction: Direction) -> QuasiCharacterBasis {
    let mut out = basis.clone();
    out.side = match direction {
        Direction::ToHolomorphic => Side::Holomorphic,
        Direction::ToSquareIntegrable => Side::SquareIntegrable,
    };
    out
}

/// Irreducible representation matrices of every copy of a point.
struct PointIrreps {
    per_copy: Vec<Vec<CMatrix>>,
}

impl PointIrreps {
    fn new(point: &[Mat2], max_twice: &[u32]) -> Self {
        let per_copy = point.iter().zip(max_twice).map(|(g, &m)| (0..=m).map(|n| irrep(n, g)).collect()).collect();
        Self { per_copy }
    }

    fn block(&self, spins: &[u32]) -> CMatrix {
        let mut rho = self.per_copy[0][spins[0] as usize].clone();
        for (i, &n) in spins.iter().enumerate().skip(1) {
            rho = rho.kronecker(&self.per_copy[i][n as usize]);
        }
        rho
    }
}

/// `tr(Y ρ)`.
fn trace_product(y: &CMatrix, rho: &CMatrix) -> C64 {
    y.iter().zip(rho.transpose().iter()).map(|(a, b)| a * b).sum()
}

impl QuasiCharacterBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn jmax_twice(&self) -> u32 {
        self.jmax_twice
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `s = ℏβ²`.
    pub fn s(&self) -> f64 {
        self.hbar * self.beta * self.beta
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn blocks(&self) -> &[(SpinAssignment, Range<usize>)] {
        &self.blocks
    }

    /// Index range of the block with the given twice-spins.
    pub fn block_range(&self, spins: &[u32]) -> Option<Range<usize>> {
        self.blocks.iter().find(|(s, _)| s.0 == spins).map(|(_, r)| r.clone())
    }

    /// Segal-Bargmann factor `Π_i exp(−s((n_i+1)² − 1)/2)` of a block.
    pub fn sb_factor(&self, spins: &[u32]) -> f64 {
        let s = self.s();
        spins.iter().map(|&n| (-s * (((n + 1) * (n + 1) - 1) as f64) / 2.0).exp()).product()
    }

    /// Factor relating `f_α` to the basis function on the current side.
    pub fn side_factor(&self, spins: &[u32]) -> f64 {
        match self.side {
            Side::SquareIntegrable => 1.0,
            Side::Holomorphic => self.sb_factor(spins),
        }
    }

    pub fn scale(&self, index: usize) -> f64 {
        self.side_factor(&self.elements[index].spins.0)
    }

    fn check_point(&self, point: &[Mat2]) -> Result<()> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: point.len() });
        }
        Ok(())
    }

    /// Values of all basis functions at a point of SL(2,ℂ)^N.
    pub fn evaluate_all(&self, point: &[Mat2]) -> Result<Vec<C64>> {
        self.check_point(point)?;
        let irreps = PointIrreps::new(point, &vec![self.jmax_twice; self.n]);
        let mut out = vec![C64::new(0.0, 0.0); self.len()];
        for (spins, range) in &self.blocks {
            let rho = irreps.block(&spins.0);
            let factor = self.side_factor(&spins.0);
            for i in range.clone() {
                out[i] = trace_product(&self.elements[i].operator, &rho) * factor;
            }
        }
        Ok(out)
    }

    pub fn evaluate_element(&self, index: usize, point: &[Mat2]) -> Result<C64> {
        self.check_point(point)?;
        let e = &self.elements[index];
        let irreps = PointIrreps::new(point, &e.spins.0);
        Ok(trace_product(&e.operator, &irreps.block(&e.spins.0)) * self.scale(index))
    }

    pub fn evaluate(&self, f: &FunctionVector, point: &[Mat2]) -> Result<C64> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: f.len() });
        }
        let values = self.evaluate_all(point)?;
        Ok(values.iter().zip(f.coefficients.iter()).map(|(v, c)| v * c).sum())
    }

    /// The function represented by a coefficient vector, as Peter-Weyl blocks.
    pub fn to_function(&self, f: &FunctionVector) -> Result<InvariantFunction> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: f.len() });
        }
        let mut out = InvariantFunction::new(self.n);
        for (spins, range) in &self.blocks {
            let dim = spins.dim();
            let mut y = CMatrix::zeros(dim, dim);
            let factor = C64::new(self.side_factor(&spins.0), 0.0);
            for i in range.clone() {
                if f.coefficients[i] != C64::new(0.0, 0.0) {
                    y += &self.elements[i].operator * (f.coefficients[i] * factor);
                }
            }
            out.add_block(&spins.0, y);
        }
        Ok(out)
    }

    /// Orthogonal projection of a function onto the span of the basis.
    pub fn project(&self, f: &InvariantFunction) -> Result<Expansion> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: f.n() });
        }
        let mut coefficients = CVector::zeros(self.len());
        let mut norm_squared = 0.0;
        let mut truncation_loss = 0.0;
        for (spins, y) in f.blocks() {
            let dim = block_dim(spins) as f64;
            let factor = self.side_factor(spins);
            let block_norm = y.norm_squared() / dim / (factor * factor);
            norm_squared += block_norm;
            match self.block_range(spins) {
                Some(range) => {
                    for i in range {
                        coefficients[i] = hs_inner(&self.elements[i].operator, y) / C64::new(dim * factor, 0.0);
                    }
                }
                None => truncation_loss += block_norm,
            }
        }
        Ok(Expansion { vector: FunctionVector::new(coefficients), truncation_loss, norm_squared })
    }

    /// Gram matrix of the L² basis functions by exact Haar quadrature.
    pub fn l2_gram_by_quadrature(&self) -> Result<CMatrix> {
        let rule = ProductRule::new(&vec![2 * self.jmax_twice as usize; self.n])?;
        let len = self.len();
        let l2 = sb_scaling(self, Direction::ToSquareIntegrable);
        let values = rule.integrate_many(len * len, |point, out| {
            let f = l2.evaluate_all(point).expect("point has N copies");
            for a in 0..len {
                let fa = f[a].conj();
                for b in 0..len {
                    out[a * len + b] = fa * f[b];
                }
            }
        });
        Ok(CMatrix::from_row_slice(len, len, &values))
    }
}
