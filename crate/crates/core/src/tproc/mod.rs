//! Constraint reduction in finite-dimensional C*-algebras.
//!
//! The field algebra is a direct sum of full matrix blocks acting
//! block-diagonally on ℂ^d. For a self-adjoint constraint set 𝒞 the left ideal
//! 𝔑 = [𝔉𝒞], the hereditary subalgebra 𝔇 = 𝔑 ∩ 𝔑*, its unit q, the weak
//! commutant 𝔒 and the physical algebra ℜ ≅ 𝔒/𝔇 are all explicit:
//!
//! ```text
//! 𝔑 = 𝔉q,  𝔇 = q𝔉q,  𝔒 = {F : [F, q] = 0} = q𝔉q ⊕ p𝔉p,  ℜ = p𝔉p
//! ```
//!
//! with q the support projection of the joint range of the constraints and
//! p = 𝟙 − q. All subspace bases are orthonormal for the Hilbert-Schmidt
//! inner product.

mod io;

use crate::linalg::{column_space, complement, distance_to_span, null_space_abs, projector, spectral_norm};
use crate::{CMatrix, CVector, Error, Result, C64};

pub use io::{ConstraintFile, TProcReport};

/// Direct sum of full matrix algebras `M_{d_1} ⊕ … ⊕ M_{d_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixAlgebra {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
}

impl MatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidInput(format!("block sizes must be positive, got {blocks:?}")));
        }
        let offsets = blocks
            .iter()
            .scan(0, |acc, &b| {
                let start = *acc;
                *acc += b;
                Some(start)
            })
            .collect();
        Ok(Self { blocks, offsets })
    }

    /// The full matrix algebra `M_d`.
    pub fn full(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Dimension d of the space the algebra acts on.
    pub fn size(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Complex dimension Σ d_j² of the algebra.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b * b).sum()
    }

    fn block_of(&self, index: usize) -> usize {
        self.offsets.iter().rposition(|&o| o <= index).expect("index within the space")
    }

    /// Whether all off-block entries of `m` vanish within `tol`.
    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        let d = self.size();
        if m.shape() != (d, d) {
            return false;
        }
        let mut off = 0.0;
        for r in 0..d {
            for c in 0..d {
                if self.block_of(r) != self.block_of(c) {
                    off += m[(r, c)].norm_sqr();
                }
            }
        }
        off.sqrt() <= tol * m.norm().max(1.0)
    }

    /// Diagonal block `j` of `m`.
    pub fn block(&self, m: &CMatrix, j: usize) -> CMatrix {
        let (o, b) = (self.offsets[j], self.blocks[j]);
        m.view((o, o), (b, b)).into_owned()
    }

    /// Embeds a matrix on block `j` into the full space.
    pub fn embed(&self, m: &CMatrix, j: usize) -> CMatrix {
        let d = self.size();
        let mut out = CMatrix::zeros(d, d);
        out.view_mut((self.offsets[j], self.offsets[j]), (self.blocks[j], self.blocks[j])).copy_from(m);
        out
    }

    /// Matrix units `e_rs` of all blocks.
    pub fn basis(&self) -> Vec<CMatrix> {
        let d = self.size();
        let mut out = Vec::with_capacity(self.dimension());
        for (&o, &b) in self.offsets.iter().zip(&self.blocks) {
            for r in 0..b {
                for c in 0..b {
                    let mut e = CMatrix::zeros(d, d);
                    e[(o + r, o + c)] = C64::new(1.0, 0.0);
                    out.push(e);
                }
            }
        }
        out
    }
}

/// An algebra with a self-adjoint list of constraints in it.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    algebra: MatrixAlgebra,
    constraints: Vec<CMatrix>,
}

impl ConstraintSystem {
    /// Validates membership and self-adjointness of the constraint set.
    pub fn new(algebra: MatrixAlgebra, constraints: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let d = algebra.size();
        for (k, c) in constraints.iter().enumerate() {
            if c.shape() != (d, d) {
                return Err(Error::DimensionMismatch { expected: d * d, actual: c.len() });
            }
            if !algebra.contains(c, tol) {
                return Err(Error::InvalidInput(format!("constraint {k} is not in the algebra")));
            }
            let adj = c.adjoint();
            let scale = c.norm().max(1.0);
            if !constraints.iter().any(|other| (other - &adj).norm() <= tol * scale) {
                return Err(Error::InvalidInput(format!("adjoint of constraint {k} is not in the set")));
            }
        }
        Ok(Self { algebra, constraints })
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn constraints(&self) -> &[CMatrix] {
        &self.constraints
    }

    /// Orthonormal basis of the joint range of the constraints inside block `j`.
    fn block_support(&self, j: usize, rank_tol: f64) -> CMatrix {
        let b = self.algebra.blocks[j];
        if self.constraints.is_empty() {
            return CMatrix::zeros(b, 0);
        }
        let parts: Vec<CMatrix> = self.constraints.iter().map(|c| self.algebra.block(c, j)).collect();
        let stacked = CMatrix::from_fn(b, b * parts.len(), |r, c| parts[c / b][(r, c % b)]);
        column_space(&stacked, rank_tol)
    }
}

/// The data produced by the T-procedure.
#[derive(Debug, Clone)]
pub struct TProcedureResult {
    pub algebra: MatrixAlgebra,
    pub q: CMatrix,
    pub p: CMatrix,
    /// Basis of 𝔑.
    pub left_ideal_basis: Vec<CMatrix>,
    /// Basis of 𝔇.
    pub hereditary_basis: Vec<CMatrix>,
    /// Basis of 𝔒.
    pub observable_basis: Vec<CMatrix>,
    /// Basis of ℜ, realized as p𝔒p.
    pub physical_basis: Vec<CMatrix>,
    /// Orthonormal basis of the Dirac vectors {ξ : qξ = 0}.
    pub dirac_vectors: Vec<CVector>,
}

/// Dimensions of the subspaces in a [`TProcedureResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TProcDims {
    pub left_ideal: usize,
    pub hereditary: usize,
    pub observable: usize,
    pub physical: usize,
}

fn outer(u: &CMatrix, k: usize, v: &CMatrix, l: usize) -> CMatrix {
    u.column(k) * v.column(l).adjoint()
}

fn embed_columns(algebra: &MatrixAlgebra, j: usize, u: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(algebra.size(), u.ncols());
    out.view_mut((algebra.offsets[j], 0), (u.nrows(), u.ncols())).copy_from(u);
    out
}

/// Runs the T-procedure for `cs` with singular-value cutoff `rank_tol`.
pub fn hereditary_and_projection(cs: &ConstraintSystem, rank_tol: f64) -> TProcedureResult {
    let alg = cs.algebra.clone();
    let d = alg.size();
    let mut q = CMatrix::zeros(d, d);
    let mut left = Vec::new();
    let mut hered = Vec::new();
    let mut physical = Vec::new();
    let mut dirac = Vec::new();
    for j in 0..alg.blocks.len() {
        let u = embed_columns(&alg, j, &cs.block_support(j, rank_tol));
        let w = embed_columns(&alg, j, &complement(&cs.block_support(j, rank_tol), rank_tol));
        q += projector(&u);
        let o = alg.offsets[j];
        for r in 0..alg.blocks[j] {
            for l in 0..u.ncols() {
                let mut m = CMatrix::zeros(d, d);
                m.row_mut(o + r).copy_from(&u.column(l).adjoint());
                left.push(m);
            }
        }
        for k in 0..u.ncols() {
            for l in 0..u.ncols() {
                hered.push(outer(&u, k, &u, l));
            }
        }
        for k in 0..w.ncols() {
            for l in 0..w.ncols() {
                physical.push(outer(&w, k, &w, l));
            }
            dirac.push(w.column(k).into_owned());
        }
    }
    let p = CMatrix::identity(d, d) - &q;
    let observable = hered.iter().chain(&physical).cloned().collect();
    TProcedureResult {
        algebra: alg,
        q,
        p,
        left_ideal_basis: left,
        hereditary_basis: hered,
        observable_basis: observable,
        physical_basis: physical,
        dirac_vectors: dirac,
    }
}

/// Basis of the left ideal 𝔑 = [𝔉𝒞].
pub fn left_ideal(cs: &ConstraintSystem, rank_tol: f64) -> Vec<CMatrix> {
    hereditary_and_projection(cs, rank_tol).left_ideal_basis
}

/// Whether the constraints admit Dirac states, i.e. `q ≠ 𝟙`.
pub fn is_first_class(cs: &ConstraintSystem, rank_tol: f64) -> bool {
    !hereditary_and_projection(cs, rank_tol).dirac_vectors.is_empty()
}

/// Orthonormal basis of `{ξ : qξ = 0}`.
pub fn dirac_vector_states(cs: &ConstraintSystem, rank_tol: f64) -> Vec<CVector> {
    hereditary_and_projection(cs, rank_tol).dirac_vectors
}

/// Basis of the weak commutant 𝔒 = {F : [F, q] = 0}.
pub fn weak_commutant(result: &TProcedureResult) -> &[CMatrix] {
    &result.observable_basis
}

/// Basis of the physical algebra ℜ = p𝔒p.
pub fn physical_algebra(result: &TProcedureResult) -> &[CMatrix] {
    &result.physical_basis
}

/// 𝔒 from its other characterization `{F : [F, c] ∈ 𝔇 for all c ∈ 𝒞}`.
///
/// Membership in 𝔇 = q𝔉q of a block-diagonal matrix X is `pX = 0 = Xp`,
/// so this is the kernel of a linear map, solved block by block. Singular
/// values are cut at `rank_tol` times the largest constraint norm.
pub fn weak_commutant_by_constraints(cs: &ConstraintSystem, p: &CMatrix, rank_tol: f64) -> Vec<CMatrix> {
    let alg = &cs.algebra;
    let scale = cs.constraints.iter().map(spectral_norm).fold(0.0, f64::max);
    let mut out = Vec::new();
    for j in 0..alg.blocks.len() {
        let b = alg.blocks[j];
        let pj = alg.block(p, j);
        let cj: Vec<CMatrix> = cs.constraints.iter().map(|c| alg.block(c, j)).collect();
        let rows_per = 2 * b * b;
        let mut map = CMatrix::zeros(rows_per * cj.len().max(1), b * b);
        for col in 0..b * b {
            let mut e = CMatrix::zeros(b, b);
            e[(col / b, col % b)] = C64::new(1.0, 0.0);
            for (k, c) in cj.iter().enumerate() {
                let comm = &e * c - c * &e;
                let left = &pj * &comm;
                let right = &comm * &pj;
                for idx in 0..b * b {
                    map[(k * rows_per + idx, col)] = left[(idx / b, idx % b)];
                    map[(k * rows_per + b * b + idx, col)] = right[(idx / b, idx % b)];
                }
            }
        }
        let kernel = null_space_abs(&map, rank_tol * scale);
        for k in 0..kernel.ncols() {
            let m = CMatrix::from_fn(b, b, |r, c| kernel[(r * b + c, k)]);
            out.push(alg.embed(&m, j));
        }
    }
    out
}

/// Largest distance of an element of one span from the other, both ways.
///
/// Both families must be Hilbert-Schmidt orthonormal.
pub fn subspace_distance(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let ab = a.iter().map(|m| distance_to_span(b, m)).fold(0.0, f64::max);
    let ba = b.iter().map(|m| distance_to_span(a, m)).fold(0.0, f64::max);
    ab.max(ba)
}

impl TProcedureResult {
    pub fn dims(&self) -> TProcDims {
        TProcDims {
            left_ideal: self.left_ideal_basis.len(),
            hereditary: self.hereditary_basis.len(),
            observable: self.observable_basis.len(),
            physical: self.physical_basis.len(),
        }
    }

    pub fn first_class(&self) -> bool {
        !self.dirac_vectors.is_empty()
    }

    /// Whether `m` lies in 𝔇, i.e. is in the algebra and satisfies `qmq = m`.
    pub fn in_hereditary(&self, m: &CMatrix, tol: f64) -> bool {
        self.algebra.contains(m, tol) && (&self.q * m * &self.q - m).norm() <= tol * m.norm().max(1.0)
    }

    /// Expectation `⟨ξ, qξ⟩ / ⟨ξ, ξ⟩`; the vector state is Dirac iff this is zero.
    pub fn q_expectation(&self, xi: &CVector) -> f64 {
        let n = xi.norm_squared();
        if n == 0.0 {
            return 0.0;
        }
        (xi.adjoint() * &self.q * xi)[(0, 0)].re / n
    }
}
