//! Costratified Hilbert space and stratified observable algebra on a
//! truncated quasi-character basis.
//!
//! Everything lives on the holomorphic side. For a stratum τ with defining
//! relations r_{τ,i}, the vanishing subspace is spanned by the products
//! `r_{τ,i}·ψ_α`; q_τ is its projection and `p_τ = 𝟙 − q_τ` projects onto the
//! functions localized on τ. For a vertex ν the localized subspace is spanned
//! by the evaluation vector ψ_ν, so p_ν is available in closed form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::liecore::{Mat2, Sign};
use crate::linalg::{column_space, projection_defect, row_major, spectral_norm};
use crate::quasichar::{
    sb_scaling, Direction, FunctionVector, InvariantFunction, QuasiCharacterBasis, TracePolynomial,
};
use crate::strata::{OrbitType, StratumLabel};
use crate::tproc::{hereditary_and_projection, ConstraintSystem, MatrixAlgebra};
use crate::{CMatrix, CVector, Error, Result, C64};

/// The truncated invariant Hilbert space, optionally in a rotated frame.
///
/// With a frame U the basis functions are `ψ'_β = Σ_α U_{αβ} ψ_α`, and all
/// vectors and operators are expressed in that basis.
#[derive(Debug, Clone)]
pub struct TruncatedHilbert {
    basis: QuasiCharacterBasis,
    frame: Option<CMatrix>,
}

impl TruncatedHilbert {
    pub fn new(basis: &QuasiCharacterBasis) -> Self {
        Self { basis: sb_scaling(basis, Direction::ToHolomorphic), frame: None }
    }

    /// The same truncation in the orthonormal basis given by the columns of `u`.
    pub fn with_frame(basis: &QuasiCharacterBasis, u: CMatrix, tol: f64) -> Result<Self> {
        let d = basis.len();
        if u.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d * d, actual: u.len() });
        }
        if (u.adjoint() * &u - CMatrix::identity(d, d)).norm() > tol {
            return Err(Error::InvalidInput("frame is not unitary".into()));
        }
        Ok(Self { basis: sb_scaling(basis, Direction::ToHolomorphic), frame: Some(u) })
    }

    pub fn basis(&self) -> &QuasiCharacterBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    /// Values `ψ'_β(b)` of all basis functions at a point.
    pub fn values(&self, point: &[Mat2]) -> Result<CVector> {
        let v = CVector::from_vec(self.basis.evaluate_all(point)?);
        Ok(match &self.frame {
            Some(u) => u.transpose() * v,
            None => v,
        })
    }

    pub fn evaluate(&self, f: &FunctionVector, point: &[Mat2]) -> Result<C64> {
        Ok(self.values(point)?.iter().zip(f.coefficients.iter()).map(|(v, c)| v * c).sum())
    }

    /// Coordinates in the unrotated quasi-character basis.
    pub fn vector_to_standard(&self, v: &CVector) -> CVector {
        match &self.frame {
            Some(u) => u * v,
            None => v.clone(),
        }
    }

    pub fn vector_from_standard(&self, v: &CVector) -> CVector {
        match &self.frame {
            Some(u) => u.adjoint() * v,
            None => v.clone(),
        }
    }

    pub fn operator_to_standard(&self, m: &CMatrix) -> CMatrix {
        match &self.frame {
            Some(u) => u * m * u.adjoint(),
            None => m.clone(),
        }
    }

    /// The function with the given coordinates, as Peter-Weyl blocks.
    pub fn to_function(&self, f: &FunctionVector) -> Result<InvariantFunction> {
        self.basis.to_function(&FunctionVector::new(self.vector_to_standard(&f.coefficients)))
    }
}

fn point_matrices(b: &[crate::liecore::ComplexGroupElement]) -> Vec<Mat2> {
    b.iter().map(|g| *g.matrix()).collect()
}

/// `ψ_b = Σ_β conj(ψ_β(b)) ψ_β`, so that `⟨ψ_b, φ⟩ = φ(b)` on the truncation.
pub fn evaluation_vector(h: &TruncatedHilbert, b: &[crate::liecore::ComplexGroupElement]) -> Result<FunctionVector> {
    Ok(FunctionVector::new(h.values(&point_matrices(b))?.map(|z| z.conj())))
}

/// Evaluation vector at the vertex `(ν_1𝟙, …, ν_N𝟙)`.
pub fn vertex_vector(h: &TruncatedHilbert, nu: &[Sign]) -> Result<FunctionVector> {
    if nu.len() != h.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), actual: nu.len() });
    }
    let point: Vec<_> = nu.iter().map(|&s| crate::liecore::ComplexGroupElement::central(s)).collect();
    evaluation_vector(h, &point)
}

/// Defining relations of a stratum, as exact invariant functions.
#[derive(Debug, Clone)]
pub struct VanishingFamily {
    pub stratum: StratumLabel,
    /// `(name, polynomial, function)` per relation.
    pub generators: Vec<(String, TracePolynomial, InvariantFunction)>,
}

/// The relations `r^ν_i, r^ν_ij` of a vertex, `r^T_ij, r^T_ijk` of the torus
/// stratum, and none for the principal stratum.
pub fn vanishing_family(stratum: &StratumLabel) -> Result<VanishingFamily> {
    let n = stratum.n;
    let mut polys = Vec::new();
    match &stratum.orbit_type {
        OrbitType::Vertex(nu) => {
            for i in 0..n {
                polys.push((format!("r_nu_{}", i + 1), TracePolynomial::vertex_single(i, nu[i])));
            }
            for i in 0..n {
                for j in i + 1..n {
                    polys.push((format!("r_nu_{}{}", i + 1, j + 1), TracePolynomial::vertex_pair(i, j, nu[i], nu[j])));
                }
            }
        }
        OrbitType::Torus => {
            if n < 2 {
                return Err(Error::Unsupported("there is no torus stratum for N = 1".into()));
            }
            for i in 0..n {
                for j in i + 1..n {
                    polys.push((format!("r_T_{}{}", i + 1, j + 1), TracePolynomial::torus_pair(i, j)));
                    for k in j + 1..n {
                        let name = format!("r_T_{}{}{}", i + 1, j + 1, k + 1);
                        polys.push((name, TracePolynomial::torus_triple(i, j, k)));
                    }
                }
            }
        }
        OrbitType::Principal => {}
    }
    let generators = polys
        .into_iter()
        .map(|(name, p)| InvariantFunction::from_polynomial(&p, n).map(|f| (name, p, f)))
        .collect::<Result<_>>()?;
    Ok(VanishingFamily { stratum: stratum.clone(), generators })
}

/// A constraint product left out of the constraint list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedProduct {
    pub generator: String,
    pub index: usize,
    pub relative_loss: f64,
}

/// What happened to the products `r·ψ_α` of a vanishing family.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub retained: usize,
    pub zero: usize,
    pub excluded: Vec<ExcludedProduct>,
    /// Largest relative truncation loss among retained products.
    pub max_retained_loss: f64,
}

/// A retained product `r·ψ_α`.
#[derive(Debug, Clone)]
pub struct ConstraintProduct {
    pub generator: String,
    pub index: usize,
    pub vector: FunctionVector,
    pub relative_loss: f64,
}

/// All products `r·ψ_α` whose relative truncation loss is at most `loss_tol`.
pub fn constraint_products(
    h: &TruncatedHilbert,
    family: &VanishingFamily,
    loss_tol: f64,
) -> Result<(Vec<ConstraintProduct>, TruncationReport)> {
    let dim = h.dim();
    let jobs: Vec<(usize, usize)> = (0..family.generators.len()).flat_map(|g| (0..dim).map(move |a| (g, a))).collect();
    let results: Vec<Result<(usize, usize, crate::quasichar::Expansion)>> = jobs
        .par_iter()
        .map(|&(g, a)| {
            let psi = h.to_function(&FunctionVector::unit(dim, a))?;
            let product = family.generators[g].2.mul(&psi)?;
            Ok((g, a, h.basis.project(&product)?))
        })
        .collect();
    let mut report = TruncationReport::default();
    let mut retained = Vec::new();
    for r in results {
        let (g, a, e) = r?;
        let name = &family.generators[g].0;
        if e.norm_squared <= f64::MIN_POSITIVE || e.vector.norm_squared() <= 1e-28 * e.norm_squared {
            report.zero += 1;
            continue;
        }
        let loss = e.relative_loss();
        if loss > loss_tol {
            log::info!("excluding {name}·ψ_{a}: relative truncation loss {loss:.3e}");
            report.excluded.push(ExcludedProduct { generator: name.clone(), index: a, relative_loss: loss });
            continue;
        }
        report.max_retained_loss = report.max_retained_loss.max(loss);
        report.retained += 1;
        let vector = FunctionVector::new(h.vector_from_standard(&e.vector.coefficients));
        retained.push(ConstraintProduct { generator: name.clone(), index: a, vector, relative_loss: loss });
    }
    Ok((retained, report))
}

/// `|v⟩⟨v| / ‖v‖²`.
pub fn rank_one_projection(v: &FunctionVector) -> CMatrix {
    let c = &v.coefficients;
    c * c.adjoint() / C64::new(c.norm_squared(), 0.0)
}

/// The rank-one projections q_{τ,i,α} of the retained constraint products.
pub fn constraint_projections(
    h: &TruncatedHilbert,
    family: &VanishingFamily,
    loss_tol: f64,
) -> Result<(Vec<CMatrix>, TruncationReport)> {
    let (products, report) = constraint_products(h, family, loss_tol)?;
    Ok((products.iter().map(|p| rank_one_projection(&p.vector)).collect(), report))
}

/// Projections q_τ and p_τ = 𝟙 − q_τ of a stratum.
#[derive(Debug, Clone)]
pub struct StratumProjection {
    pub stratum: StratumLabel,
    pub q: CMatrix,
    pub p: CMatrix,
    pub truncation_report: TruncationReport,
}

impl StratumProjection {
    /// Numerical rank of p.
    pub fn rank(&self, rank_tol: f64) -> usize {
        column_space(&self.p, rank_tol).ncols()
    }

    /// `‖q² − q‖ + ‖q − q†‖`.
    pub fn defect(&self) -> f64 {
        projection_defect(&self.q)
    }
}

/// JSON form of a stratum projection; matrices are row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDump {
    pub stratum: String,
    pub dim: usize,
    pub rank: usize,
    pub defect: f64,
    pub truncation_report: TruncationReport,
    pub q: Vec<[f64; 2]>,
    pub p: Vec<[f64; 2]>,
}

impl ProjectionDump {
    pub fn new(proj: &StratumProjection, rank_tol: f64) -> Self {
        Self {
            stratum: proj.stratum.to_string(),
            dim: proj.p.nrows(),
            rank: proj.rank(rank_tol),
            defect: proj.defect(),
            truncation_report: proj.truncation_report.clone(),
            q: row_major(&proj.q),
            p: row_major(&proj.p),
        }
    }
}

/// `p_ν = |ψ_ν⟩⟨ψ_ν| / ‖ψ_ν‖²` and `q_ν = 𝟙 − p_ν`.
pub fn vertex_projection(h: &TruncatedHilbert, nu: &[Sign]) -> Result<StratumProjection> {
    let psi = vertex_vector(h, nu)?;
    let p = rank_one_projection(&psi);
    let q = CMatrix::identity(h.dim(), h.dim()) - &p;
    Ok(StratumProjection { stratum: StratumLabel::vertex(nu.to_vec()), q, p, truncation_report: Default::default() })
}

/// q_τ as the support projection of the retained constraint projections,
/// computed by the T-procedure on the full matrix algebra of the truncation.
pub fn stratum_projection_by_constraints(
    h: &TruncatedHilbert,
    stratum: &StratumLabel,
    rank_tol: f64,
    loss_tol: f64,
) -> Result<StratumProjection> {
    let family = vanishing_family(stratum)?;
    let (projections, report) = constraint_projections(h, &family, loss_tol)?;
    if projections.is_empty() && !family.generators.is_empty() {
        return Err(Error::InsufficientCutoff(format!(
            "every constraint product for the {stratum} stratum leaks past the cutoff; raise j_max"
        )));
    }
    let cs = ConstraintSystem::new(MatrixAlgebra::full(h.dim())?, projections, 1e-12)?;
    let result = hereditary_and_projection(&cs, rank_tol);
    Ok(StratumProjection { stratum: stratum.clone(), q: result.q, p: result.p, truncation_report: report })
}

/// q_T and p_T of the torus stratum (N ≥ 2).
pub fn stratum_projection_t(h: &TruncatedHilbert, rank_tol: f64, loss_tol: f64) -> Result<StratumProjection> {
    if h.n() < 2 {
        return Err(Error::Unsupported("there is no torus stratum for N = 1".into()));
    }
    stratum_projection_by_constraints(h, &StratumLabel { n: h.n(), orbit_type: OrbitType::Torus }, rank_tol, loss_tol)
}

/// The corner algebra `A_τ = p_τ B(H) p_τ`.
#[derive(Debug, Clone)]
pub struct ObservableAlgebra {
    pub stratum: StratumLabel,
    pub p: CMatrix,
    /// Orthonormal basis of the range of p.
    pub range: CMatrix,
}

impl ObservableAlgebra {
    pub fn dimension(&self) -> usize {
        self.range.ncols() * self.range.ncols()
    }

    /// `p a p`.
    pub fn compress(&self, a: &CMatrix) -> CMatrix {
        &self.p * a * &self.p
    }

    pub fn contains(&self, a: &CMatrix, tol: f64) -> bool {
        (self.compress(a) - a).norm() <= tol * a.norm().max(1.0)
    }

    /// For a one-dimensional range spanned by ψ: `⟨ψ, aψ⟩ / ⟨ψ, ψ⟩`.
    pub fn expectation(&self, a: &CMatrix) -> Option<C64> {
        if self.range.ncols() != 1 {
            return None;
        }
        let v = self.range.column(0);
        Some((v.adjoint() * a * v)[(0, 0)])
    }
}

pub fn observable_algebra(proj: &StratumProjection, rank_tol: f64) -> ObservableAlgebra {
    ObservableAlgebra { stratum: proj.stratum.clone(), p: proj.p.clone(), range: column_space(&proj.p, rank_tol) }
}

/// `⟨ψ_ν, ψ_ν'⟩ / (‖ψ_ν‖‖ψ_ν'‖)`.
pub fn tunneling_overlap(h: &TruncatedHilbert, nu: &[Sign], nu2: &[Sign]) -> Result<C64> {
    let (a, b) = (vertex_vector(h, nu)?, vertex_vector(h, nu2)?);
    Ok(a.inner(&b) / (a.norm() * b.norm()))
}

/// `‖p_T p_ν − p_ν‖` in the operator norm.
pub fn monotonicity_residual(p_outer: &CMatrix, p_inner: &CMatrix) -> f64 {
    spectral_norm(&(p_outer * p_inner - p_inner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::{random_phase_point, ComplexGroupElement};
    use crate::quasichar::invariant_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hilbert(n: usize, jmax_twice: u32) -> TruncatedHilbert {
        TruncatedHilbert::new(&invariant_basis(n, jmax_twice, 0.1, 1.0).unwrap())
    }

    #[test]
    fn evaluation_vector_reproduces_values() {
        let h = hilbert(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let b = random_phase_point(&mut rng, 2, 0.3).complexify();
        let psi_b = evaluation_vector(&h, &b).unwrap();
        assert!((psi_b.inner(&FunctionVector::unit(h.dim(), 0)) - 1.0).norm() < 1e-14);
        let phi = FunctionVector::new(CVector::from_fn(h.dim(), |i, _| C64::new(i as f64 * 0.1, 1.0 / (i + 1) as f64)));
        let direct = h.to_function(&phi).unwrap().evaluate(&point_matrices(&b)).unwrap();
        assert!((psi_b.inner(&phi) - direct).norm() < 1e-10 * direct.norm());
    }

    #[test]
    fn single_copy_vertex_vectors_follow_the_series() {
        let h = hilbert(1, 10);
        let s = h.basis().s();
        for sign in [Sign::Plus, Sign::Minus] {
            let psi = vertex_vector(&h, &[sign]).unwrap();
            for n in 0..=10 {
                let expected =
                    sign.value().powi(n as i32) * (n + 1) as f64 * (-s * ((n + 1) * (n + 1) - 1) as f64 / 2.0).exp();
                assert!((psi.coefficients[n] - expected).norm() < 1e-12);
            }
        }
        let overlap = tunneling_overlap(&h, &[Sign::Plus], &[Sign::Minus]).unwrap();
        let m2 = |m: f64| m * m * (-s * m * m).exp();
        let num: f64 = (1..=11).map(|m| if m % 2 == 1 { m2(m as f64) } else { -m2(m as f64) }).sum();
        let den: f64 = (1..=11).map(|m| m2(m as f64)).sum();
        assert!((overlap.re - num / den).abs() < 1e-12);
        assert!((tunneling_overlap(&h, &[Sign::Plus], &[Sign::Plus]).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn vertex_projection_properties() {
        let h = hilbert(2, 2);
        let nu = [Sign::Plus, Sign::Minus];
        let proj = vertex_projection(&h, &nu).unwrap();
        assert!((proj.p.trace() - 1.0).norm() < 1e-13);
        assert!(proj.defect() < 1e-13);
        assert_eq!(proj.rank(1e-10), 1);
        let psi = vertex_vector(&h, &nu).unwrap();
        assert!((&proj.p * &psi.coefficients - &psi.coefficients).norm() < 1e-12 * psi.norm());
        let alg = observable_algebra(&proj, 1e-10);
        assert_eq!(alg.dimension(), 1);
        let a = CMatrix::from_fn(h.dim(), h.dim(), |r, c| C64::new((r * c) as f64 * 0.01, r as f64 - c as f64));
        let expectation = psi.coefficients.dotc(&(&a * &psi.coefficients)) / C64::new(psi.norm_squared(), 0.0);
        assert!((alg.compress(&a) - &proj.p * expectation).norm() < 1e-12 * a.norm());
        assert!((alg.expectation(&a).unwrap() - expectation).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn vertex_constraint_products_are_orthogonal_to_the_vertex_vector() {
        let h = hilbert(2, 3);
        for nu in Sign::all_sequences(2) {
            let family = vanishing_family(&StratumLabel::vertex(nu.clone())).unwrap();
            let (products, report) = constraint_products(&h, &family, 1e-6).unwrap();
            assert!(report.retained > 0);
            let psi = vertex_vector(&h, &nu).unwrap();
            for p in &products {
                assert!(psi.inner(&p.vector).norm() < 1e-10 * p.vector.norm() * psi.norm());
            }
            let by_constraints =
                stratum_projection_by_constraints(&h, &StratumLabel::vertex(nu.clone()), 1e-10, 1e-6).unwrap();
            assert!((&by_constraints.q * &psi.coefficients).norm() < 1e-9 * psi.norm());
        }
    }

    #[test]
    fn torus_projection_contains_vertex_projections() {
        let h = hilbert(2, 2);
        let t = stratum_projection_t(&h, 1e-10, 1e-6).unwrap();
        assert!(t.defect() < 1e-12);
        let r = TracePolynomial::torus_pair(0, 1);
        let r_vec = h.basis().project(&InvariantFunction::from_polynomial(&r, 2).unwrap()).unwrap().vector;
        assert!((&t.q * &r_vec.coefficients - &r_vec.coefficients).norm() < 1e-10 * r_vec.norm());
        for nu in Sign::all_sequences(2) {
            let pv = vertex_projection(&h, &nu).unwrap();
            assert!(monotonicity_residual(&t.p, &pv.p) < 1e-3);
        }
        // Range of q_T vanishes on the torus stratum.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (diag, _) = crate::strata::sample_torus_sector(&mut rng, 2);
        let point: Vec<Mat2> = diag.complexify().iter().map(|b: &ComplexGroupElement| *b.matrix()).collect();
        let range = column_space(&t.q, 1e-10);
        for k in 0..range.ncols() {
            let f = FunctionVector::new(range.column(k).into_owned());
            assert!(h.evaluate(&f, &point).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn no_torus_stratum_for_one_copy() {
        assert!(matches!(stratum_projection_t(&hilbert(1, 2), 1e-10, 1e-6), Err(Error::Unsupported(_))));
    }
}
