//! SU(2), su(2) and SL(2,ℂ) as 2×2 complex matrices.
//!
//! Points of T*SU(2)^N are kept in left trivialization as pairs `(a, A)` with
//! `a ∈ SU(2)` and `A ∈ su(2)`. The polar map `(a, A) ↦ a·exp(iA)` identifies
//! them with SL(2,ℂ), equivariantly for conjugation.
//!
//! The invariant scalar product on su(2) is `⟨X, Y⟩ = −β·tr(XY)`; only the
//! norm helpers depend on β.

mod haar;
mod invariants;

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

pub use haar::{haar_quadrature, haar_sample, HaarRule, ProductRule, MAX_QUADRATURE_DEGREE};
pub use invariants::{format_signs, parse_signs, trace_invariants, Sign, TraceInvariants, VertexResiduals};

/// 2×2 complex matrix.
pub type Mat2 = Matrix2<C64>;

const DEFAULT_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrix σ_k for k ∈ {1, 2, 3}.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        1 => Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        2 => Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        3 => Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => panic!("Pauli index must be 1, 2 or 3, got {k}"),
    }
}

fn det(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn trace(m: &Mat2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

/// Element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(Mat2);

impl GroupElement {
    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: Mat2, tol: f64) -> Result<Self> {
        let residual = (m.adjoint() * m - Mat2::identity()).norm() + (det(&m) - 1.0).norm();
        if !residual.is_finite() || residual > tol {
            return Err(Error::InvalidElement { kind: "SU(2) element", residual });
        }
        Ok(Self(m))
    }

    /// The unit quaternion `q0 + i(q1σ1 + q2σ2 + q3σ3)`, normalized.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [q0, q1, q2, q3] = q.map(|x| x / n);
        Self(Mat2::new(c(q0, q3), c(q2, q1), c(-q2, q1), c(q0, -q3)))
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// `ν·𝟙` for a sign ν.
    pub fn central(sign: Sign) -> Self {
        Self(Mat2::identity() * c(sign.value(), 0.0))
    }

    /// `diag(e^{iθ}, e^{−iθ})`, an element of the maximal torus T.
    pub fn torus(theta: f64) -> Self {
        Self(Mat2::new(C64::from_polar(1.0, theta), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, -theta)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn conjugate(&self, a: &Self) -> Self {
        Self(self.0 * a.0 * self.0.adjoint())
    }
}

/// Element of su(2): anti-Hermitian and traceless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement(Mat2);

impl AlgebraElement {
    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: Mat2, tol: f64) -> Result<Self> {
        let residual = (m + m.adjoint()).norm() + trace(&m).norm();
        if !residual.is_finite() || residual > tol * m.norm().max(1.0) {
            return Err(Error::InvalidElement { kind: "su(2) element", residual });
        }
        Ok(Self(m))
    }

    pub fn zero() -> Self {
        Self(Mat2::zeros())
    }

    /// `Σ_k x_k·iσ_k`.
    pub fn from_coords(x: [f64; 3]) -> Self {
        let m = (pauli(1) * c(x[0], 0.0) + pauli(2) * c(x[1], 0.0) + pauli(3) * c(x[2], 0.0)) * c(0.0, 1.0);
        Self(m)
    }

    /// Inverse of [`AlgebraElement::from_coords`].
    pub fn coords(&self) -> [f64; 3] {
        [1, 2, 3].map(|k| (trace(&(pauli(k) * self.0)) * c(0.0, -0.5)).re)
    }

    /// `diag(ix, −ix)`, an element of the Cartan subalgebra 𝔱.
    pub fn torus(x: f64) -> Self {
        Self(Mat2::new(c(0.0, x), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -x)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `⟨A, A⟩ = −β·tr(A²)`.
    pub fn norm_squared(&self, beta: f64) -> f64 {
        -beta * trace(&(self.0 * self.0)).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * c(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }
}

/// Element of SL(2,ℂ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGroupElement(Mat2);

impl ComplexGroupElement {
    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    pub fn with_tolerance(m: Mat2, tol: f64) -> Result<Self> {
        let residual = (det(&m) - 1.0).norm();
        if !residual.is_finite() || residual > tol * m.norm_squared().max(1.0) {
            return Err(Error::InvalidElement { kind: "SL(2,C) element", residual });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// `ν·𝟙`.
    pub fn central(sign: Sign) -> Self {
        Self(Mat2::identity() * c(sign.value(), 0.0))
    }

    /// `diag(z, 1/z)`.
    pub fn diagonal(z: C64) -> Self {
        Self(Mat2::new(z, c(0.0, 0.0), c(0.0, 0.0), z.inv()))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        trace(&self.0)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// `g·b·g⁻¹` for `g ∈ SU(2)`.
    pub fn conjugate_by(&self, g: &GroupElement) -> Self {
        Self(g.0 * self.0 * g.0.adjoint())
    }
}

impl From<GroupElement> for ComplexGroupElement {
    fn from(g: GroupElement) -> Self {
        Self(g.0)
    }
}

/// Value of the momentum map, identified with su(2) via the scalar product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalgebraValue(Mat2);

impl CoalgebraValue {
    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Frobenius norm of the representing matrix.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// A point of T*SU(2)^N: N pairs `(a_i, A_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    links: Vec<(GroupElement, AlgebraElement)>,
}

impl PhasePoint {
    pub fn new(links: Vec<(GroupElement, AlgebraElement)>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidInput("a phase point needs at least one link".into()));
        }
        Ok(Self { links })
    }

    /// `(ν_1·𝟙, …, ν_N·𝟙; 0, …, 0)`.
    pub fn vertex(signs: &[Sign]) -> Result<Self> {
        Self::new(signs.iter().map(|&s| (GroupElement::central(s), AlgebraElement::zero())).collect())
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[(GroupElement, AlgebraElement)] {
        &self.links
    }

    /// Images `a_i·exp(iA_i)` of all links under the polar map.
    pub fn complexify(&self) -> Vec<ComplexGroupElement> {
        self.links.iter().map(|(a, x)| polar_compose(a, x)).collect()
    }
}

/// Matrix exponential of a 2×2 matrix via Cayley-Hamilton.
///
/// With `K = M − (tr M / 2)·𝟙` and `δ² = −det K`, `exp M = e^{tr M/2}(cosh δ·𝟙 + sinh δ/δ·K)`.
/// Both even functions of δ are evaluated from δ² directly, by Taylor series
/// near zero.
pub fn expm(m: &Mat2) -> Mat2 {
    let half_trace = trace(m) * 0.5;
    let k = m - Mat2::identity() * half_trace;
    let d2 = -det(&k);
    let (cosh, sinhc) = if d2.norm() < 1e-3 {
        let mut cosh = c(1.0, 0.0);
        let mut sinhc = c(1.0, 0.0);
        let mut term = c(1.0, 0.0);
        // term_k = d2^k / (2k)!, sinhc term_k = d2^k / (2k+1)!
        for k in 1..8 {
            let kf = k as f64;
            term *= d2 / ((2.0 * kf - 1.0) * 2.0 * kf);
            cosh += term;
            sinhc += term / (2.0 * kf + 1.0);
        }
        (cosh, sinhc)
    } else {
        let d = d2.sqrt();
        (d.cosh(), d.sinh() / d)
    };
    (Mat2::identity() * cosh + k * sinhc) * half_trace.exp()
}

/// Matrix exponential by direct Taylor summation with `terms` terms.
pub fn expm_series(m: &Mat2, terms: usize) -> Mat2 {
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..terms {
        term = term * m / c(k as f64, 0.0);
        sum += term;
    }
    sum
}

/// `(a, A) ↦ a·exp(iA)`.
pub fn polar_compose(a: &GroupElement, x: &AlgebraElement) -> ComplexGroupElement {
    ComplexGroupElement(a.0 * expm(&(x.0 * c(0.0, 1.0))))
}

/// Inverse of [`polar_compose`]: the unique `(a, A)` with `g = a·exp(iA)`.
pub fn polar_decompose(g: &ComplexGroupElement) -> Result<(GroupElement, AlgebraElement)> {
    let m = g.0.adjoint() * g.0;
    let tr_m = trace(&m).re;
    if !tr_m.is_finite() || tr_m * f64::EPSILON > 1.0 {
        return Err(Error::SingularInput);
    }
    // Positive square root of g†g; det(g†g) = |det g|² = 1.
    let p = (m + Mat2::identity()) / c((tr_m + 2.0).sqrt(), 0.0);
    let half = trace(&p) * 0.5;
    let k = p - Mat2::identity() * half;
    // K = sinh(x)/x · H with H = iA and H² = x²·𝟙.
    let sinh_x = (-det(&k)).re.max(0.0).sqrt();
    let x = sinh_x.asinh();
    let ratio = if sinh_x > 0.0 { x / sinh_x } else { 1.0 };
    let h = k * c(ratio, 0.0);
    let algebra = (h + h.adjoint()) * c(0.0, -0.5);
    let adj_p = Mat2::new(p[(1, 1)], -p[(0, 1)], -p[(1, 0)], p[(0, 0)]);
    let a = g.0 * adj_p / det(&p);
    Ok((GroupElement(a), AlgebraElement(algebra)))
}

/// `Ad(g)A = g·A·g⁻¹`.
pub fn adjoint_action(g: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
    AlgebraElement(g.0 * x.0 * g.0.adjoint())
}

/// `μ(a, A) = Σ_i Ad(a_i)A_i − A_i`.
///
/// Evaluated as `Σ_i [a_i, A_i]·a_i⁻¹`, which vanishes identically in
/// floating point on commuting diagonal pairs.
pub fn momentum_map(p: &PhasePoint) -> CoalgebraValue {
    let mut total = Mat2::zeros();
    for (a, x) in &p.links {
        let commutator = a.0 * x.0 - x.0 * a.0;
        total += commutator * a.0.adjoint();
    }
    CoalgebraValue(total)
}

/// Diagonal conjugation `g·(a, A) = (g a_i g⁻¹, Ad(g)A_i)_i`.
pub fn diagonal_conjugate(g: &GroupElement, p: &PhasePoint) -> PhasePoint {
    PhasePoint { links: p.links.iter().map(|(a, x)| (g.conjugate(a), adjoint_action(g, x))).collect() }
}

/// `Ad(g)` applied to a momentum value.
pub fn coadjoint_action(g: &GroupElement, mu: &CoalgebraValue) -> CoalgebraValue {
    CoalgebraValue(g.0 * mu.0 * g.0.adjoint())
}

/// Algebra element with independent standard normal coordinates times `scale`.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> AlgebraElement {
    let x: [f64; 3] = std::array::from_fn(|_| scale * rng.sample::<f64, _>(StandardNormal));
    AlgebraElement::from_coords(x)
}

/// Phase point with Haar-random group parts and Gaussian algebra parts.
pub fn random_phase_point<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> PhasePoint {
    PhasePoint { links: (0..n).map(|_| (haar_sample(rng), random_algebra(rng, scale))).collect() }
}
