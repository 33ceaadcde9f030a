//! Orbit types of the diagonal conjugation action on T*SU(2)^N ≅ SL(2,ℂ)^N.
//!
//! Stabilizers are the whole group G at the 2^N vertices `(ν_1𝟙, …, ν_N𝟙; 0)`,
//! a maximal torus T on the rest of the conjugates of `T^N × 𝔱^N`, and the
//! center Z everywhere else. For N = 1 every non-vertex point is principal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::liecore::{
    diagonal_conjugate, format_signs, haar_sample, momentum_map, parse_signs, random_algebra, trace_invariants,
    AlgebraElement, ComplexGroupElement, GroupElement, Mat2, PhasePoint, Sign,
};
use crate::{Error, Result};

/// Orbit type of a phase point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitType {
    /// Stabilizer G: the point `(ν_1𝟙, …, ν_N𝟙; 0, …, 0)`.
    Vertex(Vec<Sign>),
    /// Stabilizer conjugate to T.
    Torus,
    /// Stabilizer Z.
    Principal,
}

impl OrbitType {
    fn rank(&self) -> u8 {
        match self {
            OrbitType::Vertex(_) => 0,
            OrbitType::Torus => 1,
            OrbitType::Principal => 2,
        }
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitType::Vertex(nu) => write!(f, "vertex({})", format_signs(nu)),
            OrbitType::Torus => write!(f, "torus"),
            OrbitType::Principal => write!(f, "principal"),
        }
    }
}

impl FromStr for OrbitType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(OrbitType::Torus),
            "principal" => Ok(OrbitType::Principal),
            _ => s
                .strip_prefix("vertex(")
                .and_then(|rest| rest.strip_suffix(')'))
                .ok_or_else(|| Error::InvalidInput(format!("unknown stratum {s:?}")))
                .and_then(parse_signs)
                .map(OrbitType::Vertex),
        }
    }
}

/// A stratum of the reduced phase space for a fixed N.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumLabel {
    pub n: usize,
    pub orbit_type: OrbitType,
}

impl StratumLabel {
    pub fn vertex(signs: Vec<Sign>) -> Self {
        Self { n: signs.len(), orbit_type: OrbitType::Vertex(signs) }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.orbit_type.fmt(f)
    }
}

/// The strata for a fixed N, ordered by inclusion of closures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumPoset {
    pub n: usize,
    pub labels: Vec<StratumLabel>,
    /// Covering relations `(lower, upper)` as label indices.
    pub covers: Vec<(usize, usize)>,
}

impl StratumPoset {
    /// Whether the stratum `a` lies in the closure of the stratum `b`.
    pub fn leq(&self, a: &StratumLabel, b: &StratumLabel) -> bool {
        a == b || self.compare(a, b) == Some(Ordering::Less)
    }

    fn compare(&self, a: &StratumLabel, b: &StratumLabel) -> Option<Ordering> {
        if a == b {
            return Some(Ordering::Equal);
        }
        if matches!((&a.orbit_type, &b.orbit_type), (OrbitType::Vertex(_), OrbitType::Vertex(_))) {
            return None;
        }
        Some(a.orbit_type.rank().cmp(&b.orbit_type.rank()))
    }

    /// The unique maximal label.
    pub fn top(&self) -> &StratumLabel {
        self.labels.last().expect("poset is never empty")
    }
}

/// Vertex labels in sign order, then torus (N ≥ 2), then principal.
pub fn stratum_poset(n: usize) -> Result<StratumPoset> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let mut labels: Vec<StratumLabel> = Sign::all_sequences(n).into_iter().map(StratumLabel::vertex).collect();
    let vertices = labels.len();
    let mut covers = Vec::new();
    if n >= 2 {
        labels.push(StratumLabel { n, orbit_type: OrbitType::Torus });
        covers.extend((0..vertices).map(|v| (v, vertices)));
        covers.push((vertices, vertices + 1));
    } else {
        covers.extend((0..vertices).map(|v| (v, vertices)));
    }
    labels.push(StratumLabel { n, orbit_type: OrbitType::Principal });
    Ok(StratumPoset { n, labels, covers })
}

/// Orbit type together with the distances that decided it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizerAnalysis {
    pub orbit_type: OrbitType,
    /// `max_i max(‖a_i − ν_i𝟙‖, ‖A_i‖)` for the nearest sign sequence ν.
    pub vertex_distance: f64,
    /// Largest scaled commutator norm among `{a_i, A_i}`.
    pub commutator_residual: f64,
}

fn commutator_norm(x: &Mat2, y: &Mat2) -> f64 {
    (x * y - y * x).norm() / (x.norm() * y.norm()).max(1.0)
}

/// Classifies `p` with the smallest stratum whose tolerance band contains it.
pub fn stabilizer_analysis(p: &PhasePoint, tol: f64) -> StabilizerAnalysis {
    let mut signs = Vec::with_capacity(p.n());
    let mut vertex_distance: f64 = 0.0;
    for (a, x) in p.links() {
        let m = a.matrix();
        let sign = if (m[(0, 0)] + m[(1, 1)]).re >= 0.0 { Sign::Plus } else { Sign::Minus };
        let d = (m - Mat2::identity() * crate::C64::new(sign.value(), 0.0)).norm();
        vertex_distance = vertex_distance.max(d).max(x.matrix().norm());
        signs.push(sign);
    }
    let mats: Vec<&Mat2> = p.links().iter().flat_map(|(a, x)| [a.matrix(), x.matrix()]).collect();
    let mut commutator_residual: f64 = 0.0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            commutator_residual = commutator_residual.max(commutator_norm(mats[i], mats[j]));
        }
    }
    let orbit_type = if vertex_distance <= tol {
        OrbitType::Vertex(signs)
    } else if p.n() >= 2 && commutator_residual <= tol {
        OrbitType::Torus
    } else {
        OrbitType::Principal
    };
    StabilizerAnalysis { orbit_type, vertex_distance, commutator_residual }
}

pub fn stabilizer_type(p: &PhasePoint, tol: f64) -> OrbitType {
    stabilizer_analysis(p, tol).orbit_type
}

/// Which defining relations a complex tuple satisfies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationReport {
    pub satisfies_t_locus: bool,
    /// One entry per sign sequence, in [`Sign::all_sequences`] order.
    pub satisfies_vertex_locus: Vec<(Vec<Sign>, bool)>,
    /// Largest scaled `|r^T|`; zero for N = 1, where there are no such relations.
    pub t_residual: f64,
    /// Largest scaled `|r^ν|` per sign sequence.
    pub vertex_residuals: Vec<(Vec<Sign>, f64)>,
}

impl RelationReport {
    /// The sign sequence whose vertex locus is satisfied, if any.
    pub fn vertex(&self) -> Option<&[Sign]> {
        self.satisfies_vertex_locus.iter().find(|(_, ok)| *ok).map(|(nu, _)| nu.as_slice())
    }

    /// Orbit type implied by the relations for a tuple of length `n`.
    pub fn orbit_type(&self, n: usize) -> OrbitType {
        match self.vertex() {
            Some(nu) => OrbitType::Vertex(nu.to_vec()),
            None if n >= 2 && self.satisfies_t_locus => OrbitType::Torus,
            None => OrbitType::Principal,
        }
    }
}

/// Evaluates the torus and vertex relations, each residual scaled by the
/// product of the matrix norms it is built from.
pub fn classify_by_relations(a: &[ComplexGroupElement], tol: f64) -> RelationReport {
    let mats: Vec<Mat2> = a.iter().map(|g| *g.matrix()).collect();
    let norms: Vec<f64> = mats.iter().map(|m| m.norm().max(1.0)).collect();
    let inv = trace_invariants(&mats);
    let pair_scale = |i: usize, j: usize| norms[i] * norms[j];
    let mut t_residual: f64 = 0.0;
    for &((i, j), r) in &inv.r_torus_pair {
        t_residual = t_residual.max(r.norm() / pair_scale(i, j).powi(2));
    }
    for &((i, j, k), r) in &inv.r_torus_triple {
        t_residual = t_residual.max(r.norm() / (pair_scale(i, j) * norms[k]));
    }
    let satisfies_t_locus = t_residual <= tol;
    let mut vertex_residuals = Vec::new();
    let mut satisfies_vertex_locus = Vec::new();
    for nu in Sign::all_sequences(a.len()) {
        let res = inv.vertex_residuals(&nu);
        let single = res.single.iter().enumerate().map(|(i, r)| r.norm() / norms[i]);
        let pair = res.pair.iter().map(|&((i, j), r)| r.norm() / pair_scale(i, j));
        let worst = single.chain(pair).fold(0.0, f64::max);
        satisfies_vertex_locus.push((nu.clone(), satisfies_t_locus && worst <= tol));
        vertex_residuals.push((nu, worst));
    }
    RelationReport { satisfies_t_locus, satisfies_vertex_locus, t_residual, vertex_residuals }
}

/// How [`sample_level_set`] draws points of μ⁻¹(0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    TorusSector,
    Generic,
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus_sector" => Ok(SampleMode::TorusSector),
            "generic" => Ok(SampleMode::Generic),
            _ => Err(Error::InvalidInput(format!("unknown sample mode {s:?}"))),
        }
    }
}

/// A random point of `T^N × 𝔱^N` and a Haar-random conjugating element.
pub fn sample_torus_sector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (PhasePoint, GroupElement) {
    let links = (0..n)
        .map(|_| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let x: f64 = rng.sample(StandardNormal);
            (GroupElement::torus(theta), AlgebraElement::torus(x))
        })
        .collect();
    let diagonal = PhasePoint::new(links).expect("n ≥ 1");
    (diagonal, haar_sample(rng))
}

/// Orthonormal basis of the kernel of `A ↦ Σ_i Ad(a_i)A_i − A_i` on su(2)^N,
/// in the coordinates of [`AlgebraElement::from_coords`].
pub fn momentum_kernel(a: &[GroupElement], rel_tol: f64) -> DMatrix<f64> {
    let n = a.len();
    let mut map = DMatrix::zeros(3 * n, 3 * n);
    for (i, g) in a.iter().enumerate() {
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let x = AlgebraElement::from_coords(e);
            let img = AlgebraElement::new(g.matrix() * x.matrix() * g.matrix().adjoint() - x.matrix())
                .expect("Ad(g)X − X lies in su(2)")
                .coords();
            for r in 0..3 {
                map[(r, 3 * i + k)] = img[r];
            }
        }
    }
    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let kernel: Vec<usize> = (0..3 * n).filter(|&i| svd.singular_values[i] <= rel_tol * smax.max(1.0)).collect();
    DMatrix::from_fn(3 * n, kernel.len(), |r, c| v_t[(kernel[c], r)])
}

/// Samples a point of μ⁻¹(0).
pub fn sample_level_set<R: Rng + ?Sized>(rng: &mut R, n: usize, mode: SampleMode) -> Result<PhasePoint> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    match mode {
        SampleMode::TorusSector => {
            let (diagonal, g) = sample_torus_sector(rng, n);
            Ok(diagonal_conjugate(&g, &diagonal))
        }
        SampleMode::Generic => {
            let a: Vec<GroupElement> = (0..n).map(|_| haar_sample(rng)).collect();
            let kernel = momentum_kernel(&a, 1e-10);
            if kernel.ncols() == 0 {
                return Err(Error::EmptyKernel);
            }
            let coeffs: Vec<f64> = (0..kernel.ncols()).map(|_| rng.sample(StandardNormal)).collect();
            let v = &kernel * nalgebra::DVector::from_vec(coeffs);
            let links = a
                .into_iter()
                .enumerate()
                .map(|(i, g)| (g, AlgebraElement::from_coords([v[3 * i], v[3 * i + 1], v[3 * i + 2]])))
                .collect();
            PhasePoint::new(links)
        }
    }
}

/// A vertex point, conjugated by a random element.
pub fn sample_vertex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PhasePoint {
    let nu: Vec<Sign> = (0..n).map(|_| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect();
    let g = haar_sample(rng);
    diagonal_conjugate(&g, &PhasePoint::vertex(&nu).expect("n ≥ 1"))
}

/// A random point with the given orbit type (vertex signs drawn at random).
pub fn sample_of_type<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: &OrbitType) -> Result<PhasePoint> {
    match kind {
        OrbitType::Vertex(_) => Ok(sample_vertex(rng, n)),
        OrbitType::Torus => sample_level_set(rng, n, SampleMode::TorusSector),
        OrbitType::Principal => sample_level_set(rng, n, SampleMode::Generic),
    }
}

/// Largest entry of the momentum map, for reports.
pub fn momentum_residual(p: &PhasePoint) -> f64 {
    momentum_map(p).norm()
}

/// A phase point with random group parts and algebra parts, off the level set.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PhasePoint {
    PhasePoint::new((0..n).map(|_| (haar_sample(rng), random_algebra(rng, 1.0))).collect()).expect("n ≥ 1")
}
