//! Irreducible representations of SL(2,ℂ), Clebsch-Gordan coefficients and
//! sequential coupling of tensor products.
//!
//! Spins are passed as twice their value (`n = 2j`) so that everything is an
//! integer. Within V_j the basis index is `k = j + m ∈ {0, …, 2j}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::liecore::{ComplexGroupElement, Mat2};
use crate::linalg::hermitian_eigen;
use crate::{CMatrix, C64};

const MAX_FACTORIAL: usize = 170;

fn factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![1.0; MAX_FACTORIAL + 1];
        for i in 1..=MAX_FACTORIAL {
            t[i] = t[i - 1] * i as f64;
        }
        t
    });
    table[n]
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Largest `n` evaluated by the monomial expansion; above it the expansion
/// loses accuracy to cancellation and the factorized form is used.
const MONOMIAL_MAX: usize = 12;

/// `π_{n/2}(g)` on homogeneous polynomials of degree n in (x, y).
///
/// The representation acts by `(π(g)f)(x, y) = f((x, y)·g)` on the orthonormal
/// basis `e_k = x^k y^{n−k} / √(k!(n−k)!)`. Entries are polynomials in the
/// entries of g, so the same formula serves SU(2) and SL(2,ℂ).
pub fn irrep(n: u32, g: &Mat2) -> CMatrix {
    let n = n as usize;
    if n <= MONOMIAL_MAX {
        return irrep_monomial(n, g);
    }
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if det.norm() < 1e-150 {
        return irrep_monomial(n, g);
    }
    let root = det.sqrt();
    let unimodular = g / root;
    irrep_factorized(n, &unimodular) * root.powi(n as i32)
}

fn irrep_monomial(n: usize, g: &Mat2) -> CMatrix {
    let pow = |z: C64| {
        let mut v = vec![C64::new(1.0, 0.0); n + 1];
        for i in 1..=n {
            v[i] = v[i - 1] * z;
        }
        v
    };
    let (p11, p12, p21, p22) = (pow(g[(0, 0)]), pow(g[(0, 1)]), pow(g[(1, 0)]), pow(g[(1, 1)]));
    let norm: Vec<f64> = (0..=n).map(|k| (factorial(k) * factorial(n - k)).sqrt()).collect();
    let mut out = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        for a in 0..=k {
            let first = p11[a] * p21[k - a] * binomial(k, a);
            for b in 0..=n - k {
                let second = p12[b] * p22[n - k - b] * binomial(n - k, b);
                let l = a + b;
                out[(l, k)] += first * second * (norm[l] / norm[k]);
            }
        }
    }
    out
}

/// Eigenvectors of `iA`, A the generator of `r(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]`,
/// ordered by eigenvalue `2k − n`.
fn rotation_eigenvectors(n: usize) -> Arc<CMatrix> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CMatrix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("irrep cache").get(&n) {
        return v.clone();
    }
    let mut h = CMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let x = (((k + 1) * (n - k)) as f64).sqrt();
        h[(k, k + 1)] = C64::new(0.0, x);
        h[(k + 1, k)] = C64::new(0.0, -x);
    }
    let (_, vectors) = hermitian_eigen(&h);
    let v = Arc::new(vectors);
    cache.lock().expect("irrep cache").insert(n, v.clone());
    v
}

/// `π(diag(p, 1/p))`.
fn diagonal_irrep(n: usize, p: C64) -> Vec<C64> {
    (0..=n).map(|k| p.powi(2 * k as i32 - n as i32)).collect()
}

fn scale_rows(m: &mut CMatrix, d: &[C64]) {
    for (r, &x) in d.iter().enumerate() {
        for c in 0..m.ncols() {
            m[(r, c)] *= x;
        }
    }
}

fn scale_columns(m: &mut CMatrix, d: &[C64]) {
    for (c, &x) in d.iter().enumerate() {
        for r in 0..m.nrows() {
            m[(r, c)] *= x;
        }
    }
}

/// `π(u)` for `u = [[α, −β̄], [β, ᾱ]]` written as `diag(e^{ia}) r(θ) diag(e^{ib})`.
fn irrep_su2(n: usize, alpha: C64, beta: C64) -> CMatrix {
    let theta = beta.norm().atan2(alpha.norm());
    let (sum, diff) = (alpha.arg(), -beta.arg());
    let (a, b) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
    let v = rotation_eigenvectors(n);
    let phases: Vec<C64> = (0..=n).map(|k| C64::from_polar(1.0, -theta * (2.0 * k as f64 - n as f64))).collect();
    let mut vp = (*v).clone();
    scale_columns(&mut vp, &phases);
    let mut out = vp * v.adjoint();
    scale_rows(&mut out, &diagonal_irrep(n, C64::from_polar(1.0, a)));
    scale_columns(&mut out, &diagonal_irrep(n, C64::from_polar(1.0, b)));
    out
}

/// `π(g)` for `g ∈ SL(2,ℂ)` via `g = u·w·diag(σ, 1/σ)·w†` with u, w ∈ SU(2).
fn irrep_factorized(n: usize, g: &Mat2) -> CMatrix {
    let gram = g.adjoint() * g;
    let off = gram[(0, 1)];
    let (d0, d1) = (gram[(0, 0)].re, gram[(1, 1)].re);
    if off.norm() + (d0 - 1.0).abs() + (d1 - 1.0).abs() < 1e-14 {
        let col = g.column(0);
        let norm = col.norm();
        return irrep_su2(n, col[0] / norm, col[1] / norm);
    }
    // Largest eigenvalue σ² of g†g and a unit eigenvector (w11, w21).
    let half = (d0 - d1) / 2.0;
    let radius = (half * half + off.norm_sqr()).sqrt();
    let top = (d0 + d1) / 2.0 + radius;
    let (x, y) =
        if half >= 0.0 { (C64::new(half + radius, 0.0), off.conj()) } else { (off, C64::new(radius - half, 0.0)) };
    let len = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (w11, w21) = (x / len, y / len);
    let w = Mat2::new(w11, -w21.conj(), w21, w11.conj());
    let sigma = top.sqrt();
    // u·w = g·w·diag(1/σ, σ)
    let gw = g * w;
    let (uw11, uw21) = (gw[(0, 0)] / sigma, gw[(1, 0)] / sigma);
    let mut out = irrep_su2(n, uw11, uw21);
    scale_columns(&mut out, &diagonal_irrep(n, C64::new(sigma, 0.0)));
    out * irrep_su2(n, w11, w21).adjoint()
}

/// `π_j(g)` for `twice_j = 2j`.
pub fn irrep_matrix(twice_j: u32, g: &ComplexGroupElement) -> CMatrix {
    irrep(twice_j, g.matrix())
}

/// Clebsch-Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩` (Racah's formula),
/// all arguments twice their value.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    let valid = |jj: i32, mm: i32| jj >= 0 && mm.abs() <= jj && (jj + mm) % 2 == 0;
    if m1 + m2 != m || !valid(j1, m1) || !valid(j2, m2) || !valid(j, m) {
        return 0.0;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    let f = |x: i32| factorial(x as usize);
    let prefactor = ((j + 1) as f64 * f((j1 + j2 - j) / 2) * f((j1 - j2 + j) / 2) * f((-j1 + j2 + j) / 2)
        / f((j1 + j2 + j) / 2 + 1))
    .sqrt();
    let moments =
        (f((j + m) / 2) * f((j - m) / 2) * f((j1 - m1) / 2) * f((j1 + m1) / 2) * f((j2 - m2) / 2) * f((j2 + m2) / 2))
            .sqrt();
    let lower = 0.max((j2 - j - m1) / 2).max((j1 - j + m2) / 2);
    let upper = ((j1 + j2 - j) / 2).min((j1 - m1) / 2).min((j2 + m2) / 2);
    let mut sum = 0.0;
    for k in lower..=upper {
        let denom = f(k)
            * f((j1 + j2 - j) / 2 - k)
            * f((j1 - m1) / 2 - k)
            * f((j2 + m2) / 2 - k)
            * f((j - j2 + m1) / 2 + k)
            * f((j - j1 - m2) / 2 + k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / denom;
    }
    prefactor * moments * sum
}

/// Unitary (real orthogonal) change of basis `V_{n1} ⊗ V_{n2} → ⊕_L V_L`.
///
/// Rows are product indices `k1·(n2+1) + k2`; columns run over L ascending
/// and, inside each L, over `K = (L + M)/2`.
pub fn coupling_matrix(n1: u32, n2: u32) -> CMatrix {
    let (a, b) = (n1 as i32, n2 as i32);
    let dim = ((n1 + 1) * (n2 + 1)) as usize;
    let mut w = CMatrix::zeros(dim, dim);
    let mut col = 0;
    for l in ((a - b).abs()..=a + b).step_by(2) {
        for big_k in 0..=l {
            let m = 2 * big_k - l;
            for k1 in 0..=a {
                let m1 = 2 * k1 - a;
                let m2 = m - m1;
                if m2.abs() > b {
                    continue;
                }
                let k2 = (m2 + b) / 2;
                let row = (k1 * (b + 1) + k2) as usize;
                w[(row, col)] = C64::new(clebsch_gordan(a, m1, b, m2, l, m), 0.0);
            }
            col += 1;
        }
    }
    w
}

/// Column offsets of each L inside [`coupling_matrix`].
pub fn coupling_offsets(n1: u32, n2: u32) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    let mut l = n1.abs_diff(n2);
    while l <= n1 + n2 {
        out.push((l, offset));
        offset += (l + 1) as usize;
        l += 2;
    }
    out
}

/// One coupling path `j_1 ⊗ … ⊗ j_N → J`.
#[derive(Debug, Clone)]
pub struct CoupledPath {
    /// Intermediate twice-spins `J_2, …, J_N` (empty for N = 1).
    pub intermediates: Vec<u32>,
    /// Final twice-spin J.
    pub total: u32,
    /// Orthonormal vectors `|path; J, M⟩` as columns, indexed by `(J + M)/2`.
    pub vectors: CMatrix,
}

/// All sequential coupling paths of `V_{n_1} ⊗ … ⊗ V_{n_N}`, ordered by
/// their intermediate spins.
pub fn coupled_paths(spins: &[u32]) -> Vec<CoupledPath> {
    let first = spins[0];
    let mut paths = vec![CoupledPath {
        intermediates: Vec::new(),
        total: first,
        vectors: CMatrix::identity(first as usize + 1, first as usize + 1),
    }];
    for &n in &spins[1..] {
        let mut next = Vec::new();
        for path in &paths {
            let w = coupling_matrix(path.total, n);
            for (l, offset) in coupling_offsets(path.total, n) {
                let block = w.columns(offset, l as usize + 1);
                // |prev, J_prev M'⟩ ⊗ |m⟩ = (V_prev ⊗ 𝟙)·(product index)
                let lifted = path.vectors.kronecker(&CMatrix::identity(n as usize + 1, n as usize + 1));
                let mut intermediates = path.intermediates.clone();
                intermediates.push(l);
                next.push(CoupledPath { intermediates, total: l, vectors: lifted * block });
            }
        }
        paths = next;
    }
    paths.sort_by(|a, b| a.intermediates.cmp(&b.intermediates));
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecore::haar_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
        use rand::Rng;
        let m = Mat2::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        m / (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).sqrt()
    }

    #[test]
    fn factorized_form_matches_monomial_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..20 {
            let u = *haar_sample(&mut rng).matrix();
            let g = random_sl2(&mut rng);
            for n in [1, 2, 5, 12] {
                assert!((irrep_factorized(n, &u) - irrep_monomial(n, &u)).norm() < 1e-13);
                let scale = irrep_monomial(n, &g).norm();
                assert!((irrep_factorized(n, &g) - irrep_monomial(n, &g)).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn high_spin_characters_are_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let g = *haar_sample(&mut rng).matrix();
            let theta = ((g[(0, 0)] + g[(1, 1)]).re / 2.0).clamp(-1.0, 1.0).acos();
            for n in [20u32, 40, 60, 100] {
                let p = irrep(n, &g);
                let exact = ((n + 1) as f64 * theta).sin() / theta.sin();
                assert!((p.trace() - exact).norm() < 1e-12, "n = {n}");
                let d = n as usize + 1;
                assert!((p.adjoint() * &p - CMatrix::identity(d, d)).norm() < 1e-12);
            }
        }
        let g = random_sl2(&mut rng);
        let h = random_sl2(&mut rng);
        let (pg, ph) = (irrep(30, &g), irrep(30, &h));
        assert!((irrep(30, &(g * h)) - &pg * &ph).norm() < 1e-11 * pg.norm() * ph.norm());
        assert!((irrep(30, &-Mat2::identity()) + CMatrix::identity(31, 31) * c(-1.0)).norm() < 1e-13);
    }

    #[test]
    fn spin_half_is_the_defining_representation_reversed() {
        let g = Mat2::new(C64::new(1.0, 2.0), c(3.0), C64::new(0.0, -1.0), c(0.5));
        let p = irrep(1, &g);
        assert_eq!(p[(1, 1)], g[(0, 0)]);
        assert_eq!(p[(0, 0)], g[(1, 1)]);
        assert_eq!(p[(1, 0)], g[(0, 1)]);
        assert_eq!(p[(0, 1)], g[(1, 0)]);
    }

    #[test]
    fn irreps_are_multiplicative_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 0..8 {
            let g = *haar_sample(&mut rng).matrix();
            let h = *haar_sample(&mut rng).matrix();
            let (pg, ph) = (irrep(n, &g), irrep(n, &h));
            assert!((irrep(n, &(g * h)) - &pg * &ph).norm() < 1e-12);
            let id = CMatrix::identity(n as usize + 1, n as usize + 1);
            assert!((pg.adjoint() * &pg - id).norm() < 1e-12);
        }
    }

    #[test]
    fn known_clebsch_gordan_values() {
        let s = 0.5f64.sqrt();
        // ½ ⊗ ½: singlet and triplet.
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - s).abs() < 1e-15);
        assert!((clebsch_gordan(1, -1, 1, 1, 0, 0) + s).abs() < 1e-15);
        assert!((clebsch_gordan(1, 1, 1, -1, 2, 0) - s).abs() < 1e-15);
        assert!((clebsch_gordan(1, 1, 1, 1, 2, 2) - 1.0).abs() < 1e-15);
        // ⟨1 1; 1 −1 | 0 0⟩ = 1/√3.
        assert!((clebsch_gordan(2, 2, 2, -2, 0, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(clebsch_gordan(2, 2, 2, 0, 0, 0), 0.0);
    }

    #[test]
    fn coupling_matrix_intertwines() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = *haar_sample(&mut rng).matrix();
        for (a, b) in [(1, 1), (2, 1), (3, 2), (2, 4)] {
            let w = coupling_matrix(a, b);
            let dim = w.nrows();
            assert!((w.adjoint() * &w - CMatrix::identity(dim, dim)).norm() < 1e-13);
            let mut direct = CMatrix::zeros(dim, dim);
            for (l, offset) in coupling_offsets(a, b) {
                let size = l as usize + 1;
                direct.view_mut((offset, offset), (size, size)).copy_from(&irrep(l, &g));
            }
            let product = irrep(a, &g).kronecker(&irrep(b, &g));
            assert!((w.adjoint() * product * &w - direct).norm() < 1e-12, "{a} ⊗ {b}");
        }
    }

    #[test]
    fn coupled_paths_span_the_product() {
        let spins = [1, 2, 1];
        let paths = coupled_paths(&spins);
        let dim: usize = spins.iter().map(|&n| n as usize + 1).product();
        assert_eq!(paths.iter().map(|p| p.total as usize + 1).sum::<usize>(), dim);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = *haar_sample(&mut rng).matrix();
        let rho = irrep(1, &g).kronecker(&irrep(2, &g)).kronecker(&irrep(1, &g));
        for p in &paths {
            let v = &p.vectors;
            let size = p.total as usize + 1;
            assert!((v.adjoint() * v - CMatrix::identity(size, size)).norm() < 1e-13);
            assert!((&rho * v - v * irrep(p.total, &g)).norm() < 1e-12);
        }
    }
}
