//! Single-plaquette (N = 1) Kogut-Susskind dynamics in the character basis.
//!
//! With the character basis χ_0 … χ_{n_max} of class functions on SU(2),
//!
//! ```text
//! H = (λ²/2δ) ħ² c(n) δ_{mn} − (2/λ²δ) (δ_{m,n+1} + δ_{m+1,n}),   c(n) = n(n+2)/(2β),
//! ```
//!
//! the magnetic term coming from `tr(a)·χ_n = χ_{n+1} + χ_{n−1}`. The
//! Segal-Bargmann transform is unitary and maps χ_n to the n-th holomorphic
//! basis vector, so ground-state coefficients can be paired directly with
//! the vertex projections of [`crate::costrat`].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costrat::{tunneling_overlap, vertex_projection, StratumProjection, TruncatedHilbert};
use crate::liecore::{HaarRule, Mat2, Sign};
use crate::linalg::symmetric_eigen;
use crate::quasichar::{invariant_basis, FunctionVector};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Cutoff difference used for the convergence check.
pub const CONVERGENCE_STEP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub lambda: f64,
    pub delta: f64,
    pub hbar: f64,
    pub beta: f64,
    pub n_max: usize,
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.lambda) && positive(self.delta) && positive(self.hbar) && positive(self.beta)) {
            return Err(Error::InvalidInput(format!("lambda, delta, hbar and beta must be positive, got {self:?}")));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidInput(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        Ok(())
    }

    /// `s = ħβ²`.
    pub fn s(&self) -> f64 {
        self.hbar * self.beta * self.beta
    }

    fn with_cutoff(&self, n_max: usize) -> Self {
        Self { n_max, ..*self }
    }
}

/// Casimir eigenvalue on χ_n.
pub fn casimir(n: usize, beta: f64) -> f64 {
    (n * (n + 2)) as f64 / (2.0 * beta)
}

/// `tr(a)` as an operator on span{χ_0 … χ_{n_max}}.
pub fn trace_operator(n_max: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |m, n| if m.abs_diff(n) == 1 { 1.0 } else { 0.0 })
}

pub fn electric_part(params: &HamiltonianParams) -> DMatrix<f64> {
    let c = params.lambda * params.lambda / (2.0 * params.delta) * params.hbar * params.hbar;
    DMatrix::from_diagonal(&nalgebra::DVector::from_fn(params.n_max + 1, |n, _| c * casimir(n, params.beta)))
}

pub fn magnetic_part(params: &HamiltonianParams) -> DMatrix<f64> {
    trace_operator(params.n_max) * (-2.0 / (params.lambda * params.lambda * params.delta))
}

pub fn build_hamiltonian(params: &HamiltonianParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    Ok(electric_part(params) + magnetic_part(params))
}

/// `⟨χ_m, tr·χ_n⟩` computed by Haar quadrature from the basis functions.
///
/// Nodes sharing the diagonal entry α lie in one conjugacy class, so the
/// class functions are evaluated once per class with the weights summed.
pub fn trace_operator_by_quadrature(n_max: usize) -> Result<DMatrix<f64>> {
    let basis = invariant_basis(1, n_max as u32, 1.0, 1.0)?;
    let rule = HaarRule::new(2 * n_max + 1)?;
    let mut classes: Vec<(Mat2, f64)> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (g, w) in rule.nodes() {
        let key = (g[(0, 0)].re.to_bits(), g[(0, 0)].im.to_bits());
        let k = *index.entry(key).or_insert_with(|| {
            classes.push((*g, 0.0));
            classes.len() - 1
        });
        classes[k].1 += w;
    }
    let d = n_max + 1;
    let mut acc = CMatrix::zeros(d, d);
    for (g, w) in &classes {
        let chi = CVector::from_vec(basis.evaluate_all(&[*g])?);
        let tr = g[(0, 0)] + g[(1, 1)];
        acc += (chi.map(|z| z.conj()) * chi.transpose()) * (tr * *w);
    }
    Ok(acc.map(|z| z.re))
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub params: HamiltonianParams,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Normalized, with nonnegative coefficient sum.
    pub ground_state: FunctionVector,
    /// `|E_0(n_max) − E_0(n_max − 5)|`.
    pub convergence_shift: f64,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn lowest(params: &HamiltonianParams) -> Result<(Vec<f64>, nalgebra::DVector<f64>)> {
    let (values, vectors) = symmetric_eigen(&build_hamiltonian(params)?);
    let mut v = vectors.column(0).into_owned();
    if v.sum() < 0.0 {
        v.neg_mut();
    }
    Ok((values, v))
}

/// Spectrum and ground state without the convergence check.
pub fn solve(params: &HamiltonianParams) -> Result<SpectrumResult> {
    let (eigenvalues, v) = lowest(params)?;
    let convergence_shift = if params.n_max >= CONVERGENCE_STEP + 2 {
        let (coarse, _) = lowest(&params.with_cutoff(params.n_max - CONVERGENCE_STEP))?;
        (eigenvalues[0] - coarse[0]).abs()
    } else {
        f64::INFINITY
    };
    Ok(SpectrumResult {
        params: *params,
        eigenvalues,
        ground_state: FunctionVector::new(v.map(|x| C64::new(x, 0.0))),
        convergence_shift,
    })
}

/// Ground state, failing with `NotConverged` when the shift exceeds `conv_tol`.
pub fn ground_state(params: &HamiltonianParams, conv_tol: f64) -> Result<SpectrumResult> {
    let result = solve(params)?;
    if !(result.convergence_shift <= conv_tol) {
        return Err(Error::NotConverged { shift: result.convergence_shift, tol: conv_tol });
    }
    Ok(result)
}

/// `⟨state, p state⟩`, clamped to [0, 1].
pub fn localization_probability(state: &FunctionVector, proj: &StratumProjection) -> Result<f64> {
    if proj.p.nrows() != state.len() {
        return Err(Error::DimensionMismatch { expected: proj.p.nrows(), actual: state.len() });
    }
    let v = &state.coefficients;
    Ok(v.dotc(&(&proj.p * v)).re.clamp(0.0, 1.0))
}

/// The N = 1 holomorphic truncation matching a Hamiltonian cutoff.
pub fn single_plaquette_hilbert(n_max: usize, hbar: f64, beta: f64) -> Result<TruncatedHilbert> {
    Ok(TruncatedHilbert::new(&invariant_basis(1, n_max as u32, hbar, beta)?))
}

/// `Σ_{m≥1} (−1)^{m−1} m² e^{−s m²} / Σ_{m≥1} m² e^{−s m²}` over `m ≤ terms`.
pub fn overlap_series(s: f64, terms: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for m in 1..=terms {
        let x = (m * m) as f64 * (-s * (m * m) as f64).exp();
        num += if m % 2 == 1 { x } else { -x };
        den += x;
    }
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub delta: f64,
    pub hbar: f64,
    pub beta: f64,
    pub s: f64,
    pub ground_energy: f64,
    pub localization_plus: f64,
    pub localization_minus: f64,
    pub overlap: f64,
    pub n_max: usize,
    pub convergence_shift: f64,
}

impl ScanRow {
    pub fn converged(&self, conv_tol: f64) -> bool {
        self.convergence_shift <= conv_tol
    }
}

/// Ground-state localization over a coupling grid at fixed δ, ħ, β, n_max.
///
/// Rows are returned for every grid point; rows with a convergence shift
/// above tolerance are the caller's to flag.
pub fn coupling_scan(base: &HamiltonianParams, lambdas: &[f64]) -> Result<Vec<ScanRow>> {
    base.validate()?;
    let h = single_plaquette_hilbert(base.n_max, base.hbar, base.beta)?;
    let p_plus = vertex_projection(&h, &[Sign::Plus])?;
    let p_minus = vertex_projection(&h, &[Sign::Minus])?;
    let overlap = tunneling_overlap(&h, &[Sign::Plus], &[Sign::Minus])?.re;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let params = HamiltonianParams { lambda, ..*base };
            let r = solve(&params)?;
            Ok(ScanRow {
                lambda,
                delta: params.delta,
                hbar: params.hbar,
                beta: params.beta,
                s: params.s(),
                ground_energy: r.ground_energy(),
                localization_plus: localization_probability(&r.ground_state, &p_plus)?,
                localization_minus: localization_probability(&r.ground_state, &p_minus)?,
                overlap,
                n_max: params.n_max,
                convergence_shift: r.convergence_shift,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub s: f64,
    pub overlap: f64,
    pub series: f64,
    pub n_max: usize,
}

/// Normalized overlap ⟨ψ_+, ψ_−⟩ over a grid of s = ħβ² (β = 1).
pub fn hbar_scan(s_grid: &[f64], n_max: usize) -> Result<Vec<OverlapRow>> {
    s_grid
        .par_iter()
        .map(|&s| {
            let h = single_plaquette_hilbert(n_max, s, 1.0)?;
            let overlap = tunneling_overlap(&h, &[Sign::Plus], &[Sign::Minus])?.re;
            Ok(OverlapRow { s, overlap, series: overlap_series(s, n_max + 1), n_max })
        })
        .collect()
}

/// `n` points spaced logarithmically from `a` to `b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64) -> HamiltonianParams {
        HamiltonianParams { lambda, delta: 1.0, hbar: 0.1, beta: 1.0, n_max: 60 }
    }

    #[test]
    fn trace_operator_matches_quadrature() {
        let q = trace_operator_by_quadrature(20).unwrap();
        assert!((q - trace_operator(20)).amax() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_symmetric_tridiagonal() {
        let h = build_hamiltonian(&params(1.3)).unwrap();
        assert_eq!(h, h.transpose());
        assert!((h[(0, 1)] + 2.0 / 1.69).abs() < 1e-15);
        assert!((h[(3, 3)] - 1.69 / 2.0 * 0.01 * 7.5).abs() < 1e-15);
        assert_eq!(h[(0, 2)], 0.0);
        assert!(HamiltonianParams { n_max: 1, ..params(1.0) }.validate().is_err());
        assert!(HamiltonianParams { lambda: -1.0, ..params(1.0) }.validate().is_err());
    }

    #[test]
    fn ground_state_oracle_values() {
        // Frozen from an independent dense eigensolve.
        let expected =
            [(0.5, -15.78868847289513), (1.0, -3.7911523579244157), (1.5848931924611136, -1.3885589480983969)];
        for (lambda, e) in expected {
            let r = ground_state(&params(lambda), 1e-8).unwrap();
            assert!((r.ground_energy() - e).abs() < 1e-11, "{lambda}: {}", r.ground_energy());
            assert!((r.ground_state.norm() - 1.0).abs() < 1e-12);
            assert!(r.ground_state.coefficients.iter().all(|c| c.re > 0.0));
            assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn strong_coupling_limit_and_variational_bound() {
        let r = ground_state(&params(200.0), 1e-8).unwrap();
        assert!((r.ground_state.coefficients[0].re - 1.0).abs() < 1e-8);
        assert!(r.ground_energy() <= 0.0);
        let weak = solve(&params(0.1)).unwrap();
        assert!(matches!(ground_state(&params(0.1), 1e-8), Err(Error::NotConverged { .. })));
        assert!(weak.convergence_shift > 1e-8);
    }

    #[test]
    fn localization_scan_reaches_the_vertex() {
        let rows = coupling_scan(&params(1.0), &log_grid(0.5, 10.0, 14)).unwrap();
        let best = rows.iter().map(|r| r.localization_plus).fold(0.0, f64::max);
        assert!(best > 0.9);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.localization_minus)));
        assert!(rows.windows(2).all(|w| w[0].ground_energy < w[1].ground_energy));
        let at_peak = coupling_scan(&params(1.0), &[1.5848931924611136]).unwrap();
        assert!((at_peak[0].localization_plus - 0.99629).abs() < 1e-5);
    }

    #[test]
    fn overlap_matches_series() {
        for row in hbar_scan(&[1.0, 0.5, 0.2, 0.1], 60).unwrap() {
            assert!((row.overlap - row.series).abs() < 1e-10);
        }
    }
}
