use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by all modules.
///
/// Every field can be overridden from a run configuration; unspecified
/// fields keep their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Unitarity, determinant and equivariance checks on 2×2 matrices.
    pub unit: f64,
    /// Round trips through the polar map.
    pub round: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Gram matrix deviation from the identity.
    pub gram: f64,
    /// Vanishing of functions at sampled stratum points.
    pub eval: f64,
    /// Relative truncation loss above which a constraint product is excluded.
    pub loss: f64,
    /// Orbit-type classification band.
    pub classify: f64,
    /// Allowed ground-energy shift between cutoffs `n_max` and `n_max - 5`.
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit: 1e-12,
            round: 1e-10,
            rank: 1e-10,
            gram: 1e-9,
            eval: 1e-8,
            loss: 1e-6,
            classify: 1e-9,
            convergence: 1e-8,
        }
    }
}
