//! Haar sampling and exact Haar quadrature on SU(2) and SU(2)^N.
//!
//! Quadrature uses Euler-type coordinates on S³ ≅ SU(2):
//!
//! ```text
//! g = [[α, −β̄], [β, ᾱ]],  α = √(1−u)·e^{iφ},  β = √u·e^{iψ}
//! ```
//!
//! in which the normalized Haar measure is `du dφ dψ / (4π²)` on
//! `[0,1] × [0,2π)²`. A polynomial of degree `d` in the matrix entries and
//! their conjugates has angular frequencies at most `d`, integrated exactly by
//! the `d+1`-point trapezoid rule, and after angular averaging is a polynomial
//! of degree at most `d/2` in `u`, integrated exactly by Gauss-Legendre with
//! `⌊d/4⌋ + 1` nodes.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{GroupElement, Mat2};
use crate::{Error, Result, C64};

/// Largest polynomial degree accepted by [`HaarRule::new`].
pub const MAX_QUADRATURE_DEGREE: usize = 256;

/// Nodes per parallel work item; fixed so sums do not depend on thread count.
const CHUNK: usize = 2048;

/// Haar-uniform sample: a normalized Gaussian quaternion.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    GroupElement::from_quaternion(q)
}

/// Product quadrature rule on SU(2), exact up to a polynomial degree.
#[derive(Debug, Clone)]
pub struct HaarRule {
    degree: usize,
    nodes: Vec<(Mat2, f64)>,
}

impl HaarRule {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_QUADRATURE_DEGREE {
            return Err(Error::DegreeExceeded { requested: degree, max: MAX_QUADRATURE_DEGREE });
        }
        if degree == 0 {
            return Ok(Self { degree, nodes: vec![(Mat2::identity(), 1.0)] });
        }
        let n_u = degree / 4 + 1;
        let n_angle = degree + 1;
        let gl = GaussLegendre::new(NonZeroUsize::new(n_u).expect("at least one node"));
        let mut nodes = Vec::with_capacity(n_u * n_angle * n_angle);
        for &(x, w) in gl.as_node_weight_pairs() {
            let u = 0.5 * (x + 1.0);
            let (ca, cb) = ((1.0 - u).sqrt(), u.sqrt());
            let weight = 0.5 * w / (n_angle * n_angle) as f64;
            for i in 0..n_angle {
                let alpha = C64::from_polar(ca, 2.0 * PI * i as f64 / n_angle as f64);
                for j in 0..n_angle {
                    let beta = C64::from_polar(cb, 2.0 * PI * j as f64 / n_angle as f64);
                    nodes.push((Mat2::new(alpha, -beta.conj(), beta, alpha.conj()), weight));
                }
            }
        }
        Ok(Self { degree, nodes })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[(Mat2, f64)] {
        &self.nodes
    }

    pub fn integrate<F: FnMut(&Mat2) -> C64>(&self, mut f: F) -> C64 {
        self.nodes.iter().map(|(g, w)| f(g) * *w).sum()
    }
}

/// `∫ f dg` over SU(2), exact for polynomial integrands of degree ≤ `degree`.
pub fn haar_quadrature<F: FnMut(&Mat2) -> C64>(f: F, degree: usize) -> Result<C64> {
    Ok(HaarRule::new(degree)?.integrate(f))
}

/// Tensor product of per-copy rules on SU(2)^N.
#[derive(Debug, Clone)]
pub struct ProductRule {
    rules: Vec<HaarRule>,
}

impl ProductRule {
    /// One rule per copy, exact to the given per-copy degrees.
    pub fn new(degrees: &[usize]) -> Result<Self> {
        Ok(Self { rules: degrees.iter().map(|&d| HaarRule::new(d)).collect::<Result<_>>()? })
    }

    pub fn copies(&self) -> usize {
        self.rules.len()
    }

    pub fn len(&self) -> usize {
        self.rules.iter().map(|r| r.nodes.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn node(&self, mut index: usize, points: &mut [Mat2]) -> f64 {
        let mut weight = 1.0;
        for (slot, rule) in points.iter_mut().zip(&self.rules).rev() {
            let (g, w) = rule.nodes[index % rule.nodes.len()];
            index /= rule.nodes.len();
            *slot = g;
            weight *= w;
        }
        weight
    }

    /// Integrates `len` functions at once; `f(points, values)` fills `values`.
    ///
    /// Runs in parallel over fixed-size chunks of nodes and combines chunk
    /// sums in order, so the result is independent of the worker count.
    pub fn integrate_many<F>(&self, len: usize, f: F) -> Vec<C64>
    where
        F: Fn(&[Mat2], &mut [C64]) + Sync,
    {
        let total = self.len();
        let chunks: Vec<Vec<C64>> = (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let mut acc = vec![C64::new(0.0, 0.0); len];
                let mut values = vec![C64::new(0.0, 0.0); len];
                let mut points = vec![Mat2::identity(); self.copies()];
                for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                    let w = self.node(index, &mut points);
                    values.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    f(&points, &mut values);
                    for (a, v) in acc.iter_mut().zip(&values) {
                        *a += v * w;
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); len];
        for chunk in chunks {
            for (o, v) in out.iter_mut().zip(chunk) {
                *o += v;
            }
        }
        out
    }

    pub fn integrate<F>(&self, f: F) -> C64
    where
        F: Fn(&[Mat2]) -> C64 + Sync,
    {
        self.integrate_many(1, |p, out| out[0] = f(p))[0]
    }
}
