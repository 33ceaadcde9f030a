//! Small dense linear-algebra helpers on top of nalgebra.
//!
//! Rank decisions are always made on singular values relative to the largest
//! one, never on eigenvalues of a Gram matrix.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, CVector, C64};

/// Hilbert-Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Orthonormal basis (as columns) of the column space of `m`.
///
/// Singular values at or below `rel_tol * sigma_max` are treated as zero.
pub fn column_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> =
        svd.singular_values.iter().enumerate().filter(|(_, &s)| s > rel_tol * smax).map(|(i, _)| i).collect();
    CMatrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the kernel of `m`.
///
/// Singular values at or below `rel_tol * sigma_max` are treated as zero.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    kernel_below(m, |smax| rel_tol * smax)
}

/// Kernel of `m` with singular values at or below `abs_tol` treated as zero.
pub fn null_space_abs(m: &CMatrix, abs_tol: f64) -> CMatrix {
    kernel_below(m, |_| abs_tol)
}

fn kernel_below(m: &CMatrix, cutoff: impl Fn(f64) -> f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return CMatrix::identity(cols, cols);
    }
    // nalgebra returns a thin V; pad wide inputs so that V is square and
    // compress tall ones to their R factor, which has the same kernel.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else if rows > cols {
        m.clone().qr().r()
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = cutoff(smax);
    let kernel: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= threshold)
        .map(|(i, _)| i)
        .collect();
    CMatrix::from_fn(cols, kernel.len(), |r, c| v_t[(kernel[c], r)].conj())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Orthogonal projector `U U†` onto the span of orthonormal columns `u`.
pub fn projector(u: &CMatrix) -> CMatrix {
    u * u.adjoint()
}

/// Orthogonal complement of the orthonormal columns `u` inside ℂⁿ.
pub fn complement(u: &CMatrix, rel_tol: f64) -> CMatrix {
    let n = u.nrows();
    if u.ncols() == 0 {
        return CMatrix::identity(n, n);
    }
    null_space(&u.adjoint(), rel_tol)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// `‖p² − p‖ + ‖p − p†‖` in Frobenius norm.
pub fn projection_defect(p: &CMatrix) -> f64 {
    (p * p - p).norm() + (p - p.adjoint()).norm()
}

/// Flattens a matrix row-major into a vector.
pub fn flatten(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`flatten`].
pub fn unflatten(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| v[r * cols + c])
}

/// Hilbert-Schmidt orthonormal basis of the span of `mats`.
pub fn orthonormal_span(mats: &[CMatrix], rows: usize, cols: usize, rel_tol: f64) -> Vec<CMatrix> {
    if mats.is_empty() {
        return Vec::new();
    }
    let stacked = CMatrix::from_fn(rows * cols, mats.len(), |k, j| mats[j][(k / cols, k % cols)]);
    let basis = column_space(&stacked, rel_tol);
    (0..basis.ncols()).map(|j| unflatten(&basis.column(j).into_owned(), rows, cols)).collect()
}

/// Distance of `m` from the span of a Hilbert-Schmidt orthonormal family.
pub fn distance_to_span(basis: &[CMatrix], m: &CMatrix) -> f64 {
    let mut residual = m.clone();
    for b in basis {
        let c = hs_inner(b, m);
        residual -= b * c;
    }
    residual.norm()
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real matrix promoted to complex.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Real vector promoted to complex.
pub fn complexify_vector(v: &DVector<f64>) -> CVector {
    v.map(|x| C64::new(x, 0.0))
}

/// `[re, im]` pairs.
pub fn to_pairs<'a>(values: impl Iterator<Item = &'a C64>) -> Vec<[f64; 2]> {
    values.map(|z| [z.re, z.im]).collect()
}

/// Entries in row-major order as `[re, im]` pairs.
pub fn row_major(m: &CMatrix) -> Vec<[f64; 2]> {
    to_pairs(m.transpose().iter())
}
