//! Small dense linear-algebra helpers shared by the numerical modules.
//!
//! Singular value and symmetric eigen decompositions are done by Jacobi
//! rotations here: the QR-iteration routines in nalgebra 0.33 return
//! inaccurate factors on strongly clustered spectra, which the modular
//! computations hit routinely.

use nalgebra::{DMatrix, DVector};

/// Thin singular value decomposition `a = u diag(s) v^T` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m x k` with `k = min(m, n)`.
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    /// `n x k`.
    pub v: DMatrix<f64>,
}

/// One-sided Jacobi on the triangular factor of a Householder QR.
pub fn svd(a: &DMatrix<f64>) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    if n == 0 {
        return Svd {
            u: DMatrix::zeros(m, 0),
            s: DVector::zeros(0),
            v: DMatrix::zeros(0, 0),
        };
    }
    let qr = a.clone().qr();
    let q = qr.q();
    let mut w = qr.r();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for r in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(r).norm_squared();
                let gamma = w.column(p).dot(&w.column(r));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                rotate_columns(&mut w, p, r, c, c * t);
                rotate_columns(&mut v, p, r, c, c * t);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(n, n);
    let mut vs = DMatrix::zeros(n, n);
    let mut s = DVector::zeros(n);
    for (k, &j) in order.iter().enumerate() {
        s[k] = norms[j];
        if norms[j] > 0.0 {
            u.set_column(k, &(w.column(j) / norms[j]));
        }
        vs.set_column(k, &v.column(j));
    }
    complete_orthonormal(&mut u, &s);
    Svd { u: q * u, s, v: vs }
}

/// `(a, b) -> (c a - s b, s a + c b)` on columns `p`, `r`.
fn rotate_columns(m: &mut DMatrix<f64>, p: usize, r: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let a = m[(i, p)];
        let b = m[(i, r)];
        m[(i, p)] = c * a - s * b;
        m[(i, r)] = s * a + c * b;
    }
}

fn rotate_rows(m: &mut DMatrix<f64>, p: usize, r: usize, c: f64, s: f64) {
    for j in 0..m.ncols() {
        let a = m[(p, j)];
        let b = m[(r, j)];
        m[(p, j)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}

/// Fills the columns of `u` that belong to negligible singular values with an
/// orthonormal completion of the remaining ones.
fn complete_orthonormal(u: &mut DMatrix<f64>, s: &DVector<f64>) {
    let n = u.ncols();
    let smax = s.iter().fold(0.0f64, |a, b| a.max(*b));
    let tiny = |k: usize| s[k] <= 1e-13 * smax || s[k] == 0.0;
    for k in (0..n).filter(|&k| tiny(k)) {
        for e in 0..u.nrows() {
            let mut cand = DVector::<f64>::zeros(u.nrows());
            cand[e] = 1.0;
            for j in (0..n).filter(|&j| j != k && (j < k || !tiny(j))) {
                let col = u.column(j).into_owned();
                cand -= &col * col.dot(&cand);
            }
            let nrm = cand.norm();
            if nrm > 0.5 {
                u.set_column(k, &(cand / nrm));
                break;
            }
        }
    }
}

pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    svd(a).s
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a symmetric
/// matrix by the cyclic Jacobi method.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = (f64::EPSILON * a.norm()).powi(2);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &v.column(i));
    }
    (vals, vecs)
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `tol * max(1, s_max)`.
pub fn pinv(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = svd(a);
    let cut = tol * d.s.iter().fold(1.0f64, |x, y| x.max(*y));
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for k in 0..d.s.len() {
        if d.s[k] > cut {
            out += d.v.column(k) * d.u.column(k).transpose() / d.s[k];
        }
    }
    out
}

/// Orthonormal basis (as columns) of the null space of `m`, treating singular
/// values below `tol * max(1, |m|)` as zero.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to a square-or-tall matrix so that the SVD exposes all right singular vectors.
    let a = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let scale = a.norm().max(1.0);
    let d = svd(&a);
    let picked: Vec<DVector<f64>> = d
        .s
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol * scale)
        .map(|(i, _)| d.v.column(i).into_owned())
        .collect();
    if picked.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&picked)
    }
}

pub fn nullity(m: &DMatrix<f64>, tol: f64) -> usize {
    null_space(m, tol).ncols()
}

/// Numerical rank with the same relative threshold as [`null_space`].
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let scale = m.norm().max(1.0);
    singular_values(m).iter().filter(|s| **s > tol * scale).count()
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_span(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let scale = m.norm().max(1.0);
    let d = svd(m);
    let picked: Vec<DVector<f64>> = d
        .s
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol * scale)
        .map(|(i, _)| d.u.column(i).into_owned())
        .collect();
    if picked.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&picked)
    }
}

/// Orthonormal basis of the orthogonal complement of the column span of `m`.
pub fn orthogonal_complement(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    null_space(&m.transpose(), tol)
}

/// Orthogonal projector onto the column span of an orthonormal basis.
pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}

/// Spectral norm.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Flattens a matrix row by row.
pub fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.transpose().iter().copied())
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}
