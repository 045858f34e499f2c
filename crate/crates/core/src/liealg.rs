//! Real matrix Lie algebras with a fixed basis: adjoint matrices, Euler
//! elements and their 3-gradings, Euler involutions, the Killing form and
//! generated subalgebras.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{commutator, flatten, null_space, nullity, orthonormal_span};

/// Eigenvalue snapping tolerance for spectral tests.
pub const EIGEN_TOL: f64 = 1e-8;
/// Residual allowed when expanding a matrix in an algebra basis.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("unsupported algebra `{0}`")]
    Unsupported(String),
    #[error("invalid parameters for {name}: {reason}")]
    InvalidParams { name: String, reason: String },
    #[error("matrix is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("element is not an Euler element")]
    NotEuler,
    #[error("basis is not closed under the bracket (residual {residual:.3e})")]
    NotClosed { residual: f64 },
}

pub type LieElement = DMatrix<f64>;

/// A real Lie algebra of `n x n` matrices with a chosen basis.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    pub name: String,
    pub n: usize,
    pub basis: Vec<DMatrix<f64>>,
    /// Left inverse of the flattened basis; maps a flattened matrix to coordinates.
    coord_map: DMatrix<f64>,
    /// `structure[i]` is the matrix of `ad(basis[i])`.
    structure: Vec<DMatrix<f64>>,
}

fn e(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

fn invalid(name: &str, reason: &str) -> LieError {
    LieError::InvalidParams {
        name: name.into(),
        reason: reason.into(),
    }
}

impl MatrixLieAlgebra {
    /// Builds an algebra from a basis, checking independence and bracket closure.
    pub fn from_basis(name: impl Into<String>, basis: Vec<DMatrix<f64>>) -> Result<Self, LieError> {
        let name = name.into();
        let n = basis.first().map(|b| b.nrows()).unwrap_or(0);
        let flat_cols: Vec<DVector<f64>> = basis.iter().map(flatten).collect();
        let flat = if flat_cols.is_empty() {
            DMatrix::zeros(n * n, 0)
        } else {
            DMatrix::from_columns(&flat_cols)
        };
        let coord_map = if basis.is_empty() {
            DMatrix::zeros(0, n * n)
        } else {
            crate::numeric::pinv(&flat, 1e-12)
        };
        let mut alg = MatrixLieAlgebra {
            name,
            n,
            basis,
            coord_map,
            structure: Vec::new(),
        };
        if crate::numeric::rank(&flat, 1e-12) != alg.basis.len() {
            return Err(invalid(&alg.name, "basis is linearly dependent"));
        }
        let mut structure = Vec::with_capacity(alg.dim());
        for i in 0..alg.dim() {
            let mut ad = DMatrix::zeros(alg.dim(), alg.dim());
            for j in 0..alg.dim() {
                let br = commutator(&alg.basis[i], &alg.basis[j]);
                let (c, res) = alg.coords_with_residual(&br);
                if res > MEMBERSHIP_TOL * br.norm().max(1.0) {
                    return Err(LieError::NotClosed { residual: res });
                }
                ad.set_column(j, &c);
            }
            structure.push(ad);
        }
        alg.structure = structure;
        Ok(alg)
    }

    pub fn sl(n: usize) -> Result<Self, LieError> {
        if n < 2 {
            return Err(invalid("sl", "n must be at least 2"));
        }
        let mut basis = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    basis.push(e(n, i, j));
                }
            }
        }
        for i in 0..n - 1 {
            basis.push(e(n, i, i) - e(n, i + 1, i + 1));
        }
        Self::from_basis(format!("sl({n},R)"), basis)
    }

    pub fn gl(n: usize) -> Result<Self, LieError> {
        if n < 1 {
            return Err(invalid("gl", "n must be at least 1"));
        }
        let mut basis = Vec::new();
        for i in 0..n {
            for j in 0..n {
                basis.push(e(n, i, j));
            }
        }
        Self::from_basis(format!("gl({n},R)"), basis)
    }

    /// `so(p,q)` for the diagonal metric with `p` plus signs followed by `q` minus signs.
    pub fn so(p: usize, q: usize) -> Result<Self, LieError> {
        if p + q < 2 {
            return Err(invalid("so", "p + q must be at least 2"));
        }
        let n = p + q;
        let eta = |i: usize| if i < p { 1.0 } else { -1.0 };
        let mut basis = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(e(n, i, j) * eta(j) - e(n, j, i) * eta(i));
            }
        }
        Self::from_basis(format!("so({p},{q})"), basis)
    }

    /// `sp(2n,R)` in block form `[[A, B], [C, -A^T]]` with `B`, `C` symmetric.
    pub fn sp(n: usize) -> Result<Self, LieError> {
        if n < 1 {
            return Err(invalid("sp", "n must be at least 1"));
        }
        let m = 2 * n;
        let mut basis = Vec::new();
        for i in 0..n {
            for j in 0..n {
                basis.push(e(m, i, j) - e(m, n + j, n + i));
            }
        }
        for i in 0..n {
            for j in i..n {
                let b = if i == j {
                    e(m, i, n + i)
                } else {
                    e(m, i, n + j) + e(m, j, n + i)
                };
                basis.push(b);
                let c = if i == j {
                    e(m, n + i, i)
                } else {
                    e(m, n + i, j) + e(m, n + j, i)
                };
                basis.push(c);
            }
        }
        Self::from_basis(format!("sp({m},R)"), basis)
    }

    /// The affine algebra of the line, as matrices `[[a, b], [0, 0]]`.
    pub fn aff() -> Self {
        Self::from_basis("aff(R)", vec![e(2, 0, 0), e(2, 0, 1)]).expect("aff is a Lie algebra")
    }

    /// The 3-dimensional Heisenberg algebra of strictly upper triangular matrices.
    pub fn heisenberg() -> Self {
        Self::from_basis("heis(3)", vec![e(3, 0, 1), e(3, 1, 2), e(3, 0, 2)])
            .expect("heisenberg is a Lie algebra")
    }

    /// The Poincare algebra of `R^{1,d}` as affine `(d+2) x (d+2)` matrices.
    pub fn poincare(d: usize) -> Result<Self, LieError> {
        if d < 1 {
            return Err(invalid("poincare", "d must be at least 1"));
        }
        let n = d + 1;
        let m = n + 1;
        let eta = |i: usize| if i == 0 { 1.0 } else { -1.0 };
        let mut basis = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(e(m, i, j) * eta(j) - e(m, j, i) * eta(i));
            }
        }
        for i in 0..n {
            basis.push(e(m, i, n));
        }
        Self::from_basis(format!("poincare(1,{d})"), basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coords_with_residual(&self, x: &DMatrix<f64>) -> (DVector<f64>, f64) {
        let f = flatten(x);
        let c = &self.coord_map * &f;
        let back = self.element(&c);
        let res = (back - x).norm();
        (c, res)
    }

    /// Coordinates of `x` in the basis; fails if `x` is not in the span.
    pub fn coords(&self, x: &DMatrix<f64>) -> Result<DVector<f64>, LieError> {
        if x.nrows() != self.n || x.ncols() != self.n {
            return Err(LieError::NotInAlgebra {
                residual: f64::INFINITY,
            });
        }
        let (c, res) = self.coords_with_residual(x);
        if res > MEMBERSHIP_TOL * x.norm().max(1.0) {
            return Err(LieError::NotInAlgebra { residual: res });
        }
        Ok(c)
    }

    pub fn contains(&self, x: &DMatrix<f64>) -> bool {
        self.coords(x).is_ok()
    }

    pub fn element(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (b, ci) in self.basis.iter().zip(c.iter()) {
            m += b * *ci;
        }
        m
    }

    pub fn bracket(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        commutator(a, b)
    }

    /// Matrix of `ad x`; column `j` holds the coordinates of `[x, b_j]`.
    pub fn ad_matrix(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LieError> {
        let c = self.coords(x)?;
        Ok(self.ad_of_coords(&c))
    }

    pub fn ad_of_coords(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut ad = DMatrix::zeros(d, d);
        for (s, ci) in self.structure.iter().zip(c.iter()) {
            ad += s * *ci;
        }
        ad
    }

    fn shifted(ad: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
        ad - DMatrix::identity(ad.nrows(), ad.ncols()) * lambda
    }

    /// `ad x` is nonzero, diagonalizable over the reals and has spectrum in `{-1, 0, 1}`.
    pub fn is_euler(&self, x: &DMatrix<f64>) -> bool {
        let Ok(ad) = self.ad_matrix(x) else {
            return false;
        };
        if ad.norm() <= EIGEN_TOL {
            return false;
        }
        let total: usize = [-1.0, 0.0, 1.0]
            .iter()
            .map(|&l| nullity(&Self::shifted(&ad, l), EIGEN_TOL))
            .sum();
        total == self.dim()
    }

    /// `ad x` is diagonalizable with real spectrum.
    pub fn is_hyperbolic(&self, x: &DMatrix<f64>) -> Result<bool, LieError> {
        let ad = self.ad_matrix(x)?;
        let eig = ad.complex_eigenvalues();
        let scale = ad.norm().max(1.0);
        if eig.iter().any(|z| z.im.abs() > 1e-7 * scale) {
            return Ok(false);
        }
        let mut vals: Vec<f64> = eig.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let mut distinct: Vec<f64> = Vec::new();
        for v in vals {
            if distinct.last().is_none_or(|l| (v - l).abs() > 1e-6 * scale) {
                distinct.push(v);
            }
        }
        let total: usize = distinct
            .iter()
            .map(|&l| nullity(&Self::shifted(&ad, l), 1e-7))
            .sum();
        Ok(total == self.dim())
    }

    /// Eigenspace decomposition of an Euler element.
    pub fn grading(&self, x: &DMatrix<f64>) -> Result<Grading3, LieError> {
        if !self.is_euler(x) {
            return Err(LieError::NotEuler);
        }
        let ad = self.ad_matrix(x)?;
        Ok(Grading3 {
            plus: null_space(&Self::shifted(&ad, 1.0), EIGEN_TOL),
            zero: null_space(&ad, EIGEN_TOL),
            minus: null_space(&Self::shifted(&ad, -1.0), EIGEN_TOL),
        })
    }

    /// Coordinate matrix of the Euler involution: identity on `g_0`, minus identity on `g_{+-1}`.
    pub fn euler_involution(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LieError> {
        let g = self.grading(x)?;
        let d = self.dim();
        let mut p = DMatrix::zeros(d, d);
        let mut signs = Vec::with_capacity(d);
        let mut col = 0;
        for (block, s) in [(&g.plus, -1.0), (&g.zero, 1.0), (&g.minus, -1.0)] {
            for c in block.column_iter() {
                p.set_column(col, &c);
                signs.push(s);
                col += 1;
            }
        }
        let pinv = p.clone().try_inverse().ok_or(LieError::NotEuler)?;
        Ok(&p * DMatrix::from_diagonal(&DVector::from_vec(signs)) * pinv)
    }

    /// Applies the Euler involution of `x` to `y`.
    pub fn apply_euler_involution(
        &self,
        x: &DMatrix<f64>,
        y: &DMatrix<f64>,
    ) -> Result<DMatrix<f64>, LieError> {
        let s = self.euler_involution(x)?;
        let c = self.coords(y)?;
        Ok(self.element(&(s * c)))
    }

    /// `sigma_h(x) = -x` for Euler elements `h` and `x`.
    pub fn is_orthogonal_pair(&self, h: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<bool, LieError> {
        if !self.is_euler(h) || !self.is_euler(x) {
            return Err(LieError::NotEuler);
        }
        let img = self.apply_euler_involution(h, x)?;
        Ok((img + x).norm() < EIGEN_TOL * x.norm().max(1.0))
    }

    pub fn killing_form(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64, LieError> {
        let ax = self.ad_matrix(x)?;
        let ay = self.ad_matrix(y)?;
        Ok((ax * ay).trace())
    }

    /// Gram matrix of the Killing form in the chosen basis.
    pub fn killing_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| (&self.structure[i] * &self.structure[j]).trace())
    }

    /// Numbers of positive, negative and zero eigenvalues of the Killing form.
    pub fn killing_signature(&self) -> (usize, usize, usize) {
        let k = self.killing_matrix();
        let scale = k.norm().max(1.0);
        let (eigenvalues, _) = crate::numeric::sym_eigen(&k);
        let mut sig = (0, 0, 0);
        for v in eigenvalues.iter() {
            if *v > 1e-9 * scale {
                sig.0 += 1;
            } else if *v < -1e-9 * scale {
                sig.1 += 1;
            } else {
                sig.2 += 1;
            }
        }
        sig
    }

    /// Smallest subalgebra containing the given elements, by iterated brackets.
    pub fn generated_subalgebra(&self, gens: &[DMatrix<f64>]) -> Result<MatrixLieAlgebra, LieError> {
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for g in gens {
            cols.push(self.coords(g)?);
        }
        let span = |cols: &[DVector<f64>]| -> DMatrix<f64> {
            if cols.is_empty() {
                DMatrix::zeros(self.dim(), 0)
            } else {
                orthonormal_span(&DMatrix::from_columns(cols), 1e-9)
            }
        };
        let mut basis = span(&cols);
        loop {
            let current: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
            let mut all = current.clone();
            for a in &current {
                let ada = self.ad_of_coords(a);
                for b in &current {
                    all.push(&ada * b);
                }
            }
            let next = span(&all);
            if next.ncols() == basis.ncols() {
                break;
            }
            basis = next;
        }
        let mats: Vec<DMatrix<f64>> = basis
            .column_iter()
            .map(|c| self.element(&c.into_owned()))
            .collect();
        MatrixLieAlgebra::from_basis(format!("<{}>", self.name), mats)
    }

    /// Searches for `g` with `Ad(g) x = -x` using quarter turns in sl2 triples
    /// `(h, e, f)` with `e` in `g_1(x)` and `f` in `g_{-1}(x)`. Returns the
    /// ambient matrix of `g`, or `None` if nothing was found.
    pub fn numeric_symmetry_witness(
        &self,
        x: &DMatrix<f64>,
        attempts: usize,
        seed: u64,
    ) -> Result<Option<DMatrix<f64>>, LieError> {
        let grading = self.grading(x)?;
        if grading.plus.ncols() == 0 {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = -x;
        let scale = x.norm().max(1.0);
        let mut g = DMatrix::<f64>::identity(self.n, self.n);
        let mut best = (conj(&g, x) - &target).norm();
        for _ in 0..attempts {
            if best < 1e-6 * scale {
                break;
            }
            let ce: DVector<f64> = &grading.plus
                * DVector::from_fn(grading.plus.ncols(), |_, _| rng.gen_range(-1.0..1.0));
            let e_mat = self.element(&ce);
            let Some(f_mat) = self.complete_triple(&e_mat, &grading) else {
                continue;
            };
            let rot = ((&e_mat - &f_mat) * std::f64::consts::FRAC_PI_2).exp();
            let candidate = &rot * &g;
            let err = (conj(&candidate, x) - &target).norm();
            if err < best - 1e-12 {
                g = candidate;
                best = err;
            }
        }
        Ok(if best < 1e-6 * scale { Some(g) } else { None })
    }

    /// Finds `f` in `g_{-1}` with `[[e,f],e] = 2e` and `[[e,f],f] = -2f`.
    fn complete_triple(&self, e_mat: &DMatrix<f64>, grading: &Grading3) -> Option<DMatrix<f64>> {
        let k = grading.minus.ncols();
        if k == 0 {
            return None;
        }
        // The map f -> [[e,f],e] is linear in f; solve it in least squares.
        let cols: Vec<DVector<f64>> = (0..k)
            .map(|i| {
                let f = self.element(&grading.minus.column(i).into_owned());
                flatten(&commutator(&commutator(e_mat, &f), e_mat))
            })
            .collect();
        let a = DMatrix::from_columns(&cols);
        let rhs = flatten(&(e_mat * 2.0));
        let sol = crate::numeric::pinv(&a, 1e-10) * &rhs;
        if (&a * &sol - &rhs).norm() > 1e-8 * rhs.norm().max(1.0) {
            return None;
        }
        let f = self.element(&(&grading.minus * sol));
        let h = commutator(e_mat, &f);
        // Keep only the component of f in the -2 eigenspace of ad h.
        let adh = self.ad_matrix(&h).ok()?;
        let shifted = &adh + DMatrix::identity(self.dim(), self.dim()) * 2.0;
        let eig = null_space(&shifted, 1e-8);
        let cf = self.coords(&f).ok()?;
        let proj = &eig * (eig.transpose() * cf);
        let f2 = self.element(&proj);
        let ok = (commutator(&commutator(e_mat, &f2), &f2) + &f2 * 2.0).norm()
            < 1e-8 * f2.norm().max(1.0)
            && (commutator(e_mat, &f2) - &h).norm() < 1e-8 * h.norm().max(1.0);
        ok.then_some(f2)
    }
}

fn conj(g: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let gi = g.clone().try_inverse().expect("group elements are invertible");
    g * x * gi
}

/// Dimension 3 with Killing signature `(2, 1)`.
pub fn is_sl2_triple_algebra(sub: &MatrixLieAlgebra) -> bool {
    sub.dim() == 3 && sub.killing_signature() == (2, 1, 0)
}

/// Bases (as coordinate columns) of the eigenspaces `g_1`, `g_0`, `g_{-1}`.
#[derive(Debug, Clone)]
pub struct Grading3 {
    pub plus: DMatrix<f64>,
    pub zero: DMatrix<f64>,
    pub minus: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingDims {
    pub dim_plus: usize,
    pub dim_zero: usize,
    pub dim_minus: usize,
}

impl Grading3 {
    pub fn dims(&self) -> GradingDims {
        GradingDims {
            dim_plus: self.plus.ncols(),
            dim_zero: self.zero.ncols(),
            dim_minus: self.minus.ncols(),
        }
    }
}

/// Builds an algebra from a CLI-style name and parameter list.
pub fn make_algebra(name: &str, params: &[usize]) -> Result<MatrixLieAlgebra, LieError> {
    let need = |k: usize| -> Result<(), LieError> {
        if params.len() == k {
            Ok(())
        } else {
            Err(invalid(name, &format!("expected {k} parameter(s)")))
        }
    };
    match name.to_ascii_lowercase().as_str() {
        "sl" => {
            need(1)?;
            MatrixLieAlgebra::sl(params[0])
        }
        "gl" => {
            need(1)?;
            MatrixLieAlgebra::gl(params[0])
        }
        "so" => {
            need(2)?;
            if params[0] + params[1] < 3 {
                return Err(invalid(name, "p + q must be at least 3"));
            }
            MatrixLieAlgebra::so(params[0], params[1])
        }
        "sp" => {
            need(1)?;
            if params[0] < 2 || !params[0].is_multiple_of(2) {
                return Err(invalid(name, "sp takes an even matrix size 2n >= 2"));
            }
            MatrixLieAlgebra::sp(params[0] / 2)
        }
        "aff" => {
            need(0)?;
            Ok(MatrixLieAlgebra::aff())
        }
        "heis" | "heisenberg" => {
            need(0)?;
            Ok(MatrixLieAlgebra::heisenberg())
        }
        "poincare" => {
            need(1)?;
            MatrixLieAlgebra::poincare(params[0])
        }
        other => Err(LieError::Unsupported(other.to_string())),
    }
}

/// Standard Euler elements of the classical algebras.
pub mod euler {
    use nalgebra::DMatrix;

    /// `h_k = (1/n) diag((n-k) 1_k, -k 1_{n-k})` in `sl(n)`.
    pub fn sl_h(n: usize, k: usize) -> DMatrix<f64> {
        assert!(k >= 1 && k < n);
        let nf = n as f64;
        DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                0.0
            } else if i < k {
                (n - k) as f64 / nf
            } else {
                -(k as f64) / nf
            }
        })
    }

    /// The boost in the `(e_1, e_{p+1})` plane of `so(p,q)`.
    pub fn so_boost(p: usize, q: usize) -> DMatrix<f64> {
        assert!(p >= 1 && q >= 1);
        let mut m = DMatrix::zeros(p + q, p + q);
        m[(0, p)] = 1.0;
        m[(p, 0)] = 1.0;
        m
    }

    /// `h_n = diag(I, -I) / 2` in `sp(2n)`.
    pub fn sp_h(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i != j {
                0.0
            } else if i < n {
                0.5
            } else {
                -0.5
            }
        })
    }

    /// The split Euler element of `so(n,n)`, written for the diagonal metric.
    pub fn so_split_h(n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, n + i)] = 0.5;
            m[(n + i, i)] = 0.5;
        }
        m
    }

    pub fn sl2_h() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5])
    }

    pub fn sl2_e() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    pub fn sl2_f() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }
}
