//! Finite-dimensional standard subspaces, their Tomita data, and nets of
//! standard subspaces built from (anti-)unitary representations of graded
//! groups, with a test harness for the net axioms.
//!
//! A complex vector `v` in `C^n` is stored as the real vector `[Re v; Im v]`,
//! so real-linear maps are `2n x 2n` real matrices and multiplication by `i`
//! is the block matrix `[[0, -1], [1, 0]]`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numeric::{null_space, op_norm, orthogonal_complement, orthonormal_span, projector, sym_eigen};
use crate::wedgespace::{self, GradedGroupModel, GroupElement, Wedge};

pub type CMat = DMatrix<Complex64>;

/// Tolerance for the invariants of Tomita data.
pub const TOMITA_TOL: f64 = 1e-9;
/// Smallest admissible singular value when testing standardness.
pub const STANDARD_TOL: f64 = 1e-10;
/// Residual tolerance for representation identities and axioms.
pub const AXIOM_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("basis has {got} columns, expected {expected}")]
    WrongColumnCount { got: usize, expected: usize },
    #[error("subspace is not standard (defect {0:.3e})")]
    NotStandard(f64),
    #[error("J Delta J != Delta^-1 (residual {0:.3e})")]
    ModularRelation(f64),
    #[error("fixed space has dimension {got}, expected {expected}")]
    FixedSpace { got: usize, expected: usize },
    #[error("operator does not commute with the representation (residual {0:.3e})")]
    NotInCommutant(f64),
    #[error("J U(alpha) J != U(alpha)^-1 (residual {0:.3e})")]
    TwistCompatibility(f64),
    #[error("commutant is not invariant under J (residual {0:.3e})")]
    CommutantNotJInvariant(f64),
    #[error("no invertible intertwiner found")]
    NoIntertwiner,
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[[P, -Q], [Q, P]]` for `P + iQ`.
pub fn real_form(m: &CMat) -> DMatrix<f64> {
    let n = m.nrows();
    let k = m.ncols();
    let mut r = DMatrix::zeros(2 * n, 2 * k);
    for i in 0..n {
        for j in 0..k {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i, j + k)] = -z.im;
            r[(i + n, j)] = z.im;
            r[(i + n, j + k)] = z.re;
        }
    }
    r
}

/// Inverse of [`real_form`] for a complex-linear real matrix.
pub fn complex_form(r: &DMatrix<f64>) -> CMat {
    let n = r.nrows() / 2;
    let k = r.ncols() / 2;
    CMat::from_fn(n, k, |i, j| c(r[(i, j)], r[(i + n, j)]))
}

/// Multiplication by `i` on `R^{2n}`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    real_form(&CMat::from_diagonal_element(n, n, c(0.0, 1.0)))
}

fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

fn cnorm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn cop_norm(m: &CMat) -> f64 {
    op_norm(&real_form(m))
}

/// Relative residual `|a - b| / max(1, |b|)` in operator norm.
fn rel(a: &CMat, b: &CMat) -> f64 {
    cop_norm(&(a - b)) / cop_norm(b).max(1.0)
}

/// Eigen-decomposition of a Hermitian matrix through its real symmetric form.
/// Every eigenvalue
/// appears twice, once for `v` and once for `iv`.
fn real_eigen(h: &CMat) -> (DVector<f64>, DMatrix<f64>) {
    let herm = (h + h.adjoint()) * c(0.5, 0.0);
    sym_eigen(&real_form(&herm))
}

/// Sum of `f_k P_k` over real eigenvectors `w_k`, where `P_k` acts on the
/// complex line of `w_k` and each line is counted twice.
fn spectral_sum(vectors: &DMatrix<f64>, values: &[Complex64]) -> CMat {
    let dim = vectors.nrows();
    let j = complex_structure(dim / 2);
    let mut re = DMatrix::<f64>::zeros(dim, dim);
    let mut im = DMatrix::<f64>::zeros(dim, dim);
    for (k, w) in vectors.column_iter().enumerate() {
        let p = w * w.transpose();
        re += &p * values[k].re;
        im += &p * values[k].im;
    }
    complex_form(&(re + j * im))
}

pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let (vals, _) = real_eigen(h);
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

/// Functional calculus on a Hermitian matrix.
pub fn herm_fn(h: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let (vals, vecs) = real_eigen(h);
    let values: Vec<Complex64> = vals.iter().map(|&l| f(l)).collect();
    spectral_sum(&vecs, &values)
}

/// Functional calculus on a unitary matrix, diagonalizing its commuting
/// Hermitian parts together through a generic real combination.
pub fn unitary_fn(u: &CMat, f: impl Fn(Complex64) -> Complex64) -> CMat {
    let re = (u + u.adjoint()) * c(0.5, 0.0);
    let im = (u - u.adjoint()) * c(0.0, -0.5);
    let (_, vecs) = real_eigen(&(re + im * c(0.618_033_988_749_894_9, 0.0)));
    let n = u.nrows();
    let values: Vec<Complex64> = vecs
        .column_iter()
        .map(|w| {
            let v = DVector::from_fn(n, |i, _| c(w[i], w[i + n]));
            f(v.dotc(&(u * &v)))
        })
        .collect();
    spectral_sum(&vecs, &values)
}

/// Principal square root on the unit circle, with `-1 -> i` regardless of rounding.
fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.norm();
    let mut arg = z.arg();
    if arg <= -PI + 1e-9 {
        arg = PI;
    }
    Complex64::from_polar(r.sqrt(), arg / 2.0)
}

fn principal_log(z: Complex64) -> Complex64 {
    let mut arg = z.arg();
    if arg <= -PI + 1e-9 {
        arg = PI;
    }
    c(z.norm().ln(), arg)
}

/// A unitary or antiunitary operator `v -> u v` or `v -> u conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiUnitaryOp {
    pub u: CMat,
    pub antilinear: bool,
}

impl AntiUnitaryOp {
    pub fn linear(u: CMat) -> Self {
        AntiUnitaryOp { u, antilinear: false }
    }

    pub fn antilinear(u: CMat) -> Self {
        AntiUnitaryOp { u, antilinear: true }
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(CMat::identity(n, n))
    }

    /// Complex conjugation.
    pub fn conjugation(n: usize) -> Self {
        Self::antilinear(CMat::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn grade(&self) -> i8 {
        if self.antilinear {
            -1
        } else {
            1
        }
    }

    pub fn real_matrix(&self) -> DMatrix<f64> {
        let r = real_form(&self.u);
        if self.antilinear {
            let n = self.dim();
            let mut conj = DMatrix::identity(2 * n, 2 * n);
            for i in n..2 * n {
                conj[(i, i)] = -1.0;
            }
            r * conj
        } else {
            r
        }
    }

    pub fn compose(&self, other: &AntiUnitaryOp) -> AntiUnitaryOp {
        let u = if self.antilinear {
            &self.u * conj_mat(&other.u)
        } else {
            &self.u * &other.u
        };
        AntiUnitaryOp {
            u,
            antilinear: self.antilinear ^ other.antilinear,
        }
    }

    pub fn inverse(&self) -> AntiUnitaryOp {
        let inv = self.u.clone().try_inverse().expect("invertible operator");
        if self.antilinear {
            Self::antilinear(conj_mat(&inv))
        } else {
            Self::linear(inv)
        }
    }

    /// `W M W^{-1}` for a complex-linear `M`.
    pub fn conjugate(&self, m: &CMat) -> CMat {
        let inv = self.u.clone().try_inverse().expect("invertible operator");
        if self.antilinear {
            &self.u * conj_mat(m) * inv
        } else {
            &self.u * m * inv
        }
    }

    /// `M W` as an operator of the same grade.
    pub fn left_mul(&self, m: &CMat) -> AntiUnitaryOp {
        AntiUnitaryOp {
            u: m * &self.u,
            antilinear: self.antilinear,
        }
    }

    pub fn distance(&self, other: &AntiUnitaryOp) -> f64 {
        op_norm(&(self.real_matrix() - other.real_matrix()))
    }

    pub fn apply(&self, v: &RealSubspace) -> RealSubspace {
        RealSubspace::from_real(self.real_matrix() * &v.basis)
    }
}

/// A real subspace of `C^n`, stored by an orthonormal real basis of `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    pub n: usize,
    pub basis: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardCheck {
    pub standard: bool,
    /// Smallest singular value of `[B | iB]` with normalized columns.
    pub defect: f64,
}

impl RealSubspace {
    /// Real span of the columns of a `2n x k` real matrix.
    pub fn from_real(m: DMatrix<f64>) -> Self {
        let n = m.nrows() / 2;
        RealSubspace {
            n,
            basis: orthonormal_span(&m, 1e-12),
        }
    }

    /// Real span of complex vectors given as the columns of `m`.
    pub fn from_complex(m: &CMat) -> Self {
        let n = m.nrows();
        let mut r = DMatrix::zeros(2 * n, m.ncols());
        for j in 0..m.ncols() {
            for i in 0..n {
                r[(i, j)] = m[(i, j)].re;
                r[(i + n, j)] = m[(i, j)].im;
            }
        }
        Self::from_real(r)
    }

    /// `R^n` inside `C^n`.
    pub fn real_points(n: usize) -> Self {
        Self::from_complex(&CMat::identity(n, n))
    }

    pub fn real_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as complex columns.
    pub fn complex_basis(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(n, self.real_dim(), |i, j| c(self.basis[(i, j)], self.basis[(i + n, j)]))
    }

    pub fn projector(&self) -> DMatrix<f64> {
        projector(&self.basis)
    }

    /// Operator norm of the difference of the orthogonal projections.
    pub fn distance(&self, other: &RealSubspace) -> f64 {
        op_norm(&(self.projector() - other.projector()))
    }

    /// `|(1 - P_other) P_self|`: zero iff `self` is contained in `other`.
    pub fn containment_residual(&self, other: &RealSubspace) -> f64 {
        let id = DMatrix::<f64>::identity(2 * self.n, 2 * self.n);
        op_norm(&((id - other.projector()) * &self.basis))
    }

    pub fn standard_check(&self) -> Result<StandardCheck, ModularError> {
        if self.real_dim() != self.n {
            return Err(ModularError::WrongColumnCount {
                got: self.real_dim(),
                expected: self.n,
            });
        }
        let ib = complex_structure(self.n) * &self.basis;
        let mut m = DMatrix::zeros(2 * self.n, 2 * self.n);
        m.view_mut((0, 0), (2 * self.n, self.n)).copy_from(&self.basis);
        m.view_mut((0, self.n), (2 * self.n, self.n)).copy_from(&ib);
        for mut col in m.column_iter_mut() {
            let nrm = col.norm();
            if nrm > 0.0 {
                col /= nrm;
            }
        }
        let defect = crate::numeric::singular_values(&m).min();
        Ok(StandardCheck {
            standard: defect > STANDARD_TOL,
            defect,
        })
    }

    pub fn is_standard(&self) -> bool {
        self.standard_check().map(|s| s.standard).unwrap_or(false)
    }

    /// `V' = {xi : Im<xi, eta> = 0 for eta in V}`, the real orthogonal complement of `iV`.
    pub fn symplectic_complement(&self) -> RealSubspace {
        let iv = complex_structure(self.n) * &self.basis;
        RealSubspace {
            n: self.n,
            basis: orthogonal_complement(&iv, 1e-12),
        }
    }

    /// The Tomita operator `S(xi + i eta) = xi - i eta` as a real matrix.
    pub fn tomita_operator(&self) -> Result<DMatrix<f64>, ModularError> {
        let chk = self.standard_check()?;
        if !chk.standard {
            return Err(ModularError::NotStandard(chk.defect));
        }
        let n = self.n;
        let ib = complex_structure(n) * &self.basis;
        let mut src = DMatrix::zeros(2 * n, 2 * n);
        let mut dst = DMatrix::zeros(2 * n, 2 * n);
        src.view_mut((0, 0), (2 * n, n)).copy_from(&self.basis);
        src.view_mut((0, n), (2 * n, n)).copy_from(&ib);
        dst.view_mut((0, 0), (2 * n, n)).copy_from(&self.basis);
        dst.view_mut((0, n), (2 * n, n)).copy_from(&(-ib));
        let inv = src.try_inverse().ok_or(ModularError::NotStandard(0.0))?;
        Ok(dst * inv)
    }

    /// Polar decomposition `S = J Delta^{1/2}` of the Tomita operator.
    pub fn tomita(&self) -> Result<TomitaData, ModularError> {
        let s = self.tomita_operator()?;
        let svd = crate::numeric::svd(&s);
        let u = svd.u;
        let vt = svd.v.transpose();
        let sigma = DMatrix::from_diagonal(&svd.s);
        let half = vt.transpose() * sigma * &vt;
        let j_real = u * vt;
        let half_c = complex_form(&half);
        let delta = &half_c * &half_c;
        let delta = (&delta + delta.adjoint()) * c(0.5, 0.0);
        let n = self.n;
        let j = AntiUnitaryOp::antilinear(CMat::from_fn(n, n, |i, k| c(j_real[(i, k)], j_real[(i + n, k)])));
        Ok(TomitaData { delta, j })
    }
}

/// The pair `(Delta, J)` of a standard subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct TomitaData {
    pub delta: CMat,
    pub j: AntiUnitaryOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TomitaResiduals {
    pub j_squared: f64,
    pub modular_relation: f64,
    pub hermitian: f64,
    pub min_eigenvalue: f64,
}

impl TomitaData {
    pub fn dim(&self) -> usize {
        self.delta.nrows()
    }

    pub fn delta_inverse(&self) -> CMat {
        herm_fn(&self.delta, |l| c(1.0 / l, 0.0))
    }

    /// `Delta^{is}`.
    pub fn delta_it(&self, s: f64) -> CMat {
        herm_fn(&self.delta, |l| Complex64::from_polar(1.0, s * l.ln()))
    }

    pub fn residuals(&self) -> TomitaResiduals {
        let n = self.dim();
        let jj = self.j.compose(&self.j);
        let id = CMat::identity(n, n);
        let j_squared = rel(&jj.u, &id) + if jj.antilinear { 1.0 } else { 0.0 };
        let modular_relation = rel(&self.j.conjugate(&self.delta), &self.delta_inverse());
        let hermitian = cnorm(&(&self.delta - self.delta.adjoint()));
        let min_eigenvalue = hermitian_eigenvalues(&self.delta)[0];
        TomitaResiduals {
            j_squared,
            modular_relation,
            hermitian,
            min_eigenvalue,
        }
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let r = self.residuals();
        r.j_squared < tol && r.modular_relation < tol && r.hermitian < tol && r.min_eigenvalue > 0.0
    }

    /// `V = Fix(J Delta^{1/2})`.
    pub fn standard_subspace(&self) -> Result<RealSubspace, ModularError> {
        let r = self.residuals();
        if r.modular_relation > TOMITA_TOL.max(1e-8) || r.j_squared > 1e-8 {
            return Err(ModularError::ModularRelation(r.modular_relation.max(r.j_squared)));
        }
        let n = self.dim();
        let half = herm_fn(&self.delta, |l| c(l.sqrt(), 0.0));
        let t = self.j.real_matrix() * real_form(&half);
        let fixed = null_space(&(t - DMatrix::identity(2 * n, 2 * n)), 1e-9);
        if fixed.ncols() != n {
            return Err(ModularError::FixedSpace {
                got: fixed.ncols(),
                expected: n,
            });
        }
        Ok(RealSubspace { n, basis: fixed })
    }
}

/// `Fix(J Delta^{1/2})` for a pair satisfying `J^2 = 1`, `J Delta J = Delta^{-1}`.
pub fn standard_from_pair(delta: &CMat, j: &AntiUnitaryOp) -> Result<RealSubspace, ModularError> {
    TomitaData {
        delta: delta.clone(),
        j: j.clone(),
    }
    .standard_subspace()
}

/// Image of a standard subspace with the residuals of the modular covariance identities.
#[derive(Debug, Clone)]
pub struct Transport {
    pub image: RealSubspace,
    pub delta_residual: f64,
    pub j_residual: f64,
}

/// `U V` together with the residuals of `U Delta_V^{it} U* = Delta_{UV}^{eps(U) it}`
/// and `U J_V U* = J_{UV}`.
pub fn transport(u: &AntiUnitaryOp, v: &RealSubspace) -> Result<Transport, ModularError> {
    let image = u.apply(v);
    let before = v.tomita()?;
    let after = image.tomita()?;
    // U Delta^{it} U* = Delta_{UH}^{eps(U) it}, equivalently U Delta U* = Delta_{UH}.
    let moved_delta = u.conjugate(&before.delta);
    let eps = f64::from(u.grade());
    let group_residual = [0.3, 1.0]
        .iter()
        .map(|&t| rel(&u.conjugate(&before.delta_it(t)), &after.delta_it(eps * t)))
        .fold(0.0, f64::max);
    let moved_j = u.compose(&before.j).compose(&u.inverse());
    Ok(Transport {
        delta_residual: rel(&moved_delta, &after.delta).max(group_residual),
        j_residual: moved_j.distance(&after.j),
        image,
    })
}

const RANDOM_STANDARD_MARGIN: f64 = 0.1;

/// Random standard subspace: the real span of the columns of a random complex matrix.
///
/// Samples whose angle to `iH` is tiny are redrawn; the margin keeps the condition
/// number of `Delta` below roughly `4e4`, where double precision still resolves
/// `Delta^{-1}` to about `1e-12`.
pub fn random_standard<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealSubspace {
    loop {
        let m = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let v = RealSubspace::from_complex(&m);
        if v.standard_check().map(|s| s.defect > RANDOM_STANDARD_MARGIN).unwrap_or(false) {
            return v;
        }
    }
}

/// Random unitary matrix as the exponential of a random anti-Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let h = random_hermitian(n, rng);
    herm_fn(&h, |l| Complex64::from_polar(1.0, l))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// Checks the conclusion of the inclusion lemma on an instance `K` in `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidityReport {
    pub contained: bool,
    pub modular_invariant: bool,
    pub cyclic: bool,
    pub distance: f64,
    /// False only when the hypotheses hold and `K != H`.
    pub consistent: bool,
}

pub fn inclusion_rigidity_check(k: &RealSubspace, h: &RealSubspace) -> Result<RigidityReport, ModularError> {
    let data = h.tomita()?;
    let contained = k.containment_residual(h) < 1e-8;
    let modular_invariant = [0.5, 1.0, 2f64.sqrt()].iter().all(|&t| {
        let moved = AntiUnitaryOp::linear(data.delta_it(t)).apply(k);
        moved.distance(k) < 1e-8
    });
    let ik = complex_structure(k.n) * &k.basis;
    let mut span = DMatrix::zeros(2 * k.n, 2 * k.real_dim());
    span.view_mut((0, 0), (2 * k.n, k.real_dim())).copy_from(&k.basis);
    span.view_mut((0, k.real_dim()), (2 * k.n, k.real_dim())).copy_from(&ik);
    let cyclic = crate::numeric::rank(&span, 1e-10) == 2 * k.n;
    let distance = if k.real_dim() == h.real_dim() {
        k.distance(h)
    } else {
        1.0
    };
    let consistent = !(contained && modular_invariant && cyclic) || distance < 1e-8;
    Ok(RigidityReport {
        contained,
        modular_invariant,
        cyclic,
        distance,
        consistent,
    })
}

/// Orthonormal complex basis (as matrices) of the commutant of a set of operators.
pub fn commutant(ops: &[AntiUnitaryOp], n: usize) -> Vec<CMat> {
    let nn = n * n;
    if ops.is_empty() {
        return (0..nn)
            .map(|k| {
                let mut m = CMat::zeros(n, n);
                m[(k % n, k / n)] = c(1.0, 0.0);
                m
            })
            .collect();
    }
    // Unknown: Re vec(M) and Im vec(M), column-major.
    let mut rows: Vec<DMatrix<f64>> = Vec::new();
    for op in ops {
        rows.push(commutation_system(op, n));
    }
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut sys = DMatrix::zeros(total, 2 * nn);
    let mut off = 0;
    for r in rows {
        sys.view_mut((off, 0), (r.nrows(), 2 * nn)).copy_from(&r);
        off += r.nrows();
    }
    let ns = null_space(&sys, 1e-9);
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for col in ns.column_iter() {
        let mut v = DVector::from_fn(nn, |k, _| c(col[k], col[k + nn]));
        for b in &basis {
            let p = b.dotc(&v);
            v -= b * p;
        }
        let nrm = v.norm();
        if nrm > 1e-6 {
            basis.push(v / c(nrm, 0.0));
        }
    }
    basis
        .into_iter()
        .map(|v| CMat::from_column_slice(n, n, v.as_slice()))
        .collect()
}

/// Real-linear system for `M W = W M` in the unknowns `(Re vec M, Im vec M)`.
fn commutation_system(op: &AntiUnitaryOp, n: usize) -> DMatrix<f64> {
    let nn = n * n;
    let mut sys = DMatrix::zeros(2 * nn, 2 * nn);
    // Column by column: apply the map to each real basis matrix.
    for k in 0..2 * nn {
        let mut m = CMat::zeros(n, n);
        let idx = k % nn;
        m[(idx % n, idx / n)] = if k < nn { c(1.0, 0.0) } else { c(0.0, 1.0) };
        let lhs = &m * &op.u;
        let rhs = if op.antilinear {
            &op.u * conj_mat(&m)
        } else {
            &op.u * &m
        };
        let d = lhs - rhs;
        for (p, z) in d.iter().enumerate() {
            sys[(p, k)] = z.re;
            sys[(p + nn, k)] = z.im;
        }
    }
    sys
}

/// Unitary square root `Z` of `U(alpha)` in the commutant of the even part
/// with `J Z J = Z^{-1}`, from the principal branch of the spectral calculus.
pub fn twist_sqrt(u_alpha: &CMat, j: &AntiUnitaryOp, even_ops: &[AntiUnitaryOp]) -> Result<CMat, ModularError> {
    for op in even_ops {
        let res = rel(&op.conjugate(u_alpha), u_alpha);
        if res > AXIOM_TOL {
            return Err(ModularError::NotInCommutant(res));
        }
    }
    let inv = u_alpha.adjoint();
    let res = rel(&j.conjugate(u_alpha), &inv);
    if res > AXIOM_TOL {
        return Err(ModularError::TwistCompatibility(res));
    }
    // J maps each spectral projection of U(alpha) to itself, so any
    // eigenvalue-wise branch choice already satisfies J Z J = Z^{-1}.
    Ok(unitary_fn(u_alpha, principal_sqrt))
}

/// The square root `(1 + i U)/(1 + i)` of an involutive unitary.
pub fn involutive_sqrt(u: &CMat) -> CMat {
    let n = u.nrows();
    (CMat::identity(n, n) + u * c(0.0, 1.0)) / c(1.0, 1.0)
}

/// Residuals of `Z^2 = U(alpha)`, commutation with the even part and `J Z J = Z^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistResiduals {
    pub square: f64,
    pub commutant: f64,
    pub reflection: f64,
}

pub fn twist_residuals(z: &CMat, u_alpha: &CMat, j: &AntiUnitaryOp, even_ops: &[AntiUnitaryOp]) -> TwistResiduals {
    let square = rel(&(z * z), u_alpha);
    let commutant = even_ops
        .iter()
        .map(|op| rel(&op.conjugate(z), z))
        .fold(0.0, f64::max);
    let reflection = rel(&j.conjugate(z), &z.adjoint());
    TwistResiduals {
        square,
        commutant,
        reflection,
    }
}

/// Parametrization of the (anti-)unitary extensions of a representation of
/// the identity component by `U(M)^- = {N unitary in M : J N J = N^{-1}}`.
#[derive(Debug, Clone)]
pub struct ExtensionSpace {
    pub n: usize,
    pub even_ops: Vec<AntiUnitaryOp>,
    pub j0: AntiUnitaryOp,
    pub commutant: Vec<CMat>,
}

impl ExtensionSpace {
    pub fn new(even_ops: Vec<AntiUnitaryOp>, j0: AntiUnitaryOp) -> Result<Self, ModularError> {
        let n = j0.dim();
        let commutant = commutant(&even_ops, n);
        let space = ExtensionSpace {
            n,
            even_ops,
            j0,
            commutant,
        };
        let res = space.j_invariance_residual();
        if res > 1e-8 {
            return Err(ModularError::CommutantNotJInvariant(res));
        }
        Ok(space)
    }

    pub fn commutant_dim(&self) -> usize {
        self.commutant.len()
    }

    /// Distance of a matrix from the commutant.
    pub fn commutant_residual(&self, m: &CMat) -> f64 {
        let mut r = m.clone();
        for b in &self.commutant {
            let p: Complex64 = b.iter().zip(m.iter()).map(|(x, y)| x.conj() * y).sum();
            r -= b * p;
        }
        cnorm(&r) / cnorm(m).max(1.0)
    }

    fn j_invariance_residual(&self) -> f64 {
        self.commutant
            .iter()
            .map(|b| self.commutant_residual(&self.j0.conjugate(b)))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, m: &CMat) -> bool {
        let n = self.n;
        let unitary = rel(&(m.adjoint() * m), &CMat::identity(n, n)) < 1e-8;
        unitary && self.commutant_residual(m) < 1e-8 && rel(&self.j0.conjugate(m), &m.adjoint()) < 1e-8
    }

    /// `U~(sigma) = N J_0`.
    pub fn extension(&self, m: &CMat) -> AntiUnitaryOp {
        self.j0.left_mul(m)
    }

    /// `X = log(N)/2`, anti-Hermitian in the commutant, with
    /// `J X J = -X` and `e^X J_0 e^{-X} = N J_0`.
    pub fn log_witness(&self, m: &CMat) -> CMat {
        unitary_fn(m, |z| principal_log(z) * 0.5)
    }

    /// A random element of `U(M)^-` of the form `e^{2X}` with `X` in the
    /// commutant and `J X J = -X`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMat {
        let n = self.n;
        let mut y = CMat::zeros(n, n);
        for b in &self.commutant {
            y += b * c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        // Anti-Hermitian part, then the component with J X J = -X.
        let x = (&y - y.adjoint()) * c(0.5, 0.0);
        let x = (&x - self.j0.conjugate(&x)) * c(0.5, 0.0);
        (x * c(2.0, 0.0)).exp()
    }

    /// Unitary `G` in the commutant with `G J_1 G^{-1} = J_2`, from the
    /// linear intertwining system followed by its polar part.
    pub fn intertwiner<R: Rng + ?Sized>(
        &self,
        j1: &AntiUnitaryOp,
        j2: &AntiUnitaryOp,
        rng: &mut R,
    ) -> Result<CMat, ModularError> {
        let n = self.n;
        let nn = n * n;
        let mut blocks: Vec<DMatrix<f64>> = self.even_ops.iter().map(|op| commutation_system(op, n)).collect();
        // G u1 conj(.) = u2 conj(G .)  <=>  G u1 - u2 conj(G) = 0.
        let mut sys = DMatrix::zeros(2 * nn, 2 * nn);
        for k in 0..2 * nn {
            let mut g = CMat::zeros(n, n);
            let idx = k % nn;
            g[(idx % n, idx / n)] = if k < nn { c(1.0, 0.0) } else { c(0.0, 1.0) };
            let d = &g * &j1.u - &j2.u * conj_mat(&g);
            for (p, z) in d.iter().enumerate() {
                sys[(p, k)] = z.re;
                sys[(p + nn, k)] = z.im;
            }
        }
        blocks.push(sys);
        let total: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut all = DMatrix::zeros(total, 2 * nn);
        let mut off = 0;
        for b in blocks {
            all.view_mut((off, 0), (b.nrows(), 2 * nn)).copy_from(&b);
            off += b.nrows();
        }
        let ns = null_space(&all, 1e-9);
        if ns.ncols() == 0 {
            return Err(ModularError::NoIntertwiner);
        }
        for _ in 0..8 {
            let coeffs = DVector::from_fn(ns.ncols(), |_, _| rng.gen_range(-1.0..1.0));
            let v = &ns * coeffs;
            let g = CMat::from_fn(n, n, |i, j| c(v[i + j * n], v[i + j * n + nn]));
            let gram = g.adjoint() * &g;
            let ev = hermitian_eigenvalues(&gram);
            if ev[0] < 1e-12 * ev[ev.len() - 1] {
                continue;
            }
            return Ok(&g * herm_fn(&gram, |l| c(l.powf(-0.5), 0.0)));
        }
        Err(ModularError::NoIntertwiner)
    }
}

/// Checks `Delta^{-is/2pi} V(t) Delta^{is/2pi} = V(e^{sign s} t)` for a
/// one-parameter family `V` on sample points; returns the largest residual.
pub fn borchers_relation_residual(
    delta: &TomitaData,
    family: impl Fn(f64) -> CMat,
    sign: f64,
    samples: &[(f64, f64)],
) -> f64 {
    samples
        .iter()
        .map(|&(s, t)| {
            let d = delta.delta_it(-s / (2.0 * PI));
            let lhs = &d * family(t) * d.adjoint();
            rel(&lhs, &family((sign * s).exp() * t))
        })
        .fold(0.0, f64::max)
}

/// Central element `alpha` with `W_0^{'alpha}` in the orbit of `W_0`, and an
/// even element mapping `W_0` to it.
#[derive(Debug, Clone)]
pub struct Twist<E> {
    pub label: String,
    pub alpha: E,
    pub witness: E,
}

/// A graded group with a finite-dimensional (anti-)unitary representation
/// and its action on a set of wedges.
pub trait RepModel {
    type Elem: Clone + fmt::Debug;
    type W: Clone + fmt::Debug;

    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn rep(&self, g: &Self::Elem) -> AntiUnitaryOp;
    fn grade(&self, g: &Self::Elem) -> i8;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
    fn base_wedge(&self) -> Self::W;
    fn act(&self, g: &Self::Elem, w: &Self::W) -> Self::W;
    fn dual(&self, w: &Self::W) -> Self::W;
    /// `(x, sigma) -> (x, alpha sigma)`.
    fn central_shift(&self, alpha: &Self::Elem, w: &Self::W) -> Self::W;
    fn sigma(&self, w: &Self::W) -> Self::Elem;
    fn lambda(&self, w: &Self::W, t: f64) -> Self::Elem;
    /// Hermitian `A` with `U(lambda_W(t)) = e^{itA}`.
    fn generator(&self, w: &Self::W) -> CMat;
    fn wedge_distance(&self, a: &Self::W, b: &Self::W) -> f64;
    fn describe(&self, w: &Self::W) -> Value;
    fn random_even(&self, rng: &mut dyn RngCore) -> Self::Elem;
    fn random_odd(&self, rng: &mut dyn RngCore) -> Self::Elem;
    /// Elements generating a dense subgroup of the identity component.
    fn even_generators(&self) -> Vec<Self::Elem>;
    fn twists(&self) -> Vec<Twist<Self::Elem>>;

    /// Order on the wedge orbit, when the model has one.
    fn leq(&self, _a: &Self::W, _b: &Self::W) -> Option<bool> {
        None
    }
    /// Random pairs `W1 <= W2` in the orbit, when the model has an order.
    fn ordered_pair(&self, _rng: &mut dyn RngCore) -> Option<(Self::W, Self::W)> {
        None
    }
    /// Hermitian generators `-i dU(y)` for rays `y` of the invariant cone.
    fn cone_generators(&self) -> Vec<CMat> {
        Vec::new()
    }

    fn twisted_complement(&self, w: &Self::W, alpha: &Self::Elem) -> Self::W {
        self.central_shift(alpha, &self.dual(w))
    }

    /// `g *_alpha W`.
    fn star_act(&self, g: &Self::Elem, alpha: &Self::Elem, w: &Self::W) -> Self::W {
        let moved = self.act(g, w);
        if self.grade(g) > 0 {
            moved
        } else {
            self.central_shift(alpha, &moved)
        }
    }
}

/// `N_U(W) = Fix(J Delta^{1/2})` with `Delta = e^{-2 pi A_W}` and `J = U(sigma_W)`.
pub fn bgl<M: RepModel + ?Sized>(model: &M, w: &M::W) -> Result<RealSubspace, ModularError> {
    let a = model.generator(w);
    let delta = herm_fn(&a, |l| c((-2.0 * PI * l).exp(), 0.0));
    let j = model.rep(&model.sigma(w));
    standard_from_pair(&delta, &j)
}

/// A map from wedges to real subspaces.
pub trait Net<M: RepModel> {
    fn value(&self, model: &M, w: &M::W) -> Result<RealSubspace, ModularError>;
}

/// The net obtained from the BGL construction.
#[derive(Debug, Clone, Copy, Default)]
pub struct BglNet;

impl<M: RepModel> Net<M> for BglNet {
    fn value(&self, model: &M, w: &M::W) -> Result<RealSubspace, ModularError> {
        bgl(model, w)
    }
}

/// The BGL net with its value at one wedge moved by a fixed unitary.
#[derive(Debug, Clone)]
pub struct PerturbedNet<W> {
    pub target: W,
    pub unitary: CMat,
}

impl<W> PerturbedNet<W> {
    pub fn new(target: W, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(dim, &mut rng);
        PerturbedNet {
            target,
            unitary: herm_fn(&h, |l| Complex64::from_polar(1.0, 0.8 * l)),
        }
    }
}

impl<M: RepModel> Net<M> for PerturbedNet<M::W> {
    fn value(&self, model: &M, w: &M::W) -> Result<RealSubspace, ModularError> {
        let v = bgl(model, w)?;
        if model.wedge_distance(w, &self.target) < 1e-9 {
            Ok(AntiUnitaryOp::linear(self.unitary.clone()).apply(&v))
        } else {
            Ok(v)
        }
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass { residual: f64 },
    Fail { residual: f64 },
    /// Holds trivially, e.g. for the trivial cone.
    Trivial,
    /// No twisted complement lies in the orbit, so there is nothing to check.
    Vacuous,
    /// The model has no order or no extension for this check.
    NotApplicable,
}

impl AxiomStatus {
    fn from_residual(residual: f64, tol: f64) -> Self {
        if residual <= tol {
            AxiomStatus::Pass { residual }
        } else {
            AxiomStatus::Fail { residual }
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self, AxiomStatus::Fail { .. })
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            AxiomStatus::Pass { residual } | AxiomStatus::Fail { residual } => Some(*residual),
            _ => None,
        }
    }
}

impl fmt::Display for AxiomStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomStatus::Pass { residual } => write!(f, "pass ({residual:.2e})"),
            AxiomStatus::Fail { residual } => write!(f, "FAIL ({residual:.2e})"),
            AxiomStatus::Trivial => write!(f, "trivial"),
            AxiomStatus::Vacuous => write!(f, "vacuous"),
            AxiomStatus::NotApplicable => write!(f, "n/a"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub model: String,
    pub dim: usize,
    pub samples: usize,
    pub homomorphism: AxiomStatus,
    pub equivariance: AxiomStatus,
    pub hk1: AxiomStatus,
    pub hk2: AxiomStatus,
    pub hk3: AxiomStatus,
    pub hk4: AxiomStatus,
    pub hk5: AxiomStatus,
    pub hk6: AxiomStatus,
    pub hk7: AxiomStatus,
    pub hk8: AxiomStatus,
    pub twists: Vec<TwistSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwistSummary {
    pub alpha: String,
    pub witness_residual: f64,
    pub residuals: TwistResiduals,
}

impl AxiomReport {
    pub fn entries(&self) -> Vec<(&'static str, AxiomStatus)> {
        vec![
            ("homomorphism", self.homomorphism),
            ("equivariance", self.equivariance),
            ("HK1", self.hk1),
            ("HK2", self.hk2),
            ("HK3", self.hk3),
            ("HK4", self.hk4),
            ("HK5", self.hk5),
            ("HK6", self.hk6),
            ("HK7", self.hk7),
            ("HK8", self.hk8),
        ]
    }

    pub fn passed(&self) -> bool {
        self.entries().iter().all(|(_, s)| !s.failed())
    }
}

/// Settings for [`axiom_suite`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 20,
            seed: 42,
            tol: AXIOM_TOL,
        }
    }
}

fn worst(residuals: impl IntoIterator<Item = f64>) -> f64 {
    residuals.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

/// Constructed twist operator for each admissible `alpha`.
pub fn twist_operators<M: RepModel>(model: &M) -> Result<Vec<(Twist<M::Elem>, CMat)>, ModularError> {
    let even: Vec<AntiUnitaryOp> = model.even_generators().iter().map(|g| model.rep(g)).collect();
    let j = model.rep(&model.sigma(&model.base_wedge()));
    model
        .twists()
        .into_iter()
        .map(|t| {
            let ua = model.rep(&t.alpha);
            let z = twist_sqrt(&ua.u, &j, &even)?;
            Ok((t, z))
        })
        .collect()
}

/// Runs the axiom checks on a net over the orbit of the base wedge.
pub fn axiom_suite<M: RepModel, N: Net<M>>(model: &M, net: &N, cfg: SuiteConfig) -> Result<AxiomReport, ModularError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = cfg.tol;
    let base = model.base_wedge();
    let n = model.dim();

    // Representation identities on random pairs of both grades.
    let mut hom = Vec::new();
    for _ in 0..cfg.samples {
        let g = if rng.gen_bool(0.5) { model.random_even(&mut rng) } else { model.random_odd(&mut rng) };
        let h = if rng.gen_bool(0.5) { model.random_even(&mut rng) } else { model.random_odd(&mut rng) };
        let lhs = model.rep(&model.mul(&g, &h));
        let rhs = model.rep(&g).compose(&model.rep(&h));
        hom.push(lhs.distance(&rhs) + if lhs.antilinear != rhs.antilinear { 1.0 } else { 0.0 });
    }
    let homomorphism = AxiomStatus::from_residual(worst(hom), tol);

    // Sample wedges in the orbit, always including the base wedge.
    let mut wedges = vec![base.clone()];
    for _ in 1..cfg.samples.max(2) {
        wedges.push(model.act(&model.random_even(&mut rng), &base));
    }

    // BGL equivariance under the full group.
    let mut odd_res = Vec::new();
    let mut cov = Vec::new();
    for w in &wedges {
        let nw = net.value(model, w)?;
        let g = model.random_even(&mut rng);
        cov.push(net.value(model, &model.act(&g, w))?.distance(&model.rep(&g).apply(&nw)));
        let g_inv_target = model.act(&g, &base);
        cov.push(net.value(model, &g_inv_target)?.distance(&model.rep(&g).apply(&net.value(model, &base)?)));
        let odd = model.random_odd(&mut rng);
        odd_res.push(net.value(model, &model.act(&odd, w))?.distance(&model.rep(&odd).apply(&nw)));
    }
    let hk2 = AxiomStatus::from_residual(worst(cov.iter().copied()), tol);
    let equivariance = AxiomStatus::from_residual(worst(odd_res.into_iter().chain(cov)), tol);

    // Isotony on ordered pairs.
    let hk1 = match model.ordered_pair(&mut rng) {
        None => {
            if model.cone_generators().is_empty() {
                AxiomStatus::Trivial
            } else {
                AxiomStatus::NotApplicable
            }
        }
        Some(_) => {
            let mut res = Vec::new();
            for _ in 0..cfg.samples {
                let (w1, w2) = model.ordered_pair(&mut rng).expect("model has an order");
                debug_assert_eq!(model.leq(&w1, &w2), Some(true));
                res.push(net.value(model, &w1)?.containment_residual(&net.value(model, &w2)?));
            }
            AxiomStatus::from_residual(worst(res), tol)
        }
    };

    // Spectral condition.
    let cone = model.cone_generators();
    let hk3 = if cone.is_empty() {
        AxiomStatus::Trivial
    } else {
        let most_negative = cone
            .iter()
            .map(|h| -hermitian_eigenvalues(h)[0])
            .fold(0.0, f64::max);
        AxiomStatus::from_residual(most_negative, tol)
    };

    // Bisognano-Wichmann.
    let mut bw = Vec::new();
    for w in &wedges {
        let data = net.value(model, w)?.tomita()?;
        for t in [1.0, -1.0, 0.37, -0.37] {
            let lhs = data.delta_it(-t / (2.0 * PI));
            let rhs = model.rep(&model.lambda(w, t));
            bw.push(rel(&lhs, &rhs.u) + if rhs.antilinear { 1.0 } else { 0.0 });
        }
    }
    let hk5 = AxiomStatus::from_residual(worst(bw), tol);

    // Twisted locality, duality, covariance and reflection.
    let twists = twist_operators(model)?;
    let even_ops: Vec<AntiUnitaryOp> = model.even_generators().iter().map(|g| model.rep(g)).collect();
    let j0 = model.rep(&model.sigma(&base));
    let mut summaries = Vec::new();
    let (hk4, hk6, hk7, hk8) = if twists.is_empty() {
        (
            AxiomStatus::Vacuous,
            AxiomStatus::Vacuous,
            AxiomStatus::Vacuous,
            AxiomStatus::Vacuous,
        )
    } else {
        let (mut loc, mut dual, mut gcov, mut refl) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (tw, z) in &twists {
            let witness_residual =
                model.wedge_distance(&model.act(&tw.witness, &base), &model.twisted_complement(&base, &tw.alpha));
            summaries.push(TwistSummary {
                alpha: tw.label.clone(),
                witness_residual,
                residuals: twist_residuals(z, &model.rep(&tw.alpha).u, &j0, &even_ops),
            });
            let zop = AntiUnitaryOp::linear(z.clone());
            for w in &wedges {
                let nw = net.value(model, w)?;
                let rhs = zop.apply(&nw.symplectic_complement());
                let lhs = net.value(model, &model.twisted_complement(w, &tw.alpha))?;
                loc.push(lhs.containment_residual(&rhs));
                dual.push(lhs.distance(&rhs));
                let ua = |g: &M::Elem| {
                    let u = model.rep(g);
                    if model.grade(g) > 0 {
                        u
                    } else {
                        u.left_mul(z)
                    }
                };
                for _ in 0..2 {
                    let g = if rng.gen_bool(0.5) { model.random_even(&mut rng) } else { model.random_odd(&mut rng) };
                    let moved = net.value(model, &model.star_act(&g, &tw.alpha, w))?;
                    gcov.push(moved.distance(&ua(&g).apply(&nw)));
                }
                let j_w = nw.tomita()?.j;
                refl.push(ua(&model.sigma(w)).distance(&j_w.left_mul(z)));
            }
        }
        (
            AxiomStatus::from_residual(worst(loc), tol),
            AxiomStatus::from_residual(worst(dual), tol),
            AxiomStatus::from_residual(worst(gcov), tol),
            AxiomStatus::from_residual(worst(refl), tol),
        )
    };

    Ok(AxiomReport {
        model: model.name(),
        dim: n,
        samples: cfg.samples,
        homomorphism,
        equivariance,
        hk1,
        hk2,
        hk3,
        hk4,
        hk5,
        hk6,
        hk7,
        hk8,
        twists: summaries,
    })
}

/// One entry of a net dump: wedge descriptor and basis with `[re, im]` entries.
#[derive(Debug, Clone, Serialize)]
pub struct NetEntry {
    pub wedge: Value,
    pub basis: Vec<Vec<[f64; 2]>>,
}

pub fn net_dump<M: RepModel, N: Net<M>>(model: &M, net: &N, wedges: &[M::W]) -> Result<Vec<NetEntry>, ModularError> {
    wedges
        .iter()
        .map(|w| {
            let v = net.value(model, w)?.complex_basis();
            let basis = v
                .column_iter()
                .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            Ok(NetEntry {
                wedge: model.describe(w),
                basis,
            })
        })
        .collect()
}

fn swap_blocks(m: usize) -> CMat {
    let mut f = CMat::zeros(2 * m, 2 * m);
    for b in 0..m {
        f[(2 * b, 2 * b + 1)] = c(1.0, 0.0);
        f[(2 * b + 1, 2 * b)] = c(1.0, 0.0);
    }
    f
}

fn block_generator(energies: &[f64]) -> CMat {
    let mut a = CMat::zeros(2 * energies.len(), 2 * energies.len());
    for (b, e) in energies.iter().enumerate() {
        a[(2 * b, 2 * b)] = c(*e, 0.0);
        a[(2 * b + 1, 2 * b + 1)] = c(-*e, 0.0);
    }
    a
}

/// The affine group of the line acting through dilations: translations act
/// trivially, `U(b, a) = e^{i log|a| A}` composed with `J` for `a < 0`.
#[derive(Debug, Clone)]
pub struct AffineDilationModel {
    pub group: GradedGroupModel,
    pub generator: CMat,
    pub conj: CMat,
}

impl AffineDilationModel {
    /// Blocks `diag(e, -e)` for each energy; `J` swaps within blocks.
    pub fn new(energies: &[f64]) -> Result<Self, ModularError> {
        if energies.is_empty() {
            return Err(ModularError::InvalidModel("at least one block".into()));
        }
        Ok(AffineDilationModel {
            group: GradedGroupModel::affine(),
            generator: block_generator(energies),
            conj: swap_blocks(energies.len()),
        })
    }

    /// `A = 0`: every value of the net is `Fix(J)`.
    pub fn trivial(blocks: usize) -> Self {
        AffineDilationModel {
            group: GradedGroupModel::affine(),
            generator: CMat::zeros(2 * blocks, 2 * blocks),
            conj: swap_blocks(blocks),
        }
    }
}

impl RepModel for AffineDilationModel {
    type Elem = GroupElement;
    type W = Wedge;

    fn name(&self) -> String {
        "affine".into()
    }
    fn dim(&self) -> usize {
        self.generator.nrows()
    }
    fn rep(&self, g: &GroupElement) -> AntiUnitaryOp {
        let s = g.matrix[(0, 0)].abs().ln();
        let u = herm_fn(&self.generator, |l| Complex64::from_polar(1.0, s * l));
        if g.is_even() {
            AntiUnitaryOp::linear(u)
        } else {
            AntiUnitaryOp::antilinear(u * &self.conj)
        }
    }
    fn grade(&self, g: &GroupElement) -> i8 {
        g.grade()
    }
    fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        a * b
    }
    fn identity(&self) -> GroupElement {
        self.group.identity()
    }
    fn base_wedge(&self) -> Wedge {
        self.group.base_wedge()
    }
    fn act(&self, g: &GroupElement, w: &Wedge) -> Wedge {
        self.group.act(g, w).expect("same model")
    }
    fn dual(&self, w: &Wedge) -> Wedge {
        self.group.dual(w)
    }
    fn central_shift(&self, _alpha: &GroupElement, w: &Wedge) -> Wedge {
        w.clone()
    }
    fn sigma(&self, w: &Wedge) -> GroupElement {
        w.sigma.clone()
    }
    fn lambda(&self, w: &Wedge, t: f64) -> GroupElement {
        self.group.lambda(w, t)
    }
    fn generator(&self, w: &Wedge) -> CMat {
        &self.generator * c(w.x[(0, 0)], 0.0)
    }
    fn wedge_distance(&self, a: &Wedge, b: &Wedge) -> f64 {
        (&a.x - &b.x).norm() + (&a.sigma.matrix - &b.sigma.matrix).norm()
    }
    fn describe(&self, w: &Wedge) -> Value {
        serde_json::to_value(wedgespace::WedgeDescriptor::from(w)).expect("serializable")
    }
    fn random_even(&self, rng: &mut dyn RngCore) -> GroupElement {
        self.group.random_even(rng)
    }
    fn random_odd(&self, rng: &mut dyn RngCore) -> GroupElement {
        self.group.random_odd(rng)
    }
    fn even_generators(&self) -> Vec<GroupElement> {
        vec![self.group.exp(&(&self.group.base_wedge().x * 0.37))]
    }
    fn twists(&self) -> Vec<Twist<GroupElement>> {
        // The center of the identity component is trivial and W' lies in the other orbit.
        Vec::new()
    }
    fn leq(&self, a: &Wedge, b: &Wedge) -> Option<bool> {
        self.group.leq(a, b).ok()
    }
    fn ordered_pair(&self, rng: &mut dyn RngCore) -> Option<(Wedge, Wedge)> {
        let w2 = wedgespace::random_wedge(&self.group, rng, false);
        let s = wedgespace::semigroup_sample(&self.group, rng)?;
        let t = w2.transporter.clone()?;
        let w1 = self.act(&(&(&t * &s) * &t.inverse()), &w2);
        Some((w1, w2))
    }
    fn cone_generators(&self) -> Vec<CMat> {
        // Translations act trivially: their generator is zero.
        vec![CMat::zeros(self.dim(), self.dim())]
    }
}

/// `O(6)` graded by the determinant on `C^6 (x) C^m`, odd elements acting
/// antilinearly. Wedges are pairs `(x, sigma)` with `sigma x sigma = x`.
#[derive(Debug, Clone)]
pub struct OrthogonalModel {
    pub copies: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWedge {
    pub x: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

impl OrthogonalModel {
    pub const N: usize = 6;

    pub fn new(copies: usize) -> Result<Self, ModularError> {
        if copies == 0 {
            return Err(ModularError::InvalidModel("at least one copy".into()));
        }
        Ok(OrthogonalModel { copies })
    }

    fn rotation_generator() -> DMatrix<f64> {
        let mut x = DMatrix::zeros(3, 3);
        x[(0, 1)] = 1.0;
        x[(1, 0)] = -1.0;
        x
    }

    fn blocks(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        m.view_mut((0, 0), (3, 3)).copy_from(a);
        m.view_mut((3, 3), (3, 3)).copy_from(b);
        m
    }

    fn random_rotation(rng: &mut dyn RngCore) -> DMatrix<f64> {
        let m = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        ((&m - m.transpose()) * 1.5).exp()
    }
}

impl RepModel for OrthogonalModel {
    type Elem = DMatrix<f64>;
    type W = MatrixWedge;

    fn name(&self) -> String {
        "orthogonal".into()
    }
    fn dim(&self) -> usize {
        Self::N * self.copies
    }
    fn rep(&self, g: &DMatrix<f64>) -> AntiUnitaryOp {
        let m = self.copies;
        let u = CMat::from_fn(6 * m, 6 * m, |i, j| {
            if i % m == j % m {
                c(g[(i / m, j / m)], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        if g.determinant() > 0.0 {
            AntiUnitaryOp::linear(u)
        } else {
            AntiUnitaryOp::antilinear(u)
        }
    }
    fn grade(&self, g: &DMatrix<f64>) -> i8 {
        if g.determinant() > 0.0 {
            1
        } else {
            -1
        }
    }
    fn mul(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a * b
    }
    fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(6, 6)
    }
    fn base_wedge(&self) -> MatrixWedge {
        let x = Self::rotation_generator();
        MatrixWedge {
            x: Self::blocks(&x, &-&x),
            sigma: Self::blocks(&-DMatrix::identity(3, 3), &DMatrix::identity(3, 3)),
        }
    }
    fn act(&self, g: &DMatrix<f64>, w: &MatrixWedge) -> MatrixWedge {
        let eps = f64::from(self.grade(g));
        MatrixWedge {
            x: g * &w.x * g.transpose() * eps,
            sigma: g * &w.sigma * g.transpose(),
        }
    }
    fn dual(&self, w: &MatrixWedge) -> MatrixWedge {
        MatrixWedge {
            x: -&w.x,
            sigma: w.sigma.clone(),
        }
    }
    fn central_shift(&self, alpha: &DMatrix<f64>, w: &MatrixWedge) -> MatrixWedge {
        MatrixWedge {
            x: w.x.clone(),
            sigma: alpha * &w.sigma,
        }
    }
    fn sigma(&self, w: &MatrixWedge) -> DMatrix<f64> {
        w.sigma.clone()
    }
    fn lambda(&self, w: &MatrixWedge, t: f64) -> DMatrix<f64> {
        (&w.x * t).exp()
    }
    fn generator(&self, w: &MatrixWedge) -> CMat {
        // U(exp tx) = exp(tx) (x) 1 = e^{itA} with A = -i x (x) 1.
        let m = self.copies;
        CMat::from_fn(6 * m, 6 * m, |i, j| {
            if i % m == j % m {
                c(0.0, -w.x[(i / m, j / m)])
            } else {
                c(0.0, 0.0)
            }
        })
    }
    fn wedge_distance(&self, a: &MatrixWedge, b: &MatrixWedge) -> f64 {
        (&a.x - &b.x).norm() + (&a.sigma - &b.sigma).norm()
    }
    fn describe(&self, w: &MatrixWedge) -> Value {
        json!({
            "x": wedgespace::matrix_rows(&w.x),
            "sigma": wedgespace::matrix_rows(&w.sigma),
        })
    }
    fn random_even(&self, rng: &mut dyn RngCore) -> DMatrix<f64> {
        Self::random_rotation(rng)
    }
    fn random_odd(&self, rng: &mut dyn RngCore) -> DMatrix<f64> {
        Self::random_rotation(rng) * self.base_wedge().sigma
    }
    fn even_generators(&self) -> Vec<DMatrix<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        (0..3).map(|_| Self::random_rotation(&mut rng)).collect()
    }
    fn twists(&self) -> Vec<Twist<DMatrix<f64>>> {
        let id3 = DMatrix::<f64>::identity(3, 3);
        let half_turn = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, -1.0]));
        let mut swap = DMatrix::zeros(6, 6);
        swap.view_mut((0, 3), (3, 3)).copy_from(&id3);
        swap.view_mut((3, 0), (3, 3)).copy_from(&-&id3);
        vec![
            Twist {
                label: "e".into(),
                alpha: DMatrix::identity(6, 6),
                witness: Self::blocks(&half_turn, &half_turn),
            },
            Twist {
                label: "-1".into(),
                alpha: -DMatrix::<f64>::identity(6, 6),
                witness: swap,
            },
        ]
    }
}

/// The subgroup of the `n`-fold Moebius cover generated by the dilations, the
/// half-turn `rho(pi)` and the reflection `tau`, with elements `(t, k, e)`
/// standing for `delta(t) rho(pi k) tau^e`.
///
/// The representation is `U(t, k, e) = e^{itA} R^k J^e` on blocks of `C^2`
/// with `A = diag(a, -a)`, `R = [[0, 1], [zeta, 0]]` and `J = swap o conj`,
/// so `U(rho(2 pi)) = zeta`.
#[derive(Debug, Clone)]
pub struct HalfTurnModel {
    pub order: u64,
    pub zeta: Complex64,
    pub energies: Vec<f64>,
}

/// `(t, k, e)` in the half-turn group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfTurnElem {
    pub t: f64,
    pub k: i64,
    pub e: u8,
}

/// The wedge `(s h, tau_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberWedge {
    pub s: i8,
    pub j: i64,
}

impl HalfTurnModel {
    pub fn new(order: u64, zeta: Complex64, energies: Vec<f64>) -> Result<Self, ModularError> {
        if order == 0 || energies.is_empty() {
            return Err(ModularError::InvalidModel("order and block count must be positive".into()));
        }
        if (zeta.norm() - 1.0).abs() > 1e-12 || (zeta.powu(order as u32) - 1.0).norm() > 1e-9 {
            return Err(ModularError::InvalidModel("zeta must be an n-th root of unity".into()));
        }
        Ok(HalfTurnModel { order, zeta, energies })
    }

    /// Double cover with `U(rho(2 pi)) = -1` on `C^2`: the central element
    /// `-1` is represented by `-1`, as for spinorial representations.
    pub fn poincare_mock() -> Self {
        HalfTurnModel::new(2, c(-1.0, 0.0), vec![1.0]).expect("valid parameters")
    }

    fn reduce(&self, w: FiberWedge) -> FiberWedge {
        FiberWedge {
            s: w.s,
            j: w.j.rem_euclid(self.order as i64),
        }
    }

    /// `rho(2 pi a)`.
    pub fn central(&self, a: i64) -> HalfTurnElem {
        HalfTurnElem {
            t: 0.0,
            k: (2 * a).rem_euclid(2 * self.order as i64),
            e: 0,
        }
    }

    pub fn in_base_orbit(&self, w: &FiberWedge) -> bool {
        self.order % 2 == 1 || i64::from(w.s) == if w.j.rem_euclid(2) == 0 { 1 } else { -1 }
    }

    fn rotation(&self) -> CMat {
        let m = self.energies.len();
        let mut r = CMat::zeros(2 * m, 2 * m);
        for b in 0..m {
            r[(2 * b, 2 * b + 1)] = c(1.0, 0.0);
            r[(2 * b + 1, 2 * b)] = self.zeta;
        }
        r
    }
}

impl RepModel for HalfTurnModel {
    type Elem = HalfTurnElem;
    type W = FiberWedge;

    fn name(&self) -> String {
        format!("mobius-cover(n={})", self.order)
    }
    fn dim(&self) -> usize {
        2 * self.energies.len()
    }
    fn rep(&self, g: &HalfTurnElem) -> AntiUnitaryOp {
        let a = block_generator(&self.energies);
        let mut u = herm_fn(&a, |l| Complex64::from_polar(1.0, g.t * l));
        let r = self.rotation();
        for _ in 0..g.k {
            u *= &r;
        }
        if g.e == 1 {
            AntiUnitaryOp::antilinear(u * swap_blocks(self.energies.len()))
        } else {
            AntiUnitaryOp::linear(u)
        }
    }
    fn grade(&self, g: &HalfTurnElem) -> i8 {
        if g.e == 0 {
            1
        } else {
            -1
        }
    }
    fn mul(&self, a: &HalfTurnElem, b: &HalfTurnElem) -> HalfTurnElem {
        let sk = if a.k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let se = if a.e == 0 { 1 } else { -1 };
        HalfTurnElem {
            t: a.t + sk * b.t,
            k: (a.k + se * b.k).rem_euclid(2 * self.order as i64),
            e: (a.e + b.e) % 2,
        }
    }
    fn identity(&self) -> HalfTurnElem {
        HalfTurnElem { t: 0.0, k: 0, e: 0 }
    }
    fn base_wedge(&self) -> FiberWedge {
        FiberWedge { s: 1, j: 0 }
    }
    fn act(&self, g: &HalfTurnElem, w: &FiberWedge) -> FiberWedge {
        let flip = (g.k + i64::from(g.e)).rem_euclid(2) == 1;
        let j = if g.e == 1 { -w.j } else { w.j } + g.k;
        self.reduce(FiberWedge {
            s: if flip { -w.s } else { w.s },
            j,
        })
    }
    fn dual(&self, w: &FiberWedge) -> FiberWedge {
        FiberWedge { s: -w.s, j: w.j }
    }
    fn central_shift(&self, alpha: &HalfTurnElem, w: &FiberWedge) -> FiberWedge {
        debug_assert!(alpha.k % 2 == 0 && alpha.e == 0 && alpha.t == 0.0);
        self.reduce(FiberWedge {
            s: w.s,
            j: w.j + alpha.k / 2,
        })
    }
    fn sigma(&self, w: &FiberWedge) -> HalfTurnElem {
        HalfTurnElem {
            t: 0.0,
            k: (2 * w.j).rem_euclid(2 * self.order as i64),
            e: 1,
        }
    }
    fn lambda(&self, w: &FiberWedge, t: f64) -> HalfTurnElem {
        HalfTurnElem {
            t: f64::from(w.s) * t,
            k: 0,
            e: 0,
        }
    }
    fn generator(&self, w: &FiberWedge) -> CMat {
        block_generator(&self.energies) * c(f64::from(w.s), 0.0)
    }
    fn wedge_distance(&self, a: &FiberWedge, b: &FiberWedge) -> f64 {
        if self.reduce(*a) == self.reduce(*b) {
            0.0
        } else {
            1.0
        }
    }
    fn describe(&self, w: &FiberWedge) -> Value {
        json!({ "x_sign": w.s, "tau_index": w.j })
    }
    fn random_even(&self, rng: &mut dyn RngCore) -> HalfTurnElem {
        HalfTurnElem {
            t: rng.gen_range(-2.0..2.0),
            k: rng.gen_range(0..2 * self.order as i64),
            e: 0,
        }
    }
    fn random_odd(&self, rng: &mut dyn RngCore) -> HalfTurnElem {
        let g = self.random_even(rng);
        self.mul(&g, &HalfTurnElem { t: 0.0, k: 0, e: 1 })
    }
    fn even_generators(&self) -> Vec<HalfTurnElem> {
        vec![
            HalfTurnElem { t: 0.37, k: 0, e: 0 },
            HalfTurnElem { t: 0.0, k: 1, e: 0 },
        ]
    }
    fn twists(&self) -> Vec<Twist<HalfTurnElem>> {
        let n = self.order as i64;
        let candidates: Vec<i64> = if n % 2 == 0 { vec![1, -1] } else { vec![0, 1, -1] };
        candidates
            .into_iter()
            .filter_map(|a| {
                let target = self.twisted_complement(&self.base_wedge(), &self.central(a));
                // rho(pi k) maps (1, 0) to ((-1)^k, k).
                let k = (0..2 * n).find(|k| {
                    self.act(&HalfTurnElem { t: 0.0, k: *k, e: 0 }, &self.base_wedge()) == target
                })?;
                Some(Twist {
                    label: format!("rho(2pi*{a})"),
                    alpha: self.central(a),
                    witness: HalfTurnElem { t: 0.0, k, e: 0 },
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_points_have_trivial_tomita_data() {
        let v = RealSubspace::real_points(3);
        assert!(v.is_standard());
        let t = v.tomita().unwrap();
        assert!(rel(&t.delta, &CMat::identity(3, 3)) < 1e-12);
        assert!(t.j.distance(&AntiUnitaryOp::conjugation(3)) < 1e-12);
        assert!(v.symplectic_complement().distance(&v) < 1e-12);
    }

    #[test]
    fn complex_subspace_is_not_standard() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(!RealSubspace::from_complex(&m).is_standard());
    }

    #[test]
    fn rotated_line() {
        let th: f64 = 0.7;
        let v = RealSubspace::from_complex(&CMat::from_element(1, 1, Complex64::from_polar(1.0, th)));
        let t = v.tomita().unwrap();
        assert!((t.delta[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((t.j.u[(0, 0)] - Complex64::from_polar(1.0, 2.0 * th)).norm() < 1e-12);
    }

    #[test]
    fn explicit_pair() {
        let e = std::f64::consts::E;
        let delta = CMat::from_diagonal(&DVector::from_vec(vec![c(e, 0.0), c(1.0 / e, 0.0)]));
        let j = AntiUnitaryOp::antilinear(swap_blocks(1));
        let v = standard_from_pair(&delta, &j).unwrap();
        // Fix(J Delta^{1/2}) = {(e^{-1/2} conj(w), w)}.
        let h = e.powf(-0.5);
        let expected = RealSubspace::from_complex(&CMat::from_row_slice(
            2,
            2,
            &[c(h, 0.0), c(0.0, -h), c(1.0, 0.0), c(0.0, 1.0)],
        ));
        assert!(v.distance(&expected) < 1e-10);
    }

    #[test]
    fn round_trip_and_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5 {
            let v = random_standard(n, &mut rng);
            let t = v.tomita().unwrap();
            assert!(t.is_valid(1e-9));
            let back = t.standard_subspace().unwrap();
            assert!(back.distance(&v) < 1e-8);
            let vc = v.symplectic_complement();
            let tc = vc.tomita().unwrap();
            assert!(rel(&tc.delta, &t.delta_inverse()) < 1e-9);
            assert!(tc.j.distance(&t.j) < 1e-9);
            assert!(t.j.apply(&v).distance(&vc) < 1e-8);
            let s = v.tomita_operator().unwrap();
            let sc = vc.tomita_operator().unwrap();
            assert!(op_norm(&(sc - s.transpose())) < 1e-8 * op_norm(&s).max(1.0));
        }
    }

    #[test]
    fn transport_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_standard(3, &mut rng);
        let u = AntiUnitaryOp::linear(random_unitary(3, &mut rng));
        let tr = transport(&u, &v).unwrap();
        assert!(tr.delta_residual < 1e-8 && tr.j_residual < 1e-8);
        let j = v.tomita().unwrap().j;
        let tr = transport(&j, &v).unwrap();
        assert!(tr.image.distance(&v.symplectic_complement()) < 1e-8);
        assert!(tr.delta_residual < 1e-8 && tr.j_residual < 1e-8);
    }

    #[test]
    fn twist_of_minus_one_is_i() {
        let n = 2;
        let z = twist_sqrt(&-CMat::identity(n, n), &AntiUnitaryOp::conjugation(n), &[]).unwrap();
        assert!(rel(&z, &(CMat::identity(n, n) * c(0.0, 1.0))) < 1e-12);
        let ss = involutive_sqrt(&-CMat::identity(n, n));
        assert!(rel(&ss, &(CMat::identity(n, n) * c(0.0, -1.0))) < 1e-12);
    }

    #[test]
    fn axiom_suites_pass() {
        let cfg = SuiteConfig { samples: 8, ..Default::default() };
        let aff = AffineDilationModel::new(&[0.3, 1.1]).unwrap();
        let rep = axiom_suite(&aff, &BglNet, cfg).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.hk4, AxiomStatus::Vacuous);
        let ort = OrthogonalModel::new(1).unwrap();
        let rep = axiom_suite(&ort, &BglNet, cfg).unwrap();
        assert!(rep.passed(), "{rep:?}");
        for n in [1, 2, 3, 4] {
            let zeta = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
            let m = HalfTurnModel::new(n, zeta, vec![0.5, 1.3]).unwrap();
            let rep = axiom_suite(&m, &BglNet, cfg).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(!rep.twists.is_empty());
        }
    }

    #[test]
    fn perturbed_net_fails_covariance() {
        let m = HalfTurnModel::new(4, c(0.0, 1.0), vec![0.5, 1.3]).unwrap();
        let net = PerturbedNet::new(m.base_wedge(), m.dim(), 9);
        let rep = axiom_suite(&m, &net, SuiteConfig::default()).unwrap();
        assert!(rep.hk2.residual().unwrap() > 1e-3);
    }

    #[test]
    fn poincare_mock_twist() {
        let m = HalfTurnModel::poincare_mock();
        let (tw, z) = twist_operators(&m).unwrap().into_iter().next().unwrap();
        assert!(rel(&z, &(CMat::identity(2, 2) * c(0.0, 1.0))) < 1e-12);
        let w = m.base_wedge();
        let lhs = bgl(&m, &m.twisted_complement(&w, &tw.alpha)).unwrap();
        let rhs = AntiUnitaryOp::linear(z).apply(&bgl(&m, &w).unwrap().symplectic_complement());
        assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn extension_space_scalars() {
        let m = HalfTurnModel::new(2, c(-1.0, 0.0), vec![0.8]).unwrap();
        let even: Vec<AntiUnitaryOp> = m.even_generators().iter().map(|g| m.rep(g)).collect();
        let j0 = m.rep(&m.sigma(&m.base_wedge()));
        let space = ExtensionSpace::new(even, j0.clone()).unwrap();
        assert_eq!(space.commutant_dim(), 1);
        for th in [0.0, 1.0, 2.5, PI] {
            let z = CMat::identity(2, 2) * Complex64::from_polar(1.0, th);
            assert!(space.contains(&z));
            let x = space.log_witness(&z);
            assert!(rel(&(x.clone().exp() * x.exp()), &z) < 1e-10);
        }
    }

    #[test]
    fn extensions_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = OrthogonalModel::new(2).unwrap();
        let even: Vec<AntiUnitaryOp> = m.even_generators().iter().map(|g| m.rep(g)).collect();
        let j0 = m.rep(&m.sigma(&m.base_wedge()));
        let space = ExtensionSpace::new(even.clone(), j0.clone()).unwrap();
        assert_eq!(space.commutant_dim(), 4);
        let n1 = space.random_element(&mut rng);
        let n2 = space.random_element(&mut rng);
        assert!(space.contains(&n1) && space.contains(&n2));
        let (j1, j2) = (space.extension(&n1), space.extension(&n2));
        let g = space.intertwiner(&j1, &j2, &mut rng).unwrap();
        let gop = AntiUnitaryOp::linear(g.clone());
        assert!(gop.compose(&j1).compose(&gop.inverse()).distance(&j2) < 1e-8);
        for op in &even {
            assert!(rel(&op.conjugate(&g), &g) < 1e-8);
        }
        let x = space.log_witness(&n1);
        let lhs = AntiUnitaryOp::linear(x.clone().exp())
            .compose(&j0)
            .compose(&AntiUnitaryOp::linear((-x).exp()));
        assert!(lhs.distance(&j1) < 1e-8);
    }

    #[test]
    fn rigidity_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_standard(3, &mut rng);
        assert!(inclusion_rigidity_check(&h, &h).unwrap().consistent);
        // A modular-invariant, non-cyclic subspace from a Delta-eigenvector pair.
        let e = std::f64::consts::E;
        let delta = CMat::from_diagonal(&DVector::from_vec(vec![c(e, 0.0), c(1.0 / e, 0.0), c(1.0, 0.0)]));
        let mut f = CMat::zeros(3, 3);
        f[(0, 1)] = c(1.0, 0.0);
        f[(1, 0)] = c(1.0, 0.0);
        f[(2, 2)] = c(1.0, 0.0);
        let j = AntiUnitaryOp::antilinear(f);
        let hs = standard_from_pair(&delta, &j).unwrap();
        let k = RealSubspace::from_real(hs.basis.columns(0, 1).into_owned());
        let kk = RealSubspace::from_complex(&CMat::from_column_slice(3, 1, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        let r = inclusion_rigidity_check(&kk, &hs).unwrap();
        assert!(r.contained && r.modular_invariant && !r.cyclic && r.consistent);
        let _ = k;
    }
}
