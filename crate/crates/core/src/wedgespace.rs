//! Abstract wedges `(x, sigma)` over three concrete graded groups: the affine
//! group of the line, the Moebius group `PGL_2(R)` and the Poincare groups of
//! `R^{1,d}`. Provides the twisted action, duality, the Lie wedge and
//! compression semigroup, the induced order, half-sided factorization and the
//! dictionaries between wedges and half-lines, circle intervals and spacetime
//! wedge regions.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{euler, MatrixLieAlgebra};
use crate::numeric::{null_space, orthonormal_span};

/// Tolerance for group and algebra identities.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WedgeError {
    #[error("group model mismatch: {0} vs {1}")]
    ModelMismatch(ModelKind, ModelKind),
    #[error("not a wedge: {0}")]
    NotAWedge(String),
    #[error("wedges lie in different orbits")]
    DifferentOrbits,
    #[error("element is not in the group model: {0}")]
    NotInGroup(String),
    #[error("{0} is not supported for this model")]
    Unsupported(&'static str),
    #[error("not an inclusion: W1 <= W3 fails")]
    NotOrdered,
    #[error("factorization failed (residual {0:.3e})")]
    Factorization(f64),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Affine,
    Mobius,
    Poincare(usize),
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Affine => write!(f, "Aff(R)"),
            ModelKind::Mobius => write!(f, "Mob"),
            ModelKind::Poincare(d) => write!(f, "Poincare(1+{d})"),
        }
    }
}

impl ModelKind {
    pub fn matrix_size(self) -> usize {
        match self {
            ModelKind::Affine | ModelKind::Mobius => 2,
            ModelKind::Poincare(d) => d + 2,
        }
    }
}

/// Minkowski metric on `R^{1,d}`.
fn eta(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d + 1, d + 1, |i, j| match (i == j, i) {
        (false, _) => 0.0,
        (true, 0) => 1.0,
        _ => -1.0,
    })
}

fn mink(d: usize, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a.transpose() * eta(d) * b)[(0, 0)]
}

/// Element of a graded model group, stored as a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub kind: ModelKind,
    pub matrix: DMatrix<f64>,
}

fn normalize_pgl(m: DMatrix<f64>) -> DMatrix<f64> {
    let det = m.determinant();
    let mut m = m / det.abs().sqrt();
    let first = m.iter().copied().find(|v| v.abs() > 1e-12).unwrap_or(1.0);
    if first < 0.0 {
        m = -m;
    }
    m
}

impl GroupElement {
    fn new(kind: ModelKind, matrix: DMatrix<f64>) -> Self {
        let matrix = match kind {
            ModelKind::Mobius => normalize_pgl(matrix),
            _ => matrix,
        };
        GroupElement { kind, matrix }
    }

    pub fn identity(kind: ModelKind) -> Self {
        let n = kind.matrix_size();
        GroupElement::new(kind, DMatrix::identity(n, n))
    }

    /// The grading sign: `+1` on the identity component side, `-1` on the odd coset.
    pub fn grade(&self) -> i8 {
        let s = match self.kind {
            ModelKind::Affine | ModelKind::Poincare(_) => self.matrix[(0, 0)],
            ModelKind::Mobius => self.matrix.determinant(),
        };
        if s > 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.grade() == 1
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .expect("group elements are invertible");
        GroupElement::new(self.kind, inv)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.kind == other.kind && (&self.matrix - &other.matrix).norm() <= tol * self.matrix.norm().max(1.0)
    }

    /// `Ad(g) x = g x g^{-1}` on the matrix Lie algebra.
    pub fn ad(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let inv = self.matrix.clone().try_inverse().expect("group elements are invertible");
        &self.matrix * x * inv
    }

    /// The twisted adjoint action `eps(g) Ad(g)`.
    pub fn ad_eps(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.ad(x) * f64::from(self.grade())
    }

    pub fn is_involution(&self) -> bool {
        (self * self).approx_eq(&GroupElement::identity(self.kind), TOL)
    }

    /// Image of a point of the projective line (`f64::INFINITY` for the point at infinity).
    pub fn mobius_apply(&self, x: f64) -> f64 {
        let m = &self.matrix;
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        if x.is_infinite() {
            if c.abs() < 1e-15 {
                f64::INFINITY
            } else {
                a / c
            }
        } else {
            let den = c * x + d;
            if den.abs() < 1e-15 * (c * x).abs().max(d.abs()).max(1.0) {
                f64::INFINITY
            } else {
                (a * x + b) / den
            }
        }
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.kind, rhs.kind, "multiplying elements of different groups");
        GroupElement::new(self.kind, &self.matrix * &rhs.matrix)
    }
}

/// Invariant cones in the model Lie algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeModel {
    Trivial,
    /// Nonnegative translations in `aff(R)`.
    AffinePositive,
    /// `{X : V_X >= 0}` in `sl_2(R)`, i.e. `b >= 0, c <= 0, a^2 <= -bc`.
    Sl2,
    /// Closed forward light cone in the translation part of the Poincare algebra.
    ForwardLightCone(usize),
}

impl ConeModel {
    pub fn contains(&self, x: &DMatrix<f64>) -> bool {
        let s = x.norm().max(1.0) * TOL;
        match *self {
            ConeModel::Trivial => x.norm() <= s,
            ConeModel::AffinePositive => {
                x[(0, 0)].abs() <= s && x[(0, 1)] >= -s && x.row(1).norm() <= s
            }
            ConeModel::Sl2 => {
                let (a, b, c) = (x[(0, 0)], x[(0, 1)], x[(1, 0)]);
                (x[(0, 0)] + x[(1, 1)]).abs() <= s && b >= -s && c <= s && a * a <= -b * c + s
            }
            ConeModel::ForwardLightCone(d) => {
                let n = d + 1;
                let lin = x.view((0, 0), (n, n)).norm();
                let v = x.view((0, n), (n, 1));
                let spatial = v.rows(1, d).norm();
                lin <= s && x.row(n).norm() <= s && v[0] >= spatial - s
            }
        }
    }

    /// A list of generating rays (exact for polyhedral cones, sampled on the
    /// boundary for the round cones).
    pub fn rays(&self, samples: usize) -> Vec<DMatrix<f64>> {
        match *self {
            ConeModel::Trivial => Vec::new(),
            ConeModel::AffinePositive => vec![DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])],
            ConeModel::Sl2 => (0..samples.max(2))
                .map(|k| {
                    let phi = PI * k as f64 / samples.max(2) as f64;
                    let (s, c) = phi.sin_cos();
                    DMatrix::from_row_slice(2, 2, &[c * s, c * c, -s * s, -c * s])
                })
                .collect(),
            ConeModel::ForwardLightCone(d) => {
                let n = d + 1;
                let count = if d == 1 { 2 } else { samples.max(2) };
                (0..count)
                    .map(|k| {
                        let mut x = DMatrix::zeros(n + 1, n + 1);
                        x[(0, n)] = 1.0;
                        let phi = TAU * k as f64 / count as f64;
                        match d {
                            1 => x[(1, n)] = if k == 0 { 1.0 } else { -1.0 },
                            2 => {
                                x[(1, n)] = phi.cos();
                                x[(2, n)] = phi.sin();
                            }
                            _ => {
                                // Points on a spiral over the unit sphere.
                                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                                let r = (1.0 - z * z).sqrt();
                                let th = k as f64 * 2.399_963_229_728_653;
                                x[(1, n)] = r * th.cos();
                                x[(2, n)] = r * th.sin();
                                x[(3, n)] = z;
                            }
                        }
                        x
                    })
                    .collect()
            }
        }
    }
}

/// A graded group with its Lie algebra and invariant cone.
#[derive(Debug, Clone)]
pub struct GradedGroupModel {
    pub kind: ModelKind,
    pub algebra: MatrixLieAlgebra,
    pub cone: ConeModel,
}

/// A pair `(x, sigma)` with `sigma` an odd involution fixing `x`, optionally
/// with an element `t` of the group such that the wedge equals `t` applied to
/// the base wedge of its model.
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    pub kind: ModelKind,
    pub x: DMatrix<f64>,
    pub sigma: GroupElement,
    pub transporter: Option<GroupElement>,
}

impl Wedge {
    pub fn approx_eq(&self, other: &Wedge, tol: f64) -> bool {
        self.kind == other.kind
            && (&self.x - &other.x).norm() <= tol * self.x.norm().max(1.0)
            && self.sigma.approx_eq(&other.sigma, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WedgeDescriptor {
    pub model: String,
    pub x: Vec<Vec<f64>>,
    pub sigma: MatrixDescriptor,
    pub transporter: Option<MatrixDescriptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDescriptor {
    pub matrix: Vec<Vec<f64>>,
    pub grade: i8,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl From<&GroupElement> for MatrixDescriptor {
    fn from(g: &GroupElement) -> Self {
        MatrixDescriptor {
            matrix: matrix_rows(&g.matrix),
            grade: g.grade(),
        }
    }
}

impl From<&Wedge> for WedgeDescriptor {
    fn from(w: &Wedge) -> Self {
        WedgeDescriptor {
            model: w.kind.to_string(),
            x: matrix_rows(&w.x),
            sigma: (&w.sigma).into(),
            transporter: w.transporter.as_ref().map(Into::into),
        }
    }
}

/// Geometric counterpart of a wedge.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `(point, inf)` when `upward`, otherwise `(-inf, point)`.
    HalfLine { point: f64, upward: bool },
    /// Open arc of the projective line from `start` to `end` in the positive direction.
    Arc { start: f64, end: f64 },
    /// `{p : l1(p) > 0, l2(p) > 0}` with affine covectors written as `(linear part, constant)`.
    SpacetimeWedge { covectors: [DVector<f64>; 2] },
}

/// Angle of a point of the projective line on the unit circle, via `x -> (i - x)/(i + x)`.
pub fn cayley_angle(x: f64) -> f64 {
    if x.is_infinite() {
        return PI;
    }
    // (i - x)/(i + x) = (1 - x^2 + 2ix) / (1 + x^2)
    let a = (2.0 * x).atan2(1.0 - x * x);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Inverse of [`cayley_angle`].
pub fn point_from_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if (t - PI).abs() < 1e-15 {
        f64::INFINITY
    } else {
        (t / 2.0).tan()
    }
}

/// Start angle and positive length of an arc.
pub fn arc_angles(start: f64, end: f64) -> (f64, f64) {
    let s = cayley_angle(start);
    let e = cayley_angle(end);
    let mut len = (e - s).rem_euclid(TAU);
    if len < 1e-14 {
        len = TAU;
    }
    (s, len)
}

/// Whether the arc `inner` lies in the arc `outer` (closed comparison with tolerance).
pub fn arc_contains(outer: (f64, f64), inner: (f64, f64), tol: f64) -> bool {
    let (os, ol) = arc_angles(outer.0, outer.1);
    let (is, il) = arc_angles(inner.0, inner.1);
    let mut off = (is - os).rem_euclid(TAU);
    if off > TAU - tol {
        off = 0.0;
    }
    off + il <= ol + tol
}

impl Region {
    /// `inner` is contained in `self`.
    pub fn contains_region(&self, inner: &Region) -> Result<bool, WedgeError> {
        match (self, inner) {
            (
                Region::HalfLine { point: a, upward: ua },
                Region::HalfLine { point: b, upward: ub },
            ) => Ok(ua == ub && if *ua { *b >= *a - TOL } else { *b <= *a + TOL }),
            (Region::Arc { start: s1, end: e1 }, Region::Arc { start: s2, end: e2 }) => {
                Ok(arc_contains((*s1, *e1), (*s2, *e2), 1e-9))
            }
            (
                Region::SpacetimeWedge { covectors: outer },
                Region::SpacetimeWedge { covectors: inner_cov },
            ) => Ok(spacetime_contains(outer, inner_cov)),
            _ => Err(WedgeError::InvalidRegion("regions of different kinds".into())),
        }
    }

    pub fn contains_point(&self, p: &DVector<f64>) -> bool {
        match self {
            Region::HalfLine { point, upward } => {
                if *upward {
                    p[0] > *point
                } else {
                    p[0] < *point
                }
            }
            Region::Arc { start, end } => {
                let (s, l) = arc_angles(*start, *end);
                let off = (cayley_angle(p[0]) - s).rem_euclid(TAU);
                off > 0.0 && off < l
            }
            Region::SpacetimeWedge { covectors } => covectors.iter().all(|c| eval_cov(c, p) > 0.0),
        }
    }

    pub fn approx_eq(&self, other: &Region) -> bool {
        matches!(
            (self.contains_region(other), other.contains_region(self)),
            (Ok(true), Ok(true))
        )
    }
}

fn eval_cov(c: &DVector<f64>, p: &DVector<f64>) -> f64 {
    let n = c.len() - 1;
    c.rows(0, n).dot(p) + c[n]
}

/// A point on the edge `{l1 = 0 = l2}` of a spacetime wedge region.
fn wedge_apex(cov: &[DVector<f64>; 2]) -> DVector<f64> {
    let n = cov[0].len() - 1;
    let a = DMatrix::from_rows(&[cov[0].rows(0, n).transpose(), cov[1].rows(0, n).transpose()]);
    let b = DVector::from_vec(vec![-cov[0][n], -cov[1][n]]);
    crate::numeric::pinv(&a, 1e-12) * b
}

/// Covector criterion: each covector of `outer` is a nonnegative combination
/// of those of `inner`, and is nonnegative on the edge of `inner`.
fn spacetime_contains(outer: &[DVector<f64>; 2], inner: &[DVector<f64>; 2]) -> bool {
    let n = outer[0].len() - 1;
    let m = DMatrix::from_columns(&[inner[0].rows(0, n).into_owned(), inner[1].rows(0, n).into_owned()]);
    let pinv = crate::numeric::pinv(&m, 1e-12);
    let apex = wedge_apex(inner);
    outer.iter().all(|l| {
        let lin = l.rows(0, n).into_owned();
        let c = &pinv * &lin;
        let scale = lin.norm().max(1.0);
        (&m * &c - &lin).norm() <= 1e-8 * scale
            && c.iter().all(|v| *v >= -1e-9 * scale)
            && eval_cov(l, &apex) >= -1e-8 * scale
    })
}

/// Result of splitting an inclusion into a negative and a positive half-sided step.
#[derive(Debug, Clone)]
pub struct HalfSidedFactorization {
    pub w2: Wedge,
    /// Generator `y` with `W2 = exp(y).W3`, `y` in `-C` and `[x3, y] = -y`.
    pub y_minus: DMatrix<f64>,
    /// Generator `y` with `W1 = exp(y).W2`, `y` in `C` and `[x2, y] = y`.
    pub y_plus: DMatrix<f64>,
}

/// Rays of `C_+`, a basis of the centralizer part, and rays of `C_-`.
#[derive(Debug, Clone)]
pub struct LieWedge {
    pub plus: Vec<DMatrix<f64>>,
    pub center: Vec<DMatrix<f64>>,
    pub minus: Vec<DMatrix<f64>>,
}

impl LieWedge {
    /// Dimension of `L_W - L_W`.
    pub fn span_dim(&self) -> usize {
        self.plus.len().min(1) + self.center.len() + self.minus.len().min(1)
    }
}

impl GradedGroupModel {
    pub fn affine() -> Self {
        GradedGroupModel {
            kind: ModelKind::Affine,
            algebra: MatrixLieAlgebra::aff(),
            cone: ConeModel::AffinePositive,
        }
    }

    pub fn mobius() -> Self {
        GradedGroupModel {
            kind: ModelKind::Mobius,
            algebra: MatrixLieAlgebra::sl(2).expect("sl2"),
            cone: ConeModel::Sl2,
        }
    }

    pub fn poincare(d: usize) -> Result<Self, WedgeError> {
        if !(1..=3).contains(&d) {
            return Err(WedgeError::Unsupported("spatial dimension outside 1..=3"));
        }
        Ok(GradedGroupModel {
            kind: ModelKind::Poincare(d),
            algebra: MatrixLieAlgebra::poincare(d).expect("poincare algebra"),
            cone: ConeModel::ForwardLightCone(d),
        })
    }

    pub fn with_cone(mut self, cone: ConeModel) -> Self {
        self.cone = cone;
        self
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.kind)
    }

    fn check(&self, kind: ModelKind) -> Result<(), WedgeError> {
        if kind == self.kind {
            Ok(())
        } else {
            Err(WedgeError::ModelMismatch(self.kind, kind))
        }
    }

    /// Validates a matrix as an element of the model group.
    pub fn element(&self, m: DMatrix<f64>) -> Result<GroupElement, WedgeError> {
        let n = self.kind.matrix_size();
        if m.nrows() != n || m.ncols() != n {
            return Err(WedgeError::NotInGroup("wrong matrix size".into()));
        }
        match self.kind {
            ModelKind::Affine => {
                if m[(1, 0)].abs() > TOL || (m[(1, 1)] - 1.0).abs() > TOL || m[(0, 0)].abs() < TOL {
                    return Err(WedgeError::NotInGroup("not of the form [[a, b], [0, 1]]".into()));
                }
            }
            ModelKind::Mobius => {
                if m.determinant().abs() < TOL {
                    return Err(WedgeError::NotInGroup("singular matrix".into()));
                }
            }
            ModelKind::Poincare(d) => {
                let k = d + 1;
                let lam = m.view((0, 0), (k, k)).into_owned();
                let e = eta(d);
                let lorentz = (lam.transpose() * &e * &lam - &e).norm() <= 1e-8 * lam.norm().max(1.0);
                let bottom = (m.row(k).columns(0, k).norm() <= TOL) && (m[(k, k)] - 1.0).abs() <= TOL;
                if !lorentz || !bottom || lam.determinant() < 0.0 {
                    return Err(WedgeError::NotInGroup("not a proper Poincare transformation".into()));
                }
            }
        }
        Ok(GroupElement::new(self.kind, m))
    }

    /// `exp` of a Lie algebra element.
    pub fn exp(&self, x: &DMatrix<f64>) -> GroupElement {
        GroupElement::new(self.kind, x.clone().exp())
    }

    pub fn base_wedge(&self) -> Wedge {
        let (x, sigma) = match self.kind {
            ModelKind::Affine => (
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]),
            ),
            ModelKind::Mobius => (
                euler::sl2_h(),
                DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]),
            ),
            ModelKind::Poincare(d) => (boost_generator(d, 1), spatial_flip(d, 1)),
        };
        Wedge {
            kind: self.kind,
            x,
            sigma: GroupElement::new(self.kind, sigma),
            transporter: Some(self.identity()),
        }
    }

    /// Builds a wedge from raw data, checking the defining conditions.
    pub fn wedge(&self, x: DMatrix<f64>, sigma: GroupElement) -> Result<Wedge, WedgeError> {
        self.check(sigma.kind)?;
        if !self.algebra.contains(&x) {
            return Err(WedgeError::NotAWedge("x is not in the Lie algebra".into()));
        }
        if sigma.is_even() {
            return Err(WedgeError::NotAWedge("sigma must be odd".into()));
        }
        if !sigma.is_involution() {
            return Err(WedgeError::NotAWedge("sigma must be an involution".into()));
        }
        if (sigma.ad(&x) - &x).norm() > TOL * x.norm().max(1.0) {
            return Err(WedgeError::NotAWedge("Ad(sigma) x != x".into()));
        }
        Ok(Wedge {
            kind: self.kind,
            x,
            sigma,
            transporter: None,
        })
    }

    /// `g.(x, sigma) = (eps(g) Ad(g) x, g sigma g^{-1})`.
    pub fn act(&self, g: &GroupElement, w: &Wedge) -> Result<Wedge, WedgeError> {
        self.check(g.kind)?;
        self.check(w.kind)?;
        Ok(Wedge {
            kind: self.kind,
            x: g.ad_eps(&w.x),
            sigma: &(g * &w.sigma) * &g.inverse(),
            transporter: w.transporter.as_ref().map(|t| g * t),
        })
    }

    /// `W' = (-x, sigma)`.
    pub fn dual(&self, w: &Wedge) -> Wedge {
        let base_sigma = self.base_wedge().sigma;
        Wedge {
            kind: w.kind,
            x: -&w.x,
            sigma: w.sigma.clone(),
            transporter: w.transporter.as_ref().map(|t| t * &base_sigma),
        }
    }

    /// `exp(t x_W)` as a group element.
    pub fn lambda(&self, w: &Wedge, t: f64) -> GroupElement {
        self.exp(&(&w.x * t))
    }

    /// Coordinate matrix of `Ad(g)` on the model Lie algebra.
    pub fn ad_coordinates(&self, g: &GroupElement) -> DMatrix<f64> {
        let d = self.algebra.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, b) in self.algebra.basis.iter().enumerate() {
            let c = self
                .algebra
                .coords(&g.ad(b))
                .expect("Ad preserves the Lie algebra");
            m.set_column(j, &c);
        }
        m
    }

    /// `x` is an Euler element and `Ad(sigma)` is its Euler involution.
    pub fn is_euler_couple(&self, w: &Wedge) -> bool {
        let Ok(inv) = self.algebra.euler_involution(&w.x) else {
            return false;
        };
        let ad = self.ad_coordinates(&w.sigma);
        (ad - inv).norm() <= 1e-8 * (self.algebra.dim() as f64).sqrt()
    }

    /// `Ad(sigma_1) x_2 = -x_2`.
    pub fn orthogonality_check(&self, w1: &Wedge, w2: &Wedge) -> bool {
        (w1.sigma.ad(&w2.x) + &w2.x).norm() <= TOL * w2.x.norm().max(1.0)
    }

    /// Intersection of `g^{-sigma}` with an eigenspace of `ad x`, as coordinate columns.
    fn odd_eigenspace(&self, w: &Wedge, lambda: f64, sigma_sign: f64) -> DMatrix<f64> {
        let d = self.algebra.dim();
        let id = DMatrix::<f64>::identity(d, d);
        let ad_sigma = self.ad_coordinates(&w.sigma);
        let ad_x = self.algebra.ad_of_coords(&self.algebra.coords(&w.x).expect("x in algebra"));
        let mut stacked = DMatrix::zeros(2 * d, d);
        stacked.view_mut((0, 0), (d, d)).copy_from(&(ad_sigma - &id * sigma_sign));
        stacked.view_mut((d, 0), (d, d)).copy_from(&(ad_x - &id * lambda));
        null_space(&stacked, 1e-9)
    }

    /// Coordinates of the linear span of the cone.
    fn cone_span(&self) -> DMatrix<f64> {
        let d = self.algebra.dim();
        let rays = self.cone.rays(16);
        if rays.is_empty() {
            return DMatrix::zeros(d, 0);
        }
        let cols: Vec<DVector<f64>> = rays
            .iter()
            .map(|r| self.algebra.coords(r).expect("cone inside the algebra"))
            .collect();
        orthonormal_span(&DMatrix::from_columns(&cols), 1e-9)
    }

    fn cone_section(&self, sign: f64, space: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>, WedgeError> {
        if space.ncols() == 0 {
            return Ok(Vec::new());
        }
        // Only the part of the eigenspace inside the span of the cone matters.
        let span = self.cone_span();
        let d = self.algebra.dim();
        let off = DMatrix::<f64>::identity(d, d) - &span * span.transpose();
        let kept = null_space(&(&off * space), 1e-9);
        let space = &orthonormal_span(&(space * kept), 1e-9);
        let member = |c: &DVector<f64>| {
            let m = self.algebra.element(c) * sign;
            self.cone.contains(&m)
        };
        match space.ncols() {
            0 => Ok(Vec::new()),
            1 => {
                let u = space.column(0).into_owned();
                let mut out = Vec::new();
                for s in [1.0, -1.0] {
                    let v = &u * s;
                    if member(&v) {
                        out.push(self.algebra.element(&v));
                    }
                }
                // A pointed cone meets a line in at most one ray.
                if out.len() == 2 {
                    return Err(WedgeError::Unsupported("cone is not pointed on this line"));
                }
                Ok(out)
            }
            2 => {
                let steps = 7200;
                let inside: Vec<bool> = (0..steps)
                    .map(|k| {
                        let th = TAU * k as f64 / steps as f64;
                        member(&(space.column(0) * th.cos() + space.column(1) * th.sin()))
                    })
                    .collect();
                let mut rays = Vec::new();
                for k in 0..steps {
                    let prev = inside[(k + steps - 1) % steps];
                    let next = inside[(k + 1) % steps];
                    if inside[k] && (!prev || !next) {
                        let th = TAU * k as f64 / steps as f64;
                        let v = space.column(0) * th.cos() + space.column(1) * th.sin();
                        rays.push(self.algebra.element(&v));
                    }
                }
                Ok(rays)
            }
            _ => Err(WedgeError::Unsupported("cone sections of dimension above 2")),
        }
    }

    /// `C_+(W) + g_W + C_-(W)`.
    pub fn lie_wedge(&self, w: &Wedge) -> Result<LieWedge, WedgeError> {
        let plus_space = self.odd_eigenspace(w, 1.0, -1.0);
        let minus_space = self.odd_eigenspace(w, -1.0, -1.0);
        let center = self.odd_eigenspace(w, 0.0, 1.0);
        Ok(LieWedge {
            plus: self.cone_section(1.0, &plus_space)?,
            center: center
                .column_iter()
                .map(|c| self.algebra.element(&c.into_owned()))
                .collect(),
            minus: self.cone_section(-1.0, &minus_space)?,
        })
    }

    /// Membership in the compression semigroup of the base wedge.
    fn in_base_semigroup(&self, g: &GroupElement) -> bool {
        if !g.is_even() {
            return false;
        }
        match self.kind {
            ModelKind::Affine => g.matrix[(0, 1)] >= -TOL,
            ModelKind::Mobius => {
                let inner = (g.mobius_apply(0.0), g.mobius_apply(f64::INFINITY));
                arc_contains((0.0, f64::INFINITY), inner, 1e-9)
            }
            ModelKind::Poincare(_) => {
                let base = self.base_region();
                let img = self.act_region(g, &base);
                base.contains_region(&img).unwrap_or(false)
            }
        }
    }

    /// Recovers a transporter for a wedge in the orbit of the base wedge.
    pub fn transporter_of(&self, w: &Wedge) -> Result<GroupElement, WedgeError> {
        if let Some(t) = &w.transporter {
            return Ok(t.clone());
        }
        let region = self.wedge_to_region(w)?;
        let candidate = self.region_to_wedge(&region)?;
        if candidate.approx_eq(w, 1e-8) {
            Ok(candidate.transporter.expect("region_to_wedge records a transporter"))
        } else {
            Err(WedgeError::DifferentOrbits)
        }
    }

    /// `g` lies in the compression semigroup of `W`.
    pub fn in_semigroup(&self, g: &GroupElement, w: &Wedge) -> Result<bool, WedgeError> {
        self.check(g.kind)?;
        let t = self.transporter_of(w)?;
        let conj = &(&t.inverse() * g) * &t;
        Ok(self.in_base_semigroup(&conj))
    }

    /// Both wedges lie in one orbit of the identity component.
    fn even_transporters(&self, w1: &Wedge, w2: &Wedge) -> Result<(GroupElement, GroupElement), WedgeError> {
        let t1 = self.transporter_of(w1)?;
        let t2 = self.transporter_of(w2)?;
        if t1.grade() == t2.grade() {
            return Ok((t1, t2));
        }
        // Odd transporters can be made even when the dual base wedge is reachable by an even element.
        let base = self.base_wedge();
        if let Some(r) = self.even_dualizer() {
            let fix = &base.sigma * &r;
            let t1 = if t1.is_even() { t1 } else { &t1 * &fix };
            let t2 = if t2.is_even() { t2 } else { &t2 * &fix };
            return Ok((t1, t2));
        }
        Err(WedgeError::DifferentOrbits)
    }

    /// An even element mapping the base wedge to its dual, if one exists.
    pub fn even_dualizer(&self) -> Option<GroupElement> {
        match self.kind {
            ModelKind::Affine | ModelKind::Poincare(1) => None,
            ModelKind::Mobius => Some(mobius::rotation(PI)),
            ModelKind::Poincare(d) => {
                // Rotation by pi in the (x1, x2) plane.
                let mut m = DMatrix::identity(d + 2, d + 2);
                m[(1, 1)] = -1.0;
                m[(2, 2)] = -1.0;
                Some(GroupElement::new(self.kind, m))
            }
        }
    }

    /// `W1 <= W2` via `g2^{-1} g1` in the compression semigroup of the base wedge.
    pub fn leq(&self, w1: &Wedge, w2: &Wedge) -> Result<bool, WedgeError> {
        self.check(w1.kind)?;
        self.check(w2.kind)?;
        let (t1, t2) = self.even_transporters(w1, w2)?;
        // For odd transporters `W_i = (t_i sigma) W'_b`, and conjugating by sigma
        // turns the semigroup of the dual base wedge back into the base one.
        Ok(self.in_base_semigroup(&(&t2.inverse() * &t1)))
    }

    pub fn base_region(&self) -> Region {
        match self.kind {
            ModelKind::Affine => Region::HalfLine {
                point: 0.0,
                upward: true,
            },
            ModelKind::Mobius => Region::Arc {
                start: 0.0,
                end: f64::INFINITY,
            },
            ModelKind::Poincare(d) => {
                let mut l1 = DVector::zeros(d + 2);
                l1[0] = -1.0;
                l1[1] = 1.0;
                let mut l2 = DVector::zeros(d + 2);
                l2[0] = 1.0;
                l2[1] = 1.0;
                Region::SpacetimeWedge { covectors: [l1, l2] }
            }
        }
    }

    /// Image of a region under a group element.
    pub fn act_region(&self, g: &GroupElement, r: &Region) -> Region {
        match r {
            Region::HalfLine { point, upward } => {
                let (a, b) = (g.matrix[(0, 0)], g.matrix[(0, 1)]);
                Region::HalfLine {
                    point: a * point + b,
                    upward: if a > 0.0 { *upward } else { !*upward },
                }
            }
            Region::Arc { start, end } => {
                let (s, e) = (g.mobius_apply(*start), g.mobius_apply(*end));
                if g.is_even() {
                    Region::Arc { start: s, end: e }
                } else {
                    Region::Arc { start: e, end: s }
                }
            }
            Region::SpacetimeWedge { covectors } => {
                let gi = g.inverse().matrix;
                let map = |c: &DVector<f64>| -> DVector<f64> {
                    let v = (c.transpose() * &gi).transpose();
                    let n = v.len() - 1;
                    let s = v.rows(0, n).norm();
                    v / s
                };
                Region::SpacetimeWedge {
                    covectors: [map(&covectors[0]), map(&covectors[1])],
                }
            }
        }
    }

    /// The region of a wedge, read off from `x`: where its flow moves forward.
    pub fn wedge_to_region(&self, w: &Wedge) -> Result<Region, WedgeError> {
        self.check(w.kind)?;
        let x = &w.x;
        match self.kind {
            ModelKind::Affine => {
                let (alpha, beta) = (x[(0, 0)], x[(0, 1)]);
                if alpha.abs() < TOL {
                    return Err(WedgeError::NotAWedge("no fixed point".into()));
                }
                Ok(Region::HalfLine {
                    point: -beta / alpha,
                    upward: alpha > 0.0,
                })
            }
            ModelKind::Mobius => {
                let (a, b, c) = (x[(0, 0)], x[(0, 1)], x[(1, 0)]);
                let field = |y: f64| {
                    if y.is_infinite() {
                        -c
                    } else {
                        b + 2.0 * a * y - c * y * y
                    }
                };
                // Fixed points: roots of -c y^2 + 2 a y + b.
                let (r1, r2) = if c.abs() < 1e-14 {
                    if a.abs() < 1e-14 {
                        return Err(WedgeError::NotAWedge("parabolic generator".into()));
                    }
                    (-b / (2.0 * a), f64::INFINITY)
                } else {
                    let disc = a * a + b * c;
                    if disc <= 0.0 {
                        return Err(WedgeError::NotAWedge("generator has no two fixed points".into()));
                    }
                    let s = disc.sqrt();
                    ((a - s) / c, (a + s) / c)
                };
                let (s, l) = arc_angles(r1, r2);
                let mid = point_from_angle(s + l / 2.0);
                Ok(if field(mid) > 0.0 {
                    Region::Arc { start: r1, end: r2 }
                } else {
                    Region::Arc { start: r2, end: r1 }
                })
            }
            ModelKind::Poincare(d) => {
                let n = d + 1;
                let lin = x.view((0, 0), (n, n)).into_owned();
                let v = x.view((0, n), (n, 1)).into_owned();
                let up = null_space(&(&lin - DMatrix::identity(n, n)), 1e-8);
                let down = null_space(&(&lin + DMatrix::identity(n, n)), 1e-8);
                if up.ncols() != 1 || down.ncols() != 1 {
                    return Err(WedgeError::NotAWedge("linear part is not a boost".into()));
                }
                let future = |u: DVector<f64>| if u[0] < 0.0 { -u } else { u };
                let up = future(up.column(0).into_owned());
                let down = future(down.column(0).into_owned());
                let apex = -(crate::numeric::pinv(&lin, 1e-12) * &v);
                let cov = |w: DVector<f64>| -> DVector<f64> {
                    let lin_part = eta(d) * &w;
                    let mut c = DVector::zeros(n + 1);
                    c.rows_mut(0, n).copy_from(&lin_part);
                    c[n] = -lin_part.dot(&apex);
                    let s = lin_part.norm();
                    c / s
                };
                Ok(Region::SpacetimeWedge {
                    covectors: [cov(-up), cov(down)],
                })
            }
        }
    }

    /// A wedge with recorded transporter whose region is `r`.
    pub fn region_to_wedge(&self, r: &Region) -> Result<Wedge, WedgeError> {
        let g = match (self.kind, r) {
            (ModelKind::Affine, Region::HalfLine { point, upward }) => {
                let a = if *upward { 1.0 } else { -1.0 };
                GroupElement::new(self.kind, DMatrix::from_row_slice(2, 2, &[a, *point, 0.0, 1.0]))
            }
            (ModelKind::Mobius, Region::Arc { start, end }) => mobius::arc_map(*start, *end)?,
            (ModelKind::Poincare(d), Region::SpacetimeWedge { covectors }) => {
                poincare_region_map(d, covectors)?
            }
            _ => return Err(WedgeError::InvalidRegion("region does not match the model".into())),
        };
        self.act(&g, &self.base_wedge())
    }

    /// Splits `W1 <= W3` as `W1 <= W2 <= W3` with half-sided steps; `W2 = g_- W3`.
    pub fn halfsided_factorize(&self, w1: &Wedge, w3: &Wedge) -> Result<HalfSidedFactorization, WedgeError> {
        if !self.leq(w1, w3)? {
            return Err(WedgeError::NotOrdered);
        }
        let (t1, t3) = self.even_transporters(w1, w3)?;
        let s = &t3.inverse() * &t1;
        let odd = !t3.is_even();
        // Conjugation by an odd transporter exchanges the roles of C_+ and C_-.
        let (y_first, y_second) = self.base_factorization(&s, odd)?;
        let g_first = self.exp(&y_first);
        let y_minus = t3.ad(&y_first);
        let w2 = self.act(&self.exp(&y_minus), w3)?;
        let y_plus = t3.ad(&g_first.ad(&y_second));
        let w2_check = self.act(&self.exp(&y_plus), &w2)?;
        let residual = (&w2_check.x - &w1.x).norm();
        if !w2_check.approx_eq(w1, 1e-7) {
            return Err(WedgeError::Factorization(residual));
        }
        Ok(HalfSidedFactorization { w2, y_minus, y_plus })
    }

    /// Factors `s` in the base semigroup as `exp(a) exp(b) g0` and returns `(a, b)`.
    /// With `plus_first == false` the first factor lies in `exp(C_-)`,
    /// otherwise in `exp(C_+)`.
    fn base_factorization(
        &self,
        s: &GroupElement,
        plus_first: bool,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>), WedgeError> {
        let e = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let f = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        match self.kind {
            ModelKind::Affine => {
                let b = s.matrix[(0, 1)];
                let zero = DMatrix::zeros(2, 2);
                Ok(if plus_first { (e * b, zero) } else { (zero, e * b) })
            }
            ModelKind::Mobius => {
                let p = s.mobius_apply(0.0);
                let q = s.mobius_apply(f64::INFINITY);
                if plus_first {
                    // exp(v e) exp(u f): (0, inf) -> (v, v + 1/u).
                    let u = if q.is_infinite() { 0.0 } else { 1.0 / (q - p) };
                    Ok((e * p, f * u))
                } else {
                    // exp(u f) exp(v e): (0, inf) -> (v/(uv + 1), 1/u).
                    let u = if q.is_infinite() { 0.0 } else { 1.0 / q };
                    let v = p / (1.0 - u * p);
                    Ok((f * u, e * v))
                }
            }
            ModelKind::Poincare(d) => {
                let n = d + 1;
                let a = s.matrix.view((0, n), (n, 1)).into_owned();
                let alpha = (a[1] + a[0]) / 2.0;
                let beta = (a[1] - a[0]) / 2.0;
                let mut yp = DMatrix::zeros(n + 1, n + 1);
                yp[(0, n)] = alpha;
                yp[(1, n)] = alpha;
                let mut ym = DMatrix::zeros(n + 1, n + 1);
                ym[(0, n)] = -beta;
                ym[(1, n)] = beta;
                Ok(if plus_first { (yp, ym) } else { (ym, yp) })
            }
        }
    }

    /// A random element of the identity component.
    pub fn random_even<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self.kind {
            ModelKind::Affine => {
                let a: f64 = rng.gen_range(-1.5..1.5f64).exp();
                let b: f64 = rng.gen_range(-3.0..3.0);
                GroupElement::new(self.kind, DMatrix::from_row_slice(2, 2, &[a, b, 0.0, 1.0]))
            }
            ModelKind::Mobius => {
                let r = mobius::rotation(rng.gen_range(0.0..TAU));
                let d = mobius::dilation(rng.gen_range(-1.5..1.5));
                let t = mobius::translation(rng.gen_range(-2.0..2.0));
                &(&r * &d) * &t
            }
            ModelKind::Poincare(d) => {
                let n = d + 1;
                let mut x = DMatrix::zeros(n + 1, n + 1);
                for (k, b) in self.algebra.basis.iter().enumerate() {
                    let scale = if k < n * (n - 1) / 2 { 0.8 } else { 2.0 };
                    x += b * rng.gen_range(-scale..scale);
                }
                self.exp(&x)
            }
        }
    }

    /// A random element of the odd coset.
    pub fn random_odd<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let g = self.random_even(rng);
        &g * &self.base_wedge().sigma
    }
}

/// Boost generator in the `(x_0, x_i)` plane of the Poincare algebra.
pub fn boost_generator(d: usize, i: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d + 2, d + 2);
    m[(0, i)] = 1.0;
    m[(i, 0)] = 1.0;
    m
}

/// `diag(-1, ..., -1 at i, ..., 1)`: time reversal composed with the reflection of `x_i`.
pub fn spatial_flip(d: usize, i: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d + 2, d + 2);
    m[(0, 0)] = -1.0;
    m[(i, i)] = -1.0;
    m
}

/// Poincare element mapping the standard right wedge onto the given region.
fn poincare_region_map(d: usize, cov: &[DVector<f64>; 2]) -> Result<GroupElement, WedgeError> {
    let n = d + 1;
    let e = eta(d);
    // Null vectors w_i with l_i(p) = eta(w_i, p) + const.
    let to_vec = |c: &DVector<f64>| -> DVector<f64> { &e * c.rows(0, n) };
    let apex = wedge_apex(cov);
    let kind = ModelKind::Poincare(d);
    // Base covectors: x1 - x0 = eta(-(e0 + e1), p) and x1 + x0 = eta(e0 - e1, p).
    for order in [[0usize, 1usize], [1, 0]] {
        let w1 = to_vec(&cov[order[0]]);
        let w2 = to_vec(&cov[order[1]]);
        for w in [&w1, &w2] {
            if mink(d, w, w).abs() > 1e-8 * w.norm_squared().max(1.0) {
                return Err(WedgeError::InvalidRegion("covectors must be null".into()));
            }
        }
        let pair = mink(d, &w1, &w2);
        if pair >= -1e-12 {
            return Err(WedgeError::InvalidRegion("not a spacelike wedge".into()));
        }
        let c2 = 2.0 / (-pair);
        let img1 = w1.clone();
        let img2 = &w2 * c2;
        // Lambda maps bw[0] -> img1 and bw[1] -> img2; on e0, e1:
        // e0 = (bw1 - bw0)/2, e1 = -(bw0 + bw1)/2.
        let le0 = (&img2 - &img1) / 2.0;
        let le1 = -(&img1 + &img2) / 2.0;
        let mut cols = vec![le0.clone(), le1.clone()];
        if d > 1 {
            // Spacelike complement of span(le0, le1), orthonormal for -eta.
            let span = DMatrix::from_columns(&[&e * &le0, &e * &le1]);
            let comp = null_space(&span.transpose(), 1e-10);
            let mut basis: Vec<DVector<f64>> = Vec::new();
            for c in comp.column_iter() {
                let mut v = c.into_owned();
                for b in &basis {
                    let proj = -mink(d, &v, b);
                    v -= b * proj;
                }
                let nrm = (-mink(d, &v, &v)).sqrt();
                basis.push(v / nrm);
            }
            cols.extend(basis);
        }
        let mut lam = DMatrix::from_columns(&cols);
        if lam.determinant() < 0.0 {
            if d == 1 {
                continue;
            }
            let last = lam.ncols() - 1;
            let c = -lam.column(last).into_owned();
            lam.set_column(last, &c);
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&lam);
        m.view_mut((0, n), (n, 1)).copy_from(&apex);
        return Ok(GroupElement::new(kind, m));
    }
    Err(WedgeError::InvalidRegion("no proper Lorentz map onto this region".into()))
}

/// Named elements of the Moebius group.
pub mod mobius {
    use super::*;

    fn snap(v: f64) -> f64 {
        if v.abs() < 1e-15 {
            0.0
        } else {
            v
        }
    }

    /// Rotation of the circle by the angle `theta`.
    pub fn rotation(theta: f64) -> GroupElement {
        let (s, c) = (theta / 2.0).sin_cos();
        let (s, c) = (snap(s), snap(c));
        GroupElement::new(ModelKind::Mobius, DMatrix::from_row_slice(2, 2, &[c, s, -s, c]))
    }

    /// `x -> e^t x`.
    pub fn dilation(t: f64) -> GroupElement {
        let a = (t / 2.0).exp();
        GroupElement::new(ModelKind::Mobius, DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a]))
    }

    /// `x -> x + t`.
    pub fn translation(t: f64) -> GroupElement {
        GroupElement::new(ModelKind::Mobius, DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]))
    }

    /// `x -> -x`.
    pub fn reflection() -> GroupElement {
        GroupElement::new(ModelKind::Mobius, DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]))
    }

    /// Orientation preserving map sending `0 -> start`, `inf -> end`.
    pub fn arc_map(start: f64, end: f64) -> Result<GroupElement, WedgeError> {
        let (s, l) = arc_angles(start, end);
        if (start - end).abs() < 1e-14 || l >= TAU - 1e-12 {
            return Err(WedgeError::InvalidRegion("degenerate arc".into()));
        }
        let mid = point_from_angle(s + l / 2.0);
        // Three-point map 0 -> start, 1 -> mid, inf -> end.
        let m = match (start.is_infinite(), end.is_infinite(), mid.is_infinite()) {
            (false, false, false) => {
                let k = (mid - start) / (end - mid);
                DMatrix::from_row_slice(2, 2, &[end * k, start, k, 1.0])
            }
            (false, false, true) => DMatrix::from_row_slice(2, 2, &[-end, start, -1.0, 1.0]),
            (false, true, _) => DMatrix::from_row_slice(2, 2, &[mid - start, start, 0.0, 1.0]),
            (true, false, _) => DMatrix::from_row_slice(2, 2, &[end, mid - end, 1.0, 0.0]),
            (true, true, _) => return Err(WedgeError::InvalidRegion("degenerate arc".into())),
        };
        let mut g = GroupElement::new(ModelKind::Mobius, m);
        if !g.is_even() {
            return Err(WedgeError::InvalidRegion("arc map is orientation reversing".into()));
        }
        g.matrix = normalize_pgl(g.matrix);
        Ok(g)
    }
}

/// Random wedge in the orbit of the base wedge, with recorded transporter.
pub fn random_wedge<R: Rng + ?Sized>(model: &GradedGroupModel, rng: &mut R, allow_odd: bool) -> Wedge {
    let g = if allow_odd && rng.gen_bool(0.5) {
        model.random_odd(rng)
    } else {
        model.random_even(rng)
    };
    model.act(&g, &model.base_wedge()).expect("same model")
}

/// Maximal residuals and failures of the structural identities for a model.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaSuiteReport {
    pub samples: usize,
    pub max_residual: f64,
    pub failures: Vec<String>,
}

impl LemmaSuiteReport {
    fn record(&mut self, name: &str, residual: f64) {
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
        if !(residual <= TOL) {
            self.failures.push(format!("{name}: residual {residual:.3e}"));
        }
    }

    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_residual <= TOL
    }
}

fn wedge_residual(a: &Wedge, b: &Wedge) -> f64 {
    let dx = (&a.x - &b.x).norm() / a.x.norm().max(1.0);
    let ds = (&a.sigma.matrix - &b.sigma.matrix).norm() / a.sigma.matrix.norm().max(1.0);
    dx.max(ds)
}

/// Checks the structural identities of wedges, their semigroups and their order
/// on random inputs.
pub fn lemma_suite<R: Rng>(model: &GradedGroupModel, rng: &mut R, samples: usize) -> LemmaSuiteReport {
    let mut rep = LemmaSuiteReport {
        samples,
        ..Default::default()
    };
    for _ in 0..samples {
        let w = random_wedge(model, rng, true);
        let wd = model.dual(&w);
        let t: f64 = rng.gen_range(-2.0..2.0);
        let lam = model.lambda(&w, t);
        // (i) lambda_W(t) fixes W and W', sigma_W maps W to W'.
        rep.record("lambda fixes W", wedge_residual(&model.act(&lam, &w).unwrap(), &w));
        rep.record("lambda fixes W'", wedge_residual(&model.act(&lam, &wd).unwrap(), &wd));
        rep.record("sigma maps W to W'", wedge_residual(&model.act(&w.sigma, &w).unwrap(), &wd));
        // (ii) sigma_{W'} = sigma_W and lambda_{W'}(t) = lambda_W(-t).
        rep.record(
            "lambda of dual",
            (&model.lambda(&wd, t).matrix - &model.lambda(&w, -t).matrix).norm()
                / lam.matrix.norm().max(1.0),
        );
        // Duality commutes with the action.
        let g = if rng.gen_bool(0.5) {
            model.random_even(rng)
        } else {
            model.random_odd(rng)
        };
        let gw = model.act(&g, &w).unwrap();
        rep.record("dual commutes with action", wedge_residual(&model.dual(&gw), &model.act(&g, &wd).unwrap()));
        rep.record("double dual", wedge_residual(&model.dual(&wd), &w));
        rep.require("Euler couple invariance", model.is_euler_couple(&gw) == model.is_euler_couple(&w));
        // (iv) L_{W'} = -L_W.
        if let (Ok(lw), Ok(lwd)) = (model.lie_wedge(&w), model.lie_wedge(&wd)) {
            rep.require("L_W' = -L_W sizes", lw.plus.len() == lwd.minus.len() && lw.minus.len() == lwd.plus.len());
            for (a, b) in lw.plus.iter().zip(&lwd.minus) {
                rep.record("C+(W) = -C-(W')", (a / a.norm() + b / b.norm()).norm());
            }
        } else {
            rep.require("lie wedge computable", false);
        }
        // (iv) S_{W'} = S_W^{-1}; (v) S_{gW} = g S_W g^{-1}.
        let h = model.random_even(rng);
        let s_dual = model.in_semigroup(&h, &wd).unwrap();
        let s_inv = model.in_semigroup(&h.inverse(), &w).unwrap();
        rep.require("S_W' = S_W^-1", s_dual == s_inv);
        let lhs = model.in_semigroup(&h, &gw).unwrap();
        let rhs = model.in_semigroup(&(&(&g.inverse() * &h) * &g), &w).unwrap();
        rep.require("S_gW = g S_W g^-1", lhs == rhs);
        // (vi) order equivariance, on a pair that is ordered by construction.
        if let Some(s) = semigroup_sample(model, rng) {
            let t = w.transporter.clone().unwrap();
            let w_small = model.act(&(&(&t * &s) * &t.inverse()), &w).unwrap();
            let e = model.random_even(rng);
            let ordered = model.leq(&w_small, &w).unwrap_or(false);
            rep.require("semigroup element yields W1 <= W", ordered);
            let moved = model
                .leq(&model.act(&e, &w_small).unwrap(), &model.act(&e, &w).unwrap())
                .unwrap_or(false);
            rep.require("order equivariance", moved);
        }
    }
    rep
}

/// A random element of the compression semigroup of the base wedge.
pub fn semigroup_sample<R: Rng + ?Sized>(model: &GradedGroupModel, rng: &mut R) -> Option<GroupElement> {
    let base = model.base_wedge();
    let lw = model.lie_wedge(&base).ok()?;
    let mut g = model.exp(&(&base.x * rng.gen_range(-1.0..1.0)));
    for c in lw.center.iter() {
        g = &g * &model.exp(&(c * rng.gen_range(-0.5..0.5)));
    }
    let pick = |rays: &[DMatrix<f64>], rng: &mut R| -> DMatrix<f64> {
        let mut y = DMatrix::zeros(base.x.nrows(), base.x.ncols());
        for r in rays {
            y += r * rng.gen_range(0.0..1.5);
        }
        y
    };
    let yp = pick(&lw.plus, rng);
    let ym = pick(&lw.minus, rng);
    Some(&(&model.exp(&ym) * &model.exp(&yp)) * &g)
}

/// Spans of a list of matrices, as a dimension.
pub fn span_dim(ms: &[DMatrix<f64>]) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let cols: Vec<DVector<f64>> = ms.iter().map(crate::numeric::flatten).collect();
    orthonormal_span(&DMatrix::from_columns(&cols), 1e-9).ncols()
}
