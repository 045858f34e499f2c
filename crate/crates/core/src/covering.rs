//! Central twists for covering groups.
//!
//! Covers the subgroups `Z^-`, `Z_1`, `Z_2` of a cyclic center with a grading
//! involution, the boundary map into `Z^-`, alpha-twisted complements and the
//! twisted action, orbit counts, and an exact model of the universal and
//! finite covers of the Moebius group acting on the universal cover of the
//! circle.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wedgespace::{
    cayley_angle, mobius, point_from_angle, GradedGroupModel, GroupElement, ModelKind, Region,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoveringError {
    #[error("{0} is not in Z^-")]
    NotInZMinus(i64),
    #[error("element does not stabilize the base wedge")]
    NotInStabilizer,
    #[error("invalid cover order {0}")]
    InvalidOrder(u64),
    #[error("not a wedge: {0}")]
    NotAWedge(String),
    #[error("z = {0} is not fixed by the grading involution")]
    NotSigmaFixed(i64),
    #[error("interval of length {0} is not admissible")]
    NotAdmissible(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CenterKind {
    Infinite,
    Cyclic(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaAction {
    Inversion,
    Trivial,
}

/// An abstract center `Z` or `Z_n`, written additively, with the action of the
/// grading involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CentralModel {
    pub kind: CenterKind,
    pub action: SigmaAction,
}

/// The subgroup generated by one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subgroup {
    pub ambient: CenterKind,
    /// Canonical generator: `g >= 0` in `Z`; a divisor of `n` in `Z_n`, with `n` meaning `{0}`.
    pub generator: u64,
}

impl Subgroup {
    pub fn new(ambient: CenterKind, g: i64) -> Self {
        let g = g.unsigned_abs();
        let generator = match ambient {
            CenterKind::Infinite => g,
            CenterKind::Cyclic(n) => g.gcd(&n),
        };
        Subgroup { ambient, generator }
    }

    pub fn trivial(ambient: CenterKind) -> Self {
        Subgroup::new(ambient, 0)
    }

    pub fn is_trivial(&self) -> bool {
        match self.ambient {
            CenterKind::Infinite => self.generator == 0,
            CenterKind::Cyclic(n) => self.generator == n,
        }
    }

    /// `None` for infinite subgroups.
    pub fn order(&self) -> Option<u64> {
        match self.ambient {
            CenterKind::Infinite => (self.generator == 0).then_some(1),
            CenterKind::Cyclic(n) => Some(n / self.generator),
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        match self.ambient {
            CenterKind::Infinite => {
                if self.generator == 0 {
                    x == 0
                } else {
                    x.rem_euclid(self.generator as i64) == 0
                }
            }
            CenterKind::Cyclic(n) => x.rem_euclid(n as i64).rem_euclid(self.generator as i64) == 0,
        }
    }

    pub fn is_subgroup_of(&self, sup: &Subgroup) -> bool {
        sup.contains(self.generator as i64)
    }

    /// Index `[sup : self]`, `None` when infinite.
    pub fn index_in(&self, sup: &Subgroup) -> Option<u64> {
        debug_assert!(self.is_subgroup_of(sup));
        match self.ambient {
            CenterKind::Infinite => match (sup.generator, self.generator) {
                (0, _) => Some(1),
                (_, 0) => None,
                (h, g) => Some(g / h),
            },
            CenterKind::Cyclic(_) => Some(sup.order()? / self.order()?),
        }
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "{{0}}");
        }
        let prefix = if self.generator == 1 {
            String::new()
        } else {
            self.generator.to_string()
        };
        match self.ambient {
            CenterKind::Infinite => write!(f, "{prefix}Z"),
            CenterKind::Cyclic(n) => write!(f, "{prefix}Z_{n}"),
        }
    }
}

impl Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl CentralModel {
    pub fn new(kind: CenterKind, action: SigmaAction) -> Result<Self, CoveringError> {
        if kind == CenterKind::Cyclic(0) {
            return Err(CoveringError::InvalidOrder(0));
        }
        Ok(CentralModel { kind, action })
    }

    pub fn integers_inversion() -> Self {
        CentralModel {
            kind: CenterKind::Infinite,
            action: SigmaAction::Inversion,
        }
    }

    pub fn cyclic(n: u64, action: SigmaAction) -> Result<Self, CoveringError> {
        Self::new(CenterKind::Cyclic(n), action)
    }

    pub fn reduce(&self, z: i64) -> i64 {
        match self.kind {
            CenterKind::Infinite => z,
            CenterKind::Cyclic(n) => z.rem_euclid(n as i64),
        }
    }

    pub fn add(&self, a: i64, b: i64) -> i64 {
        self.reduce(a + b)
    }

    pub fn sigma(&self, z: i64) -> i64 {
        match self.action {
            SigmaAction::Inversion => self.reduce(-z),
            SigmaAction::Trivial => self.reduce(z),
        }
    }

    /// All elements of a cyclic center.
    pub fn elements(&self) -> Option<Vec<i64>> {
        match self.kind {
            CenterKind::Infinite => None,
            CenterKind::Cyclic(n) => Some((0..n as i64).collect()),
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::new(self.kind, 1)
    }

    /// `{z : sigma(z) = -z}`.
    pub fn z_minus(&self) -> Subgroup {
        match self.action {
            SigmaAction::Inversion => self.whole(),
            SigmaAction::Trivial => self.two_torsion(),
        }
    }

    /// `{sigma(z) - z}`.
    pub fn z_one(&self) -> Subgroup {
        match self.action {
            SigmaAction::Inversion => Subgroup::new(self.kind, 2),
            SigmaAction::Trivial => Subgroup::trivial(self.kind),
        }
    }

    /// `{z : sigma(z) = z}`.
    pub fn z_plus(&self) -> Subgroup {
        match self.action {
            SigmaAction::Inversion => self.two_torsion(),
            SigmaAction::Trivial => self.whole(),
        }
    }

    /// `B = {w + sigma(w)}`.
    pub fn b_subgroup(&self) -> Subgroup {
        match self.action {
            SigmaAction::Inversion => Subgroup::trivial(self.kind),
            SigmaAction::Trivial => Subgroup::new(self.kind, 2),
        }
    }

    fn two_torsion(&self) -> Subgroup {
        match self.kind {
            CenterKind::Infinite => Subgroup::trivial(self.kind),
            CenterKind::Cyclic(n) if n % 2 == 0 => Subgroup::new(self.kind, (n / 2) as i64),
            CenterKind::Cyclic(_) => Subgroup::trivial(self.kind),
        }
    }

    /// Order of the elementary abelian 2-group `Z^- / Z_1`.
    pub fn quotient_zminus_zone(&self) -> u64 {
        self.z_one()
            .index_in(&self.z_minus())
            .expect("Z^-/Z_1 is finite for cyclic centers")
    }

    /// Number of `G^up`-orbits over one base wedge, `|Z^- / Z_2|`.
    pub fn orbit_count(&self, z_two: &Subgroup) -> Option<u64> {
        z_two.index_in(&self.z_minus())
    }
}

/// Number of orbits `|Z^- / Z_2|` (`None` for infinitely many).
pub fn orbit_count_over(center: &CentralModel, z_two: &Subgroup) -> Result<Option<u64>, CoveringError> {
    if !z_two.is_subgroup_of(&center.z_minus()) {
        return Err(CoveringError::NotInZMinus(z_two.generator as i64));
    }
    Ok(center.orbit_count(z_two))
}

/// Central part of the twisted extension `G_z`: pairs `(gamma, eps)` with
/// `(e, -1)^2 = (z, 1)` and `(e, -1)(b, 1) = (sigma(b), -1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistedExtension {
    pub center: CentralModel,
    pub z: i64,
}

impl TwistedExtension {
    pub fn new(center: CentralModel, z: i64) -> Result<Self, CoveringError> {
        let z = center.reduce(z);
        if center.sigma(z) != z {
            return Err(CoveringError::NotSigmaFixed(z));
        }
        Ok(TwistedExtension { center, z })
    }

    pub fn mul(&self, a: (i64, i8), b: (i64, i8)) -> (i64, i8) {
        let c = &self.center;
        match (a.1, b.1) {
            (1, e) => (c.add(a.0, b.0), e),
            (_, 1) => (c.add(a.0, c.sigma(b.0)), -1),
            _ => (c.add(c.add(a.0, c.sigma(b.0)), self.z), 1),
        }
    }

    /// Odd elements of order two, within the center part.
    pub fn odd_involutions(&self) -> Option<Vec<i64>> {
        let elems = self.center.elements()?;
        Some(
            elems
                .into_iter()
                .filter(|a| self.mul((*a, -1), (*a, -1)) == (0, 1))
                .collect(),
        )
    }

    /// `G_z` and `G_z'` are equivalent iff `z' - z` lies in `B`.
    pub fn equivalent(&self, other: &TwistedExtension) -> bool {
        self.center == other.center && self.center.b_subgroup().contains(other.z - self.z)
    }
}

/// Order on the projective line, going around the circle from `0`.
fn ccw_key(x: f64) -> (u8, f64) {
    if x.is_infinite() || x.abs() > 1e13 {
        (2, 0.0)
    } else if x.abs() < 1e-13 {
        (0, 0.0)
    } else if x > 0.0 {
        (1, x)
    } else {
        (3, x)
    }
}

fn ccw_cmp(a: f64, b: f64) -> Ordering {
    let (ka, xa) = ccw_key(a);
    let (kb, xb) = ccw_key(b);
    match ka.cmp(&kb) {
        Ordering::Equal => {
            if (xa - xb).abs() <= 1e-12 * xa.abs().max(xb.abs()).max(1.0) {
                Ordering::Equal
            } else {
                xa.partial_cmp(&xb).unwrap_or(Ordering::Equal)
            }
        }
        o => o,
    }
}

/// Element of a cover of the extended Moebius group: a projective matrix and a
/// winding number fixing the lifted image of the base point,
/// `F(0) = 2 pi winding + angle(g.0)` with the angle in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverElement {
    pub base: GroupElement,
    pub winding: i64,
}

impl CoverElement {
    pub fn grade(&self) -> i8 {
        self.base.grade()
    }

    pub fn is_even(&self) -> bool {
        self.base.is_even()
    }
}

/// The `n`-fold cover of the extended Moebius group (`order = None` for the universal cover).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobiusCover {
    pub order: Option<u64>,
}

impl MobiusCover {
    pub fn universal() -> Self {
        MobiusCover { order: None }
    }

    pub fn finite(n: u64) -> Result<Self, CoveringError> {
        if n == 0 {
            return Err(CoveringError::InvalidOrder(0));
        }
        Ok(MobiusCover { order: Some(n) })
    }

    /// The center of the identity component with the grading action.
    pub fn center(&self) -> CentralModel {
        CentralModel {
            kind: match self.order {
                None => CenterKind::Infinite,
                Some(n) => CenterKind::Cyclic(n),
            },
            action: SigmaAction::Inversion,
        }
    }

    fn reduce(&self, m: i64) -> i64 {
        match self.order {
            None => m,
            Some(n) => m.rem_euclid(n as i64),
        }
    }

    fn elem(&self, base: GroupElement, winding: i64) -> CoverElement {
        CoverElement {
            base,
            winding: self.reduce(winding),
        }
    }

    pub fn identity(&self) -> CoverElement {
        self.elem(GroupElement::identity(ModelKind::Mobius), 0)
    }

    /// Lift of the rotation by `theta`, along the one-parameter group.
    pub fn rho(&self, theta: f64) -> CoverElement {
        let k = (theta / TAU).floor();
        let mut r = theta - TAU * k;
        let mut k = k as i64;
        if r >= TAU - 1e-14 {
            r = 0.0;
            k += 1;
        }
        let quarter = r / (PI / 2.0);
        let base = if (quarter - quarter.round()).abs() < 1e-13 {
            // Exact matrices at multiples of pi/2.
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let (c, s) = match quarter.round() as i64 {
                0 => (1.0, 0.0),
                1 => (h, h),
                2 => (0.0, 1.0),
                _ => (-h, h),
            };
            GroupElement {
                kind: ModelKind::Mobius,
                matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
            }
        } else {
            mobius::rotation(r)
        };
        let base = mobius_normalized(base);
        self.elem(base, k)
    }

    /// Central element `rho(2 pi k)`.
    pub fn central(&self, k: i64) -> CoverElement {
        self.elem(GroupElement::identity(ModelKind::Mobius), k)
    }

    pub fn delta(&self, t: f64) -> CoverElement {
        self.elem(mobius::dilation(t), 0)
    }

    /// Lift of the translations `x -> x + t`.
    pub fn zeta(&self, t: f64) -> CoverElement {
        self.elem(mobius::translation(t), if t < 0.0 { -1 } else { 0 })
    }

    /// `tau_n = rho(2 pi n) tau`, acting by `x -> 2 pi n - x`.
    pub fn tau(&self, n: i64) -> CoverElement {
        self.elem(mobius::reflection(), n)
    }

    /// Lift of `exp(x)` along the path `exp(s x)`, `s in [0, 1]`.
    pub fn exp_lift(&self, x: &DMatrix<f64>) -> CoverElement {
        let steps = ((x.norm() * 4.0).ceil() as usize).max(1);
        let small = mobius_normalized(GroupElement {
            kind: ModelKind::Mobius,
            matrix: (x / steps as f64).exp(),
        });
        let angle = cayley_angle(small.mobius_apply(0.0));
        let step = self.elem(small, if angle > PI { -1 } else { 0 });
        let mut g = self.identity();
        for _ in 0..steps {
            g = self.mul(&g, &step);
        }
        g
    }

    pub fn mul(&self, a: &CoverElement, b: &CoverElement) -> CoverElement {
        let q = a.base.inverse().mobius_apply(0.0);
        let p2 = b.base.mobius_apply(0.0);
        let winding = if a.is_even() {
            let carry = ccw_cmp(0.0, q) == Ordering::Less && ccw_cmp(q, p2) != Ordering::Greater;
            a.winding + b.winding + i64::from(carry)
        } else {
            let borrow = ccw_cmp(q, p2) == Ordering::Less;
            a.winding - b.winding - i64::from(borrow)
        };
        self.elem(&a.base * &b.base, winding)
    }

    pub fn inv(&self, a: &CoverElement) -> CoverElement {
        let trial = self.elem(a.base.inverse(), 0);
        let total = self.mul(a, &trial).winding;
        let w = if a.is_even() { -total } else { total };
        self.elem(a.base.inverse(), w)
    }

    pub fn approx_eq(&self, a: &CoverElement, b: &CoverElement) -> bool {
        self.reduce(a.winding) == self.reduce(b.winding) && a.base.approx_eq(&b.base, 1e-9)
    }

    /// `g sigma(g)` style conjugation by `tau_0`.
    pub fn sigma_conj(&self, g: &CoverElement) -> CoverElement {
        let t = self.tau(0);
        self.mul(&self.mul(&t, g), &t)
    }

    /// The lifted action on the universal cover of the circle.
    pub fn lift_apply(&self, g: &CoverElement, y: f64) -> f64 {
        let theta0 = cayley_angle(g.base.mobius_apply(0.0));
        let f0 = TAU * g.winding as f64 + theta0;
        let k = (y / TAU).floor();
        let phi = y - TAU * k;
        let img = cayley_angle(g.base.mobius_apply(point_from_angle(phi)));
        let res = if phi == 0.0 {
            f0
        } else if g.is_even() {
            f0 + (img - theta0).rem_euclid(TAU)
        } else {
            f0 - (theta0 - img).rem_euclid(TAU)
        };
        if g.is_even() {
            res + TAU * k
        } else {
            res - TAU * k
        }
    }

    /// Image in `SL_2(R)`, the double cover; defined on even elements.
    pub fn to_sl2(&self, g: &CoverElement) -> Option<DMatrix<f64>> {
        if !g.is_even() {
            return None;
        }
        let f0 = TAU * g.winding as f64 + cayley_angle(g.base.mobius_apply(0.0));
        let k = |t: f64| {
            let (s, c) = (t / 2.0).sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
        };
        let theta0 = cayley_angle(g.base.mobius_apply(0.0));
        let mut p = k(-theta0) * &g.base.matrix;
        if p[(0, 0)] < 0.0 {
            p = -p;
        }
        Some(k(f0) * p)
    }

    /// `d(g) = g (tau g tau)^{-1}` for `g` over the stabilizer of the base
    /// wedge, as a winding number in `rho(2 pi Z)`.
    pub fn boundary(&self, g: &CoverElement) -> Result<i64, CoveringError> {
        let m = &g.base.matrix;
        if !g.is_even() || m[(0, 1)].abs() > 1e-9 || m[(1, 0)].abs() > 1e-9 {
            return Err(CoveringError::NotInStabilizer);
        }
        let d = self.mul(g, &self.inv(&self.sigma_conj(g)));
        if !d.base.approx_eq(&GroupElement::identity(ModelKind::Mobius), 1e-9) {
            return Err(CoveringError::NotInStabilizer);
        }
        Ok(d.winding)
    }
}

fn mobius_normalized(g: GroupElement) -> GroupElement {
    // Round-trip through a product with the identity to apply the projective normalization.
    &g * &GroupElement::identity(ModelKind::Mobius)
}

/// The quotient over which the boundary map is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryQuotient {
    /// `Mob~ -> Mob`, with `Z = rho(2 pi Z)`.
    Mobius,
    /// `Mob~ -> SL_2(R)`, with `Z = rho(4 pi Z) = 2 Z(G^up)`.
    Sl2,
}

/// `d(g)` in units of the generator of `Z` for the chosen quotient.
pub fn partial_delta(quotient: BoundaryQuotient, g: &CoverElement) -> Result<i64, CoveringError> {
    let cover = MobiusCover::universal();
    match quotient {
        BoundaryQuotient::Mobius => cover.boundary(g),
        BoundaryQuotient::Sl2 => {
            // The stabilizer in SL_2 contains -1, so any rho(2 pi k) lies over it.
            let w = cover.boundary(g)?;
            debug_assert!(w % 2 == 0);
            Ok(w / 2)
        }
    }
}

/// `Z_2 = d(stabilizer)` for the two quotients of the universal cover.
pub fn z_two(quotient: BoundaryQuotient) -> Subgroup {
    let cover = MobiusCover::universal();
    let gen = partial_delta(quotient, &cover.central(1)).expect("central elements stabilize");
    Subgroup::new(CenterKind::Infinite, gen)
}

/// `(x, sigma)` over a Moebius cover.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveredWedge {
    pub x: DMatrix<f64>,
    pub sigma: CoverElement,
}

impl CoveredWedge {
    /// The base Euler couple `(h, tau_n)`.
    pub fn base(cover: &MobiusCover, n: i64) -> Self {
        CoveredWedge {
            x: crate::liealg::euler::sl2_h(),
            sigma: cover.tau(n),
        }
    }

    /// Sign of `x` relative to `h` and the index `n` of `tau_n`, when the wedge lies over the base wedge.
    pub fn fiber_label(&self) -> Option<(i8, i64)> {
        let h = crate::liealg::euler::sl2_h();
        let s = if (&self.x - &h).norm() < 1e-9 {
            1
        } else if (&self.x + &h).norm() < 1e-9 {
            -1
        } else {
            return None;
        };
        if !self.sigma.base.approx_eq(&mobius::reflection(), 1e-9) {
            return None;
        }
        Some((s, self.sigma.winding))
    }

    pub fn approx_eq(&self, cover: &MobiusCover, other: &CoveredWedge) -> bool {
        (&self.x - &other.x).norm() < 1e-9 && cover.approx_eq(&self.sigma, &other.sigma)
    }

    /// Projection to the wedge space of `Mob`.
    pub fn project(&self) -> crate::wedgespace::Wedge {
        crate::wedgespace::Wedge {
            kind: ModelKind::Mobius,
            x: self.x.clone(),
            sigma: self.sigma.base.clone(),
            transporter: None,
        }
    }
}

impl MobiusCover {
    pub fn act(&self, g: &CoverElement, w: &CoveredWedge) -> CoveredWedge {
        CoveredWedge {
            x: g.base.ad_eps(&w.x),
            sigma: self.mul(&self.mul(g, &w.sigma), &self.inv(g)),
        }
    }

    pub fn dual(&self, w: &CoveredWedge) -> CoveredWedge {
        CoveredWedge {
            x: -&w.x,
            sigma: w.sigma.clone(),
        }
    }

    /// `alpha * (x, sigma) = (x, alpha sigma)` with `alpha = rho(2 pi k)`.
    pub fn central_shift(&self, alpha: i64, w: &CoveredWedge) -> CoveredWedge {
        CoveredWedge {
            x: w.x.clone(),
            sigma: self.mul(&self.central(alpha), &w.sigma),
        }
    }

    /// `(x, sigma)^{'alpha} = (-x, alpha sigma)`.
    pub fn twisted_complement(&self, w: &CoveredWedge, alpha: i64) -> Result<CoveredWedge, CoveringError> {
        if !self.center().z_minus().contains(alpha) {
            return Err(CoveringError::NotInZMinus(alpha));
        }
        Ok(self.central_shift(alpha, &self.dual(w)))
    }

    /// `g *_alpha W`: the plain action for even `g`, twisted by `alpha` for odd `g`.
    pub fn star_action(&self, g: &CoverElement, alpha: i64, w: &CoveredWedge) -> Result<CoveredWedge, CoveringError> {
        if !self.center().z_minus().contains(alpha) {
            return Err(CoveringError::NotInZMinus(alpha));
        }
        let moved = self.act(g, w);
        Ok(if g.is_even() {
            moved
        } else {
            self.central_shift(alpha, &moved)
        })
    }

    /// Orbit of a fiber wedge `(s h, tau_j)` under the identity component:
    /// `rho(pi)` maps `(s, j)` to `(-s, j + 1)`.
    pub fn fiber_orbit_label(&self, s: i8, j: i64) -> i64 {
        let parity = (j + i64::from(s < 0)).rem_euclid(2);
        match self.order {
            Some(n) if n % 2 == 1 => 0,
            _ => parity,
        }
    }

    /// Number of orbits of the identity component on Euler couples, computed by
    /// union-find over the fiber above `h` under `rho(pi)` (closed form for the universal cover).
    pub fn orbit_count(&self) -> u64 {
        let Some(n) = self.order else {
            return 2;
        };
        let size = 2 * n as usize;
        let idx = |s: i8, j: i64| (if s > 0 { 0 } else { n as usize }) + j.rem_euclid(n as i64) as usize;
        let mut parent: Vec<usize> = (0..size).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        let half_turn = self.rho(PI);
        for s in [1i8, -1] {
            for j in 0..n as i64 {
                let w = CoveredWedge {
                    x: crate::liealg::euler::sl2_h() * f64::from(s),
                    sigma: self.tau(j),
                };
                let moved = self.act(&half_turn, &w);
                let (s2, j2) = moved.fiber_label().expect("rho(pi) preserves the fiber");
                let (a, b) = (find(&mut parent, idx(s, j)), find(&mut parent, idx(s2, j2)));
                parent[a] = b;
            }
        }
        (0..size)
            .filter(|&i| find(&mut parent, i) == i)
            .count() as u64
    }

    /// `|Z^- / Z_2|` with `Z_2 = d(stabilizer) = 2Z` in the center of this cover.
    pub fn orbit_count_from_center(&self) -> Option<u64> {
        let center = self.center();
        let z2 = Subgroup::new(center.kind, 2);
        center.orbit_count(&z2)
    }

    /// The admissible interval of a covered wedge together with its orbit
    /// label: `0` when the fixed point of `sigma` is the left endpoint.
    pub fn interval_of(&self, w: &CoveredWedge) -> Result<(AdmissibleInterval, u8), CoveringError> {
        if w.sigma.is_even() {
            return Err(CoveringError::NotAWedge("sigma must be odd".into()));
        }
        let model = GradedGroupModel::mobius();
        let Region::Arc { start, end } = model
            .wedge_to_region(&w.project())
            .map_err(|e| CoveringError::NotAWedge(e.to_string()))?
        else {
            unreachable!("Mobius regions are arcs");
        };
        let s = cayley_angle(start);
        let len = (cayley_angle(end) - s).rem_euclid(TAU);
        let f0 = self.lift_apply(&w.sigma, 0.0);
        // The lifted reflection has a unique fixed point between 0 and F(0).
        let (mut lo, mut hi) = (f0.min(0.0), f0.max(0.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.lift_apply(&w.sigma, mid) - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = 0.5 * (lo + hi);
        let dist = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(TAU);
            d.min(TAU - d)
        };
        let (interval, label) = if dist(p, s) <= dist(p, s + len) {
            ((p, p + len), 0)
        } else {
            ((p - len, p), 1)
        };
        let period = self.order.map(|n| TAU * n as f64);
        Ok((AdmissibleInterval::new(interval.0, interval.1, period)?, label))
    }

    /// Image of an admissible interval under the lifted action of an even element.
    pub fn act_interval(&self, g: &CoverElement, i: &AdmissibleInterval) -> AdmissibleInterval {
        let a = self.lift_apply(g, i.start);
        let b = self.lift_apply(g, i.end);
        let (a, b) = if g.is_even() { (a, b) } else { (b, a) };
        AdmissibleInterval::new(a, b, i.period).expect("the action preserves admissibility")
    }
}

/// An interval of length in `(0, 2 pi)` on the line, or on `R / period` for finite covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleInterval {
    pub start: f64,
    pub end: f64,
    pub period: Option<f64>,
}

impl AdmissibleInterval {
    pub fn new(start: f64, end: f64, period: Option<f64>) -> Result<Self, CoveringError> {
        let len = end - start;
        if !(len > 0.0 && len < TAU) {
            return Err(CoveringError::NotAdmissible(len));
        }
        let start_r = match period {
            Some(p) => start.rem_euclid(p),
            None => start,
        };
        Ok(AdmissibleInterval {
            start: start_r,
            end: start_r + len,
            period,
        })
    }

    pub fn approx_eq(&self, other: &AdmissibleInterval, tol: f64) -> bool {
        let d = match self.period {
            Some(p) => {
                let r = (self.start - other.start).rem_euclid(p);
                r.min(p - r)
            }
            None => (self.start - other.start).abs(),
        };
        d <= tol && ((self.end - self.start) - (other.end - other.start)).abs() <= tol
    }
}

/// Orbit report for a Moebius cover.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub cover: Option<u64>,
    pub orbits: u64,
    pub z_minus: Subgroup,
    pub z_one: Subgroup,
    pub z_two: Subgroup,
}

pub fn orbit_report(cover: &MobiusCover) -> OrbitReport {
    let center = cover.center();
    OrbitReport {
        cover: cover.order,
        orbits: cover.orbit_count(),
        z_minus: center.z_minus(),
        z_one: center.z_one(),
        z_two: Subgroup::new(center.kind, 2),
    }
}

/// Models for the question whether the odd coset of a twisted group contains an involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistModel {
    /// `SL_2(R){1, gamma}` with `gamma = diag(i, -i)`, `gamma^2 = -1`.
    Sl2RealGamma,
    /// `SL_2(C){1, s}` with `s` central and `s^2 = -1`.
    Sl2Complex,
    /// `SO_n{1, s}` with `s` acting as a hyperplane reflection and `s^2 = -1` (even `n`).
    OrthogonalTwisted(usize),
    /// `Spin_n{1, s}` with `s` a unit vector in the Clifford algebra, `s^2 = -1` (odd `n`).
    PinOdd(usize),
    /// Untwisted group: `sigma` itself is an involution.
    Untwisted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub model: TwistModel,
    pub involution_exists: bool,
    pub certificate: String,
}

/// Product of Clifford basis blades (bitmasks) with `e_i^2 = square`.
fn blade_mul(a: u32, b: u32, square: i8) -> (i8, u32) {
    let mut sign = 1i8;
    // Count transpositions needed to bring the product into canonical order.
    let mut x = a >> 1;
    while x != 0 {
        if (x & b).count_ones() % 2 == 1 {
            sign = -sign;
        }
        x >>= 1;
    }
    if (a & b).count_ones() % 2 == 1 && square < 0 {
        sign = -sign;
    }
    (sign, a ^ b)
}

/// Decides whether the odd coset of the twisted model contains an involution.
pub fn twist_extension_obstruction(model: TwistModel) -> ObstructionReport {
    let (exists, certificate) = match model {
        TwistModel::Sl2RealGamma => {
            // (g gamma)^2 = g sigma(g) (-1) with sigma(g) = [[a, -b], [-c, d]].
            // Off-diagonal: b(d - a) = c(a - d) = 0. If a != d then b = c = 0 and a^2 = -1.
            // Otherwise the diagonal gives a^2 - bc = -1 while det g = a^2 - bc = 1.
            let samples = sampled_sl2_search();
            (
                false,
                format!(
                    "g sigma(g) = -1 forces det(g) = a^2 - bc = -1, contradicting det(g) = 1; \
                     {samples} sampled g gave no involution"
                ),
            )
        }
        TwistModel::Sl2Complex => {
            let i = Complex64::i();
            let g = [i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), -i];
            let sq = [g[0] * g[0], g[3] * g[3]];
            let ok = (sq[0] + 1.0).norm() < 1e-15 && (sq[1] + 1.0).norm() < 1e-15;
            (ok, "g = i diag(1, -1) has g^2 = -1, so (g s)^2 = g^2 s^2 = 1".to_string())
        }
        TwistModel::OrthogonalTwisted(n) => {
            if n % 2 == 1 {
                (true, format!("Z(SO_{n}) is trivial: no twist, sigma is an involution"))
            } else {
                (
                    false,
                    format!(
                        "(g s)^2 = (g r)^2 (-1) with r a reflection; M = g r has det M = -1 but \
                         M^2 = -1 forces det M = 1 in dimension {n}"
                    ),
                )
            }
        }
        TwistModel::PinOdd(n) => {
            if n < 3 || n % 2 == 0 {
                (false, format!("model requires odd n >= 3, got {n}"))
            } else {
                // Odd blades are odd elements of Pin; look for one squaring to +1.
                let found = (1u32..(1 << n))
                    .filter(|b| b.count_ones() % 2 == 1)
                    .find(|&b| blade_mul(b, b, -1) == (1, 0));
                match found {
                    Some(b) => {
                        let names: Vec<String> =
                            (0..n).filter(|i| b & (1 << i) != 0).map(|i| format!("e{}", i + 1)).collect();
                        (true, format!("{} squares to 1 with e_i^2 = -1", names.join("")))
                    }
                    None => (false, "no odd blade squares to 1".to_string()),
                }
            }
        }
        TwistModel::Untwisted => (true, "sigma^2 = e".to_string()),
    };
    ObstructionReport {
        model,
        involution_exists: exists,
        certificate,
    }
}

/// Random search for `g` in `SL_2(R)` with `g sigma(g) = -1`; returns the sample count.
fn sampled_sl2_search() -> usize {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 2000;
    for _ in 0..samples {
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if a.abs() < 1e-3 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        // g sigma(g) with sigma(g) = [[a, -b], [-c, d]]
        let p = [a * a - b * c, -a * b + b * d, c * a - d * c, -c * b + d * d];
        let r = (p[0] + 1.0).abs() + p[1].abs() + p[2].abs() + (p[3] + 1.0).abs();
        assert!(r > 1e-6, "unexpected involution");
    }
    samples
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroups_of_cyclic_centers() {
        let z = CentralModel::integers_inversion();
        assert_eq!(z.z_minus().to_string(), "Z");
        assert_eq!(z.z_one().to_string(), "2Z");
        assert_eq!(z.quotient_zminus_zone(), 2);
        let z5 = CentralModel::cyclic(5, SigmaAction::Inversion).unwrap();
        assert_eq!(z5.z_minus().order(), Some(5));
        assert_eq!(z5.quotient_zminus_zone(), 1);
        let z6 = CentralModel::cyclic(6, SigmaAction::Inversion).unwrap();
        assert_eq!(z6.quotient_zminus_zone(), 2);
        assert_eq!(z6.z_one().to_string(), "2Z_6");
        let zt = CentralModel::new(CenterKind::Infinite, SigmaAction::Trivial).unwrap();
        assert!(zt.z_minus().is_trivial());
        assert!(zt.z_one().is_trivial());
    }

    #[test]
    fn z_minus_by_enumeration() {
        for n in 1..=12u64 {
            for action in [SigmaAction::Inversion, SigmaAction::Trivial] {
                let c = CentralModel::cyclic(n, action).unwrap();
                let zm = c.z_minus();
                let z1 = c.z_one();
                for g in c.elements().unwrap() {
                    assert_eq!(zm.contains(g), c.add(c.sigma(g), g) == 0);
                    let in_one = c.elements().unwrap().iter().any(|w| c.add(c.sigma(*w), -w) == g);
                    assert_eq!(z1.contains(g), in_one);
                }
            }
        }
    }

    #[test]
    fn rotation_cocycle() {
        let cov = MobiusCover::universal();
        let half = cov.rho(PI);
        assert_eq!(cov.mul(&half, &half).winding, 1);
        let a = cov.rho(1.3);
        let b = cov.rho(5.9);
        assert!(cov.approx_eq(&cov.mul(&a, &b), &cov.rho(7.2)));
        assert!(cov.approx_eq(&cov.mul(&cov.rho(-0.4), &cov.rho(0.4)), &cov.identity()));
        let x = cov.rho(-7.0);
        assert!(cov.approx_eq(&cov.mul(&x, &cov.inv(&x)), &cov.identity()));
    }

    #[test]
    fn tau_action_and_fixed_point() {
        let cov = MobiusCover::universal();
        let t1 = cov.tau(1);
        assert!((cov.lift_apply(&t1, PI) - PI).abs() < 1e-12);
        assert!((cov.lift_apply(&t1, 0.5) - (TAU - 0.5)).abs() < 1e-12);
        assert!(cov.approx_eq(&cov.mul(&t1, &t1), &cov.identity()));
    }

    #[test]
    fn half_turn_on_base_couples() {
        let cov = MobiusCover::universal();
        for n in -2..3 {
            for k in -3..4 {
                let w = cov.act(&cov.rho(PI * k as f64), &CoveredWedge::base(&cov, n));
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(w.fiber_label(), Some((sign, n + k)));
            }
        }
    }

    #[test]
    fn boundary_values() {
        let cov = MobiusCover::universal();
        assert_eq!(partial_delta(BoundaryQuotient::Mobius, &cov.delta(0.7)).unwrap(), 0);
        for k in -3..4 {
            let g = cov.mul(&cov.delta(0.3), &cov.central(k));
            assert_eq!(partial_delta(BoundaryQuotient::Mobius, &g).unwrap(), 2 * k);
            assert_eq!(partial_delta(BoundaryQuotient::Sl2, &g).unwrap(), k);
        }
        assert_eq!(z_two(BoundaryQuotient::Mobius).to_string(), "2Z");
        assert_eq!(z_two(BoundaryQuotient::Sl2).to_string(), "Z");
        assert!(partial_delta(BoundaryQuotient::Mobius, &cov.rho(0.5)).is_err());
    }

    #[test]
    fn interval_model_base_and_twist() {
        let cov = MobiusCover::universal();
        let (i0, l0) = cov.interval_of(&CoveredWedge::base(&cov, 0)).unwrap();
        assert!(i0.approx_eq(&AdmissibleInterval::new(0.0, PI, None).unwrap(), 1e-9));
        assert_eq!(l0, 0);
        let (_, l1) = cov.interval_of(&CoveredWedge::base(&cov, 1)).unwrap();
        assert_eq!(l1, 1);
        let w0 = CoveredWedge::base(&cov, 0);
        let twisted = cov.twisted_complement(&w0, -1).unwrap();
        assert!(twisted.approx_eq(&cov, &cov.act(&cov.rho(-PI), &w0)));
    }

    #[test]
    fn orbit_counts() {
        for n in 1..=8 {
            let cov = MobiusCover::finite(n).unwrap();
            let expected = if n % 2 == 0 { 2 } else { 1 };
            assert_eq!(cov.orbit_count(), expected);
            assert_eq!(cov.orbit_count_from_center(), Some(expected));
        }
        assert_eq!(MobiusCover::universal().orbit_count_from_center(), Some(2));
    }

    #[test]
    fn sl2_image() {
        let cov = MobiusCover::universal();
        let m = cov.to_sl2(&cov.rho(TAU)).unwrap();
        assert!((m + DMatrix::identity(2, 2)).norm() < 1e-12);
        let m = cov.to_sl2(&cov.rho(2.0 * TAU)).unwrap();
        assert!((m - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn obstructions() {
        assert!(!twist_extension_obstruction(TwistModel::Sl2RealGamma).involution_exists);
        assert!(twist_extension_obstruction(TwistModel::Sl2Complex).involution_exists);
        assert!(!twist_extension_obstruction(TwistModel::OrthogonalTwisted(6)).involution_exists);
        assert!(twist_extension_obstruction(TwistModel::PinOdd(3)).involution_exists);
        assert!(twist_extension_obstruction(TwistModel::Untwisted).involution_exists);
    }

    #[test]
    fn twisted_extensions() {
        let c = CentralModel::cyclic(6, SigmaAction::Inversion).unwrap();
        let ext = TwistedExtension::new(c, 3).unwrap();
        let elems: Vec<(i64, i8)> = (0..6).flat_map(|a| [(a, 1), (a, -1)]).collect();
        for a in &elems {
            for b in &elems {
                for d in &elems {
                    assert_eq!(ext.mul(ext.mul(*a, *b), *d), ext.mul(*a, ext.mul(*b, *d)));
                }
            }
        }
        assert!(ext.odd_involutions().unwrap().is_empty());
        let plain = TwistedExtension::new(c, 0).unwrap();
        assert!(!plain.odd_involutions().unwrap().is_empty());
        assert!(!ext.equivalent(&plain));
        assert!(TwistedExtension::new(c, 1).is_err());
    }
}
