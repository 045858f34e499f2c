//! Root systems over the rationals: simple roots in Bourbaki coordinates,
//! fundamental coweights, the highest root, the longest Weyl element and the
//! resulting classification of (symmetric) Euler coweights.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Q = Rational64;
pub type QVec = Vec<Q>;

/// Upper bound on the size of any root set or Weyl orbit we are willing to build.
pub const CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("invalid rank {rank} for family {family}: admissible ranks are {admissible}")]
    InvalidRank {
        family: String,
        rank: usize,
        admissible: &'static str,
    },
    #[error("unknown root system family `{0}`")]
    UnknownFamily(String),
    #[error("closure exceeded the cap of {cap} vectors")]
    CapExceeded { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
    BC,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E6,
        Family::E7,
        Family::E8,
        Family::F4,
        Family::G2,
        Family::BC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E6 => "E6",
            Family::E7 => "E7",
            Family::E8 => "E8",
            Family::F4 => "F4",
            Family::G2 => "G2",
            Family::BC => "BC",
        }
    }

    /// Parses a family name. A bare `E`, `F` or `G` needs the rank to pick the type.
    pub fn parse(name: &str, rank: usize) -> Result<Family, RootSystemError> {
        let up = name.trim().to_ascii_uppercase();
        let fam = match up.as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "BC" => Family::BC,
            "E6" => Family::E6,
            "E7" => Family::E7,
            "E8" => Family::E8,
            "F4" | "F" => Family::F4,
            "G2" | "G" => Family::G2,
            "E" => match rank {
                6 => Family::E6,
                7 => Family::E7,
                8 => Family::E8,
                _ => {
                    return Err(RootSystemError::InvalidRank {
                        family: "E".into(),
                        rank,
                        admissible: "6, 7, 8",
                    })
                }
            },
            _ => return Err(RootSystemError::UnknownFamily(name.to_string())),
        };
        Ok(fam)
    }

    pub fn admissible_ranks(self) -> &'static str {
        match self {
            Family::A => ">= 1",
            Family::B => ">= 2",
            Family::C => ">= 2",
            Family::D => ">= 4",
            Family::E6 => "6",
            Family::E7 => "7",
            Family::E8 => "8",
            Family::F4 => "4",
            Family::G2 => "2",
            Family::BC => ">= 1",
        }
    }

    pub fn rank_is_valid(self, rank: usize) -> bool {
        match self {
            Family::A | Family::BC => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E6 => rank == 6,
            Family::E7 => rank == 7,
            Family::E8 => rank == 8,
            Family::F4 => rank == 4,
            Family::G2 => rank == 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn half(n: i64) -> Q {
    Q::new(n, 2)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + *x * *y)
}

fn unit(dim: usize, i: usize) -> QVec {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::one();
    v
}

fn axpy(a: Q, x: &[Q], y: &[Q]) -> QVec {
    x.iter().zip(y).map(|(xi, yi)| a * *xi + *yi).collect()
}

fn neg(v: &[Q]) -> QVec {
    v.iter().map(|x| -*x).collect()
}

/// Reflection of `v` in the hyperplane orthogonal to `alpha`.
pub fn reflect(v: &[Q], alpha: &[Q]) -> QVec {
    let c = q(2) * dot(v, alpha) / dot(alpha, alpha);
    axpy(-c, alpha, v)
}

/// Solves the square system `m * x = b` exactly. Returns `None` if `m` is singular.
fn solve(m: &[QVec], b: &[Q]) -> Option<QVec> {
    let n = m.len();
    let mut a: Vec<QVec> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col];
        for k in col..=n {
            a[col][k] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for k in col..=n {
                    let t = a[col][k];
                    a[r][k] -= f * t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coweight {
    pub coords: QVec,
    /// `Some(j)` (1-based) for the fundamental coweight `h_j`.
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub simple_roots: Vec<QVec>,
    pub cartan_matrix: Vec<Vec<i64>>,
}

fn simple_roots_for(family: Family, n: usize) -> Vec<QVec> {
    let e = |dim: usize, i: usize| unit(dim, i);
    let diff = |dim: usize, i: usize, j: usize| axpy(-Q::one(), &e(dim, j), &e(dim, i));
    match family {
        Family::A => (0..n).map(|i| diff(n + 1, i, i + 1)).collect(),
        Family::B | Family::BC => {
            let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(e(n, n - 1));
            s
        }
        Family::C => {
            let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(e(n, n - 1).into_iter().map(|x| x * q(2)).collect());
            s
        }
        Family::D => {
            let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(axpy(Q::one(), &e(n, n - 2), &e(n, n - 1)));
            s
        }
        Family::G2 => vec![
            vec![q(1), q(-1), q(0)],
            vec![q(-2), q(1), q(1)],
        ],
        Family::F4 => vec![
            vec![q(0), q(1), q(-1), q(0)],
            vec![q(0), q(0), q(1), q(-1)],
            vec![q(0), q(0), q(0), q(1)],
            vec![half(1), half(-1), half(-1), half(-1)],
        ],
        Family::E6 | Family::E7 | Family::E8 => {
            let mut s = vec![
                vec![
                    half(1),
                    half(-1),
                    half(-1),
                    half(-1),
                    half(-1),
                    half(-1),
                    half(-1),
                    half(1),
                ],
                axpy(Q::one(), &e(8, 0), &e(8, 1)),
            ];
            for i in 0..6 {
                s.push(diff(8, i + 1, i));
            }
            s.truncate(n);
            s
        }
    }
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem, RootSystemError> {
    if !family.rank_is_valid(rank) {
        return Err(RootSystemError::InvalidRank {
            family: family.name().into(),
            rank,
            admissible: family.admissible_ranks(),
        });
    }
    let simple_roots = simple_roots_for(family, rank);
    let cartan_matrix = simple_roots
        .iter()
        .map(|ai| {
            simple_roots
                .iter()
                .map(|aj| {
                    let c = q(2) * dot(ai, aj) / dot(aj, aj);
                    debug_assert!(c.is_integer());
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(RootSystem {
        family,
        rank,
        simple_roots,
        cartan_matrix,
    })
}

/// Breadth-first closure of `seeds` under the simple reflections.
fn reflection_closure(
    simple: &[QVec],
    seeds: Vec<QVec>,
    cap: usize,
) -> Result<Vec<QVec>, RootSystemError> {
    let mut seen: HashSet<QVec> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            order.push(s.clone());
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for a in simple {
            let w = reflect(&v, a);
            if !seen.contains(&w) {
                if seen.len() >= cap {
                    return Err(RootSystemError::CapExceeded { cap });
                }
                seen.insert(w.clone());
                order.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    Ok(order)
}

impl RootSystem {
    pub fn ambient_dim(&self) -> usize {
        self.simple_roots[0].len()
    }

    pub fn is_reduced(&self) -> bool {
        self.family != Family::BC
    }

    /// All roots, sorted. For `BC` this includes the doubled short roots.
    pub fn all_roots(&self) -> Result<Vec<QVec>, RootSystemError> {
        self.all_roots_capped(CLOSURE_CAP)
    }

    pub fn all_roots_capped(&self, cap: usize) -> Result<Vec<QVec>, RootSystemError> {
        let mut roots = reflection_closure(&self.simple_roots, self.simple_roots.clone(), cap)?;
        if self.family == Family::BC {
            let doubled: Vec<QVec> = roots
                .iter()
                .filter(|r| dot(r, r) == Q::one())
                .map(|r| r.iter().map(|x| *x * q(2)).collect())
                .collect();
            roots.extend(doubled);
        }
        let mut set: Vec<QVec> = roots.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        set.sort();
        Ok(set)
    }

    /// Fundamental coweights `h_j`, dual to the simple roots: `(alpha_k, h_j) = delta_jk`.
    /// They are taken in the span of the simple roots.
    pub fn fundamental_coweights(&self) -> Vec<Coweight> {
        let n = self.rank;
        let gram: Vec<QVec> = (0..n)
            .map(|i| (0..n).map(|j| dot(&self.simple_roots[i], &self.simple_roots[j])).collect())
            .collect();
        (0..n)
            .map(|j| {
                let c = solve(&gram, &unit(n, j)).expect("simple roots are linearly independent");
                let mut coords = vec![Q::zero(); self.ambient_dim()];
                for (k, ck) in c.iter().enumerate() {
                    coords = axpy(*ck, &self.simple_roots[k], &coords);
                }
                Coweight {
                    coords,
                    label: Some(j + 1),
                }
            })
            .collect()
    }

    /// Coefficients of `v` in the basis of simple roots, read off by pairing with coweights.
    pub fn simple_coefficients(&self, v: &[Q]) -> QVec {
        self.fundamental_coweights()
            .iter()
            .map(|h| dot(v, &h.coords))
            .collect()
    }

    /// The highest root and its simple-root coefficients.
    pub fn highest_root(&self) -> Result<(QVec, Vec<i64>), RootSystemError> {
        let hs = self.fundamental_coweights();
        let roots = self.all_roots()?;
        let coeffs = |r: &QVec| -> QVec { hs.iter().map(|h| dot(r, &h.coords)).collect() };
        let best = roots
            .iter()
            .max_by_key(|r| coeffs(r).iter().fold(Q::zero(), |a, b| a + *b))
            .expect("root systems are non-empty")
            .clone();
        let c = coeffs(&best).iter().map(|x| x.to_integer()).collect();
        Ok((best, c))
    }

    /// Indices `j` (1-based) for which `h_j` is an Euler element.
    pub fn euler_coweights(&self) -> BTreeSet<usize> {
        let (_, c) = self.highest_root().expect("root closure of a valid system fits the cap");
        c.iter()
            .enumerate()
            .filter(|(_, &cj)| cj == 1)
            .map(|(j, _)| j + 1)
            .collect()
    }

    /// A reduced word for the longest element, as simple-reflection indices (0-based)
    /// in the order they are applied.
    pub fn longest_word(&self) -> Vec<usize> {
        let rho: QVec = self
            .fundamental_coweights()
            .iter()
            .fold(vec![Q::zero(); self.ambient_dim()], |acc, h| axpy(Q::one(), &h.coords, &acc));
        let mut v = rho;
        let mut word = Vec::new();
        while let Some(i) = self
            .simple_roots
            .iter()
            .position(|a| dot(a, &v).is_positive())
        {
            v = reflect(&v, &self.simple_roots[i]);
            word.push(i);
        }
        word
    }

    pub fn apply_word(&self, word: &[usize], v: &[Q]) -> QVec {
        word.iter()
            .fold(v.to_vec(), |acc, &i| reflect(&acc, &self.simple_roots[i]))
    }

    /// Image of `v` under the longest Weyl group element.
    pub fn longest_weyl_image(&self, v: &Coweight) -> Coweight {
        Coweight {
            coords: self.apply_word(&self.longest_word(), &v.coords),
            label: None,
        }
    }

    /// For each Euler index `j`, the index `k` with `h_k = -w0(h_j)`.
    pub fn pairing(&self) -> BTreeMap<usize, usize> {
        let hs = self.fundamental_coweights();
        let word = self.longest_word();
        self.euler_coweights()
            .into_iter()
            .map(|j| {
                let image = neg(&self.apply_word(&word, &hs[j - 1].coords));
                let k = hs
                    .iter()
                    .position(|h| h.coords == image)
                    .expect("-w0 permutes the fundamental coweights");
                (j, k + 1)
            })
            .collect()
    }

    pub fn symmetric_euler_coweights(&self) -> BTreeSet<usize> {
        self.pairing()
            .into_iter()
            .filter(|(j, k)| j == k)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn weyl_orbit(&self, v: &[Q]) -> Result<Vec<QVec>, RootSystemError> {
        self.weyl_orbit_capped(v, CLOSURE_CAP)
    }

    pub fn weyl_orbit_capped(&self, v: &[Q], cap: usize) -> Result<Vec<QVec>, RootSystemError> {
        reflection_closure(&self.simple_roots, vec![v.to_vec()], cap)
    }

    /// Symmetric Euler indices decided by orbit membership of `-h_j`; independent of `w0`.
    pub fn symmetric_by_orbit(&self) -> Result<BTreeSet<usize>, RootSystemError> {
        let hs = self.fundamental_coweights();
        let mut out = BTreeSet::new();
        for j in self.euler_coweights() {
            let h = &hs[j - 1].coords;
            let orbit = self.weyl_orbit(h)?;
            let target = neg(h);
            if orbit.contains(&target) {
                out.insert(j);
            }
        }
        Ok(out)
    }

    pub fn euler_report(&self) -> EulerReport {
        EulerReport {
            family: self.family.name().to_string(),
            rank: self.rank,
            euler: self.euler_coweights().into_iter().collect(),
            symmetric: self.symmetric_euler_coweights().into_iter().collect(),
            pairing: self.pairing(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub family: String,
    pub rank: usize,
    pub euler: Vec<usize>,
    pub symmetric: Vec<usize>,
    pub pairing: BTreeMap<usize, usize>,
}

/// Every family/rank pair with rank at most `max_rank`, in a fixed order.
pub fn classification_sweep(max_rank: usize) -> Vec<EulerReport> {
    let mut out = Vec::new();
    for fam in Family::ALL {
        for rank in 1..=max_rank {
            if fam.rank_is_valid(rank) {
                let rs = build_root_system(fam, rank).expect("rank checked");
                out.push(rs.euler_report());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(f: Family, n: usize) -> RootSystem {
        build_root_system(f, n).unwrap()
    }

    #[test]
    fn a1_basics() {
        let a1 = rs(Family::A, 1);
        assert_eq!(a1.cartan_matrix, vec![vec![2]]);
        assert_eq!(a1.all_roots().unwrap().len(), 2);
        let h = &a1.fundamental_coweights()[0];
        assert_eq!(dot(&a1.simple_roots[0], &h.coords), Q::one());
    }

    #[test]
    fn invalid_ranks_are_rejected() {
        let err = build_root_system(Family::D, 3).unwrap_err();
        assert!(err.to_string().contains(">= 4"));
        assert!(build_root_system(Family::E6, 7).is_err());
        assert!(build_root_system(Family::A, 0).is_err());
        assert!(Family::parse("E", 5).is_err());
        assert_eq!(Family::parse("e", 7).unwrap(), Family::E7);
    }

    #[test]
    fn cartan_entries() {
        let g2 = rs(Family::G2, 2);
        assert_eq!(g2.cartan_matrix, vec![vec![2, -1], vec![-3, 2]]);
        let b2 = rs(Family::B, 2);
        assert_eq!(b2.cartan_matrix, vec![vec![2, -2], vec![-1, 2]]);
        let f4 = rs(Family::F4, 4);
        for (i, row) in f4.cartan_matrix.iter().enumerate() {
            assert_eq!(row[i], 2);
        }
    }

    #[test]
    fn bc1_contains_doubled_root() {
        let bc1 = rs(Family::BC, 1);
        let roots = bc1.all_roots().unwrap();
        assert_eq!(roots, vec![vec![q(-2)], vec![q(-1)], vec![q(1)], vec![q(2)]]);
    }

    #[test]
    fn b2_coweight_pairing() {
        let b2 = rs(Family::B, 2);
        let hs = b2.fundamental_coweights();
        assert_eq!(dot(&b2.simple_roots[1], &hs[0].coords), Q::zero());
    }

    #[test]
    fn longest_element_is_involution() {
        for (f, n) in [(Family::A, 4), (Family::D, 5), (Family::E6, 6), (Family::G2, 2)] {
            let r = rs(f, n);
            for h in r.fundamental_coweights() {
                let once = r.longest_weyl_image(&h);
                let twice = r.longest_weyl_image(&once);
                assert_eq!(twice.coords, h.coords);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let e8 = rs(Family::E8, 8);
        assert_eq!(
            e8.all_roots_capped(100).unwrap_err(),
            RootSystemError::CapExceeded { cap: 100 }
        );
    }
}
