//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eulerwedge::covering::{CentralModel, CoveredWedge, MobiusCover, SigmaAction};
use eulerwedge::liealg::{euler, MatrixLieAlgebra};
use eulerwedge::modular::{
    axiom_suite, bgl, random_standard, twist_operators, AffineDilationModel, AntiUnitaryOp, AxiomReport,
    AxiomStatus, BglNet, CMat, HalfTurnModel, OrthogonalModel, PerturbedNet, RepModel, SuiteConfig,
};
use eulerwedge::report;
use eulerwedge::wedgespace::{
    arc_contains, lemma_suite, random_wedge, semigroup_sample, ConeModel, GradedGroupModel, Region,
};

const CLASSIFY_BUDGET: Duration = Duration::from_secs(10);
const GRADING_BUDGET: Duration = Duration::from_secs(30);
const SNAP_TOL: f64 = 1e-8;
const LEMMA_TOL: f64 = 1e-9;
const ROUND_TRIP_TOL: f64 = 1e-8;
const COMPLEMENT_TOL: f64 = 1e-9;
const AXIOM_TOL: f64 = 1e-8;
const PERTURB_MIN: f64 = 1e-3;
const ORTHO_TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Euler and symmetric coweights as listed in the classification theorem.
fn expected_lists(family: &str, n: usize) -> (Vec<usize>, Vec<usize>) {
    match family {
        "A" => ((1..=n).collect(), if n % 2 == 1 { vec![n.div_ceil(2)] } else { vec![] }),
        "B" => (vec![1], vec![1]),
        "C" => (vec![n], vec![n]),
        "D" => (vec![1, n - 1, n], if n.is_multiple_of(2) { vec![1, n - 1, n] } else { vec![1] }),
        "E6" => (vec![1, 6], vec![]),
        "E7" => (vec![7], vec![7]),
        _ => (vec![], vec![]),
    }
}

fn classification() -> Outcome {
    let start = Instant::now();
    let reports = report::classify_all();
    let elapsed = start.elapsed();
    let mut expected_pairs: Vec<(&str, usize)> = Vec::new();
    for n in 1..=8 {
        expected_pairs.push(("A", n));
        expected_pairs.push(("BC", n));
        if n >= 2 {
            expected_pairs.push(("B", n));
            expected_pairs.push(("C", n));
        }
        if n >= 4 {
            expected_pairs.push(("D", n));
        }
    }
    expected_pairs.extend([("E6", 6), ("E7", 7), ("E8", 8), ("F4", 4), ("G2", 2)]);
    ensure(
        reports.len() == expected_pairs.len(),
        format!("{} systems, expected {}", reports.len(), expected_pairs.len()),
    )?;
    for (fam, n) in &expected_pairs {
        let r = reports
            .iter()
            .find(|r| r.family == *fam && r.rank == *n)
            .ok_or(format!("{fam}{n} missing"))?;
        let (euler, symmetric) = expected_lists(fam, *n);
        ensure(r.euler == euler, format!("{fam}{n}: euler {:?}, expected {euler:?}", r.euler))?;
        ensure(
            r.symmetric == symmetric,
            format!("{fam}{n}: symmetric {:?}, expected {symmetric:?}", r.symmetric),
        )?;
    }
    ensure(elapsed < CLASSIFY_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("{} systems in {:.2?}", reports.len(), elapsed))
}

fn gradings() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut check = |algebra: &str, params: &[usize], which: String, expected: usize| -> Result<(), String> {
        let rep = report::grading(algebra, params, &which).map_err(|e| e.to_string())?;
        checked += 1;
        ensure(
            rep.dims.dim_plus == expected && rep.dims.dim_minus == expected,
            format!("{algebra} {params:?} {which}: g1 = {}, expected {expected}", rep.dims.dim_plus),
        )
    };
    for n in 2..=6 {
        for j in 1..n {
            check("sl", &[n], format!("h{j}"), j * (n - j))?;
        }
        check("sp", &[2 * n], "hn".into(), n * (n + 1) / 2)?;
        check("so", &[n, n], "hn".into(), n * (n - 1) / 2)?;
    }
    check("sp", &[2], "hn".into(), 1)?;
    for p in 1..=7 {
        for q in 1..=(8 - p) {
            if p + q >= 3 {
                check("so", &[p, q], "h1".into(), p + q - 2)?;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < GRADING_BUDGET, format!("took {elapsed:?}"))?;
    // The snap tolerance is the one used for eigenspace dimensions.
    ensure(eulerwedge::liealg::EIGEN_TOL <= SNAP_TOL, "eigenspace snap tolerance too loose")?;
    Ok(format!("{checked} gradings in {elapsed:.2?}"))
}

fn sl2_cone_and_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cone = ConeModel::Sl2;
    let mut inside = 0;
    for _ in 0..10_000 {
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x = DMatrix::from_row_slice(2, 2, &[a, b, c, -a]);
        // The vector field b + 2a t - c t^2 is nonnegative on the projective line.
        let oracle = b >= 0.0 && -c >= 0.0 && -b * c - a * a >= 0.0;
        ensure(cone.contains(&x) == oracle, format!("cone disagrees at a={a} b={b} c={c}"))?;
        inside += usize::from(oracle);
    }

    let model = GradedGroupModel::mobius();
    let base = model.base_wedge();
    let mut nested = 0;
    for _ in 0..200 {
        let w2 = random_wedge(&model, &mut rng, false);
        let w1 = if rng.gen_bool(0.5) {
            let s = semigroup_sample(&model, &mut rng).ok_or("no semigroup sample")?;
            let t = w2.transporter.clone().ok_or("missing transporter")?;
            let mut w = model.act(&(&t * &s), &base).map_err(|e| e.to_string())?;
            w.transporter = Some(&t * &s);
            w
        } else {
            random_wedge(&model, &mut rng, false)
        };
        let leq = model.leq(&w1, &w2).map_err(|e| e.to_string())?;
        let arc = |w| match model.wedge_to_region(w) {
            Ok(Region::Arc { start, end }) => Ok((start, end)),
            other => Err(format!("unexpected region {other:?}")),
        };
        let contained = arc_contains(arc(&w2)?, arc(&w1)?, 1e-9);
        ensure(leq == contained, format!("order {leq} vs containment {contained}"))?;
        nested += usize::from(contained);
    }

    let mut worst: f64 = 0.0;
    for m in [
        GradedGroupModel::affine(),
        GradedGroupModel::mobius(),
        GradedGroupModel::poincare(1).map_err(|e| e.to_string())?,
        GradedGroupModel::poincare(2).map_err(|e| e.to_string())?,
        GradedGroupModel::poincare(3).map_err(|e| e.to_string())?,
    ] {
        let rep = lemma_suite(&m, &mut rng, 25);
        ensure(rep.failures.is_empty(), format!("{}: {:?}", m.kind, rep.failures))?;
        ensure(rep.max_residual < LEMMA_TOL, format!("{}: residual {:.3e}", m.kind, rep.max_residual))?;
        worst = worst.max(rep.max_residual);
    }
    Ok(format!(
        "cone 10000 ({inside} inside), order 200 ({nested} nested), lemma residual {worst:.1e}"
    ))
}

fn covering_combinatorics() -> Outcome {
    let z = CentralModel::integers_inversion();
    ensure(z.quotient_zminus_zone() == 2, "Z^-/Z_1 for the integers should be Z_2")?;
    for n in 1..=12u64 {
        let c = CentralModel::cyclic(n, SigmaAction::Inversion).map_err(|e| e.to_string())?;
        let q = c.quotient_zminus_zone();
        ensure(q == if n % 2 == 0 { 2 } else { 1 }, format!("Z^-/Z_1 for Z_{n} has order {q}"))?;
        let cover = MobiusCover::finite(n).map_err(|e| e.to_string())?;
        let expected = if n % 2 == 0 { 2 } else { 1 };
        ensure(cover.orbit_count() == expected, format!("n={n}: {} orbits", cover.orbit_count()))?;
        ensure(
            cover.orbit_count_from_center() == Some(expected),
            format!("n={n}: center count {:?}", cover.orbit_count_from_center()),
        )?;
    }

    let cov = MobiusCover::universal();
    ensure(cov.orbit_count() == 2, "universal cover should have two orbits")?;
    // (h, tau_0) and (h, tau_1) lie in different orbits; rho(pi) moves (h, tau_0) to (-h, tau_1).
    ensure(cov.fiber_orbit_label(1, 0) != cov.fiber_orbit_label(1, 1), "tau_0 and tau_1 share an orbit")?;
    let w0 = CoveredWedge::base(&cov, 0);
    let moved = cov.act(&cov.rho(PI), &w0);
    ensure(moved.fiber_label() == Some((-1, 1)), format!("rho(pi) W0 = {:?}", moved.fiber_label()))?;
    let twisted = cov.twisted_complement(&w0, -1).map_err(|e| e.to_string())?;
    let rotated = cov.act(&cov.rho(-PI), &w0);
    ensure(
        twisted.fiber_label() == rotated.fiber_label() && twisted.approx_eq(&cov, &rotated),
        format!("twisted {:?} vs rotated {:?}", twisted.fiber_label(), rotated.fiber_label()),
    )?;
    Ok("Z^-/Z_1, orbit counts n<=12, universal split, twisted complement".into())
}

fn standard_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut worst_rt, mut worst_c): (f64, f64) = (0.0, 0.0);
    for k in 0..200 {
        let n = 2 + k % 7;
        let v = random_standard(n, &mut rng);
        let t = v.tomita().map_err(|e| e.to_string())?;
        let back = t.standard_subspace().map_err(|e| e.to_string())?;
        worst_rt = worst_rt.max(back.distance(&v));
        let tc = v.symplectic_complement().tomita().map_err(|e| e.to_string())?;
        let inv = t.delta_inverse();
        let d = (&tc.delta - &inv).norm() / inv.norm().max(1.0);
        worst_c = worst_c.max(d).max(tc.j.distance(&t.j));
    }
    ensure(worst_rt < ROUND_TRIP_TOL, format!("round trip distance {worst_rt:.3e}"))?;
    ensure(worst_c < COMPLEMENT_TOL, format!("complement residual {worst_c:.3e}"))?;
    Ok(format!("200 subspaces, round trip {worst_rt:.1e}, complement {worst_c:.1e}"))
}

fn check_axioms(rep: &AxiomReport) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for (name, status) in [("HK2", rep.hk2), ("HK5", rep.hk5), ("HK6", rep.hk6), ("HK7", rep.hk7), ("HK8", rep.hk8)] {
        match status {
            AxiomStatus::Pass { residual } if residual < AXIOM_TOL => worst = worst.max(residual),
            // Without a twisted complement in the orbit there is nothing to compare.
            AxiomStatus::Vacuous if rep.twists.is_empty() && name != "HK2" && name != "HK5" => {}
            other => return Err(format!("{}: {name} {other}", rep.model)),
        }
    }
    for tw in &rep.twists {
        let r = tw.residuals;
        let m = r.square.max(r.commutant).max(r.reflection);
        ensure(m < AXIOM_TOL, format!("{}: twist {} residual {m:.3e}", rep.model, tw.alpha))?;
        worst = worst.max(m);
    }
    ensure(rep.passed(), format!("{}: some check failed", rep.model))?;
    Ok(worst)
}

fn bgl_suite() -> Outcome {
    let cfg = SuiteConfig { samples: 12, seed: 5, tol: AXIOM_TOL };
    let mut worst: f64 = 0.0;
    let mut twisted_models = 0;
    for n in 1..=6u64 {
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        let m = HalfTurnModel::new(n, zeta, vec![0.35, 0.9, 1.6]).map_err(|e| e.to_string())?;
        let rep = axiom_suite(&m, &BglNet, cfg).map_err(|e| e.to_string())?;
        worst = worst.max(check_axioms(&rep)?);
        twisted_models += usize::from(!rep.twists.is_empty());
    }
    for copies in 1..=2 {
        let m = OrthogonalModel::new(copies).map_err(|e| e.to_string())?;
        let rep = axiom_suite(&m, &BglNet, cfg).map_err(|e| e.to_string())?;
        ensure(!rep.twists.is_empty(), "orthogonal model has no twist")?;
        worst = worst.max(check_axioms(&rep)?);
    }
    let aff = AffineDilationModel::new(&[0.2, 0.7]).map_err(|e| e.to_string())?;
    worst = worst.max(check_axioms(&axiom_suite(&aff, &BglNet, cfg).map_err(|e| e.to_string())?)?);

    // Scalar twist in the two-dimensional mock: N(W'^{-1}) = i N(W)'.
    let mock = HalfTurnModel::poincare_mock();
    let (tw, z) = twist_operators(&mock)
        .map_err(|e| e.to_string())?
        .into_iter()
        .next()
        .ok_or("mock has no twist")?;
    let minus_one = mock.rep(&tw.alpha).u;
    ensure(
        (&minus_one + CMat::identity(2, 2)).norm() < 1e-12,
        "U(alpha) should be -1 in the mock",
    )?;
    let i = CMat::identity(2, 2) * Complex64::i();
    ensure((&z - &i).norm() < 1e-12, "twist square root should be i")?;
    let w = mock.base_wedge();
    let lhs = bgl(&mock, &mock.twisted_complement(&w, &tw.alpha)).map_err(|e| e.to_string())?;
    let rhs = AntiUnitaryOp::linear(i).apply(&bgl(&mock, &w).map_err(|e| e.to_string())?.symplectic_complement());
    let mock_res = lhs.distance(&rhs);
    ensure(mock_res < AXIOM_TOL, format!("mock twist residual {mock_res:.3e}"))?;

    // A corrupted net must be caught by covariance.
    let m = HalfTurnModel::new(2, Complex64::new(-1.0, 0.0), vec![0.5, 1.3]).map_err(|e| e.to_string())?;
    let net = PerturbedNet::new(m.base_wedge(), m.dim(), 9);
    let rep = axiom_suite(&m, &net, cfg).map_err(|e| e.to_string())?;
    let hk2 = rep.hk2.residual().unwrap_or(0.0);
    ensure(rep.hk2.failed() && hk2 > PERTURB_MIN, format!("perturbed HK2 residual {hk2:.3e}"))?;

    Ok(format!(
        "9 models ({twisted_models} twisted covers), worst {worst:.1e}, mock {mock_res:.1e}, perturbed HK2 {hk2:.1e}"
    ))
}

/// Distance of the `ad x` spectrum from `{-c, 0, c}` after normalizing by the largest modulus.
/// Nilpotent `ad x` is never diagonalizable, so it gets the maximal defect.
fn euler_defect(alg: &MatrixLieAlgebra, x: &DMatrix<f64>) -> f64 {
    let ad = alg.ad_matrix(x).expect("x in algebra");
    let d = ad.nrows();
    let scaled = &ad / ad.norm();
    let mut power = DMatrix::identity(d, d);
    for _ in 0..d {
        power = &power * &scaled;
    }
    if power.norm() < 1e-10 {
        return 1.0;
    }
    let ev = ad.complex_eigenvalues();
    let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ev.iter()
        .map(|z| {
            let z = z / scale;
            let re = z.re.abs();
            z.im.abs().max(re.min((re - 1.0).abs()))
        })
        .fold(0.0, f64::max)
}

fn orthogonality() -> Outcome {
    let sl4 = MatrixLieAlgebra::sl(4).map_err(|e| e.to_string())?;
    let h2 = euler::sl_h(4, 2);
    let mut x = DMatrix::zeros(4, 4);
    for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
        x[(i, j)] = 0.5;
    }
    ensure(sl4.is_euler(&x), "x is not an Euler element")?;
    let sub = sl4.generated_subalgebra(&[h2.clone(), x.clone()]).map_err(|e| e.to_string())?;
    ensure(sub.dim() == 3, format!("generated subalgebra has dimension {}", sub.dim()))?;
    let sig = sub.killing_signature();
    ensure(sig == (2, 1, 0), format!("Killing signature {sig:?}"))?;
    let img = sl4.apply_euler_involution(&x, &h2).map_err(|e| e.to_string())?;
    let res = (&img + &h2).norm();
    ensure(res < ORTHO_TOL, format!("sigma_x(h2) + h2 = {res:.3e}"))?;

    // sl3, h1: every element of the sigma-odd part g_1 + g_-1 fails the spectrum test.
    let sl3 = MatrixLieAlgebra::sl(3).map_err(|e| e.to_string())?;
    let h1 = euler::sl_h(3, 1);
    let sigma = sl3.euler_involution(&h1).map_err(|e| e.to_string())?;
    let odd = odd_part(&sigma);
    ensure(odd.ncols() == 4, format!("sigma-odd subspace has dimension {}", odd.ncols()))?;
    let steps = 9;
    let grid: Vec<f64> = (0..steps).map(|k| -1.0 + 2.0 * k as f64 / (steps - 1) as f64).collect();
    let mut best = f64::INFINITY;
    let mut points = 0;
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                for &d in &grid {
                    let coeffs = nalgebra::DVector::from_vec(vec![a, b, c, d]);
                    if coeffs.norm() < 1e-12 {
                        continue;
                    }
                    let y = sl3.element(&(&odd * coeffs));
                    best = best.min(euler_defect(&sl3, &y));
                    points += 1;
                }
            }
        }
    }
    ensure(best > 0.1, format!("sl3 candidate with Euler defect {best:.3e}"))?;
    Ok(format!(
        "sl4 subalgebra dim 3 signature (2,1), residual {res:.1e}; sl3 h1 {points} grid points, min defect {best:.2}"
    ))
}

/// Orthonormal basis of the range of an involution's odd projector `(1 - s)/2`, by Gram-Schmidt.
fn odd_part(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let p = (DMatrix::identity(n, n) - s) * 0.5;
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    for c in p.column_iter() {
        let mut v = c.into_owned();
        for q in &cols {
            v -= q * q.dot(&v);
        }
        if v.norm() > 1e-9 {
            cols.push(v.normalize());
        }
    }
    DMatrix::from_columns(&cols)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("classification sweep", classification),
        ("grading dimensions", gradings),
        ("sl2 cone and order", sl2_cone_and_order),
        ("covering combinatorics", covering_combinatorics),
        ("standard subspace round trip", standard_round_trip),
        ("BGL axiom suite", bgl_suite),
        ("orthogonal Euler pairs", orthogonality),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({t:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why} ({t:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
