use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eulerwedge::covering::{CentralModel, CoverElement, CoveredWedge, MobiusCover, SigmaAction, Subgroup};
use eulerwedge::liealg::{euler, MatrixLieAlgebra};
use eulerwedge::modular::{
    bgl, commutant, herm_fn, random_standard, twist_operators, twist_residuals, AffineDilationModel,
    AntiUnitaryOp, CMat, HalfTurnModel, OrthogonalModel, RepModel,
};
use eulerwedge::rootsys::{build_root_system, dot, Family, Q};
use eulerwedge::wedgespace::{random_wedge, semigroup_sample, GradedGroupModel};

fn admissible_systems() -> Vec<(Family, usize)> {
    Family::ALL
        .iter()
        .flat_map(|&f| (1..=8).filter(move |&r| f.rank_is_valid(r)).map(move |r| (f, r)))
        .collect()
}

fn classical_root_count(f: Family, n: usize) -> usize {
    match f {
        Family::A => n * (n + 1),
        Family::B | Family::C => 2 * n * n,
        // BC adds the doubled short roots.
        Family::BC => 2 * n * n + 2 * n,
        Family::D => 2 * n * (n - 1),
        Family::G2 => 12,
        Family::F4 => 48,
        Family::E6 => 72,
        Family::E7 => 126,
        Family::E8 => 240,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_systems_are_consistent(sys in proptest::sample::select(admissible_systems())) {
        let (fam, rank) = sys;
        let rs = build_root_system(fam, rank).unwrap();
        let roots = rs.all_roots().unwrap();
        prop_assert_eq!(roots.len(), classical_root_count(fam, rank));

        let euler = rs.euler_coweights();
        let one = Q::from_integer(1);
        for h in rs.fundamental_coweights() {
            let j = h.label.unwrap();
            let graded = roots.iter().map(|a| dot(a, &h.coords)).all(|v| -one <= v && v <= one);
            prop_assert_eq!(graded, euler.contains(&j), "h{} of {}{}", j, fam, rank);
        }

        let pairing = rs.pairing();
        for (j, k) in &pairing {
            prop_assert_eq!(pairing[k], *j);
        }
        prop_assert_eq!(rs.symmetric_by_orbit().unwrap(), rs.symmetric_euler_coweights());
    }
}

#[test]
fn sl_euler_elements_match_type_a() {
    for n in 2..=7 {
        let sl = MatrixLieAlgebra::sl(n).unwrap();
        let found: Vec<usize> = (1..n).filter(|&j| sl.is_euler(&euler::sl_h(n, j))).collect();
        let expected: Vec<usize> = build_root_system(Family::A, n - 1).unwrap().euler_coweights().into_iter().collect();
        assert_eq!(found, expected);
    }
}

fn algebra_with_euler(choice: usize) -> (MatrixLieAlgebra, DMatrix<f64>) {
    match choice {
        0 => (MatrixLieAlgebra::sl(4).unwrap(), euler::sl_h(4, 1)),
        1 => (MatrixLieAlgebra::sl(5).unwrap(), euler::sl_h(5, 2)),
        2 => (MatrixLieAlgebra::sp(2).unwrap(), euler::sp_h(2)),
        3 => (MatrixLieAlgebra::so(2, 3).unwrap(), euler::so_boost(2, 3)),
        _ => (MatrixLieAlgebra::so(3, 3).unwrap(), euler::so_split_h(3)),
    }
}

fn sl2_conj(g: &[f64; 3], x: &DMatrix<f64>) -> DMatrix<f64> {
    // exp of a generic sl2 element, always invertible.
    let m = DMatrix::from_row_slice(2, 2, &[g[0], g[1], g[2], -g[0]]).exp();
    &m * x * m.try_inverse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_involution_is_automorphism(choice in 0usize..5, seed in any::<u64>()) {
        let (alg, h) = algebra_with_euler(choice);
        let s = alg.euler_involution(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = || DVector::from_fn(alg.dim(), |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let (ca, cb) = (coords(), coords());
        let (a, b) = (alg.element(&ca), alg.element(&cb));
        let lhs = alg.element(&(&s * alg.coords(&alg.bracket(&a, &b)).unwrap()));
        let rhs = alg.bracket(&alg.element(&(&s * &ca)), &alg.element(&(&s * &cb)));
        prop_assert!((&lhs - &rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn sl2_orthogonality_is_symmetric(g in prop::array::uniform3(-1.0f64..1.0), k in prop::array::uniform3(-1.0f64..1.0)) {
        let sl2 = MatrixLieAlgebra::sl(2).unwrap();
        let h = euler::sl2_h();
        let kk = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        let (x, y) = (sl2_conj(&g, &h), sl2_conj(&g, &kk));
        prop_assert!(sl2.is_orthogonal_pair(&x, &y).unwrap());
        prop_assert!(sl2.is_orthogonal_pair(&y, &x).unwrap());
        let z = sl2_conj(&k, &h);
        prop_assert_eq!(sl2.is_orthogonal_pair(&x, &z).unwrap(), sl2.is_orthogonal_pair(&z, &x).unwrap());
    }

    #[test]
    fn orthogonal_partners_flip_symmetric_h(b in prop::array::uniform4(-0.8f64..0.8), c in prop::array::uniform4(-0.8f64..0.8)) {
        // Conjugating the partner of h2 by the centralizer of h2 keeps it a partner.
        let sl4 = MatrixLieAlgebra::sl(4).unwrap();
        let h2 = euler::sl_h(4, 2);
        let mut x = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            x[(i, j)] = 0.5;
        }
        let mut gen = DMatrix::zeros(4, 4);
        gen.view_mut((0, 0), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &b));
        gen.view_mut((2, 2), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &c));
        let g = gen.exp();
        let xg = &g * &x * g.clone().try_inverse().unwrap();
        prop_assume!(sl4.is_euler(&xg));
        let img = sl4.apply_euler_involution(&xg, &h2).unwrap();
        prop_assert!((&img + &h2).norm() < 1e-8);
    }
}

fn wedge_models() -> Vec<GradedGroupModel> {
    vec![
        GradedGroupModel::affine(),
        GradedGroupModel::mobius(),
        GradedGroupModel::poincare(1).unwrap(),
        GradedGroupModel::poincare(2).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compression_semigroups(choice in 0usize..4, seed in any::<u64>()) {
        let model = &wedge_models()[choice];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_wedge(model, &mut rng, true);
        let t = w.transporter.clone().unwrap();
        let conj = |s: &eulerwedge::wedgespace::GroupElement| &(&t * s) * &t.inverse();
        let s1 = conj(&semigroup_sample(model, &mut rng).unwrap());
        let s2 = conj(&semigroup_sample(model, &mut rng).unwrap());
        prop_assert!(model.in_semigroup(&s1, &w).unwrap());
        prop_assert!(model.in_semigroup(&(&s1 * &s2), &w).unwrap());

        // The semigroup of the complement is the inverse semigroup.
        let wd = model.dual(&w);
        let g = model.random_even(&mut rng);
        prop_assert_eq!(model.in_semigroup(&g, &wd).unwrap(), model.in_semigroup(&g.inverse(), &w).unwrap());

        // Units are exactly the stabilizer.
        let lam = model.lambda(&w, 0.7);
        prop_assert!(model.in_semigroup(&lam, &w).unwrap() && model.in_semigroup(&lam.inverse(), &w).unwrap());
        let unit = model.in_semigroup(&g, &w).unwrap() && model.in_semigroup(&g.inverse(), &w).unwrap();
        let fixes = model.act(&g, &w).unwrap().approx_eq(&w, 1e-8);
        prop_assert_eq!(unit, fixes);

        prop_assert!(model.is_euler_couple(&model.act(&g, &w).unwrap()));
    }
}

fn cover_element(cov: &MobiusCover, p: (f64, f64, f64, i64, bool)) -> CoverElement {
    let (a, t, b, k, odd) = p;
    let mut g = cov.mul(&cov.mul(&cov.rho(a), &cov.delta(t)), &cov.mul(&cov.rho(b), &cov.central(k)));
    if odd {
        g = cov.mul(&g, &cov.tau(0));
    }
    g
}

fn cover_params() -> impl Strategy<Value = (f64, f64, f64, i64, bool)> {
    (-7.0f64..7.0, -2.0f64..2.0, -7.0f64..7.0, -3i64..4, any::<bool>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn odd_elements_invert_central_shifts(p in cover_params(), alpha in -4i64..5, n in 0i64..3) {
        let cov = MobiusCover::universal();
        let g = cover_element(&cov, (p.0, p.1, p.2, p.3, true));
        let w = CoveredWedge::base(&cov, n);
        let lhs = cov.act(&g, &cov.central_shift(alpha, &w));
        let rhs = cov.central_shift(-alpha, &cov.act(&g, &w));
        prop_assert!(lhs.approx_eq(&cov, &rhs));
    }

    #[test]
    fn orbit_labels_are_invariant(p in cover_params(), n in 0i64..4) {
        let cov = MobiusCover::universal();
        let g = cover_element(&cov, (p.0, p.1, p.2, p.3, false));
        let w = CoveredWedge::base(&cov, n);
        let (_, before) = cov.interval_of(&w).unwrap();
        let (_, after) = cov.interval_of(&cov.act(&g, &w)).unwrap();
        prop_assert_eq!(before, after);
        // Complementation swaps the two orbits; the twisted complement by -1 stays.
        let (_, dual) = cov.interval_of(&cov.dual(&w)).unwrap();
        prop_assert_ne!(dual, before);
        let (_, twisted) = cov.interval_of(&cov.twisted_complement(&w, -1).unwrap()).unwrap();
        prop_assert_eq!(twisted, before);
    }
}

/// Orbit label of a wedge over the base wedge of a finite cover.
fn fiber_orbit(cov: &MobiusCover, w: &CoveredWedge) -> i64 {
    let (s, j) = w.fiber_label().expect("wedge over the base wedge");
    cov.fiber_orbit_label(s, j)
}

#[test]
fn twisted_complements_in_the_orbit() {
    for n in 1..=12u64 {
        let cov = MobiusCover::finite(n).unwrap();
        let w0 = CoveredWedge::base(&cov, 0);
        let base = fiber_orbit(&cov, &w0);
        let z_two = Subgroup::new(cov.center().kind, 2);
        // rho(-2 pi) is a twist for which the complement stays in the orbit.
        let alpha = -1i64;
        for beta in 0..n as i64 {
            let wb = cov.twisted_complement(&w0, beta).unwrap();
            let inside = fiber_orbit(&cov, &wb) == base;
            assert_eq!(inside, z_two.contains(beta - alpha), "n={n} beta={beta}");
        }
    }
}

#[test]
fn fiber_conjugation_orbits() {
    for n in 1..=12u64 {
        let center = CentralModel::cyclic(n, SigmaAction::Inversion).unwrap();
        let cov = MobiusCover::finite(n).unwrap();
        let w0 = CoveredWedge::base(&cov, 0);
        let z_minus = center.z_minus();
        let fiber: Vec<CoveredWedge> = center
            .elements()
            .unwrap()
            .into_iter()
            .filter(|a| z_minus.contains(*a))
            .map(|a| cov.central_shift(a, &w0))
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, w) in fiber.iter().enumerate() {
            let hit = classes.iter().position(|cls| {
                (0..n as i64).any(|g| cov.act(&cov.central(g), &fiber[cls[0]]).approx_eq(&cov, w))
            });
            match hit {
                Some(c) => classes[c].push(i),
                None => classes.push(vec![i]),
            }
        }
        assert_eq!(classes.len() as u64, center.quotient_zminus_zone(), "n={n}");
    }
}

fn check_covariance<M: RepModel>(model: &M, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = model.act(&model.random_even(&mut rng), &model.base_wedge());
    let nw = bgl(model, &w).unwrap();
    let g = if seed.is_multiple_of(2) { model.random_even(&mut rng) } else { model.random_odd(&mut rng) };
    let moved = bgl(model, &model.act(&g, &w)).unwrap();
    moved.distance(&model.rep(&g).apply(&nw))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tomita_round_trip_and_complement(n in 2usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_standard(n, &mut rng);
        let t = v.tomita().unwrap();
        prop_assert!(t.standard_subspace().unwrap().distance(&v) < 1e-8);
        let vc = v.symplectic_complement();
        let tc = vc.tomita().unwrap();
        let inv = t.delta_inverse();
        prop_assert!((&tc.delta - &inv).norm() < 1e-9 * inv.norm().max(1.0));
        prop_assert!(tc.j.distance(&t.j) < 1e-9);
        let (s, sc) = (v.tomita_operator().unwrap(), vc.tomita_operator().unwrap());
        prop_assert!((&sc - s.transpose()).norm() < 1e-8 * s.norm().max(1.0));
    }

    #[test]
    fn bgl_nets_are_covariant(order in 1u64..6, seed in any::<u64>()) {
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / order as f64);
        let ht = HalfTurnModel::new(order, zeta, vec![0.4, 1.1]).unwrap();
        prop_assert!(check_covariance(&ht, seed) < 1e-8);
        let ort = OrthogonalModel::new(1).unwrap();
        prop_assert!(check_covariance(&ort, seed) < 1e-8);
        let aff = AffineDilationModel::new(&[0.3, 0.9]).unwrap();
        prop_assert!(check_covariance(&aff, seed) < 1e-8);
    }

    #[test]
    fn twist_roots_differ_by_involutions(copies in 1usize..3, seed in any::<u64>()) {
        let model = OrthogonalModel::new(copies).unwrap();
        let n = model.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = model.rep(&model.sigma(&model.base_wedge()));
        let even: Vec<AntiUnitaryOp> = model.even_generators().iter().map(|g| model.rep(g)).collect();
        let mut ops = even.clone();
        ops.push(j.clone());
        // A self-adjoint element of the commutant of the whole representation and its sign.
        let basis = commutant(&ops, n);
        let mut c = CMat::zeros(n, n);
        for b in &basis {
            c += b * Complex64::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), 0.0);
        }
        let hc = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        let e = herm_fn(&hc, |l| Complex64::new(if l < 0.0 { -1.0 } else { 1.0 }, 0.0));
        for (tw, z1) in twist_operators(&model).unwrap() {
            let ua = model.rep(&tw.alpha).u;
            let z2 = &z1 * &e;
            let r = twist_residuals(&z2, &ua, &j, &even);
            prop_assert!(r.square.max(r.commutant).max(r.reflection) < 1e-8, "{:?}", r);
            let q = z1.clone().try_inverse().unwrap() * &z2;
            prop_assert!((&q * &q - CMat::identity(n, n)).norm() < 1e-8);
            for _ in 0..3 {
                let w = model.act(&model.random_even(&mut rng), &model.base_wedge());
                let nw = bgl(&model, &w).unwrap();
                prop_assert!(AntiUnitaryOp::linear(q.clone()).apply(&nw).distance(&nw) < 1e-8);
            }
        }
    }
}
