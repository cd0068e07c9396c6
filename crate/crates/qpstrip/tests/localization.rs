use num_complex::Complex;
use proptest::prelude::*;
use qpstrip::cocycles::{product, Cocycle, CocycleSpec, Side};
use qpstrip::linalg::{hermitian_eigen, ComplexMatrix};
use qpstrip::localization::*;
use qpstrip::operators::{dirichlet_matrix, TrigPotential};
use qpstrip::random::rng;
use qpstrip::{Error, C64};

fn c(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn amo(l: f64) -> TrigPotential<f64> {
    TrigPotential::amo(l).unwrap()
}

fn random_v(seed: u64, d: usize) -> TrigPotential<f64> {
    TrigPotential::random_real(&mut rng(seed), d)
}

fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

#[test]
fn greens_constant_circulant() {
    let (lam, th, e) = (0.7, 0.1, 0.3);
    let b = greens_bundle(0.0, th, &amo(lam), 3, c(e)).unwrap();
    let a = 2.0 * (2.0 * std::f64::consts::PI * th).cos();
    let s = a - e - lam;
    let off = -lam / (s * (s + 3.0 * lam));
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 / s + off } else { off };
            assert!((b.g[(i, j)] - c(want)).norm() < 1e-12);
        }
    }
}

#[test]
fn greens_cramer_random_entries() {
    let v = random_v(3, 2);
    let b = greens_bundle(golden(), 0.23, &v, 7, c(0.4)).unwrap();
    assert!(b.inverse_residual < 1e-8);
    let mut r = rng(11);
    use rand::Rng;
    for _ in 0..10 {
        let (x, y) = (r.gen_range(0..14), r.gen_range(0..14));
        assert!(b.cramer_residual(x, y).unwrap() <= 1e-7);
    }
}

#[test]
fn greens_large_energy_asymptotics() {
    let e = 1e3;
    let b = greens_bundle(golden(), 0.1, &amo(1.0), 6, c(e)).unwrap();
    let want = ComplexMatrix::identity(6).scale(c(-1.0 / e));
    assert!(b.g.max_diff(&want) <= 10.0 / (e * e));
}

#[test]
fn greens_rejects_periodic_eigenvalue() {
    let v = amo(1.0);
    let p = qpstrip::operators::periodic_matrix(golden(), 0.2, &v, 5, 0.0).unwrap();
    let e = hermitian_eigen(&p).unwrap().values[2];
    let err = greens_bundle(golden(), 0.2, &v, 5, c(e));
    // an exact eigenvalue either produces a tiny pivot or an exactly singular factorization
    match err {
        Err(Error::Singular(msg)) => assert!(msg.contains("periodic eigenvalue")),
        Ok(b) => assert!(b.f.log_abs < -20.0),
        Err(other) => panic!("unexpected {other}"),
    }
}

fn dual_eigvec(v: &TrigPotential<f64>, sites: usize, idx: usize) -> (Vec<C64>, f64) {
    let h = dirichlet_matrix(golden(), 0.05, v, sites / v.degree(), 0.0).unwrap();
    let eig = hermitian_eigen(&h).unwrap();
    (eig.vectors.column(idx), eig.values[idx])
}

#[test]
fn poisson_dirichlet_eigenvector() {
    let v = random_v(5, 2);
    let (u, e) = dual_eigvec(&v, 400, 200);
    let sol = DualSolution { values: &u, start: 0 };
    for (n, k, m) in [(10, 150, 153), (20, 100, 139), (12, 180, 180)] {
        let r = poisson_residual(golden(), 0.05, &v, n, c(e), &sol, k, m).unwrap();
        assert!(r <= 1e-7, "n={n} residual {r}");
    }
}

#[test]
fn poisson_scalar_two_boundary_terms() {
    let lam = 1.0 / 3.0;
    let v = amo(lam);
    let (u, e) = dual_eigvec(&v, 400, 200);
    let sol = DualSolution { values: &u, start: 0 };
    let (n, k, m) = (15usize, 190i64, 197i64);
    let r = poisson_residual(golden(), 0.05, &v, n, c(e), &sol, k, m).unwrap();
    assert!(r <= 1e-8);
    // explicit form: b_0 = lam (u_{k+n-1} - u_{k-1}), b_{n-1} = lam (u_k - u_{k+n})
    let b = greens_bundle(golden(), 0.05 + k as f64 * golden(), &v, n, c(e)).unwrap();
    let ku = k as usize;
    let b0 = c(lam) * (u[ku + n - 1] - u[ku - 1]);
    let b1 = c(lam) * (u[ku] - u[ku + n]);
    let row = (m - k) as usize;
    let rhs = b.g[(row, 0)] * b0 + b.g[(row, n - 1)] * b1;
    assert!((u[m as usize] - rhs).norm() <= 1e-8);
}

#[test]
fn poisson_rejects_noise() {
    let v = amo(0.5);
    let mut r = rng(1);
    let u: Vec<C64> = (0..100).map(|_| qpstrip::random::complex(&mut r)).collect();
    let sol = DualSolution { values: &u, start: 0 };
    let err = poisson_residual(golden(), 0.0, &v, 10, c(0.1), &sol, 40, 45).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn numerator_d1_midpoint() {
    let r = numerator_bound_profile(golden(), &theta_grid(64), &amo(1.0 / 3.0), 24, 0.3, 0, 12).unwrap();
    assert!(r.margin >= -0.05, "{r:?}");
    assert!(r.exponents[0] == 0.0);
}

#[test]
fn numerator_d2_midpoint() {
    let n = 16;
    let r = numerator_bound_profile(golden(), &theta_grid(64), &random_v(7, 2), n, 0.1, 0, n).unwrap();
    assert!(r.margin >= -0.05, "{r:?}");
}

#[test]
fn numerator_index_guard() {
    let v = amo(1.0 / 3.0);
    let g = theta_grid(4);
    assert!(matches!(numerator_bound_profile(golden(), &g, &v, 24, 0.3, 5, 12), Err(Error::IndexRange(_))));
    assert!(matches!(numerator_bound_profile(golden(), &g, &v, 24, 0.3, 0, 2), Err(Error::IndexRange(_))));
}

#[test]
fn denominator_admissible_supercritical() {
    let v = amo(1.0 / 3.0);
    let n = 34;
    let r = denominator_stats(golden(), &v, 0.3, n, 0.05, 1024, DEFAULT_KAPPA0).unwrap();
    assert!(r.admissible);
    assert!(r.fraction <= 0.15);
}

#[test]
fn denominator_flags_non_admissible() {
    let r = denominator_stats(golden(), &amo(1.0 / 3.0), 0.3, 35, 0.05, 64, 0.01).unwrap();
    assert!(!r.admissible);
    assert!(r.flags.iter().any(|f| f == "non-admissible"));
}

#[test]
fn denominator_large_energy() {
    let r = denominator_stats(golden(), &amo(1.0 / 3.0), 1e3, 34, 0.05, 128, DEFAULT_KAPPA0).unwrap();
    assert_eq!(r.fraction, 0.0);
}

#[test]
fn large_deviation_decreases() {
    let v = amo(1.0 / 3.0);
    let f: Vec<f64> =
        [50, 100, 200].iter().map(|&n| large_deviation_measure(golden(), &v, 0.3, n, 0.1, 256).unwrap().fraction).collect();
    assert!(f[0] >= f[1] && f[1] >= f[2], "{f:?}");
    let small = large_deviation_measure(golden(), &v, 0.3, 5, 0.1, 64).unwrap();
    assert!((0.0..=1.0).contains(&small.fraction));
}

#[test]
fn large_deviation_eps_one_hyperbolic() {
    let r = large_deviation_measure(golden(), &amo(1.0 / 3.0), 10.0, 20, 1.0, 64).unwrap();
    assert_eq!(r.fraction, 0.0);
}

#[test]
fn pairing_diagonal() {
    let m = ComplexMatrix::diag(&[c(2.0), c(0.5)]);
    let r = symplectic_pairing_check(&m).unwrap();
    assert!((r.top_pairing - 1.0).abs() < 1e-12 && (r.bottom_pairing - 1.0).abs() < 1e-12);
}

#[test]
fn pairing_transfer_product() {
    let c0 = Cocycle::new(CocycleSpec::new(golden(), random_v(21, 2), c(0.2), 0.0, Side::DualBlock)).unwrap();
    let m = product(&c0, c(0.1), 10);
    let r = symplectic_pairing_check(&m).unwrap();
    assert!(r.pairing_gap <= 1e-8);
    assert!(r.subspace_resolved);
    assert!(r.right_subspace_distance <= 1e-7 && r.left_subspace_distance <= 1e-7);
}

#[test]
fn pairing_guards() {
    assert!(matches!(symplectic_pairing_check(&ComplexMatrix::identity(2)), Err(Error::Degenerate(_))));
    let m = ComplexMatrix::diag(&[c(2.0), c(3.0)]);
    assert!(matches!(symplectic_pairing_check(&m), Err(Error::Precondition(_))));
}

fn rotated_hyperbolic(phi: f64, s: f64) -> ComplexMatrix<f64> {
    let (co, si) = (phi.cos(), phi.sin());
    let rot = ComplexMatrix::from_real_rows(&[&[co, -si], &[si, co]]).unwrap();
    rot.matmul(&ComplexMatrix::diag(&[c(s), c(1.0 / s)]))
}

#[test]
fn avalanche_aligned_chain() {
    let g = vec![ComplexMatrix::diag(&[c(10.0), c(0.1)]); 12];
    match avalanche_check(&g, 0.5, 0.02, DEFAULT_AVALANCHE_C0).unwrap() {
        AvalancheReport::Checked { defect, .. } => assert!(defect <= 1e-10),
        other => panic!("{other:?}"),
    }
}

#[test]
fn avalanche_random_hyperbolic_chain() {
    use rand::Rng;
    let mut r = rng(4);
    let (n, kappa, eps) = (20, 1e-6, 0.5);
    let g: Vec<_> = (0..n).map(|_| rotated_hyperbolic(r.gen_range(-0.5..0.5), 1e4)).collect();
    match avalanche_check(&g, eps, kappa, DEFAULT_AVALANCHE_C0).unwrap() {
        AvalancheReport::Checked { defect, bound, pass, .. } => {
            assert!(pass && defect <= 10.0 * n as f64 * kappa / (eps * eps) && bound > 0.0)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn avalanche_misaligned_pair() {
    let mut g = vec![ComplexMatrix::diag(&[c(100.0), c(0.01)]); 6];
    g[3] = rotated_hyperbolic(std::f64::consts::FRAC_PI_2, 100.0);
    match avalanche_check(&g, 0.5, 0.02, DEFAULT_AVALANCHE_C0).unwrap() {
        AvalancheReport::HypothesesNotMet { alignment_violations, .. } => assert!(!alignment_violations.is_empty()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn avalanche_defect_linear_in_length() {
    let h = rotated_hyperbolic(0.3, 1e3);
    let d: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| match avalanche_check(&vec![h.clone(); n], 0.2, 1e-5, DEFAULT_AVALANCHE_C0).unwrap() {
            AvalancheReport::Checked { defect, .. } => defect,
            other => panic!("{other:?}"),
        })
        .collect();
    let (s1, s2) = ((d[1] - d[0]) / 10.0, (d[2] - d[1]) / 20.0);
    assert!((s1 - s2).abs() <= 0.2 * s1.abs(), "{d:?}");
}

fn z_grid() -> Vec<f64> {
    (0..=400).map(|j| -1.0 + j as f64 / 200.0).collect()
}

#[test]
fn uniformity_equispaced_cos_nodes() {
    let nodes: Vec<f64> = (0..8).map(|j| (-1.0 + 2.0 * j as f64 / 7.0f64).acos() / (2.0 * std::f64::consts::PI)).collect();
    assert!(uniformity_measure(&nodes, &z_grid()).unwrap().kappa <= 0.5);
}

#[test]
fn uniformity_clustered_nodes() {
    let err = uniformity_measure(&[0.1, 0.1 + 1e-8, 0.3], &z_grid()).unwrap_err();
    assert!(matches!(err, Error::Degenerate(_)));
}

#[test]
fn uniformity_orbit_at_denominator() {
    let k = |m: usize| {
        let nodes: Vec<f64> = (0..m).map(|j| 0.05 + j as f64 * golden()).collect();
        uniformity_measure(&nodes, &z_grid()).unwrap().kappa
    };
    let at_q = k(13);
    assert!(at_q < k(12) && at_q < k(14));
}

#[test]
fn decay_supercritical_dual() {
    let r = eigen_decay_profile(golden(), 0.05, &amo(1.0 / 3.0), 400, EigenSelect::Index(200)).unwrap();
    assert!(r.fit_rate >= 0.3 * 3f64.ln(), "{}", r.fit_rate);
    assert!(r.r_squared >= 0.9);
    assert!(r.localized);
}

#[test]
fn decay_periodic_control() {
    let r = eigen_decay_profile(0.0, 0.05, &amo(1.0 / 3.0), 400, EigenSelect::Index(200)).unwrap();
    assert!(r.fit_rate <= NON_LOCALIZED_RATE);
    assert!(!r.localized);
}

#[test]
fn decay_flags_resonances() {
    // every reported nonzero resonance is cut out of the fit
    let r = eigen_decay_profile(golden(), 0.05, &amo(1.0 / 3.0), 400, EigenSelect::Energy(0.0)).unwrap();
    for res in r.resonances.iter().filter(|x| x.k != 0) {
        assert!(r.excluded_distances.contains(&(res.k.unsigned_abs() as usize)));
    }
}

#[test]
fn demo_windows_and_determinant() {
    let cfg = DemoConfig::default();
    let res: Vec<ConjugationDemo> = [12, 33, 88]
        .iter()
        .map(|&n| almost_reducibility_demo(golden(), &amo(0.5), 0.3, n, 0.0, 64, &cfg).unwrap())
        .collect();
    for d in &res {
        assert!(d.max_det_error <= 1e-10);
    }
    assert!(res[1].residual_to_rotation <= 1.1 * res[0].residual_to_rotation);
    assert!(res[2].residual_to_rotation <= 1.1 * res[1].residual_to_rotation);
    assert!(res[2].defect < res[0].defect);
}

#[test]
fn demo_strip_samples() {
    let d = almost_reducibility_demo(golden(), &amo(0.5), 0.3, 33, 0.01, 32, &DemoConfig::default()).unwrap();
    assert!(d.max_det_error <= 1e-10);
    assert!(d.residual_to_rotation.is_finite());
}

#[test]
fn demo_window_must_fit() {
    let cfg = DemoConfig { dual_sites: 40, ..Default::default() };
    let err = almost_reducibility_demo(golden(), &amo(0.5), 0.3, 88, 0.0, 16, &cfg).unwrap_err();
    assert!(matches!(err, Error::NotAdmissible(_)));
}

#[test]
fn polynomial_growth_subcritical() {
    let f = polynomial_growth_fit(golden(), &amo(0.5), 0.3, 500, 0.02, 16).unwrap();
    assert!(f.exponent <= 10.0);
    assert_eq!(f.curve.len(), 500);
}

#[test]
fn cos_symmetry_examples() {
    let r = cos_polynomial_symmetry(golden(), &amo(2.0), 4, 0.3, 64).unwrap();
    assert!(r.abs_residual <= 1e-10 * r.max_abs_f.max(1.0));
    let r = cos_polynomial_symmetry(golden(), &random_v(9, 2), 5, 0.3, 64).unwrap();
    assert!(r.rel_residual <= 1e-9);
    let r = cos_polynomial_symmetry(0.0, &amo(1.5), 4, 0.2, 32).unwrap();
    assert!(r.rel_residual <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cramer_consistency(seed in 0u64..1000, d in 1usize..=3, n in 3usize..=6, th in 0.0f64..1.0, e in -1.0f64..1.0) {
        let v = random_v(seed, d);
        if let Ok(b) = greens_bundle(golden(), th, &v, n, c(e)) {
            if b.f.log_abs > -10.0 {
                for x in 0..b.size() {
                    prop_assert!(b.cramer_residual(x, (x * 7 + 3) % b.size()).unwrap() <= 1e-7);
                }
            }
        }
    }

    #[test]
    fn cos_symmetry_holds(seed in 0u64..1000, d in 1usize..=3, n in 3usize..=6, e in -2.0f64..2.0) {
        let r = cos_polynomial_symmetry(golden(), &random_v(seed, d), n, e, 16).unwrap();
        prop_assert!(r.rel_residual <= 1e-9);
    }

    #[test]
    fn pairing_equality_on_products(seed in 0u64..10_000, n in 1usize..12, th in 0.0f64..1.0, e in -2.0f64..2.0) {
        let c0 = Cocycle::new(CocycleSpec::new(golden(), random_v(seed, 2), c(e), 0.0, Side::DualBlock)).unwrap();
        let m = product(&c0, c(th), n);
        if let Ok(r) = symplectic_pairing_check(&m) {
            prop_assert!(r.pairing_gap <= 1e-8);
            if r.subspace_resolved {
                prop_assert!(r.right_subspace_distance <= 1e-7);
            }
        }
    }
}
