use num_complex::Complex;
use proptest::prelude::*;
use qpstrip::cocycles::*;
use qpstrip::linalg::{lu_det, ComplexMatrix};
use qpstrip::operators::{interior_energies, TrigPotential};
use qpstrip::random::rng;
use qpstrip::C64;

fn c(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn amo(lam: f64) -> TrigPotential<f64> {
    TrigPotential::amo(lam).unwrap()
}

fn mid_energy(lam: f64) -> f64 {
    let es = interior_energies(golden(), 0.0, &amo(lam), 400, 0.1).unwrap();
    es[es.len() / 2]
}

fn plain_diff(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
    let (a, b) = (a.to_plain(), b.to_plain());
    a.max_diff(&b) / a.max_abs().max(b.max_abs()).max(1e-300)
}

#[test]
fn scalar_transfer_at_quarter() {
    let e = 0.7;
    let spec = CocycleSpec::new(0.3, amo(2.0), c(e), 0.0, Side::Scalar);
    let m = transfer_matrix(&spec, c(0.25)).unwrap();
    let want = ComplexMatrix::from_real_rows(&[&[e, -1.0], &[1.0, 0.0]]).unwrap();
    assert!(m.max_diff(&want) < 1e-14);
}

#[test]
fn one_step_d1_matches_closed_form() {
    let (lam, theta, e) = (1.6, 0.13, 0.4);
    let spec = CocycleSpec::new(0.3, amo(lam), c(e), 0.0, Side::DualOneStep);
    let m = transfer_matrix(&spec, c(theta)).unwrap();
    let t = e - 2.0 * (std::f64::consts::TAU * theta).cos();
    let want = ComplexMatrix::from_real_rows(&[&[t / lam, -1.0], &[1.0, 0.0]]).unwrap();
    assert!(m.max_diff(&want) < 1e-14);
}

#[test]
fn block_det_unit_modulus() {
    for seed in 0..5 {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), 3);
        let spec = CocycleSpec::new(0.41, v.clone(), c(0.2), 0.0, Side::DualBlock);
        let det = block_det(&spec, 0.37).unwrap();
        let db = v.coeff(-3).powu(3);
        assert!((det.norm() - 1.0).abs() < 1e-12);
        assert!((det - db.conj() / db).norm() < 1e-12);
    }
    let spec = CocycleSpec::new(0.41, amo(2.0), c(0.2), 0.0, Side::DualBlock);
    assert!((block_det(&spec, 0.1).unwrap() - c(1.0)).norm() < 1e-12);
}

#[test]
fn product_n1_is_transfer() {
    let spec = CocycleSpec::new(0.3, amo(2.0), c(0.1), 0.05, Side::Scalar);
    let p = cocycle_product(&spec, c(0.2), 1).unwrap();
    assert!(plain_diff(&p, &transfer_matrix(&spec, c(0.2)).unwrap()) < 1e-15);
    assert!(cocycle_product(&spec, c(0.2), 0).is_err());
}

#[test]
fn zero_frequency_is_matrix_power() {
    let v = TrigPotential::<f64>::random_real(&mut rng(11), 2);
    let spec = CocycleSpec::new(0.0, v, c(0.3), 0.0, Side::DualOneStep);
    let a = transfer_matrix(&spec, c(0.2)).unwrap();
    let mut sq = a.clone();
    for _ in 0..4 {
        sq = sq.matmul(&sq);
    }
    let p = cocycle_product(&spec, c(0.2), 16).unwrap();
    assert!(plain_diff(&p, &sq) < 1e-9);
}

#[test]
fn constant_hyperbolic_lyapunov() {
    let m = ComplexMatrix::diag(&[c(2.0), c(0.5)]);
    let cc = ConstantCocycle { matrix: m, alpha: golden() };
    let l = lyapunov_of(&cc, 500, 17, c(0.0));
    assert!((l.exponents[0] - 2f64.ln()).abs() < 1e-10);
    assert!((l.exponents[1] + 2f64.ln()).abs() < 1e-10);
}

#[test]
fn amo_supercritical_lyapunov_lower_bound() {
    let spec = CocycleSpec::new(golden(), amo(3.0), c(mid_energy(3.0)), 0.0, Side::Scalar);
    let l = finite_lyapunov_spectrum(&spec, 2000, 257, Some(9)).unwrap();
    assert!(l.top() >= 3f64.ln() - 0.05, "L = {}", l.top());
    assert!(l.cross_method_gap.unwrap() <= 2e-2);
}

#[test]
fn block_exponent_symmetry_d2() {
    let v = TrigPotential::<f64>::random_real(&mut rng(7), 2);
    let spec = CocycleSpec::new(golden(), v, c(0.3), 0.0, Side::DualBlock);
    let l = finite_lyapunov_spectrum(&spec, 2000, 257, None).unwrap();
    for j in 0..4 {
        assert!((l.exponents[j] + l.exponents[3 - j]).abs() <= 2e-2);
    }
}

#[test]
fn block_exponents_are_d_times_one_step() {
    let d = 2;
    let v = TrigPotential::<f64>::random_real(&mut rng(21), d);
    let spec = CocycleSpec::new(golden(), v, c(0.1), 0.03, Side::DualBlock);
    let lm = finite_lyapunov_spectrum(&spec, 1500, 257, None).unwrap();
    let la = finite_lyapunov_spectrum(&spec.with_side(Side::DualOneStep), 1500 * d, 257, None).unwrap();
    for j in 0..2 * d {
        assert!((lm.exponents[j] - d as f64 * la.exponents[j]).abs() <= 2e-2);
    }
}

#[test]
fn qr_and_compound_methods_agree_d3() {
    let v = TrigPotential::<f64>::random_real(&mut rng(3), 3);
    let spec = CocycleSpec::new(golden(), v, c(0.3), 0.0, Side::DualOneStep);
    let l = finite_lyapunov_spectrum(&spec, 2000, 31, Some(5)).unwrap();
    assert!(l.cross_method_gap.unwrap() <= 2e-2);
}

#[test]
fn lyapunov_is_deterministic_across_thread_counts() {
    let v = TrigPotential::<f64>::random_real(&mut rng(5), 2);
    let spec = CocycleSpec::new(golden(), v, c(0.2), 0.02, Side::DualOneStep);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| finite_lyapunov_spectrum(&spec, 300, 64, None).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.exponents.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.exponents.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
}

#[test]
fn f32_lyapunov_runs() {
    let v = TrigPotential::<f32>::amo(3.0).unwrap();
    let spec = CocycleSpec::new(0.618_034f32, v, Complex::new(0.0f32, 0.0), 0.0, Side::Scalar);
    let l = finite_lyapunov_spectrum(&spec, 500, 33, None).unwrap();
    assert!((l.top() - 3f64.ln()).abs() < 0.05);
}

#[test]
fn rational_constant_q1() {
    let v = amo(2.0);
    let spec = CocycleSpec::new(0.0, v, c(5.0), 0.0, Side::Scalar);
    let l = rational_lyapunov(0, 1, &spec, 0.25).unwrap();
    // A = [[5, -1], [1, 0]], eigenvalues (5 +- sqrt 21)/2
    assert!((l.exponents[0] - ((5.0 + 21f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    assert!(l.partial_sums[1].abs() < 1e-12);
}

#[test]
fn rational_amo_matches_direct_eigen() {
    let (lam, theta, e) = (2.0, 0.1, 0.0);
    let spec = CocycleSpec::new(0.0, amo(lam), c(e), 0.0, Side::Scalar);
    let l = rational_lyapunov(1, 3, &spec, theta).unwrap();
    let mut a = [[1.0, 0.0], [0.0, 1.0]];
    for k in 0..3 {
        let vk = 2.0 * lam * (std::f64::consts::TAU * (theta + k as f64 / 3.0)).cos();
        let s = [[e - vk, -1.0], [1.0, 0.0]];
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = s[i][0] * a[0][j] + s[i][1] * a[1][j];
            }
        }
        a = r;
    }
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = Complex::new(tr * tr - 4.0 * det, 0.0).sqrt();
    let rho = ((c(tr) + disc) / 2.0).norm().max(((c(tr) - disc) / 2.0).norm());
    assert!((l.exponents[0] - rho.ln() / 3.0).abs() < 1e-12);
}

#[test]
fn rational_partial_sums_match_eigen_route() {
    let v = TrigPotential::<f64>::random_real(&mut rng(17), 2);
    let spec = CocycleSpec::new(0.0, v, Complex::new(0.3, 0.1), 0.04, Side::DualOneStep);
    let a = rational_lyapunov(5, 13, &spec, 0.21).unwrap();
    let b = rational_lyapunov_eigen_route(5, 13, &spec, 0.21).unwrap();
    for j in 0..4 {
        assert!((a.partial_sums[j] - b[j]).abs() < 1e-10, "{j}: {} vs {}", a.partial_sums[j], b[j]);
    }
}

#[test]
fn structural_d1() {
    let spec = CocycleSpec::new(0.3, amo(1.7), c(0.4), 0.0, Side::DualBlock);
    let r = structural_residuals(&spec, 0.2, 4).unwrap();
    let conj = r.iter().find(|x| x.identity == "d_step_conjugation").unwrap();
    assert!(conj.rel_residual <= 1e-12);
    assert!(r.iter().all(|x| x.pass));
}

#[test]
fn structural_d3_random() {
    let v = TrigPotential::<f64>::random_real(&mut rng(3), 3);
    let spec = CocycleSpec::new(golden(), v, c(0.3), 0.0, Side::DualBlock);
    for r in structural_residuals(&spec, 0.3, 6).unwrap() {
        assert!(r.rel_residual <= 1e-10, "{}: {}", r.identity, r.rel_residual);
    }
}

#[test]
fn structural_f_eps_d2() {
    let v = TrigPotential::<f64>::random_real(&mut rng(8), 2);
    let spec = CocycleSpec::new(golden(), v, c(0.3), 0.1, Side::DualBlock);
    let r = structural_residuals(&spec, 0.15, 5).unwrap();
    let f = r.iter().find(|x| x.identity == "f_eps_conjugation").unwrap();
    assert!(f.rel_residual <= 1e-10);
}

#[test]
fn exponent_shift_zero_eps_is_exact() {
    let spec = CocycleSpec::new(golden(), amo(2.0), c(0.3), 0.0, Side::DualOneStep);
    assert_eq!(exponent_shift_residual(&spec, 200, 17, &[0.0]).unwrap().max_residual, 0.0);
}

#[test]
fn exponent_shift_d1() {
    let spec = CocycleSpec::new(golden(), amo(2.0), c(0.3), 0.0, Side::DualOneStep);
    assert!(exponent_shift_residual(&spec, 2000, 257, &[0.05]).unwrap().max_residual <= 2e-2);
}

#[test]
fn exponent_shift_d2() {
    let v = TrigPotential::<f64>::random_real(&mut rng(7), 2);
    let spec = CocycleSpec::new(golden(), v, c(0.3), 0.0, Side::DualOneStep);
    assert!(exponent_shift_residual(&spec, 3000, 129, &[0.02, 0.08]).unwrap().max_residual <= 2e-2);
}

#[test]
fn constant_cocycle_has_zero_acceleration() {
    let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap();
    let cc = ConstantCocycle { matrix: m, alpha: golden() };
    let a = acceleration_of(&cc, 0.0, 0.01, 200, 17).unwrap();
    assert!(a.kappa.abs() < 1e-6);
}

#[test]
fn supercritical_acceleration_is_one() {
    let spec = CocycleSpec::new(golden(), amo(3.0), c(mid_energy(3.0)), 0.0, Side::Scalar);
    let a = acceleration(&spec, 0.0, 0.01, 2000, 257).unwrap();
    assert_eq!(a.nearest_integer, 1);
    assert!(a.integer_distance <= 0.1);
    assert!(a.collinearity <= 1e-3);
}

#[test]
fn subcritical_acceleration_is_zero_at_two_scales() {
    let spec = CocycleSpec::new(golden(), amo(0.5), c(mid_energy(0.5)), 0.0, Side::Scalar);
    for n in [1000, 2000] {
        assert!(acceleration(&spec, 0.0, 0.01, n, 257).unwrap().kappa.abs() <= 0.1);
    }
}

#[test]
fn classify_examples() {
    let sup = CocycleSpec::new(golden(), amo(3.0), c(mid_energy(3.0)), 0.0, Side::Scalar);
    assert_eq!(classify_energy(&sup, 2000, 257, 0.05).unwrap().regime, Regime::Supercritical);
    let sub = CocycleSpec::new(golden(), amo(0.5), c(mid_energy(0.5)), 0.0, Side::Scalar);
    let k = classify_energy(&sub, 4000, 257, 0.05).unwrap();
    assert_eq!(k.regime, Regime::Subcritical);
    assert!(k.lyapunov <= 0.02);
    let out = CocycleSpec::new(golden(), amo(1.0), c(10.0), 0.0, Side::Scalar);
    let k = classify_energy(&out, 1000, 65, 0.05).unwrap();
    assert_eq!(k.regime, Regime::Outside);
    assert!(k.kappa.abs() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cocycle_additivity(seed in 0u64..1000, n in 1usize..40, m in 1usize..40, theta in 0.0f64..1.0,
                          side in 0usize..3, eps in -0.1f64..0.1) {
        let side = [Side::Scalar, Side::DualOneStep, Side::DualBlock][side];
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), 1 + (seed % 3) as usize);
        let spec = CocycleSpec::new(golden(), v, Complex::new(0.2, 0.3), eps, side);
        let cyc = Cocycle::new(spec.clone()).unwrap();
        let w = cyc.frequency();
        let whole = cocycle_product(&spec, c(theta), n + m).unwrap();
        let split = cocycle_product(&spec, c(theta + m as f64 * w), n).unwrap()
            .matmul(&cocycle_product(&spec, c(theta), m).unwrap());
        prop_assert!(plain_diff(&whole, &split) <= 1e-9);
    }

    #[test]
    fn spectrum_is_sorted_with_exact_partial_sums(seed in 0u64..1000, d in 1usize..=3, eps in 0.0f64..0.2) {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        let spec = CocycleSpec::new(golden(), v, c(0.1), eps, Side::DualOneStep);
        let l = finite_lyapunov_spectrum(&spec, 60, 9, None).unwrap();
        let mut s = 0.0;
        for j in 0..2 * d {
            if j > 0 { prop_assert!(l.exponents[j] <= l.exponents[j - 1]); }
            s += l.exponents[j];
            prop_assert_eq!(s, l.partial_sums[j]);
        }
    }

    #[test]
    fn block_det_modulus_one(seed in 0u64..1000, d in 1usize..=3, theta in 0.0f64..1.0, e in -3.0f64..3.0) {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        let spec = CocycleSpec::new(golden(), v, c(e), 0.0, Side::DualBlock);
        let m = transfer_matrix(&spec, c(theta)).unwrap();
        prop_assert!((lu_det(&m).unwrap().value().norm() - 1.0).abs() < 1e-10);
    }
}
