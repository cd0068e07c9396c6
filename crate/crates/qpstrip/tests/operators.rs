use num_complex::Complex;
use proptest::prelude::*;
use qpstrip::linalg::ComplexMatrix;
use qpstrip::operators::*;
use qpstrip::random::rng;
use qpstrip::C64;

fn c(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix<f64> {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

#[test]
fn amo_evaluation() {
    let v = TrigPotential::amo(1.7).unwrap();
    assert!((potential_eval(&v, c(0.0)) - c(3.4)).norm() < 1e-14);
    assert!(potential_eval(&v, c(0.25)).norm() < 1e-14);
}

#[test]
fn degree_two_evaluation() {
    let v = TrigPotential::new(2, &[(1, c(1.0)), (-1, c(1.0)), (2, c(0.3)), (-2, c(0.3))]).unwrap();
    let x = 0.2f64;
    let want = 2.0 * (0.4 * std::f64::consts::PI).cos() + 0.6 * (0.8 * std::f64::consts::PI).cos();
    assert!((v.eval(c(x)) - c(want)).norm() < 1e-13);
    assert!(v.is_real_symmetric());
}

#[test]
fn zero_top_coefficient_rejected() {
    assert!(TrigPotential::<f64>::amo(0.0).is_err());
    assert!(TrigPotential::<f64>::new(2, &[(1, c(1.0)), (-1, c(1.0)), (2, c(1.0))]).is_err());
}

#[test]
fn potential_spec_round_trip() {
    let v = TrigPotential::<f64>::random_real(&mut rng(5), 3);
    let s = v.to_spec();
    let json = serde_json::to_string(&s).unwrap();
    let back = TrigPotential::<f64>::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
    for k in -3..=3 {
        assert_eq!(v.coeff(k), back.coeff(k));
    }
}

#[test]
fn pamo_contains_cosine() {
    let w = TrigPotential::<f64>::random_real(&mut rng(1), 2);
    let v = TrigPotential::pamo(2.0, 0.1, &w).unwrap();
    let x = 0.37;
    let want = 4.0 * (std::f64::consts::TAU * x).cos() + 0.1 * w.eval(c(x)).re;
    assert!((v.eval(c(x)).re - want).abs() < 1e-12);
}

#[test]
fn blocks_collapse_for_d1() {
    let lam = 1.3;
    let eps = 0.07;
    let b = build_blocks(&TrigPotential::amo(lam).unwrap(), 0.3, eps).unwrap();
    assert!((b.b[(0, 0)] - c(lam * (std::f64::consts::TAU * eps).exp())).norm() < 1e-13);
    let theta = 0.21;
    assert!((b.c(theta)[(0, 0)] - c(2.0 * (std::f64::consts::TAU * theta).cos())).norm() < 1e-14);
}

#[test]
fn c0_hermitian_and_triangular_blocks() {
    let v = TrigPotential::<f64>::random_real(&mut rng(3), 3);
    let b = build_blocks(&v, 0.41, 0.0).unwrap();
    assert!(b.c(0.17).is_hermitian_within(1e-14));
    for i in 0..3 {
        assert!((b.b[(i, i)] - v.coeff(-3)).norm() < 1e-14);
        for j in 0..i {
            assert_eq!(b.b[(i, j)], c(0.0));
            assert_eq!(b.b_tilde[(j, i)], c(0.0));
        }
    }
}

#[test]
fn f_eps_conjugation_d3_seed2() {
    let v = TrigPotential::<f64>::random_real(&mut rng(2), 3);
    let eps = 0.11;
    let b0 = build_blocks(&v, 0.31, 0.0).unwrap();
    let be = build_blocks(&v, 0.31, eps).unwrap();
    let finv = ComplexMatrix::diag(&(0..3).map(|i| c(1.0 / be.f[(i, i)].re)).collect::<Vec<_>>());
    let theta = 0.23;
    let conj_c = be.f.matmul(&b0.c(theta)).matmul(&finv);
    assert!(be.c(theta).max_diff(&conj_c) < 1e-12);
    let conj_b = be.f.matmul(&b0.b).matmul(&finv).scale(c((std::f64::consts::TAU * 3.0 * eps).exp()));
    assert!(be.b.max_diff(&conj_b) < 1e-12);
}

#[test]
fn dirichlet_constant_example() {
    let m = dirichlet_matrix(0.0, 0.0, &TrigPotential::amo(1.0).unwrap(), 3, 0.0).unwrap();
    assert!(m.max_diff(&real_matrix(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]])) < 1e-14);
}

#[test]
fn dirichlet_d2_hermitian() {
    let v = TrigPotential::<f64>::random_real(&mut rng(8), 2);
    let m = dirichlet_matrix(0.37, 0.12, &v, 4, 0.0).unwrap();
    assert_eq!(m.rows(), 8);
    assert!(m.is_hermitian_within(1e-14));
}

#[test]
fn periodic_constant_example() {
    let v = TrigPotential::amo(1.0).unwrap();
    let m = periodic_matrix(0.0, 0.0, &v, 3, 0.0).unwrap();
    assert!(m.max_diff(&real_matrix(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0], &[1.0, 1.0, 2.0]])) < 1e-14);
    assert!(periodic_matrix(0.0, 0.0, &v, 2, 0.0).is_err());
}

#[test]
fn periodic_d2_seed9_hermitian() {
    let v = TrigPotential::<f64>::random_real(&mut rng(9), 2);
    assert!(periodic_matrix(0.29, 0.4, &v, 5, 0.0).unwrap().is_hermitian_within(1e-14));
}

#[test]
fn periodic_differs_only_in_corners() {
    let d = 3;
    let n = 5;
    let v = TrigPotential::<f64>::random_real(&mut rng(4), d);
    let p = periodic_matrix(0.33, 0.1, &v, n, 0.05).unwrap();
    let q = dirichlet_matrix(0.33, 0.1, &v, n, 0.05).unwrap();
    for i in 0..n * d {
        for j in 0..n * d {
            let corner = (i / d == 0 && j / d == n - 1) || (i / d == n - 1 && j / d == 0);
            if !corner {
                assert_eq!(p[(i, j)], q[(i, j)], "({i},{j})");
            }
        }
    }
}

#[test]
fn block_form_is_reversed_natural_order() {
    for (d, seed) in [(1, 1), (2, 2), (3, 3)] {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        let (alpha, theta, eps) = (0.377, 0.19, 0.04);
        let blocks = build_blocks(&v, alpha, eps).unwrap();
        for n in [3, 4, 6] {
            let p = periodic_matrix(alpha, theta, &v, n, eps).unwrap();
            let bf = periodic_block_form(&blocks, theta, n);
            assert!(reverse_sites(&p).max_diff(&bf) < 1e-13, "d={d} n={n}");
        }
    }
}

#[test]
fn cyclic_theta_zero_h_equals_h_tilde() {
    let v = TrigPotential::<f64>::random_real(&mut rng(6), 2);
    let ops = cyclic_operators(3, 8, 0.0, 0.07, &v).unwrap();
    assert!(ops.h.max_diff(&ops.h_tilde) < 1e-13);
}

#[test]
fn cyclic_q3_hand_example() {
    let ops = cyclic_operators(1, 3, 0.2, 0.0, &TrigPotential::amo(1.0).unwrap()).unwrap();
    let tau = std::f64::consts::TAU;
    for n in 0..3 {
        for m in 0..3 {
            let want = if n == m { 2.0 * (tau * (0.2 + n as f64 / 3.0)).cos() } else { 1.0 };
            assert!((ops.h[(n, m)] - c(want)).norm() < 1e-14);
        }
    }
    assert!(ops.h_hat.is_hermitian_within(1e-14));
}

#[test]
fn cyclic_rejects_non_coprime() {
    let v = TrigPotential::amo(1.0).unwrap();
    assert!(cyclic_operators(2, 4, 0.1, 0.0, &v).is_err());
    assert!(cyclic_fourier::<f64>(3, 6).is_err());
}

#[test]
fn fourier_small_cases() {
    let f1 = cyclic_fourier::<f64>(0, 1).unwrap();
    assert!((f1[(0, 0)] - c(1.0)).norm() < 1e-15);
    let f4 = cyclic_fourier::<f64>(1, 4).unwrap();
    for n in 0..4 {
        for m in 0..4 {
            let want = Complex::from_polar(0.5, std::f64::consts::TAU * (m * n) as f64 / 4.0);
            assert!((f4[(n, m)] - want).norm() < 1e-15);
        }
    }
}

#[test]
fn fourier_unitary_q12_p5() {
    let f = cyclic_fourier::<f64>(5, 12).unwrap();
    assert!(f.matmul(&f.adjoint()).max_diff(&ComplexMatrix::identity(12)) < 1e-12);
}

#[test]
fn duality_examples() {
    let amo = TrigPotential::amo(2.0).unwrap();
    assert!(duality_conjugation_residual(1, 4, 0.3, 0.0, &amo).unwrap() < 1e-12);
    let v2 = TrigPotential::<f64>::random_real(&mut rng(12), 2);
    assert!(duality_conjugation_residual(5, 12, 0.17, 0.05, &v2).unwrap() < 1e-11);
    let v3 = TrigPotential::<f64>::random_real(&mut rng(13), 3);
    assert!(duality_conjugation_residual(3, 7, 0.61, 0.0, &v3).unwrap() < 1e-11);
}

#[test]
fn opposite_conjugation_is_not_the_identity() {
    let v = TrigPotential::<f64>::random_real(&mut rng(14), 2);
    assert!(duality_conjugation_residual_reversed(1, 5, 0.21, 0.0, &v).unwrap() > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn duality_residual_random(seed in 0u64..10_000, d in 1usize..=3, q in 3u64..=48, pr in 0u64..1000,
                               eps in -0.2f64..0.2, theta in 0.0f64..1.0) {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        let mut p = pr % q;
        while num_integer::gcd(p, q) != 1 { p = (p + 1) % q; }
        let ops = cyclic_operators(p, q, theta, eps, &v).unwrap();
        let scale = qpstrip::linalg::op_norm(&ops.h_hat).max(1.0);
        let r = duality_conjugation_residual(p, q, theta, eps, &v).unwrap();
        prop_assert!(r <= 1e-10 * scale, "residual {}", r);
    }

    #[test]
    fn hermitian_at_eps_zero(seed in 0u64..10_000, d in 1usize..=3, n in 3usize..=6,
                             alpha in 0.0f64..1.0, theta in 0.0f64..1.0) {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        prop_assert!(dirichlet_matrix(alpha, theta, &v, n, 0.0).unwrap().is_hermitian_within(1e-13));
        prop_assert!(periodic_matrix(alpha, theta, &v, n, 0.0).unwrap().is_hermitian_within(1e-13));
        let ops = cyclic_operators(1, 7, theta, 0.0, &v).unwrap();
        prop_assert!(ops.h_hat.is_hermitian_within(1e-13));
    }

    #[test]
    fn real_symmetric_is_real_on_the_line(seed in 0u64..10_000, d in 1usize..=4, x in -2.0f64..2.0) {
        let v = TrigPotential::<f64>::random_real(&mut rng(seed), d);
        prop_assert!(v.eval(c(x)).im.abs() <= 1e-12);
    }
}
