use proptest::prelude::*;
use qpstrip::arithmetic::*;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[test]
fn continued_fraction_examples() {
    let cf = continued_fraction(golden(), 8).unwrap();
    assert_eq!(cf.a, vec![1; 8]);
    assert_eq!(cf.denominators(), vec![1, 2, 3, 5, 8, 13, 21, 34]);
    let cf = ContinuedFraction::from_rational(5, 7, 20).unwrap();
    assert_eq!(cf.a, vec![1, 2, 2]);
    assert_eq!(cf.termination, Termination::Exact);
    let cf = continued_fraction(2f64.sqrt() - 1.0, 6).unwrap();
    assert_eq!(cf.a, vec![2; 6]);
    assert!(continued_fraction(1.2, 4).is_err());
    assert!(continued_fraction(0.0, 4).is_err());
}

#[test]
fn float_expansion_stops_at_precision() {
    let cf = continued_fraction(golden(), 200).unwrap();
    assert_eq!(cf.termination, Termination::PrecisionExhausted);
    assert!(cf.a.iter().all(|&x| x == 1));
    assert!(cf.len() > 30);
}

#[test]
fn decimal_input() {
    let cf = ContinuedFraction::from_decimal("0.6180339887498948482", 80).unwrap();
    assert!(cf.a.iter().all(|&x| x == 1));
    assert_eq!(cf.termination, Termination::PrecisionExhausted);
    let cf = ContinuedFraction::from_decimal("0.75", 10).unwrap();
    assert_eq!(cf.a, vec![1, 3]);
    assert_eq!(cf.termination, Termination::Exact);
}

#[test]
fn convergent_invariants() {
    for cf in [
        continued_fraction(golden(), 30).unwrap(),
        continued_fraction(std::f64::consts::PI - 3.0, 8).unwrap(),
        continued_fraction(std::f64::consts::E - 2.0, 12).unwrap(),
    ] {
        for n in 1..cf.q.len() {
            let lhs = cf.p[n] as i128 * cf.q[n - 1] as i128 - cf.p[n - 1] as i128 * cf.q[n] as i128;
            let want = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(lhs, want);
            if n + 1 < cf.q.len() {
                assert!(cf.q[n + 1] > cf.q[n]);
                let err = (cf.alpha - cf.p[n] as f64 / cf.q[n] as f64).abs();
                assert!(err < 1.0 / (cf.q[n] as f64 * cf.q[n + 1] as f64));
            }
        }
    }
}

#[test]
fn torus_norm_examples() {
    assert_eq!(torus_norm(0.75), 0.25);
    assert!((torus_norm(-0.1) - 0.1).abs() < 1e-15);
    assert_eq!(torus_norm(3.0), 0.0);
}

#[test]
fn best_approx_examples() {
    let cf = continued_fraction(golden(), 10).unwrap();
    assert!(best_approx_residual(&cf, 4).unwrap().abs() < 1e-12);
    let r = ContinuedFraction::from_rational(5, 7, 10).unwrap();
    assert_eq!(best_approx_residual(&r, r.len()).unwrap(), 0.0);
    let pi = continued_fraction(std::f64::consts::PI - 3.0, 6).unwrap();
    assert!(best_approx_residual(&pi, 2).unwrap().abs() < 1e-12);
    assert!(best_approx_residual(&cf, 50).is_err());
}

#[test]
fn beta_examples() {
    let cf = ContinuedFraction::golden(15);
    assert!(beta_estimate(&cf).unwrap() <= 0.8);
    let tail = beta_tail(&cf);
    assert!(tail.windows(2).skip(2).all(|w| w[1] <= w[0]));
    let syn = ContinuedFraction::from_quotients(&[1, 1, 1_000_000, 1, 1]).unwrap();
    let q = &syn.q;
    assert_eq!(beta_tail(&syn)[1], (q[3] as f64).ln() / q[2] as f64);
    let s2 = ContinuedFraction::sqrt2(15);
    let t = beta_tail(&s2);
    assert!(t.windows(2).all(|w| w[1] <= w[0]));
    assert!(*t.last().unwrap() < 1e-4);
    assert!(beta_estimate(&ContinuedFraction::golden(2)).is_err());
}

fn brute_resonances(alpha: f64, theta: f64, eps0: f64, n_max: i64) -> Vec<i64> {
    let nrm = |k: i64| torus_norm(2.0 * theta - k as f64 * alpha);
    let mut out = Vec::new();
    for m in 0..=n_max {
        for k in if m == 0 { vec![0] } else { vec![m, -m] } {
            let v = nrm(k);
            let minimal = (-m..=m).all(|j| if j.abs() < m { v < nrm(j) } else { v <= nrm(j) });
            if minimal && v <= (-eps0 * m as f64).exp() {
                out.push(k);
            }
        }
    }
    out
}

#[test]
fn resonance_examples() {
    let a = golden();
    let r = epsilon_resonances(a, a / 2.0, 0.3, 20).unwrap();
    assert!(r.resonances.iter().any(|x| x.k == 1 && x.norm < 1e-15));
    let r = epsilon_resonances(a, 0.0, 0.3, 20).unwrap();
    assert_eq!(r.resonances[0].k, 0);
    assert_eq!(r.resonances[0].norm, 0.0);
    let r = epsilon_resonances(a, 0.1, 0.3, 50).unwrap();
    let ks: Vec<i64> = r.resonances.iter().map(|x| x.k).collect();
    assert_eq!(ks, brute_resonances(a, 0.1, 0.3, 50));
    assert!(r.resonances.windows(2).all(|w| w[1].norm <= w[0].norm));
    assert!(epsilon_resonances(a, 0.1, 0.0, 5).is_err());
}

#[test]
fn admissible_examples() {
    let a = golden();
    let s = admissible_sequence(a, 1, 0.05, 8, 1000).unwrap();
    for q in [13u64, 21, 34, 55, 89, 144, 233, 377, 610, 987] {
        assert!(s.contains(&q), "missing {q}");
    }
    let r = admissible_sequence_rational(3, 7, 1, 0.01, 1, 100);
    assert_eq!(r, (1..=100).filter(|n| n % 7 == 0).collect::<Vec<_>>());
    assert_eq!(admissible_sequence(a, 2, 0.5, 3, 40).unwrap(), (3..=40).collect::<Vec<_>>());
    assert!(admissible_sequence(a, 1, 0.05, 10, 5).unwrap().is_empty());
}

#[test]
fn rational_divisible_examples() {
    let g = continued_fraction(golden(), 10).unwrap();
    let (p, q) = rational_approx_divisible(&g, 1, 5).unwrap();
    let gg = num_integer::gcd(g.p[5] + 1, g.q[5]);
    assert_eq!((p, q), ((g.p[5] + 1) / gg, g.q[5] / gg));
    let (p, q) = rational_approx_divisible(&g, 2, 5).unwrap();
    assert_eq!(q % 2, 0);
    let err = (p as f64 / q as f64 - g.alpha).abs();
    let base = (g.p[5] as f64 / g.q[5] as f64 - g.alpha).abs();
    assert!(err <= 2.0 * base + 1.0 / (2.0 * g.q[5] as f64));
    let s = continued_fraction(2f64.sqrt() - 1.0, 8).unwrap();
    let (_, q) = rational_approx_divisible(&s, 3, 6).unwrap();
    assert_eq!(num_integer::gcd(q, 3), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn resonances_match_brute_force(alpha in 0.01f64..0.99, theta in 0.0f64..1.0, eps0 in 0.05f64..1.0) {
        let r = epsilon_resonances(alpha, theta, eps0, 40).unwrap();
        let ks: Vec<i64> = r.resonances.iter().map(|x| x.k).collect();
        prop_assert_eq!(ks, brute_resonances(alpha, theta, eps0, 40));
    }

    #[test]
    fn admissible_is_monotone_in_kappa(alpha in 0.01f64..0.99, k1 in 0.01f64..0.5, k2 in 0.01f64..0.5, d in 1u64..4) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let a = admissible_sequence(alpha, d, lo, 1, 300).unwrap();
        let b = admissible_sequence(alpha, d, hi, 1, 300).unwrap();
        prop_assert!(a.iter().all(|n| b.contains(n)));
    }

    #[test]
    fn best_approximation_property(alpha in 0.01f64..0.99) {
        let cf = continued_fraction(alpha, 12).unwrap();
        for n in 1..cf.q.len().saturating_sub(1) {
            if cf.q[n + 1] > 100_000 { break; }
            prop_assert!(best_approx_residual(&cf, n).unwrap().abs() < 1e-12);
        }
    }
}
