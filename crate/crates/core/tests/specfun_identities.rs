use lgtorsion::specfun::{
    assoc_laguerre, factorial, gamma_complete, gamma_lower_incomplete, gamma_upper_incomplete, ln_factorial,
};
use lgtorsion_testkit::simpson;
use proptest::prelude::*;

proptest! {
    #[test]
    fn laguerre_three_term_recurrence(p in 1u32..=50, alpha in 0u32..=30, x in 0.0f64..100.0) {
        let a = alpha as f64;
        let pf = p as f64;
        let prev = assoc_laguerre(p - 1, alpha, x).unwrap();
        let cur = assoc_laguerre(p, alpha, x).unwrap();
        let next = assoc_laguerre(p + 1, alpha, x).unwrap();
        let lhs = (pf + 1.0) * next;
        let t1 = (2.0 * pf + 1.0 + a - x) * cur;
        let t2 = (pf + a) * prev;
        let scale = lhs.abs().max(t1.abs()).max(t2.abs());
        prop_assert!((lhs - (t1 - t2)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn upper_gamma_is_strictly_decreasing_and_bounded(a in 0.1f64..60.0, x1 in 0.0f64..80.0, dx in 0.01f64..20.0) {
        let g1 = gamma_upper_incomplete(a, x1).unwrap();
        let g2 = gamma_upper_incomplete(a, x1 + dx).unwrap();
        prop_assert!(g1 >= g2);
        let drop = gamma_lower_incomplete(a, x1 + dx).unwrap() - gamma_lower_incomplete(a, x1).unwrap();
        if drop > 1e-10 * g1 {
            prop_assert!(g1 > g2);
        }
        prop_assert!(g2 > 0.0);
        prop_assert!(g1 <= gamma_complete(a).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn upper_gamma_recurrence(a in 0.1f64..60.0, x in 0.0f64..100.0) {
        let lhs = gamma_upper_incomplete(a + 1.0, x).unwrap();
        let rhs = a * gamma_upper_incomplete(a, x).unwrap() + x.powf(a) * (-x).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs(), "{} vs {}", lhs, rhs);
    }
}

#[test]
fn laguerre_norms_by_quadrature() {
    for alpha in 0u32..=10 {
        for p in 0u32..=20 {
            let upper = 4.0 * p as f64 + 2.0 * alpha as f64 + 120.0;
            let f = |x: f64| {
                let l = assoc_laguerre(p, alpha, x).unwrap();
                x.powi(alpha as i32) * (-x).exp() * l * l
            };
            let got = simpson(f, 0.0, upper, 200_000);
            let expected = (ln_factorial(alpha + p) - ln_factorial(p)).exp();
            assert!(
                (got - expected).abs() / expected < 1e-8,
                "alpha={alpha} p={p}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn factorial_table_is_consistent_with_gamma() {
    for n in 0..=170u32 {
        assert_eq!(gamma_complete(n as f64 + 1.0).unwrap(), factorial(n).unwrap());
    }
}
