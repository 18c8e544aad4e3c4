use fracqm_core::stable::{levy_cdf, levy_density};
use fracqm_core::StableParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn density_is_even_and_positive(alpha in 1.05f64..=2.0, x in 0.0f64..30.0) {
        let law = StableParams::new(alpha, 1.0).unwrap();
        let a = levy_density(x, &law).unwrap();
        let b = levy_density(-x, &law).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1e-300));
    }

    #[test]
    fn density_obeys_scale_relation(alpha in 1.05f64..=2.0, c in 0.1f64..10.0, x in -8.0f64..8.0) {
        let unit = StableParams::new(alpha, 1.0).unwrap();
        let scaled = StableParams::new(alpha, c).unwrap();
        let w = c.powf(1.0 / alpha);
        let lhs = levy_density(x, &scaled).unwrap();
        let rhs = levy_density(x / w, &unit).unwrap() / w;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs);
    }

    #[test]
    fn cdf_is_monotone_and_symmetric(alpha in 1.05f64..=2.0, x in 0.0f64..20.0, dx in 0.01f64..2.0) {
        let law = StableParams::new(alpha, 1.0).unwrap();
        let f0 = levy_cdf(x, &law).unwrap();
        let f1 = levy_cdf(x + dx, &law).unwrap();
        prop_assert!(f1 >= f0);
        prop_assert!((levy_cdf(-x, &law).unwrap() - (1.0 - f0)).abs() < 1e-12);
    }
}

#[test]
fn peak_height_follows_gamma_law() {
    for alpha in [1.2, 1.5, 1.8, 2.0] {
        let law = StableParams::new(alpha, 1.0).unwrap();
        let expect = statrs::function::gamma::gamma(1.0 + 1.0 / alpha) / std::f64::consts::PI;
        let got = levy_density(0.0, &law).unwrap();
        assert!((got - expect).abs() < 1e-10 * expect, "alpha={alpha}");
    }
}
