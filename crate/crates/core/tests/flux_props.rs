use hwlod::flux::{interior_flux_weights, origin_flux_weights};
use proptest::prelude::*;

#[test]
fn weights_are_continuous_across_zero_drift() {
    let (a, lo, hi) = (0.35, 0.8, 1.3);
    let at_zero = interior_flux_weights(a, 0.0, lo, hi).unwrap();
    for b in [1e-12, -1e-12, 1e-9, -1e-9, 1e-8, -1e-8] {
        let w = interior_flux_weights(a, b, lo, hi).unwrap();
        assert!((w.w_lo - at_zero.w_lo).abs() < 1e-6, "b = {b}");
        assert!((w.w_hi - at_zero.w_hi).abs() < 1e-6, "b = {b}");
    }
}

proptest! {
    #[test]
    fn weights_sum_to_drift(a in 1e-4f64..2.0, b in -3.0f64..3.0, lo in 1e-3f64..5.0, w in 1e-3f64..5.0) {
        let f = interior_flux_weights(a, b, lo, lo + w).unwrap();
        prop_assert!((f.w_lo + f.w_hi - b).abs() < 1e-9 * (1.0 + b.abs() + a / w));
        prop_assert!(f.w_hi >= 0.0 && f.w_lo <= 0.0);
    }

    #[test]
    fn fitted_flux_is_exact_for_the_local_solution(
        a in 0.05f64..1.0, b in -1.0f64..1.0, lo in 0.1f64..2.0, w in 0.01f64..1.0, flux in -2.0f64..2.0, c in -2.0f64..2.0,
    ) {
        prop_assume!(b.abs() > 1e-3);
        // (a x v' + b v) = flux is solved by v = flux/b + C x^{-b/a}
        let hi = lo + w;
        let alpha = b / a;
        let v = |x: f64| flux / b + c * x.powf(-alpha);
        let f = interior_flux_weights(a, b, lo, hi).unwrap();
        let approx = f.w_hi * v(hi) + f.w_lo * v(lo);
        prop_assert!((approx - flux).abs() < 1e-7 * (1.0 + flux.abs() + c.abs() * (v(hi).abs() + v(lo).abs())));
    }

    #[test]
    fn origin_weights_sum_to_drift(a in 0.0f64..2.0, b in -3.0f64..3.0) {
        let f = origin_flux_weights(a, b);
        prop_assert!((f.w_lo + f.w_hi - b).abs() < 1e-14);
    }

    #[test]
    fn weights_stay_finite_for_extreme_peclet(b in -50.0f64..50.0, lo in 1e-3f64..10.0) {
        let f = interior_flux_weights(1e-13, b, lo, lo * 1.5).unwrap();
        prop_assert!(f.w_lo.is_finite() && f.w_hi.is_finite());
    }
}
