use proptest::prelude::*;

use multiconn::outage::instantaneous_capacity;
use multiconn::special::{coding_constant, coding_constant_inverse, factorial};
use multiconn::throughput::achievable_rate_asymptotic;
use multiconn::Combiner;

proptest! {
    #[test]
    fn coding_constant_increases_in_rate(n in 1usize..=8, r in 0.01f64..30.0, dr in 0.001f64..2.0) {
        prop_assert!(coding_constant(n, r + dr).unwrap() > coding_constant(n, r).unwrap());
    }

    #[test]
    fn joint_decoding_volume_is_below_mrc_simplex(n in 2usize..=8, r in 0.01f64..40.0) {
        let a1 = coding_constant(1, r).unwrap();
        let an = coding_constant(n, r).unwrap();
        prop_assert!(an < a1.powi(n as i32) / factorial(n));
    }

    #[test]
    fn inverse_round_trips(n in 2usize..=6, log_y in -6.0f64..12.0) {
        let y = 10f64.powf(log_y);
        let r = coding_constant_inverse(n, y).unwrap();
        let back = coding_constant(n, r).unwrap();
        prop_assert!(((back - y) / y).abs() < 1e-8);
    }

    #[test]
    fn capacities_are_ordered(gammas in prop::collection::vec(0.0f64..1e4, 1..6)) {
        let c = |comb| instantaneous_capacity(comb, &gammas).unwrap();
        prop_assert!(c(Combiner::Jd) >= c(Combiner::Mrc) - 1e-12);
        prop_assert!(c(Combiner::Mrc) >= c(Combiner::Sc) - 1e-12);
        prop_assert!(c(Combiner::Sc) >= c(Combiner::Sco) - 1e-12);
    }

    #[test]
    fn asymptotic_rates_are_ordered(n in 2usize..=6, log_snr in 0.0f64..6.0, log_p in -8.0f64..-1.0) {
        let snrs = vec![10f64.powf(log_snr); n];
        let p = 10f64.powf(log_p);
        let r = |c| achievable_rate_asymptotic(c, &snrs, p).unwrap();
        prop_assert!(r(Combiner::Jd) >= r(Combiner::Mrc));
        prop_assert!(r(Combiner::Mrc) >= r(Combiner::Sc));
        prop_assert!(r(Combiner::Sc) >= r(Combiner::Sco));
    }
}
