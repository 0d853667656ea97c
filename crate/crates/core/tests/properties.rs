mod common;

use common::enumerate_pmf;
use decoupled_core::tilting::tilt;
use decoupled_core::*;
use proptest::prelude::*;

fn prob_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pmf_is_normalized_with_bernoulli_moments(probs in prob_vec(60)) {
        let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
        let pmf = exact_log_pmf(&m, probs.len()).unwrap();
        let total: f64 = pmf.log_values().iter().map(|l| l.exp()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let mean: f64 = probs.iter().sum();
        let var: f64 = probs.iter().map(|p| p * (1.0 - p)).sum();
        let (m1, v1) = pmf.moments();
        prop_assert!((m1 - mean).abs() < 1e-10 * (1.0 + mean));
        prop_assert!((v1 - var).abs() < 1e-9 * (1.0 + var));
    }

    #[test]
    fn pmf_matches_enumeration(probs in prob_vec(10)) {
        let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
        let pmf = exact_log_pmf(&m, probs.len()).unwrap();
        let exact = enumerate_pmf(&probs);
        for (k, &e) in exact.iter().enumerate() {
            let got = pmf.log_prob(k).exp();
            prop_assert!((got - e).abs() < 1e-13 + 1e-12 * e);
        }
    }

    #[test]
    fn measure_change_holds_for_any_tilt(
        probs in prop::collection::vec(0.01f64..0.99, 1..=12),
        s in -4.0f64..4.0,
    ) {
        let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
        let base = exact_log_pmf(&m, probs.len()).unwrap();
        let model = tilt(&m, s).unwrap();
        let tilted = exact_log_pmf(model.tilted_marginals(), probs.len()).unwrap();
        for k in 0..=probs.len() {
            let back = -s * k as f64 + model.psi() + tilted.log_prob(k);
            prop_assert!((back - base.log_prob(k)).abs() < 1e-11);
        }
    }

    #[test]
    fn tilted_probabilities_stay_in_unit_interval(
        probs in prob_vec(40),
        s in -50.0f64..50.0,
    ) {
        let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
        let model = tilt(&m, s).unwrap();
        prop_assert!(model.tilted_probs().iter().all(|p| (0.0..=1.0).contains(p)));
        let zero = tilt(&m, 0.0).unwrap();
        prop_assert_eq!(zero.psi(), 0.0);
    }

    #[test]
    fn gamma_marginals_are_monotone(shape in 0.2f64..4.0, t in 0.5f64..80.0) {
        let m = marginals_exact_gamma(shape, t, 1e-12).unwrap();
        prop_assert!(m.probs().windows(2).all(|w| w[1] <= w[0]));
        let later = marginals_exact_gamma(shape, t * 1.3, 1e-12).unwrap();
        for (a, b) in m.probs().iter().zip(later.probs()) {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn step_cdf_and_tail_sum_to_one(x in 0.0f64..200.0, a in 0.3f64..4.0) {
        for step in [
            StepDistribution::gamma(a).unwrap(),
            StepDistribution::pareto(a, 1.0).unwrap(),
            StepDistribution::weibull_type(a.min(0.99), 1.0).unwrap(),
        ] {
            let (c, q) = step.cdf_and_tail(x).unwrap();
            prop_assert!((c + q - 1.0).abs() < 1e-14, "{}: {c} + {q}", step.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lattice_enclosure_contains_exact_gamma(shape in 0.5f64..3.0, t in 2.0f64..20.0) {
        let step = StepDistribution::gamma(shape).unwrap();
        let opts = LatticeOptions { width_limit: 0.5, ..LatticeOptions::with_h(t / 4096.0) };
        let lat = marginals_lattice(&step, t, opts).unwrap();
        let exact = marginals_exact_gamma(shape, t, 1e-12).unwrap();
        for n in 0..lat.len().min(exact.len()) {
            let (mid, w) = (lat.probs()[n], lat.widths()[n]);
            prop_assert!((exact.probs()[n] - mid).abs() <= w / 2.0 + 1e-12, "n {}", n + 1);
        }
    }
}
