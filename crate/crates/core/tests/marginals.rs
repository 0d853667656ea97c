use decoupled_core::special::regularized_gamma_p;
use decoupled_core::*;

fn lattice(step: &StepDistribution, t: f64, h: f64) -> WalkMarginals {
    let options = LatticeOptions {
        width_limit: 0.5,
        ..LatticeOptions::with_h(h)
    };
    marginals_lattice(step, t, options).unwrap()
}

#[test]
fn exponential_marginals_are_erlang_and_sum_to_t() {
    let m = marginals_exact_gamma(1.0, 1.0, 1e-12).unwrap();
    let e = (-1f64).exp();
    assert!((m.probs()[0] - 0.63212).abs() < 1e-5);
    assert!((m.probs()[1] - (1.0 - 2.0 * e)).abs() < 1e-15);
    for t in [50.0, 100.0] {
        let u = marginals_exact_gamma(1.0, t, 1e-12).unwrap().renewal_mean();
        assert!((u.value - t).abs() < 1e-9 + u.error, "t = {t}");
    }
}

#[test]
fn marginals_monotone_in_n_and_t() {
    for shape in [0.5, 1.0, 2.0] {
        let a = marginals_exact_gamma(shape, 8.0, 1e-12).unwrap();
        let b = marginals_exact_gamma(shape, 9.0, 1e-12).unwrap();
        assert!(a.probs().windows(2).all(|w| w[1] <= w[0]));
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!(x <= y);
        }
    }
    let step = StepDistribution::pareto(1.5, 1.0).unwrap();
    let m = lattice(&step, 30.0, 0.01);
    assert!(m.probs().windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn lattice_brackets_exact_gamma() {
    for shape in [0.5, 1.0, 2.0] {
        let step = StepDistribution::gamma(shape).unwrap();
        for t in [5.0, 20.0] {
            let lat = lattice(&step, t, t / 4096.0);
            let n = lat.len().min(40);
            for i in 0..n {
                let exact = regularized_gamma_p((i + 1) as f64 * shape, t).unwrap();
                let half = 0.5 * lat.widths()[i];
                assert!(
                    (lat.probs()[i] - exact).abs() <= half + 1e-12,
                    "shape {shape}, t {t}, n {}: {} vs {exact} ± {half}",
                    i + 1,
                    lat.probs()[i]
                );
            }
        }
    }
}

#[test]
fn lattice_midpoints_match_exact_gamma() {
    let step = StepDistribution::gamma(1.0).unwrap();
    let lat = lattice(&step, 10.0, 1e-3);
    let ex = marginals_exact_gamma(1.0, 10.0, 1e-12).unwrap();
    for n in 0..lat.len().min(ex.len()) {
        assert!((lat.probs()[n] - ex.probs()[n]).abs() < 5e-3);
    }
}

#[test]
fn first_lattice_term_is_the_step_cdf() {
    let step = StepDistribution::pareto(3.0, 1.0).unwrap();
    for t in [1.5, 7.0, 40.0] {
        let m = lattice(&step, t, t / 1000.0);
        assert_eq!(m.probs()[0], step.cdf(t).unwrap());
        assert_eq!(m.widths()[0], 0.0);
    }
}

#[test]
fn halving_the_lattice_narrows_enclosures() {
    let steps = [
        StepDistribution::gamma(1.0).unwrap(),
        StepDistribution::pareto(3.0, 1.0).unwrap(),
        StepDistribution::weibull_type(0.5, 1.0).unwrap(),
    ];
    let t = 10.0;
    for step in steps {
        let coarse = lattice(&step, t, 0.02);
        let fine = lattice(&step, t, 0.01);
        for n in [2usize, 3, 5] {
            let (wc, wf) = (coarse.widths()[n - 1], fine.widths()[n - 1]);
            assert!(wc >= 1.5 * wf, "{} n = {n}: {wc} vs {wf}", step.name());
        }
    }
}

#[test]
fn variance_never_exceeds_mean() {
    let cases = [
        marginals_exact_gamma(1.0, 50.0, 1e-12).unwrap(),
        marginals_exact_gamma(0.3, 5.0, 1e-12).unwrap(),
        lattice(
            &StepDistribution::pareto(0.5, 1.0).unwrap(),
            100.0,
            100.0 / 8192.0,
        ),
        lattice(
            &StepDistribution::weibull_type(0.5, 2.0).unwrap(),
            20.0,
            0.005,
        ),
    ];
    for m in cases {
        assert!(m.renewal_variance().value <= m.renewal_mean().value);
    }
}

#[test]
fn zero_marginals_give_zero_moments() {
    let m = WalkMarginals::from_probs(1.0, &[0.0, 0.0]).unwrap();
    assert_eq!(m.renewal_mean().value, 0.0);
    assert_eq!(m.renewal_variance().value, 0.0);
}

#[test]
fn pareto_half_renewal_function_trends_to_two_over_pi() {
    // U(t) P{ξ > t} → 1/(Γ(1/2)Γ(3/2)) = 2/π
    let step = StepDistribution::pareto(0.5, 1.0).unwrap();
    let limit = 2.0 / std::f64::consts::PI;
    let mut prev = f64::INFINITY;
    for t in [1e2, 1e3, 1e4] {
        let m = marginals_lattice(&step, t, LatticeOptions::default()).unwrap();
        let v = m.renewal_mean().value * step.tail(t).unwrap().value;
        let gap = (v - limit).abs();
        assert!(gap < prev, "t = {t}: {v}");
        prev = gap;
    }
    assert!(prev < 0.05);
}
