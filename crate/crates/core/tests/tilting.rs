mod common;

use common::{enumerate_pmf, seeded_probs};
use decoupled_core::tilting::*;
use decoupled_core::*;
use rand::Rng;
use rayon::prelude::*;

#[test]
fn measure_change_identity_by_two_dp_runs() {
    for seed in 0..10 {
        let probs = seeded_probs(seed, 12);
        let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
        let base = exact_log_pmf(&m, 12).unwrap();
        for s in [-1.0, 0.5] {
            let model = tilt(&m, s).unwrap();
            let tilted = exact_log_pmf(model.tilted_marginals(), 12).unwrap();
            for k in 0..=12 {
                let back = -s * k as f64 + model.psi() + tilted.log_prob(k);
                assert!(
                    (back - base.log_prob(k)).abs() < 1e-12,
                    "seed {seed}, s {s}, k {k}"
                );
            }
        }
    }
}

#[test]
fn weighted_hit_indicator_is_unbiased() {
    // E^{(s)}[1{Y = k} e^{-sk + ψ(s)}] over all 2^12 tilted outcomes
    let probs = seeded_probs(42, 12);
    let exact = enumerate_pmf(&probs);
    let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
    for s in [-1.3, 0.7] {
        let model = tilt(&m, s).unwrap();
        let tilted = enumerate_pmf(model.tilted_probs());
        for k in 0..=12 {
            let w = (-s * k as f64 + model.psi()).exp();
            let got = tilted[k] * w;
            assert!(((got - exact[k]) / exact[k]).abs() < 1e-12, "s {s}, k {k}");
        }
    }
}

#[test]
fn tilt_consistency() {
    let m = marginals_exact_gamma(1.0, 30.0, 1e-12).unwrap();
    let mut prev = f64::MIN;
    for i in 0..=20 {
        let s = -5.0 + 0.5 * i as f64;
        let model = tilt(&m, s).unwrap();
        let mean: f64 = model.tilted_probs().iter().sum();
        assert!((mean - model.psi_prime()).abs() < 1e-12 * mean.max(1.0));
        assert!(model.psi_prime() > prev);
        prev = model.psi_prime();
    }
}

#[test]
fn small_instance_within_three_standard_errors() {
    let probs = seeded_probs(5, 12);
    let exact = enumerate_pmf(&probs);
    let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
    for k in [1usize, 3, 10] {
        let est = is_log_prob(&m, k, 20_000, SeededSampler::new(9, k as u64)).unwrap();
        let dev = (est.estimate - exact[k].ln()).abs();
        assert!(dev < 3.0 * est.stderr, "k {k}: {dev} vs {}", est.stderr);
    }
}

#[test]
fn zero_tilt_at_the_mode_is_plain_monte_carlo() {
    let probs = seeded_probs(8, 12);
    let m = WalkMarginals::from_probs(1.0, &probs).unwrap();
    let pmf = exact_log_pmf(&m, 12).unwrap();
    let k = pmf.mode();
    let n = 40_000u64;
    let est = is_log_prob_with_tilt(&m, k, 0.0, n, SeededSampler::new(2, 0)).unwrap();
    assert_eq!(est.s, 0.0);

    // naive frequency with an unrelated generator
    let mut r = SeededSampler::new(1234, 99).rng();
    let hits = (0..n)
        .filter(|_| probs.iter().filter(|&&p| r.random::<f64>() < p).count() == k)
        .count();
    let naive = hits as f64 / n as f64;
    let p = pmf.log_prob(k).exp();
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    assert!((est.estimate.exp() - p).abs() < 4.0 * sd);
    assert!((naive - p).abs() < 4.0 * sd);
}

#[test]
fn exponential_walk_deviation_estimate() {
    let t = 100.0;
    let m = marginals_exact_gamma(1.0, t, 1e-12).unwrap();
    let k = (0.5 * m.renewal_mean().value).floor() as usize;
    let exact = exact_log_pmf(&m, k).unwrap().log_prob(k);
    let est = is_log_prob(&m, k, 100_000, SeededSampler::new(7, 0)).unwrap();
    assert!(((est.estimate - exact) / exact).abs() < 0.01);
    let s = saddlepoint(&m, k).unwrap();
    assert!(s < 0.0);
    assert!(saddlepoint(&m, 150).unwrap() > 0.0);
}

#[test]
fn estimator_reports_no_hits() {
    let m = WalkMarginals::from_probs(1.0, &[0.01, 0.01]).unwrap();
    let est = is_log_prob_with_tilt(&m, 2, 0.0, 1000, SeededSampler::new(0, 0)).unwrap();
    assert!(est.no_hit());
    assert_eq!(est.estimate, f64::NEG_INFINITY);
}

#[test]
fn identical_seeds_reproduce() {
    let m = marginals_exact_gamma(1.0, 20.0, 1e-12).unwrap();
    let run = |seed| is_log_prob(&m, 8, 10_000, SeededSampler::new(seed, 0)).unwrap();
    assert_eq!(run(1), run(1));
    assert_ne!(run(1).hits, run(2).hits);
    let step = StepDistribution::pareto(3.0, 1.0).unwrap();
    let a = sample_decoupled_walk(&step, 20, SeededSampler::new(4, 4)).unwrap();
    let b = sample_decoupled_walk(&step, 20, SeededSampler::new(4, 4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn first_walk_value_has_the_step_mean() {
    let root = SeededSampler::new(17, 0);
    for step in [
        StepDistribution::gamma(1.0).unwrap(),
        StepDistribution::pareto(3.0, 1.0).unwrap(),
        StepDistribution::weibull_type(0.5, 1.0).unwrap(),
    ] {
        let n = 100_000u64;
        let draws: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| sample_decoupled_walk(&step, 1, root.child(i)).unwrap()[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (step.variance() / n as f64).sqrt();
        assert!(
            (mean - step.mean()).abs() < 4.0 * sd,
            "{}: {mean}",
            step.name()
        );
    }
}

#[test]
fn empirical_marginals_match_engines() {
    let root = SeededSampler::new(23, 1);
    let reps = 20_000u64;
    let cases = [
        (StepDistribution::gamma(1.0).unwrap(), 10.0),
        (StepDistribution::pareto(3.0, 1.0).unwrap(), 12.0),
    ];
    for (step, t) in cases {
        let m = match step {
            StepDistribution::Gamma { shape } => marginals_exact_gamma(shape, t, 1e-12).unwrap(),
            _ => marginals_lattice(&step, t, LatticeOptions::with_h(t / 65536.0)).unwrap(),
        };
        let n_max = 10;
        let walks: Vec<Vec<f64>> = (0..reps)
            .into_par_iter()
            .map(|i| sample_decoupled_walk(&step, n_max, root.child(i)).unwrap())
            .collect();
        for n in [1usize, 3, 6, 8, 10] {
            let freq = walks.iter().filter(|w| w[n - 1] <= t).count() as f64 / reps as f64;
            let p = m.probs()[n - 1];
            let sd = (p * (1.0 - p) / reps as f64).sqrt().max(1.0 / reps as f64);
            assert!(
                (freq - p).abs() < 4.0 * sd + m.widths()[n - 1],
                "{} n {n}",
                step.name()
            );
        }
    }
}

#[test]
fn ginibre_hole_probability() {
    // P{no radius ≤ 2} = P{N(4) = 0} for unit exponential steps
    let t = 2.0f64;
    let m = marginals_exact_gamma(1.0, t * t, 1e-14).unwrap();
    let p = log_prob_zero(&m).value.exp();
    let runs = 1_000_000u64;
    let root = SeededSampler::new(2024, 0);
    let n_max = m.len();
    let holes = (0..runs)
        .into_par_iter()
        .filter(|&i| {
            sample_radii(2.0, n_max, root.child(i))
                .unwrap()
                .iter()
                .all(|&r| r > t)
        })
        .count() as f64;
    let freq = holes / runs as f64;
    let sd = (p * (1.0 - p) / runs as f64).sqrt();
    assert!((freq - p).abs() < 4.0 * sd, "{freq} vs {p}");
}

#[test]
fn radii_count_histogram_matches_exact_pmf() {
    let (rho, t) = (2.0f64, 3.0f64);
    let big_t = t.powf(rho);
    let m = marginals_exact_gamma(2.0 / rho, big_t, 1e-14).unwrap();
    let pmf = exact_log_pmf(&m, m.len()).unwrap();
    let runs = 50_000u64;
    let root = SeededSampler::new(77, 3);
    let counts: Vec<usize> = (0..runs)
        .into_par_iter()
        .map(|i| {
            sample_radii(rho, m.len(), root.child(i))
                .unwrap()
                .iter()
                .filter(|&&r| r < t)
                .count()
        })
        .collect();
    let mut observed = vec![0f64; m.len() + 1];
    for c in counts {
        observed[c] += 1.0;
    }
    let mut chi2 = 0.0;
    let mut cells = 0;
    for (k, &obs) in observed.iter().enumerate() {
        let expected = runs as f64 * pmf.log_prob(k).exp();
        if expected >= 5.0 {
            chi2 += (obs - expected).powi(2) / expected;
            cells += 1;
        }
    }
    let dof = (cells - 1) as f64;
    assert!(
        chi2 < dof + 5.0 * (2.0 * dof).sqrt(),
        "chi2 {chi2}, dof {dof}"
    );
}

#[test]
fn ginibre_radii_reduce_to_exponential_steps() {
    let a = sample_radii(2.0, 30, SeededSampler::new(5, 5)).unwrap();
    let b = sample_decoupled_walk(
        &StepDistribution::gamma(1.0).unwrap(),
        30,
        SeededSampler::new(5, 5),
    )
    .unwrap();
    for (r, s) in a.iter().zip(&b) {
        assert!((r * r - s).abs() < 1e-12 * s);
    }
}
