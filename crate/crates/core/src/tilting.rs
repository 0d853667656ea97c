//! Exponential tilting of the Bernoulli array `η_n = 1{Ŝ_n ≤ t}`.
//!
//! Under `P^(s)` the indicators stay independent with success probabilities
//! `p_n' = e^s p_n/((e^s - 1)p_n + 1)`, and for every `k`
//!
//! ```text
//! P{Y = k} = e^{-sk + ψ(s)} P^(s){Y = k},   ψ(s) = Σ log((e^s - 1)p_n + 1).
//! ```
//!
//! Choosing `s` with `ψ'(s) = k` centres the tilted law on `k`, so a plain
//! frequency estimate of `P^(s){Y = k}` has bounded relative error.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::marginals::{MarginalMethod, WalkMarginals};
use crate::rng::SeededSampler;
use crate::roots::{grow_bracket, solve_increasing, RootTolerance};
use crate::step::StepDistribution;
use crate::sum::{log_add_exp, NeumaierSum};

/// Largest admissible `|s|`.
pub const MAX_TILT: f64 = 700.0;

/// The tilted Bernoulli array with `ψ`, `ψ'` and `ψ''` at `s`.
#[derive(Debug, Clone)]
pub struct TiltedModel {
    s: f64,
    tilted: WalkMarginals,
    psi: f64,
    psi_prime: f64,
    psi_second: f64,
}

impl TiltedModel {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tilted_probs(&self) -> &[f64] {
        self.tilted.probs()
    }

    /// The tilted array as marginals, e.g. to feed [`crate::exact_log_pmf`].
    pub fn tilted_marginals(&self) -> &WalkMarginals {
        &self.tilted
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn psi_prime(&self) -> f64 {
        self.psi_prime
    }

    pub fn psi_second(&self) -> f64 {
        self.psi_second
    }
}

/// Tilts every `p_n` by `s`, working with `log p_n` and `log(1 - p_n)` so
/// that neither sign of `s` loses precision to `e^s - 1`.
pub fn tilt(m: &WalkMarginals, s: f64) -> Result<TiltedModel> {
    if !s.is_finite() || s.abs() > MAX_TILT {
        return Err(Error::Range(format!(
            "tilt {s} outside [-{MAX_TILT}, {MAX_TILT}]"
        )));
    }
    if s == 0.0 {
        let mean = m.renewal_mean().value;
        let var = m.renewal_variance().value;
        let mut tilted = m.clone();
        tilted.set_method(MarginalMethod::Explicit);
        return Ok(TiltedModel {
            s,
            tilted,
            psi: 0.0,
            psi_prime: mean,
            psi_second: var,
        });
    }
    let mut psi = NeumaierSum::new();
    let mut logs = Vec::with_capacity(m.len());
    for (&lp, &lq) in m.ln_probs().iter().zip(m.ln_complements()) {
        let z = log_add_exp(lp + s, lq);
        psi.add(z - log_add_exp(lp, lq));
        logs.push((lp + s - z, lq - z));
    }
    let tilted = WalkMarginals::from_logs(
        m.t(),
        logs,
        vec![0.0; m.len()],
        0.0,
        MarginalMethod::Explicit,
    );
    Ok(TiltedModel {
        s,
        psi: psi.value(),
        psi_prime: tilted.renewal_mean().value,
        psi_second: tilted.renewal_variance().value,
        tilted,
    })
}

/// `(ψ'(s), ψ''(s))` without materializing the tilted array.
fn psi_derivatives(m: &WalkMarginals, s: f64) -> (f64, f64) {
    let mut d1 = NeumaierSum::new();
    let mut d2 = NeumaierSum::new();
    for (&lp, &lq) in m.ln_probs().iter().zip(m.ln_complements()) {
        let z = log_add_exp(lp + s, lq);
        let p = (lp + s - z).exp();
        let q = (lq - z).exp();
        d1.add(p);
        d2.add(p * q);
    }
    (d1.value(), d2.value())
}

/// The tilt `s` with `ψ'(s) = k`.
pub fn saddlepoint(m: &WalkMarginals, k: usize) -> Result<f64> {
    let certain = m
        .ln_complements()
        .iter()
        .filter(|&&l| l == f64::NEG_INFINITY)
        .count();
    let possible = m
        .ln_probs()
        .iter()
        .filter(|&&l| l > f64::NEG_INFINITY)
        .count();
    if k <= certain || k >= possible {
        return domain(format!(
            "target count {k} outside the open range ({certain}, {possible})"
        ));
    }
    let target = k as f64;
    let (lo, hi) = grow_bracket(
        |s| Ok(psi_derivatives(m, s).0),
        target,
        0.0,
        0.5,
        -MAX_TILT,
        MAX_TILT,
    )?;
    solve_increasing(
        |s| Ok(psi_derivatives(m, s)),
        target,
        lo,
        hi,
        RootTolerance {
            ftol: 1e-11 * target.max(1.0),
            ..RootTolerance::default()
        },
    )
}

/// Result of the tilted importance-sampling estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsEstimate {
    /// Estimate of `log P{Y = k}`; `-∞` when no sample hit `k`.
    pub estimate: f64,
    /// Delta-method standard error of the estimate.
    pub stderr: f64,
    pub hits: u64,
    pub n_samples: u64,
    pub s: f64,
}

impl IsEstimate {
    /// No sample landed on `k`; rerun with more samples.
    pub fn no_hit(&self) -> bool {
        self.hits == 0
    }
}

/// Samples per independently seeded batch.
const BATCH: u64 = 4096;

/// Estimates `log P{Y = k}` as `-sk + ψ(s) + log f̂` where `f̂` is the
/// frequency of `{Y = k}` under the saddlepoint tilt.
pub fn is_log_prob(
    m: &WalkMarginals,
    k: usize,
    n_samples: u64,
    rng: SeededSampler,
) -> Result<IsEstimate> {
    let s = saddlepoint(m, k)?;
    is_log_prob_with_tilt(m, k, s, n_samples, rng)
}

/// As [`is_log_prob`] with a caller-chosen tilt; `s = 0` is plain Monte Carlo.
pub fn is_log_prob_with_tilt(
    m: &WalkMarginals,
    k: usize,
    s: f64,
    n_samples: u64,
    rng: SeededSampler,
) -> Result<IsEstimate> {
    if n_samples < 1000 {
        return domain(format!("need at least 1000 samples, got {n_samples}"));
    }
    let model = tilt(m, s)?;
    let probs = model.tilted_probs();
    let batches = n_samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let size = BATCH.min(n_samples - b * BATCH);
            let mut r = rng.child(b).rng();
            let mut hits = 0u64;
            for _ in 0..size {
                let mut count = 0usize;
                for &p in probs {
                    if r.random::<f64>() < p {
                        count += 1;
                    }
                }
                hits += u64::from(count == k);
            }
            hits
        })
        .sum();
    let n = n_samples as f64;
    let f = hits as f64 / n;
    let (estimate, stderr) = if hits == 0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (
            -s * k as f64 + model.psi() + f.ln(),
            ((1.0 - f) / (n * f)).sqrt(),
        )
    };
    Ok(IsEstimate {
        estimate,
        stderr,
        hits,
        n_samples,
        s,
    })
}

/// One draw of `(Ŝ_1, …, Ŝ_{n_max})`, each independent with the law of `S_n`.
pub fn sample_decoupled_walk(
    step: &StepDistribution,
    n_max: usize,
    rng: SeededSampler,
) -> Result<Vec<f64>> {
    let mut r = rng.rng();
    match *step {
        StepDistribution::Gamma { shape } => (1..=n_max)
            .map(|n| {
                let g =
                    Gamma::new(n as f64 * shape, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
                Ok(g.sample(&mut r))
            })
            .collect(),
        StepDistribution::Pareto { .. } | StepDistribution::WeibullType { .. } => Ok((1..=n_max)
            .map(|n| (0..n).map(|_| draw_step(step, &mut r)).sum())
            .collect()),
        StepDistribution::SqrtExp => Err(Error::Unavailable("sampling")),
    }
}

fn draw_step<R: Rng>(step: &StepDistribution, r: &mut R) -> f64 {
    // 1 - U lies in (0, 1]
    let u = 1.0 - r.random::<f64>();
    match *step {
        StepDistribution::Pareto { alpha, scale } => scale * u.powf(-1.0 / alpha),
        StepDistribution::WeibullType { alpha, c } => (-u.ln() / c).powf(1.0 / alpha),
        _ => unreachable!("only inverse-transform families are drawn step by step"),
    }
}

/// Radii `(Ŝ_n)^{1/ρ}`, `n ≤ n_max`, for gamma(`2/ρ`) steps: the moduli of the
/// points of the rotation-invariant determinantal process with exponent `ρ`
/// (`ρ = 2` is the Ginibre ensemble).
pub fn sample_radii(rho: f64, n_max: usize, rng: SeededSampler) -> Result<Vec<f64>> {
    if !(rho > 0.0 && rho.is_finite()) {
        return domain(format!("rho must be positive, got {rho}"));
    }
    let step = StepDistribution::gamma(2.0 / rho)?;
    Ok(sample_decoupled_walk(&step, n_max, rng)?
        .into_iter()
        .map(|s| s.powf(1.0 / rho))
        .collect())
}
