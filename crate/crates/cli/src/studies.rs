//! The studies: each maps a time grid to rows `(t, observed, predicted,
//! residual, runtime, …)`. The `predicted` column is computed from rate
//! functions and closed forms only.

use std::time::{Duration, Instant};

use decoupled_core::marginals::Bounded;
use decoupled_core::rates::{
    conjugate_j, deviation_integral, heavy_rate_regular, radii_second_order_coeff,
    second_order_coeff, semiexp_rate, variance_constant, zero_level_integral,
};
use decoupled_core::step::TailClass;
use decoupled_core::tilting::{is_log_prob, sample_radii};
use decoupled_core::{
    certified_point_log_prob, local_clt_error, log_prob_zero, marginals_exact_gamma_min_len,
    marginals_lattice, LatticeOptions, SeededSampler, StepDistribution, WalkMarginals,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Study};
use crate::output::Table;
use crate::CliError;

/// Result of running a study: the rows that finished, in grid order, and
/// the reason the run stopped early, if it did.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

struct Point {
    observed: f64,
    predicted: f64,
    extras: Vec<f64>,
}

/// Validates `cfg`, checks the study hypotheses and runs the grid on a pool
/// of `threads` workers (`0` = one per logical core). Grid entries not yet
/// started when `budget` runs out are skipped.
pub fn run_study(
    cfg: &ExperimentConfig,
    threads: usize,
    budget: Option<Duration>,
) -> Result<Outcome, CliError> {
    cfg.validate()?;
    check_hypotheses(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    let deadline = budget.map(|b| Instant::now() + b);
    pool.install(|| {
        if cfg.study == Study::Rates {
            rates_table(cfg, deadline)
        } else {
            grid_table(cfg, deadline)
        }
    })
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

fn hypothesis<T>(condition: &str) -> Result<T, CliError> {
    Err(CliError::Hypothesis(condition.to_string()))
}

fn check_hypotheses(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let step = &cfg.step;
    let b = cfg.b;
    if cfg.study != Study::Rates && !step.has_cdf() {
        return hypothesis("step law must have a distribution function");
    }
    match cfg.study {
        Study::Rates | Study::ExactProb | Study::LocalClt | Study::IsCompare => {}
        Study::ConvergenceT21 => {
            if !matches!(step.tail_class(), TailClass::RegularlyVarying { index, .. } if index < 1.0)
            {
                return hypothesis("tail regularly varying with index alpha in [0, 1)");
            }
            if b == 1.0 {
                return hypothesis("b != 1");
            }
        }
        Study::ConvergenceT22 => {
            if !matches!(step.tail_class(), TailClass::RegularlyVarying { index, .. } if index > 1.0)
            {
                return hypothesis("tail regularly varying with index alpha > 1");
            }
            if b >= 1.0 {
                return hypothesis("b in (0, 1)");
            }
        }
        Study::ConvergenceT23 => {
            if !matches!(step.tail_class(), TailClass::SemiExponential { .. }) {
                return hypothesis("-log P{xi > t} regularly varying with index in (0, 1)");
            }
            if b >= 1.0 {
                return hypothesis("b in (0, 1)");
            }
        }
        Study::LightExpansionT24 => {
            if step.tail_class() != TailClass::Light {
                return hypothesis("E exp(s xi) finite for some s > 0");
            }
            if b >= 1.0 {
                return hypothesis("b in (0, 1)");
            }
            if !(step.mean() / b < step.light_tail_analysis().a0) {
                return hypothesis("mu/b < A_0");
            }
        }
        Study::LightExpansionT25 => {
            if !step.mean().is_finite() {
                return hypothesis("mu finite");
            }
            if b <= 1.0 {
                return hypothesis("b > 1");
            }
            if !(step.support_min() < step.mean() / b) {
                return hypothesis("P{xi <= mu/b} > 0");
            }
        }
        Study::Forrester => {
            if *step != (StepDistribution::Gamma { shape: 1.0 }) {
                return hypothesis("unit-exponential steps");
            }
        }
        Study::VarianceAsymptotics => {
            let finite_variance = step.variance().is_finite();
            let infinite_mean = matches!(
                step.tail_class(),
                TailClass::RegularlyVarying { index, .. } if index < 1.0
            );
            if !(finite_variance || infinite_mean) {
                return hypothesis("finite step variance or tail index alpha in [0, 1)");
            }
        }
        Study::GinibreRadii => {
            if b == 1.0 {
                return hypothesis("b != 1");
            }
        }
    }
    Ok(())
}

/// Target formula and extra columns for each grid study.
fn layout(study: Study) -> (&'static str, &'static [&'static str]) {
    match study {
        Study::ExactProb => (
            "observed = log P{N(t) = k}, k = floor(b U(t)); predicted = -log(2 pi Var)/2 - (k - U)^2/(2 Var)",
            &["k", "renewal_mean", "variance", "error_bar"],
        ),
        Study::ConvergenceT21 => (
            "observed = -log P{N(t) = floor(b U(t))}/U(t); predicted = J_alpha(b)",
            &["k", "renewal_mean"],
        ),
        Study::ConvergenceT22 => (
            "observed = -log P{N(t) = floor(b t/mu)}/(t log t); predicted = (alpha - 1)(1 - b)/mu",
            &["k"],
        ),
        Study::ConvergenceT23 => (
            "observed = -log P{N(t) = floor(b t/mu)}/(-t log P{xi > t}); predicted = (1 - b)^(alpha + 1)/(mu (alpha + 1))",
            &["k"],
        ),
        Study::LightExpansionT24 => (
            "observed = -log P{N(t) = floor(b t/mu)}; predicted = t^2 int_{b/mu}^{1/mu} y I(1/y) dy + (1 - b)/(2 mu) t log t",
            &["k"],
        ),
        Study::LightExpansionT25 => (
            "observed = -log P{N(t) = floor(b t/mu)}; predicted = t^2 int_{1/mu}^{b/mu} y I*(1/y) dy + (b - 1)/(2 mu) t log t",
            &["k"],
        ),
        Study::Forrester => (
            "observed = log P{N(t) = 0}; predicted = -t^2/4 - (t log t)/2 + (1 - log(2 pi)/2) t",
            &["error_bar"],
        ),
        Study::LocalClt => (
            "observed = sqrt(2 pi Var) P{N(t) = floor(U(t))}; predicted = 1",
            &["k", "renewal_mean", "variance", "sup_deviation"],
        ),
        Study::VarianceAsymptotics => (
            "observed = Var N(t); predicted = (sigma^2 t/(mu^3 pi))^(1/2) for finite variance, c_alpha/P{xi > t} for tail index alpha < 1",
            &["renewal_mean"],
        ),
        Study::IsCompare => (
            "observed = tilted importance-sampling estimate of log P{N(t) = floor(b U(t))}; predicted = exact log P{N(t) = floor(b U(t))}",
            &["k", "stderr", "hits", "tilt"],
        ),
        Study::GinibreRadii => (
            "observed = -log P{#(radii <= t) = floor(b (rho/2) t^rho)}; predicted = (rho/8) |2 b^2 log b - (b - 1)(3 b - 1)| t^(2 rho) + (|b - 1| rho^2/4) t^rho log t",
            &["k", "mean_count", "sampled_mean_count"],
        ),
        Study::Rates => unreachable!("the rates study has its own layout"),
    }
}

fn describe_step(step: &StepDistribution) -> String {
    match *step {
        StepDistribution::Gamma { shape } => format!("gamma(shape={shape})"),
        StepDistribution::Pareto { alpha, scale } => {
            format!("pareto(alpha={alpha}, scale={scale})")
        }
        StepDistribution::WeibullType { alpha, c } => format!("weibull-type(alpha={alpha}, c={c})"),
        StepDistribution::SqrtExp => "sqrt-exp".to_string(),
    }
}

fn grid_table(cfg: &ExperimentConfig, deadline: Option<Instant>) -> Result<Outcome, CliError> {
    let (target, extras) = layout(cfg.study);
    let mut columns = vec!["t", "observed", "predicted", "residual", "runtime"];
    columns.extend_from_slice(extras);
    let mut table = Table::new(&columns);
    table.meta("study", cfg.study);
    table.meta("target", target);
    if cfg.study == Study::GinibreRadii {
        table.meta("rho", cfg.rho);
    } else {
        table.meta("step", describe_step(&cfg.step));
    }
    table.meta("b", cfg.b);
    table.meta("seed", cfg.seed);

    // `None` marks grid points skipped by the budget
    type Row = Option<Result<(f64, Point, f64), CliError>>;
    let results: Vec<Row> = cfg
        .t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            if expired(deadline) {
                return None;
            }
            let start = Instant::now();
            Some(point(cfg, i, t).map(|p| (t, p, start.elapsed().as_secs_f64())))
        })
        .collect();

    let mut failure = None;
    for r in results {
        match r {
            Some(Ok((t, p, runtime))) => {
                let mut row = vec![
                    t,
                    p.observed,
                    p.predicted,
                    p.observed - p.predicted,
                    runtime,
                ];
                row.extend(p.extras);
                table.rows.push(row);
            }
            Some(Err(e)) => {
                failure.get_or_insert(e);
            }
            None => {
                failure.get_or_insert(CliError::Budget {
                    completed: 0,
                    total: cfg.t_grid.len(),
                });
            }
        }
    }
    if let Some(CliError::Budget { completed, .. }) = &mut failure {
        *completed = table.rows.len();
    }
    if cfg.study == Study::Forrester && failure.is_none() {
        if let Some(slope) = log_log_slope(&table) {
            table.meta("residual_log_log_slope", format!("{slope:.6}"));
        }
    }
    Ok(Outcome { table, failure })
}

/// Least-squares slope of `log |residual|` against `log t`.
pub fn log_log_slope(table: &Table) -> Option<f64> {
    let ts = table.column("t")?;
    let rs = table.column("residual")?;
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(&rs)
        .filter(|(_, r)| r.abs() > 0.0 && r.is_finite())
        .map(|(t, r)| (t.ln(), r.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn marginals(
    cfg: &ExperimentConfig,
    step: &StepDistribution,
    t: f64,
    min_len: usize,
) -> decoupled_core::Result<WalkMarginals> {
    let tol = &cfg.tolerances;
    match *step {
        StepDistribution::Gamma { shape } => {
            marginals_exact_gamma_min_len(shape, t, tol.eps_mass, min_len)
        }
        _ => marginals_lattice(
            step,
            t,
            LatticeOptions {
                h: None,
                cells: tol.lattice_cells,
                eps_mass: tol.eps_mass,
                width_limit: tol.width_limit,
                min_len,
            },
        ),
    }
}

fn point_log_prob(
    cfg: &ExperimentConfig,
    step: &StepDistribution,
    t: f64,
    k: usize,
) -> decoupled_core::Result<Bounded> {
    certified_point_log_prob(k, cfg.tolerances.log_prob, |len| {
        marginals(cfg, step, t, len)
    })
}

fn floor_count(x: f64) -> usize {
    x.floor().max(0.0) as usize
}

fn point(cfg: &ExperimentConfig, index: usize, t: f64) -> Result<Point, CliError> {
    let step = &cfg.step;
    let b = cfg.b;
    let mu = step.mean();
    let k_light = floor_count(b * t / mu);
    let p = match cfg.study {
        Study::ExactProb => {
            let m = marginals(cfg, step, t, 0)?;
            let u = m.renewal_mean().value;
            let var = m.renewal_variance().value;
            let k = floor_count(b * u);
            let lp = point_log_prob(cfg, step, t, k)?;
            let z = k as f64 - u;
            Point {
                observed: lp.value,
                predicted: -(2.0 * std::f64::consts::PI * var).ln() / 2.0 - z * z / (2.0 * var),
                extras: vec![k as f64, u, var, lp.error],
            }
        }
        Study::ConvergenceT21 => {
            let TailClass::RegularlyVarying { index: alpha, .. } = step.tail_class() else {
                unreachable!("checked by the hypotheses")
            };
            let u = marginals(cfg, step, t, 0)?.renewal_mean().value;
            let k = floor_count(b * u);
            let lp = point_log_prob(cfg, step, t, k)?;
            Point {
                observed: -lp.value / u,
                predicted: conjugate_j(alpha, b)?.rate,
                extras: vec![k as f64, u],
            }
        }
        Study::ConvergenceT22 => {
            let TailClass::RegularlyVarying { index: alpha, .. } = step.tail_class() else {
                unreachable!("checked by the hypotheses")
            };
            let lp = point_log_prob(cfg, step, t, k_light)?;
            Point {
                observed: -lp.value / (t * t.ln()),
                predicted: heavy_rate_regular(alpha, b, mu)?,
                extras: vec![k_light as f64],
            }
        }
        Study::ConvergenceT23 => {
            let TailClass::SemiExponential { index: alpha, .. } = step.tail_class() else {
                unreachable!("checked by the hypotheses")
            };
            let lp = point_log_prob(cfg, step, t, k_light)?;
            let h = -step.tail(t)?.value.ln();
            Point {
                observed: -lp.value / (t * h),
                predicted: semiexp_rate(alpha, b, mu)?,
                extras: vec![k_light as f64],
            }
        }
        Study::LightExpansionT24 | Study::LightExpansionT25 => {
            let lp = point_log_prob(cfg, step, t, k_light)?;
            Point {
                observed: -lp.value,
                predicted: t * t * deviation_integral(step, b)?
                    + second_order_coeff(b, mu)? * t * t.ln(),
                extras: vec![k_light as f64],
            }
        }
        Study::Forrester => {
            let z = log_prob_zero(&marginals(cfg, step, t, 0)?);
            Point {
                observed: z.value,
                predicted: -t * t / 4.0 - t * t.ln() / 2.0
                    + (1.0 - (2.0 * std::f64::consts::PI).ln() / 2.0) * t,
                extras: vec![z.error],
            }
        }
        Study::LocalClt => {
            let m = marginals(cfg, step, t, 0)?;
            let u = m.renewal_mean().value;
            let var = m.renewal_variance().value;
            let k = floor_count(u);
            let lp = point_log_prob(cfg, step, t, k)?;
            Point {
                observed: (2.0 * std::f64::consts::PI * var).sqrt() * lp.value.exp(),
                predicted: 1.0,
                extras: vec![k as f64, u, var, local_clt_error(&m)?],
            }
        }
        Study::VarianceAsymptotics => {
            let m = marginals(cfg, step, t, 0)?;
            let predicted = match step.tail_class() {
                TailClass::RegularlyVarying { index, .. } if index < 1.0 => {
                    variance_constant(index)? / step.tail(t)?.value
                }
                _ => (step.variance() * t / (mu.powi(3) * std::f64::consts::PI)).sqrt(),
            };
            Point {
                observed: m.renewal_variance().value,
                predicted,
                extras: vec![m.renewal_mean().value],
            }
        }
        Study::IsCompare => {
            let u = marginals(cfg, step, t, 0)?.renewal_mean().value;
            let k = floor_count(b * u);
            let exact = point_log_prob(cfg, step, t, k)?;
            let m = marginals(cfg, step, t, k + 1)?;
            let est = is_log_prob(
                &m,
                k,
                cfg.n_samples,
                SeededSampler::new(cfg.seed, index as u64),
            )?;
            Point {
                observed: est.estimate,
                predicted: exact.value,
                extras: vec![k as f64, est.stderr, est.hits as f64, est.s],
            }
        }
        Study::GinibreRadii => {
            let rho = cfg.rho;
            let big_t = t.powf(rho);
            let k = floor_count(b * rho / 2.0 * big_t);
            let lp = point_log_prob(cfg, step, big_t, k)?;
            let m = marginals(cfg, step, big_t, 0)?;
            let sampler = SeededSampler::new(cfg.seed, index as u64);
            let mut total = 0usize;
            for r in 0..cfg.replicas {
                let radii = sample_radii(rho, m.len(), sampler.child(r))?;
                total += radii.iter().filter(|&&x| x <= t).count();
            }
            let lead = rho / 8.0 * (2.0 * b * b * b.ln() - (b - 1.0) * (3.0 * b - 1.0)).abs();
            Point {
                observed: -lp.value,
                predicted: lead * big_t * big_t
                    + radii_second_order_coeff(b, rho)? * big_t * t.ln(),
                extras: vec![
                    k as f64,
                    m.renewal_mean().value,
                    total as f64 / cfg.replicas as f64,
                ],
            }
        }
        Study::Rates => unreachable!("the rates study has no time grid"),
    };
    Ok(p)
}

fn rates_table(cfg: &ExperimentConfig, deadline: Option<Instant>) -> Result<Outcome, CliError> {
    let mut table = Table::new(&["b", "s_b", "J", "f", "f''"]);
    table.meta("study", cfg.study);
    table.meta(
        "target",
        "J_alpha(b) = b s_b - f_alpha(s_b), f_alpha'(s_b) = b",
    );
    table.meta("alpha", cfg.alpha);
    let zero = zero_level_integral(cfg.alpha)?;
    table.meta(
        "heuristic_b_to_0_limit",
        format!("int_0^inf -log P{{Z_alpha <= y}} dy = {zero:.12}"),
    );
    let results: Vec<Option<Result<Vec<f64>, CliError>>> = cfg
        .b_grid
        .par_iter()
        .map(|&b| {
            if expired(deadline) {
                return None;
            }
            Some(
                conjugate_j(cfg.alpha, b)
                    .map(|s| vec![s.b, s.s_b, s.rate, s.f_at_s, s.second_deriv])
                    .map_err(CliError::from),
            )
        })
        .collect();
    let mut failure = None;
    for r in results {
        match r {
            Some(Ok(row)) => table.rows.push(row),
            Some(Err(e)) => {
                failure.get_or_insert(e);
            }
            None => {
                failure.get_or_insert(CliError::Budget {
                    completed: 0,
                    total: cfg.b_grid.len(),
                });
            }
        }
    }
    if let Some(CliError::Budget { completed, .. }) = &mut failure {
        *completed = table.rows.len();
    }
    Ok(Outcome { table, failure })
}
