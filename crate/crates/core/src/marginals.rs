//! Walk marginals `p_n(t) = P{S_n ≤ t}` with certified truncation.
//!
//! Two engines are provided. For gamma steps `S_n` is gamma(`nk`, 1) and
//! `p_n(t)` is a regularized incomplete gamma value. For any step law with a
//! distribution function, [`marginals_lattice`] rounds each step down to the
//! grid `hℤ`; since `ξ_h ≤ ξ ≤ ξ_h + h`, the discretized walk gives the
//! enclosure
//!
//! ```text
//! P{S_n^h ≤ t - nh} ≤ p_n(t) ≤ P{S_n^h ≤ t}
//! ```
//!
//! from a single convolution chain. Complements `1 - p_n` are accumulated
//! directly so that probabilities within `1e-300` of one keep their logs.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::special::ln_regularized_gamma_pq;
use crate::step::StepDistribution;
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalMethod {
    ExactGamma,
    Lattice,
    /// Probabilities supplied by the caller.
    Explicit,
}

impl MarginalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExactGamma => "exact-gamma",
            Self::Lattice => "lattice",
            Self::Explicit => "explicit",
        }
    }
}

/// A value with an absolute error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
}

/// Truncated sequence `p_1(t), …, p_N(t)` together with `log p_n`,
/// `log(1 - p_n)`, per-term enclosure widths and a bound on `Σ_{n>N} p_n`.
#[derive(Debug, Clone)]
pub struct WalkMarginals {
    t: f64,
    probs: Arc<[f64]>,
    ln_probs: Arc<[f64]>,
    ln_complements: Arc<[f64]>,
    widths: Arc<[f64]>,
    tail_bound: f64,
    method: MarginalMethod,
}

impl WalkMarginals {
    /// Wraps caller-supplied success probabilities (no truncation).
    pub fn from_probs(t: f64, probs: &[f64]) -> Result<Self> {
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return domain(format!("probability p_{} = {p} outside [0, 1]", i + 1));
            }
        }
        Ok(Self {
            t,
            probs: probs.into(),
            ln_probs: probs.iter().map(|p| p.ln()).collect(),
            ln_complements: probs.iter().map(|p| (-p).ln_1p()).collect(),
            widths: vec![0.0; probs.len()].into(),
            tail_bound: 0.0,
            method: MarginalMethod::Explicit,
        })
    }

    /// Builds from `(log p_n, log(1 - p_n))` pairs.
    pub(crate) fn from_logs(
        t: f64,
        logs: Vec<(f64, f64)>,
        widths: Vec<f64>,
        tail_bound: f64,
        method: MarginalMethod,
    ) -> Self {
        Self {
            t,
            probs: logs.iter().map(|&(lp, _)| lp.exp()).collect(),
            ln_probs: logs.iter().map(|&(lp, _)| lp).collect(),
            ln_complements: logs.iter().map(|&(_, lq)| lq).collect(),
            widths: widths.into(),
            tail_bound,
            method,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ln_probs(&self) -> &[f64] {
        &self.ln_probs
    }

    /// `log(1 - p_n)`, accurate even where `p_n` rounds to one.
    pub fn ln_complements(&self) -> &[f64] {
        &self.ln_complements
    }

    /// Enclosure widths `p_n^+ - p_n^-` (zero for closed-form engines).
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Certified upper bound on `Σ_{n>N} p_n(t)`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn method(&self) -> MarginalMethod {
        self.method
    }

    pub(crate) fn set_method(&mut self, method: MarginalMethod) {
        self.method = method;
    }

    /// `U(t) = Σ p_n`; the error bar is the truncation bound plus half the
    /// summed enclosure widths.
    pub fn renewal_mean(&self) -> Bounded {
        let value = self.probs.iter().copied().collect::<NeumaierSum>().value();
        let width: f64 = self.widths.iter().sum();
        Bounded {
            value,
            error: self.tail_bound + 0.5 * width,
        }
    }

    /// `Var N̂(t) = Σ p_n (1 - p_n)`, with the same error bar as the mean.
    pub fn renewal_variance(&self) -> Bounded {
        let value = self
            .probs
            .iter()
            .zip(self.ln_complements.iter())
            .map(|(&p, &lq)| p * lq.exp())
            .collect::<NeumaierSum>()
            .value();
        let width: f64 = self.widths.iter().sum();
        Bounded {
            value,
            error: self.tail_bound + 0.5 * width,
        }
    }

    /// Rows `(n, p_n, enclosure_width)` for export.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.probs
            .iter()
            .zip(self.widths.iter())
            .enumerate()
            .map(|(i, (&p, &w))| (i + 1, p, w))
    }
}

/// Hard cap on the number of marginals either engine will produce.
pub const MAX_TERMS: usize = 50_000_000;

/// Marginals for gamma(`shape`, 1) steps, `p_n(t) = P(n·shape, t)`.
///
/// Truncation uses the Chernoff bound `p_n(t) ≤ e^{λt}(1+λ)^{-nk}`, with `λ`
/// optimal for `n = N + 1`, summed as a geometric series in `n`.
pub fn marginals_exact_gamma(shape: f64, t: f64, eps_mass: f64) -> Result<WalkMarginals> {
    marginals_exact_gamma_min_len(shape, t, eps_mass, 0)
}

/// As [`marginals_exact_gamma`], computing at least `min_len` terms so that
/// counts beyond the truncation point can be addressed.
pub fn marginals_exact_gamma_min_len(
    shape: f64,
    t: f64,
    eps_mass: f64,
    min_len: usize,
) -> Result<WalkMarginals> {
    if !(shape > 0.0 && shape.is_finite()) {
        return domain(format!("gamma shape must be positive, got {shape}"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    if !(eps_mass > 0.0) {
        return domain(format!("eps_mass must be positive, got {eps_mass}"));
    }
    let mut logs = Vec::new();
    let tail_bound = loop {
        let n = logs.len() + 1;
        logs.push(ln_regularized_gamma_pq(n as f64 * shape, t)?);
        if let Some(bound) = gamma_chernoff_remainder(shape, t, n) {
            if bound < eps_mass && n >= min_len {
                break bound;
            }
        }
        if n >= MAX_TERMS {
            return Err(Error::Range(format!(
                "more than {MAX_TERMS} marginals needed at t = {t}"
            )));
        }
    };
    let widths = vec![0.0; logs.len()];
    Ok(WalkMarginals::from_logs(
        t,
        logs,
        widths,
        tail_bound,
        MarginalMethod::ExactGamma,
    ))
}

/// Bound on `Σ_{n>N} P{gamma(nk) ≤ t}`; `None` while the Chernoff tilt is
/// not yet positive.
fn gamma_chernoff_remainder(shape: f64, t: f64, big_n: usize) -> Option<f64> {
    let a = (big_n + 1) as f64 * shape;
    let lambda = a / t - 1.0;
    if lambda <= 0.0 {
        return None;
    }
    let l1 = lambda.ln_1p();
    let log_first = lambda * t - a * l1;
    let log_ratio = -shape * l1;
    Some((log_first - (-(log_ratio.exp_m1())).ln()).exp())
}

/// Settings for [`marginals_lattice`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    /// Lattice width; `None` selects `t / cells`.
    pub h: Option<f64>,
    /// Number of cells used when `h` is `None`.
    pub cells: usize,
    /// Target for the truncated mass `Σ_{n>N} p_n`.
    pub eps_mass: f64,
    /// Largest admissible enclosure width.
    pub width_limit: f64,
    /// Minimum number of marginals to produce.
    pub min_len: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self {
            h: None,
            cells: 1 << 16,
            eps_mass: 1e-8,
            width_limit: 1e-2,
            min_len: 0,
        }
    }
}

impl LatticeOptions {
    pub fn with_h(h: f64) -> Self {
        Self {
            h: Some(h),
            ..Self::default()
        }
    }
}

/// Marginals by lattice convolution for any step law with a distribution
/// function. The returned `p_n` are enclosure midpoints; `p_1` is exact.
///
/// Truncation follows `Σ_{n>N} p_n ≤ p_N^+ r/(1-r)` with `r` the last ratio
/// of upper enclosures inflated by 10%.
pub fn marginals_lattice(
    step: &StepDistribution,
    t: f64,
    options: LatticeOptions,
) -> Result<WalkMarginals> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    let h = options.h.unwrap_or(t / options.cells as f64);
    if !(h > 0.0 && h.is_finite()) {
        return domain(format!("lattice width must be positive, got {h}"));
    }
    if !(options.eps_mass > 0.0) {
        return domain(format!(
            "eps_mass must be positive, got {}",
            options.eps_mass
        ));
    }
    let m = (t / h).floor() as usize;
    if m > 1 << 26 {
        return domain(format!("lattice with {m} cells is too large"));
    }

    // tails[j] = P{ξ ≥ jh}, cdfs[j] = P{ξ < jh} for j = 0..=m+1
    let mut cdfs = Vec::with_capacity(m + 2);
    let mut tails = Vec::with_capacity(m + 2);
    for j in 0..=m + 1 {
        let (f, s) = step.cdf_and_tail(j as f64 * h)?;
        cdfs.push(f);
        tails.push(s);
    }
    let cell: Vec<f64> = (0..=m)
        .map(|i| {
            if cdfs[i + 1] < 0.5 {
                cdfs[i + 1] - cdfs[i]
            } else {
                tails[i] - tails[i + 1]
            }
            .max(0.0)
        })
        .collect();

    let (first_p, first_q) = step.cdf_and_tail(t)?;
    let mut logs = vec![(first_p.ln(), first_q.ln())];
    let mut widths = vec![0.0];

    let mut conv = Convolver::new(&cell);
    let mut dist = cell.clone();
    // P{S_n^h > mh} for the current n
    let mut exceed = tails[m + 1];
    let mut previous_upper = 1.0 - exceed;
    let mut current_upper = previous_upper;
    let tail_bound;
    let mut n = 1usize;
    loop {
        if n >= 2 && n >= options.min_len {
            let r = 1.1 * current_upper / previous_upper;
            if current_upper == 0.0 {
                tail_bound = 0.0;
                break;
            }
            if r < 1.0 {
                let bound = current_upper * r / (1.0 - r);
                if bound < options.eps_mass {
                    tail_bound = bound;
                    break;
                }
            }
        }
        if n >= MAX_TERMS {
            return Err(Error::Range(format!(
                "more than {MAX_TERMS} marginals needed at t = {t}"
            )));
        }

        // advance S_n^h -> S_{n+1}^h
        let overflow: NeumaierSum = dist
            .iter()
            .enumerate()
            .map(|(i, &d)| d * tails[m - i + 1])
            .collect();
        exceed += overflow.value();
        dist = conv.convolve(&dist);
        n += 1;

        let split = m.saturating_sub(n) + usize::from(m >= n);
        let lower: f64 = if m >= n {
            dist[..split]
                .iter()
                .copied()
                .collect::<NeumaierSum>()
                .value()
        } else {
            0.0
        };
        let band: f64 = dist[split.min(m + 1)..]
            .iter()
            .copied()
            .collect::<NeumaierSum>()
            .value();
        if band > options.width_limit {
            return Err(Error::LatticeTooCoarse {
                n,
                width: band,
                limit: options.width_limit,
            });
        }
        let mid = lower + 0.5 * band;
        let complement = exceed + 0.5 * band;
        let prev_lp = logs.last().map(|l| l.0).unwrap_or(0.0);
        let lp = mid.ln().min(prev_lp);
        logs.push((lp, complement.ln()));
        widths.push(band);

        previous_upper = current_upper;
        current_upper = lower + band;
    }

    Ok(WalkMarginals::from_logs(
        t,
        logs,
        widths,
        tail_bound,
        MarginalMethod::Lattice,
    ))
}

/// Truncated linear convolution with a fixed kernel on `0..len`.
struct Convolver {
    kernel: Vec<f64>,
    spectrum: Vec<Complex<f64>>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
    buffer: Vec<Complex<f64>>,
}

/// Below this length direct summation beats the transform.
const DIRECT_LIMIT: usize = 512;

impl Convolver {
    fn new(kernel: &[f64]) -> Self {
        let len = kernel.len();
        if len <= DIRECT_LIMIT {
            return Self {
                kernel: kernel.to_vec(),
                spectrum: Vec::new(),
                forward: None,
                inverse: None,
                buffer: Vec::new(),
            };
        }
        let size = smooth_size(2 * len);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut spectrum = vec![Complex::new(0.0, 0.0); size];
        for (s, &k) in spectrum.iter_mut().zip(kernel) {
            s.re = k;
        }
        forward.process(&mut spectrum);
        Self {
            kernel: kernel.to_vec(),
            spectrum,
            forward: Some(forward),
            inverse: Some(inverse),
            buffer: vec![Complex::new(0.0, 0.0); size],
        }
    }

    fn convolve(&mut self, x: &[f64]) -> Vec<f64> {
        let len = self.kernel.len();
        match (&self.forward, &self.inverse) {
            (Some(fwd), Some(inv)) => {
                let size = self.buffer.len();
                for (i, b) in self.buffer.iter_mut().enumerate() {
                    *b = Complex::new(if i < len { x[i] } else { 0.0 }, 0.0);
                }
                fwd.process(&mut self.buffer);
                for (b, s) in self.buffer.iter_mut().zip(&self.spectrum) {
                    *b *= *s;
                }
                inv.process(&mut self.buffer);
                let scale = 1.0 / size as f64;
                self.buffer[..len]
                    .iter()
                    .map(|c| (c.re * scale).max(0.0))
                    .collect()
            }
            _ => (0..len)
                .map(|i| {
                    (0..=i)
                        .map(|j| x[j] * self.kernel[i - j])
                        .collect::<NeumaierSum>()
                        .value()
                })
                .collect(),
        }
    }
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn smooth_size(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erlang_small_n() {
        let m = marginals_exact_gamma(1.0, 1.0, 1e-12).unwrap();
        let e = (-1f64).exp();
        assert!((m.probs()[0] - (1.0 - e)).abs() < 1e-15);
        assert!((m.probs()[1] - (1.0 - 2.0 * e)).abs() < 1e-15);
        assert!(m.tail_bound() < 1e-12);
    }

    #[test]
    fn exponential_renewal_mean_is_t() {
        for t in [1.0, 50.0, 100.0] {
            let m = marginals_exact_gamma(1.0, t, 1e-12).unwrap();
            let u = m.renewal_mean();
            assert!((u.value - t).abs() < 1e-9 + u.error, "t = {t}: {}", u.value);
        }
    }

    #[test]
    fn exact_marginals_nonincreasing() {
        for k in [0.3, 1.0, 2.5] {
            let m = marginals_exact_gamma(k, 20.0, 1e-12).unwrap();
            assert!(m.probs().windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn chernoff_bound_dominates_remainder() {
        let (k, t) = (1.0, 30.0);
        let m = marginals_exact_gamma(k, t, 1e-6).unwrap();
        let n = m.len();
        let rest: f64 = (n + 1..n + 400)
            .map(|j| ln_regularized_gamma_pq(j as f64 * k, t).unwrap().0.exp())
            .sum();
        assert!(rest <= m.tail_bound(), "{rest} > {}", m.tail_bound());
    }

    #[test]
    fn complements_survive_near_one() {
        let m = marginals_exact_gamma(1.0, 2000.0, 1e-12).unwrap();
        assert_eq!(m.probs()[0], 1.0);
        assert!((m.ln_complements()[0] + 2000.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_first_term_is_exact() {
        let step = StepDistribution::pareto(3.0, 1.0).unwrap();
        let m = marginals_lattice(&step, 10.0, LatticeOptions::with_h(1e-3)).unwrap();
        assert_eq!(m.probs()[0], step.cdf(10.0).unwrap());
        assert_eq!(m.widths()[0], 0.0);
    }

    #[test]
    fn lattice_matches_exact_gamma() {
        let step = StepDistribution::gamma(1.0).unwrap();
        let lat = marginals_lattice(&step, 10.0, LatticeOptions::with_h(1e-3)).unwrap();
        let ex = marginals_exact_gamma(1.0, 10.0, 1e-12).unwrap();
        for n in 0..lat.len().min(ex.len()) {
            assert!((lat.probs()[n] - ex.probs()[n]).abs() < 5e-3);
        }
    }

    #[test]
    fn direct_and_fft_convolution_agree() {
        let kernel: Vec<f64> = (0..700)
            .map(|i| (-(i as f64) / 50.0).exp() / 50.0)
            .collect();
        let mut fft = Convolver::new(&kernel);
        let direct: Vec<f64> = (0..700)
            .map(|i| (0..=i).map(|j| kernel[j] * kernel[i - j]).sum())
            .collect();
        let got = fft.convolve(&kernel);
        for (a, b) in got.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(1024), 1024);
        assert_eq!(smooth_size(1025), 1080);
        let n = smooth_size(131074);
        assert!((131074..140000).contains(&n));
        let mut r = n;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        assert_eq!(r, 1);
    }

    #[test]
    fn variance_below_mean() {
        let m = marginals_exact_gamma(0.5, 20.0, 1e-12).unwrap();
        assert!(m.renewal_variance().value <= m.renewal_mean().value);
    }

    #[test]
    fn zero_probabilities() {
        let m = WalkMarginals::from_probs(1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(m.renewal_mean().value, 0.0);
        assert_eq!(m.renewal_variance().value, 0.0);
        assert!(WalkMarginals::from_probs(1.0, &[1.5]).is_err());
    }
}
