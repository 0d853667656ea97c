//! Exact distribution of `Y = Σ η_n` for independent `η_n ~ Bernoulli(p_n)`.
//!
//! With odds `q_n = p_n/(1 - p_n)`,
//!
//! ```text
//! P{Y = k} = Π (1 - p_n) · e_k(q_1, …, q_N)
//! ```
//!
//! where `e_k` is the elementary symmetric polynomial. The recurrence
//! `e_k ← e_k + q_j e_{k-1}` is run entirely on logarithms, so every entry
//! carries full relative precision no matter how far it sits below the row
//! maximum.

use crate::error::{domain, Error, Result};
use crate::marginals::{Bounded, WalkMarginals};
use crate::special::normal_pdf;
use crate::sum::{log_add_exp, log_sum_exp, NeumaierSum};

/// `log P{Y = k}` for `k = 0..=k_max` with the Bernoulli moments.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPMF {
    log_values: Vec<f64>,
    mean: f64,
    variance: f64,
    truncation: f64,
}

impl LogPMF {
    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// `log P{Y = k}`; `-∞` beyond `k_max`.
    pub fn log_prob(&self, k: usize) -> f64 {
        self.log_values.get(k).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn k_max(&self) -> usize {
        self.log_values.len() - 1
    }

    /// `Σ p_n`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `Σ p_n (1 - p_n)`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Mass `Σ_{n>N} p_n` dropped by the marginal truncation.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// `log Σ_k P{Y = k}` over the stored range.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.log_values)
    }

    /// Mean and variance implied by the stored values.
    pub fn moments(&self) -> (f64, f64) {
        let mut m = NeumaierSum::new();
        for (k, &l) in self.log_values.iter().enumerate() {
            m.add(k as f64 * l.exp());
        }
        let mean = m.value();
        let mut v = NeumaierSum::new();
        for (k, &l) in self.log_values.iter().enumerate() {
            let d = k as f64 - mean;
            v.add(d * d * l.exp());
        }
        (mean, v.value())
    }

    pub fn mode(&self) -> usize {
        self.log_values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &l)| {
                if l > best.1 {
                    (k, l)
                } else {
                    best
                }
            })
            .0
    }

    /// Rows `(k, log P{Y = k})` for export.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.log_values.iter().copied().enumerate()
    }
}

/// Exact `log P{Y = k}` for `k = 0..=k_max`.
///
/// Entries with `p_n = 1` shift the count by one each; entries with
/// `p_n = 0` are skipped.
pub fn exact_log_pmf(m: &WalkMarginals, k_max: usize) -> Result<LogPMF> {
    if k_max > m.len() {
        return domain(format!(
            "k_max = {k_max} exceeds the number of marginals {}",
            m.len()
        ));
    }
    let mut ones = 0usize;
    let mut log_base = NeumaierSum::new();
    let mut odds = Vec::with_capacity(m.len());
    for (&lp, &lq) in m.ln_probs().iter().zip(m.ln_complements()) {
        if lq == f64::NEG_INFINITY {
            ones += 1;
        } else if lp > f64::NEG_INFINITY {
            log_base.add(lq);
            odds.push(lp - lq);
        }
    }

    let width = (k_max + 1).saturating_sub(ones);
    let mut e = vec![f64::NEG_INFINITY; width];
    if width > 0 {
        e[0] = 0.0;
    }
    for (j, &lo) in odds.iter().enumerate() {
        let top = (j + 1).min(width.saturating_sub(1));
        for k in (1..=top).rev() {
            e[k] = log_add_exp(e[k], e[k - 1] + lo);
        }
    }
    let base = log_base.value();
    let mut log_values = vec![f64::NEG_INFINITY; k_max + 1];
    for (k, v) in e.into_iter().enumerate() {
        log_values[k + ones] = v + base;
    }
    let mean = m.renewal_mean().value;
    let variance = m.renewal_variance().value;
    Ok(LogPMF {
        log_values,
        mean,
        variance,
        truncation: m.tail_bound(),
    })
}

/// `log P{Y = 0} = Σ log(1 - p_n)`; the error bar bounds the contribution
/// of the truncated indices, `Σ_{n>N} -log(1 - p_n) ≤ tail/(1 - p_N)`.
pub fn log_prob_zero(m: &WalkMarginals) -> Bounded {
    let lqs = m.ln_complements();
    if lqs.contains(&f64::NEG_INFINITY) {
        return Bounded {
            value: f64::NEG_INFINITY,
            error: 0.0,
        };
    }
    let value = lqs.iter().copied().collect::<NeumaierSum>().value();
    let last = lqs.last().map(|l| l.exp()).unwrap_or(1.0);
    Bounded {
        value,
        error: m.tail_bound() / last,
    }
}

/// `log P{Y = k}` for the full (untruncated) array, with an error bar
/// covering the indices beyond the stored marginals.
///
/// With `Y = Y_N + R`, `R` the count among the dropped indices, log-concavity
/// of `Y_N` gives `P{Y_N = k - j} ≤ r^j P{Y_N = k}` for
/// `r = P{Y_N = k-1}/P{Y_N = k}`, so
/// `(1 - τ) P{Y_N = k} ≤ P{Y = k} ≤ e^{(r-1)⁺ τ} P{Y_N = k}` where `τ`
/// bounds `Σ_{n>N} p_n`.
pub fn point_log_prob(m: &WalkMarginals, k: usize) -> Result<Bounded> {
    let pmf = exact_log_pmf(m, k)?;
    let lk = pmf.log_prob(k);
    let tau = m.tail_bound();
    let r = if k == 0 {
        0.0
    } else {
        (pmf.log_prob(k - 1) - lk).exp()
    };
    let upper = ((r - 1.0).max(0.0) * tau).min(f64::MAX);
    let lower = -(-tau.min(0.5)).ln_1p();
    Ok(Bounded {
        value: lk,
        error: upper.max(lower),
    })
}

/// Evaluates [`point_log_prob`] on marginals from `build(min_len)`, doubling
/// `min_len` from `k + 1` until the error bar is below `tol`.
pub fn certified_point_log_prob<B>(k: usize, tol: f64, mut build: B) -> Result<Bounded>
where
    B: FnMut(usize) -> Result<WalkMarginals>,
{
    let mut len = k + 1;
    loop {
        let m = build(len)?;
        let v = point_log_prob(&m, k)?;
        if v.error <= tol || v.value == f64::NEG_INFINITY {
            return Ok(v);
        }
        if len > 1 << 26 {
            return Err(Error::Range(format!(
                "log P{{Y = {k}}} not certified to {tol:e}; error bar {:e}",
                v.error
            )));
        }
        len = 2 * len.max(m.len());
    }
}

/// Log-probability of the configuration `η_1 = … = η_M = 1`, `η_j = 0` for
/// `j > M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantProduct {
    pub log_value: f64,
    /// First index whose factor vanishes, when the product is zero.
    pub vanishing_factor: Option<usize>,
}

/// `Σ_{n≤M} log p_n + Σ_{j>M} log(1 - p_j)`, a lower bound for
/// `log P{Y = M}`.
pub fn dominant_product(m: &WalkMarginals, mcount: usize) -> Result<DominantProduct> {
    if mcount > m.len() {
        return domain(format!(
            "mcount = {mcount} exceeds the number of marginals {}",
            m.len()
        ));
    }
    let mut s = NeumaierSum::new();
    for (i, &lp) in m.ln_probs()[..mcount].iter().enumerate() {
        if lp == f64::NEG_INFINITY {
            return Ok(DominantProduct {
                log_value: f64::NEG_INFINITY,
                vanishing_factor: Some(i + 1),
            });
        }
        s.add(lp);
    }
    for (i, &lq) in m.ln_complements()[mcount..].iter().enumerate() {
        if lq == f64::NEG_INFINITY {
            return Ok(DominantProduct {
                log_value: f64::NEG_INFINITY,
                vanishing_factor: Some(mcount + i + 1),
            });
        }
        s.add(lq);
    }
    Ok(DominantProduct {
        log_value: s.value(),
        vanishing_factor: None,
    })
}

/// `sup_k | σ P{Y = k} - φ((k - E Y)/σ) |` over `k` within twelve standard
/// deviations of the mean, `φ` the standard normal density.
pub fn local_clt_error(m: &WalkMarginals) -> Result<f64> {
    let mean = m.renewal_mean().value;
    let var = m.renewal_variance().value;
    if !(var > 1e-12) {
        return Err(Error::Degenerate(format!(
            "variance {var:e} too small for a local CLT comparison"
        )));
    }
    let sd = var.sqrt();
    let lo = (mean - 12.0 * sd).floor().max(0.0) as usize;
    let hi = ((mean + 12.0 * sd).ceil() as usize).min(m.len());
    let pmf = exact_log_pmf(m, hi)?;
    Ok((lo..=hi)
        .map(|k| (sd * pmf.log_prob(k).exp() - normal_pdf((k as f64 - mean) / sd)).abs())
        .fold(0.0, f64::max))
}
