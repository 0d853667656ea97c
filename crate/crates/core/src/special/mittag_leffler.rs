//! Two-parameter Mittag-Leffler function `E_{a,b}(z) = Σ z^k / Γ(ak + b)`
//! on the real line.
//!
//! Nonnegative arguments use the Taylor series with compensated summation.
//! Negative arguments make the series alternate, so where an exact
//! positive representation exists it is used instead:
//!
//! * `0 < a < 1, b = 1`: `E_a(-x) = ∫₀^∞ e^{-rx} K_a(r) dr` with the
//!   spectral density `K_a(r) = sin(aπ) r^{a-1} / (π (r^{2a} + 2 r^a cos(aπ) + 1))`.
//!   With `r = v^{1/a}` and `v = w/(1-w)` this is an integral over `[0, 1)`
//!   of a bounded positive function.
//! * `a = 1, b >= 1`: Kummer's transformation
//!   `E_{1,b}(z) = e^z M(b-1, b, -z) / Γ(b)` whose series has nonnegative terms.
//!
//! Everywhere else the alternating series is summed and rejected with a
//! range error when cancellation would cost more than the target accuracy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::{gamma, ln_gamma};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::sum::NeumaierSum;

/// Largest `|z|` accepted.
pub const MAX_ABS_ARGUMENT: f64 = 50.0;

const TARGET_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MittagLefflerParams {
    a: f64,
    b: f64,
}

impl MittagLefflerParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return domain(format!(
                "Mittag-Leffler parameters must be positive, got ({a}, {b})"
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

pub fn mittag_leffler(params: MittagLefflerParams, z: f64) -> Result<f64> {
    let MittagLefflerParams { a, b } = params;
    if z.is_nan() {
        return domain("Mittag-Leffler argument is NaN");
    }
    if z.abs() > MAX_ABS_ARGUMENT {
        return Err(Error::Range(format!(
            "|z| = {} exceeds the supported bound {MAX_ABS_ARGUMENT}",
            z.abs()
        )));
    }
    if z == 0.0 {
        return Ok(1.0 / gamma(b));
    }
    if z < 0.0 {
        if a < 1.0 && b == 1.0 {
            return negative_axis_integral(a, -z);
        }
        if a == 1.0 && b >= 1.0 {
            return Ok(kummer_exponential(b, z));
        }
    }
    taylor(a, b, z)
}

fn taylor(a: f64, b: f64, z: f64) -> Result<f64> {
    let lnz = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = NeumaierSum::new();
    sum.add(1.0 / gamma(b));
    let mut max_ln_term = -ln_gamma(b);
    let mut prev_ln = max_ln_term;
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        let ln_term = kf * lnz - ln_gamma(a * kf + b);
        if ln_term > 700.0 {
            return Err(Error::Range(format!(
                "E_{{{a},{b}}}({z}) overflows double precision"
            )));
        }
        max_ln_term = max_ln_term.max(ln_term);
        let mag = ln_term.exp();
        sum.add(if negative && k % 2 == 1 { -mag } else { mag });
        let s = sum.value();
        if ln_term < prev_ln && mag <= 1e-17 * s.abs() {
            break;
        }
        if ln_term < -745.0 && ln_term < prev_ln {
            break;
        }
        prev_ln = ln_term;
        k += 1;
        if k > 1_000_000 {
            return Err(Error::Range(format!(
                "series for E_{{{a},{b}}}({z}) did not converge"
            )));
        }
    }
    let value = sum.value();
    // each term carries ~ (k ln|z|) ulp of relative error
    let loss = max_ln_term.exp() * f64::EPSILON * (1.0 + k as f64 * lnz.abs()) * 4.0;
    if negative && loss > TARGET_REL * value.abs() {
        return Err(Error::Range(format!(
            "alternating series for E_{{{a},{b}}}({z}) loses precision \
             (cancellation error {loss:e} vs value {value:e})"
        )));
    }
    Ok(value)
}

/// `E_{1,b}(z)` for `z < 0`, `b >= 1` via `e^z M(b-1, b, -z) / Γ(b)`.
fn kummer_exponential(b: f64, z: f64) -> f64 {
    let w = -z;
    let mut sum = NeumaierSum::new();
    let mut term = 1.0;
    sum.add(term);
    let mut k = 0.0;
    loop {
        // (b-1)_k/(b)_k w^k/k!: ratio of consecutive terms
        term *= (b - 1.0 + k) / (b + k) * w / (k + 1.0);
        k += 1.0;
        sum.add(term);
        if (term <= 1e-17 * sum.value() || term == 0.0) && k > w {
            break;
        }
        if k > 100_000.0 {
            break;
        }
    }
    z.exp() * sum.value() / gamma(b)
}

/// `E_a(-x)` for `0 < a < 1`, `x > 0`, from the spectral representation
///
/// ```text
/// E_a(-x) = sin(aπ)/(aπ) ∫₀^∞ exp(-(xu)^{1/a}) / (u² + 2u cos(aπ) + 1) du
/// ```
///
/// mapped to `[0, 1)` by `u = w/(1 - w)`.
fn negative_axis_integral(a: f64, x: f64) -> Result<f64> {
    let c = (a * PI).cos();
    let integrand = |w: f64| {
        if w >= 1.0 {
            return 0.0;
        }
        let v = w / (1.0 - w);
        let denom = w * w + 2.0 * c * w * (1.0 - w) + (1.0 - w) * (1.0 - w);
        (-(x * v).powf(1.0 / a)).exp() / denom
    };
    let r = integrate(integrand, 0.0, 1.0, Tolerance::new(1e-300, 1e-14))?;
    Ok((a * PI).sin() / (a * PI) * r.value)
}
