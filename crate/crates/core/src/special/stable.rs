//! One-sided α-stable law `W_α(1)` with Laplace transform
//! `E e^{-z W} = exp(-Γ(1-α) z^α)` and the normalized inverse-stable
//! variable `Z_α = W_α^←(1) / E W_α^←(1)`.
//!
//! Distribution functions use Kanter's single-integral representation of
//! the standard positive stable law `X` (`E e^{-zX} = e^{-z^α}`):
//!
//! ```text
//! P{X ≤ x} = (1/π) ∫₀^π exp(-A(φ) x^{-α/(1-α)}) dφ,
//! A(φ) = (sin αφ / sin φ)^{1/(1-α)} · sin((1-α)φ) / sin αφ.
//! ```
//!
//! Scale: `W = c X` with `c = Γ(1-α)^{1/α}`, since
//! `E e^{-zcX} = exp(-c^α z^α)`.
//!
//! Inverse: `W` has continuous strictly increasing paths in law, so
//! `{W^←(1) > u} = {W(u) ≤ 1}`, and self-similarity `W(u) = u^{1/α} W(1)`
//! gives `P{W^←(1) > u} = P{W(1) ≤ u^{-1/α}}`. With
//! `E W^←(1) = 1/(Γ(1-α)Γ(1+α))` the Kanter exponent collapses to
//!
//! ```text
//! P{Z_α > y} = (1/π) ∫₀^π exp(-A(φ) (y / Γ(1+α))^{1/(1-α)}) dφ.
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::gamma;
use crate::error::{domain, Result};
use crate::quadrature::{integrate, Tolerance};

/// Distribution of `W_α(1)`; the Laplace exponent constant is `Γ(1-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSubordinatorLaw {
    alpha: f64,
}

impl StableSubordinatorLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Constant in `-log E e^{-zW} = normalization · z^α`.
    pub fn normalization(&self) -> f64 {
        gamma(1.0 - self.alpha)
    }

    /// `c` with `W = c X`, `X` the standard positive stable law.
    pub fn scale(&self) -> f64 {
        self.normalization().powf(1.0 / self.alpha)
    }

    /// Kanter exponent `λ` for `P{W ≤ x}`.
    fn exponent_at(&self, x: f64) -> f64 {
        let a = self.alpha;
        (x / self.scale()).powf(-a / (1.0 - a))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("stability index must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

/// `ln A(φ)` for `φ ∈ (0, π)`.
fn ln_kanter(alpha: f64, phi: f64) -> f64 {
    let sa = (alpha * phi).sin();
    let s1 = phi.sin();
    let sb = ((1.0 - alpha) * phi).sin();
    ((sa / s1).ln()) / (1.0 - alpha) + (sb / sa).ln()
}

const KANTER_TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-13,
    max_intervals: 10_000,
};

/// `(1/π) ∫₀^π exp(-λ A(φ)) dφ`.
fn kanter_lower(alpha: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if lambda == f64::INFINITY {
        return Ok(0.0);
    }
    let r = integrate(
        |phi| (-lambda * ln_kanter(alpha, phi).exp()).exp(),
        0.0,
        PI,
        KANTER_TOL,
    )?;
    Ok((r.value / PI).clamp(0.0, 1.0))
}

/// `(1/π) ∫₀^π (1 - exp(-λ A(φ))) dφ`.
fn kanter_upper(alpha: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if lambda == f64::INFINITY {
        return Ok(1.0);
    }
    let r = integrate(
        |phi| -(-lambda * ln_kanter(alpha, phi).exp()).exp_m1(),
        0.0,
        PI,
        KANTER_TOL,
    )?;
    Ok((r.value / PI).clamp(0.0, 1.0))
}

/// `P{W_α(1) ≤ x}`.
pub fn stable_cdf(law: StableSubordinatorLaw, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("stable CDF needs x > 0, got {x}"));
    }
    let lambda = law.exponent_at(x);
    if lambda > 1.0 {
        kanter_lower(law.alpha, lambda)
    } else {
        kanter_upper(law.alpha, lambda).map(|u| 1.0 - u)
    }
}

/// `P{W_α(1) > x}`, accurate in relative terms for large `x`.
pub fn stable_sf(law: StableSubordinatorLaw, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("stable survival needs x > 0, got {x}"));
    }
    let lambda = law.exponent_at(x);
    if lambda > 1.0 {
        kanter_lower(law.alpha, lambda).map(|l| 1.0 - l)
    } else {
        kanter_upper(law.alpha, lambda)
    }
}

fn inverse_exponent(alpha: f64, y: f64) -> f64 {
    (y / gamma(1.0 + alpha)).powf(1.0 / (1.0 - alpha))
}

/// `P{Z_α > y}`, the survival function of the mean-one inverse-stable
/// variable. `α = 0` (unit exponential) is the caller's responsibility.
pub fn inverse_stable_survival(alpha: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(y >= 0.0) {
        return domain(format!("inverse-stable survival needs y >= 0, got {y}"));
    }
    kanter_lower(alpha, inverse_exponent(alpha, y))
}

/// `P{Z_α ≤ y}`, accurate in relative terms for small `y`.
pub fn inverse_stable_cdf(alpha: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(y >= 0.0) {
        return domain(format!("inverse-stable CDF needs y >= 0, got {y}"));
    }
    kanter_upper(alpha, inverse_exponent(alpha, y))
}

/// `(P{Z_α ≤ y}, P{Z_α > y})`, each accurate in relative terms where it is
/// the smaller of the two.
pub fn inverse_stable_pair(alpha: f64, y: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(y >= 0.0) {
        return domain(format!("inverse-stable law needs y >= 0, got {y}"));
    }
    let lambda = inverse_exponent(alpha, y);
    if lambda > 1.0 {
        let sf = kanter_lower(alpha, lambda)?;
        Ok((1.0 - sf, sf))
    } else {
        let cdf = kanter_upper(alpha, lambda)?;
        Ok((cdf, 1.0 - cdf))
    }
}

/// `E W_α^←(1) = 1 / (Γ(1-α)Γ(1+α)) = sin(πα) / (πα)`.
pub fn inverse_stable_mean(alpha: f64) -> f64 {
    (PI * alpha).sin() / (PI * alpha)
}
