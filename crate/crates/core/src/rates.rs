//! Rate functions for local deviations of decoupled renewal counts.
//!
//! * `f_α(s) = ∫₀^∞ log((e^s - 1) P{Z_α > y} + 1) dy` and its conjugate
//!   `J_α(b) = sup_s (bs - f_α(s))`, where `Z_0` is unit exponential and
//!   `Z_α` for `α ∈ (0, 1)` is the mean-one inverse stable variable.
//! * Cramér rates `I(x) = sup_{s≥0}(sx - log Λ(s))` for `x ≥ μ` and
//!   `I*(x) = sup_{s≤0}(sx - log Λ(s))` for `x ≤ μ`.
//! * Deviation integrals `∫ y I(1/y) dy` and `∫ y I*(1/y) dy`, the
//!   `t²`-coefficients for light-tailed steps.
//! * Closed-form rates for regularly varying and semi-exponential tails.
//!
//! The `f_α` integrands are evaluated as `log(P{Z ≤ y} + e^s P{Z > y})`
//! with both probabilities accurate where small, so no sign of `s` cancels.

use std::cell::Cell;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadResult, Tolerance};
use crate::roots::{grow_bracket, solve_increasing, RootTolerance};
use crate::special::{inverse_stable_mean, inverse_stable_pair};
use crate::step::{Cumulant, StepDistribution};
use crate::sum::log_add_exp;

/// Bound on `|s|` during conjugate searches.
pub const MAX_S: f64 = 700.0;

/// Tail level below which `f_α` integrands are treated as zero.
const TAIL_CUTOFF: f64 = 1e-14;

const F_TOL: Tolerance = Tolerance {
    abs: 1e-12,
    rel: 1e-13,
    max_intervals: 10_000,
};

/// A point of a convex conjugate `g*(b) = sup_s (bs - g(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreSolution {
    pub b: f64,
    /// Maximizer, `g'(s_b) = b`.
    pub s_b: f64,
    /// `g*(b) = b s_b - g(s_b)`.
    pub rate: f64,
    /// `g(s_b)`.
    pub f_at_s: f64,
    /// `g''(s_b)`.
    pub second_deriv: f64,
}

impl LegendreSolution {
    fn at(b: f64, s_b: f64, f_at_s: f64, second_deriv: f64) -> Self {
        Self {
            b,
            s_b,
            rate: b * s_b - f_at_s,
            f_at_s,
            second_deriv,
        }
    }
}

/// Law of `Z_α`: unit exponential for `α = 0`, otherwise mean-one inverse
/// stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLaw {
    alpha: f64,
}

impl LimitLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return domain(format!("alpha must lie in [0, 1), got {alpha}"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(P{Z ≤ y}, P{Z > y})`.
    pub fn pair(&self, y: f64) -> Result<(f64, f64)> {
        if self.alpha == 0.0 {
            Ok((-(-y).exp_m1(), (-y).exp()))
        } else {
            inverse_stable_pair(self.alpha, y)
        }
    }

    /// Smallest `y = 2^j` with `weight · P{Z > y} < TAIL_CUTOFF`.
    fn cutoff(&self, weight: f64) -> Result<f64> {
        let mut y: f64 = 1.0;
        while y < 1e6 {
            if weight * self.pair(y)?.1 < TAIL_CUTOFF {
                return Ok(y);
            }
            y *= 2.0;
        }
        Err(Error::Range(format!(
            "tail of Z_{} still above cutoff at y = {y}",
            self.alpha
        )))
    }
}

/// Integrates a fallible integrand; the first error aborts the result.
fn integrate_fallible<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = Cell::new(None);
    let r = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                let first = failure.take().unwrap_or(e);
                failure.set(Some(first));
                0.0
            }
        },
        a,
        b,
        tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => r,
    }
}

/// `(log(F + e^s S), log S, log F)` at `y`.
fn integrand_logs(law: &LimitLaw, s: f64, y: f64) -> Result<(f64, f64, f64)> {
    let (f, sv) = law.pair(y)?;
    let (lf, ls) = (f.ln(), sv.ln());
    Ok((log_add_exp(lf, s + ls), ls, lf))
}

fn f_integral<G>(alpha: f64, s: f64, g: G) -> Result<f64>
where
    G: Fn(f64, f64, f64) -> f64,
{
    if !s.is_finite() {
        return domain(format!("f_alpha needs finite s, got {s}"));
    }
    let law = LimitLaw::new(alpha)?;
    let y_max = law.cutoff(s.max(0.0).exp())?;
    let r = integrate_fallible(
        |y| {
            let (lz, ls, lf) = integrand_logs(&law, s, y)?;
            Ok(g(lz, ls, lf))
        },
        0.0,
        y_max,
        F_TOL,
    )?;
    Ok(r.value)
}

/// `f_α(s)`.
pub fn f_alpha(alpha: f64, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    f_integral(alpha, s, |lz, _, _| lz)
}

/// `f_α'(s) = ∫ e^s S / (F + e^s S) dy`.
pub fn f_alpha_prime(alpha: f64, s: f64) -> Result<f64> {
    f_integral(alpha, s, |lz, ls, _| (s + ls - lz).exp())
}

/// `f_α''(s) = ∫ e^s S F / (F + e^s S)² dy`.
pub fn f_alpha_second(alpha: f64, s: f64) -> Result<f64> {
    f_integral(alpha, s, |lz, ls, lf| (s + ls + lf - 2.0 * lz).exp())
}

/// `J_α(b) = sup_s (bs - f_α(s))` with its maximizer `s_b`.
pub fn conjugate_j(alpha: f64, b: f64) -> Result<LegendreSolution> {
    LimitLaw::new(alpha)?;
    if !(b > 0.0 && b.is_finite()) {
        return domain(format!("level b must be positive, got {b}"));
    }
    if b == 1.0 {
        return Ok(LegendreSolution::at(
            b,
            0.0,
            0.0,
            f_alpha_second(alpha, 0.0)?,
        ));
    }
    let (lo, hi) = grow_bracket(|s| f_alpha_prime(alpha, s), b, 0.0, 0.5, -MAX_S, MAX_S)?;
    let s_b = solve_increasing(
        |s| Ok((f_alpha_prime(alpha, s)?, f_alpha_second(alpha, s)?)),
        b,
        lo,
        hi,
        RootTolerance {
            ftol: 1e-11 * b.max(1.0),
            ..RootTolerance::default()
        },
    )?;
    Ok(LegendreSolution::at(
        b,
        s_b,
        f_alpha(alpha, s_b)?,
        f_alpha_second(alpha, s_b)?,
    ))
}

fn cumulant_root(step: &StepDistribution, x: f64, lo: f64, hi: f64) -> Result<LegendreSolution> {
    let s = solve_increasing(
        |s| {
            let c = step.cumulant(s)?;
            Ok((c.slope, c.curvature))
        },
        x,
        lo,
        hi,
        RootTolerance {
            ftol: 1e-14 * x.max(1.0),
            ..RootTolerance::default()
        },
    )?;
    let Cumulant {
        value, curvature, ..
    } = step.cumulant(s)?;
    Ok(LegendreSolution::at(x, s, value, curvature))
}

/// Upper Cramér rate `I(x)` for `μ ≤ x < A_0`; needs `B > 0`.
pub fn cramer_rate_i(step: &StepDistribution, x: f64) -> Result<LegendreSolution> {
    let lt = step.light_tail_analysis();
    let mu = step.mean();
    if !(lt.b > 0.0) {
        return domain(format!(
            "{} has no exponential moments (B = 0)",
            step.name()
        ));
    }
    if !(x >= mu && x < lt.a0) {
        return domain(format!("I(x) needs mu <= x < A_0 = {}, got x = {x}", lt.a0));
    }
    if x == mu {
        return Ok(LegendreSolution::at(x, 0.0, 0.0, step.variance()));
    }
    // approach B from below until m(s) passes x
    let mut hi = 0.0;
    let mut gap = if lt.b.is_finite() { lt.b } else { 1.0 };
    loop {
        gap *= 0.5;
        let cand = if lt.b.is_finite() {
            lt.b - gap
        } else {
            hi + 1.0 / gap
        };
        if cand <= hi || gap < 1e-300 {
            return Err(Error::Bracket {
                target: x,
                low: mu,
                high: step.cumulant(hi)?.slope,
            });
        }
        hi = cand;
        if step.cumulant(hi)?.slope >= x {
            break;
        }
    }
    cumulant_root(step, x, 0.0, hi)
}

/// Lower Cramér rate `I*(x)` for `0 < x ≤ μ` with `P{ξ ≤ x} > 0`.
pub fn cramer_rate_i_star(step: &StepDistribution, x: f64) -> Result<LegendreSolution> {
    let mu = step.mean();
    if !(x > 0.0 && x <= mu) {
        return domain(format!("I*(x) needs 0 < x <= mu = {mu}, got x = {x}"));
    }
    if !(x > step.support_min()) {
        return domain(format!("I*(x) needs P{{xi <= x}} > 0, fails at x = {x}"));
    }
    if x == mu {
        return Ok(LegendreSolution::at(x, 0.0, 0.0, step.variance()));
    }
    let (lo, hi) = grow_bracket(|s| Ok(step.cumulant(s)?.slope), x, 0.0, 1.0, -1e12, 0.0)?;
    cumulant_root(step, x, lo, hi)
}

const DEVIATION_TOL: Tolerance = Tolerance {
    abs: 1e-12,
    rel: 1e-12,
    max_intervals: 10_000,
};

/// `∫_{b/μ}^{1/μ} y I(1/y) dy` for `b < 1` and `∫_{1/μ}^{b/μ} y I*(1/y) dy`
/// for `b > 1`.
pub fn deviation_integral(step: &StepDistribution, b: f64) -> Result<f64> {
    let mu = step.mean();
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Hypothesis(format!(
            "finite mean required, mu = {mu}"
        )));
    }
    if !(b > 0.0 && b.is_finite()) || b == 1.0 {
        return domain(format!("level b must be positive and != 1, got {b}"));
    }
    if b < 1.0 {
        let lt = step.light_tail_analysis();
        if !(lt.b > 0.0) {
            return Err(Error::Hypothesis(
                "exponential moments required (B > 0)".into(),
            ));
        }
        if !(mu / b < lt.a0) {
            return Err(Error::Hypothesis(format!(
                "mu/b < A_0 fails: mu/b = {}, A_0 = {}",
                mu / b,
                lt.a0
            )));
        }
        let r = integrate_fallible(
            |y| Ok(y * cramer_rate_i(step, (1.0 / y).max(mu))?.rate),
            b / mu,
            1.0 / mu,
            DEVIATION_TOL,
        )?;
        Ok(r.value)
    } else {
        if !(mu / b > step.support_min()) {
            return Err(Error::Hypothesis(format!(
                "P{{xi <= mu/b}} > 0 fails at mu/b = {}",
                mu / b
            )));
        }
        let r = integrate_fallible(
            |y| Ok(y * cramer_rate_i_star(step, (1.0 / y).min(mu))?.rate),
            1.0 / mu,
            b / mu,
            DEVIATION_TOL,
        )?;
        Ok(r.value)
    }
}

/// `(α - 1)(1 - b)/μ`, the `t log t` rate for regularly varying tails of
/// index `α > 1` and `b ∈ (0, 1)`.
pub fn heavy_rate_regular(alpha: f64, b: f64, mu: f64) -> Result<f64> {
    if !(alpha > 1.0 && b > 0.0 && b < 1.0 && mu > 0.0) {
        return domain(format!(
            "need alpha > 1, b in (0,1), mu > 0; got ({alpha}, {b}, {mu})"
        ));
    }
    Ok((alpha - 1.0) * (1.0 - b) / mu)
}

/// `(1 - b)^{α+1}/(μ(α + 1))`, the `t^{α+1}/ℓ` rate for semi-exponential
/// tails with `α ∈ (0, 1)` and `b ∈ [0, 1)`.
pub fn semiexp_rate(alpha: f64, b: f64, mu: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0 && (0.0..1.0).contains(&b) && mu > 0.0) {
        return domain(format!(
            "need alpha in (0,1), b in [0,1), mu > 0; got ({alpha}, {b}, {mu})"
        ));
    }
    Ok((1.0 - b).powf(alpha + 1.0) / (mu * (alpha + 1.0)))
}

/// `|b - 1|/(2μ)`, the `t log t` coefficient for light-tailed steps.
pub fn second_order_coeff(b: f64, mu: f64) -> Result<f64> {
    if !(b > 0.0 && b != 1.0 && mu > 0.0) {
        return domain(format!("need b > 0, b != 1, mu > 0; got ({b}, {mu})"));
    }
    Ok((b - 1.0).abs() / (2.0 * mu))
}

/// Coefficient of `t^ρ log t` for the radii count of the determinantal
/// process with exponent `ρ`: `second_order_coeff(b, 2/ρ)` after the time
/// change `t ↦ t^ρ`, i.e. `|b - 1|ρ²/4`.
pub fn radii_second_order_coeff(b: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return domain(format!("rho must be positive, got {rho}"));
    }
    Ok(rho * second_order_coeff(b, 2.0 / rho)?)
}

/// `∫₀^∞ P{V > y} P{V ≤ y} dy` with `V = W_α^←(1)` for `α ∈ (0,1)` and
/// `V = Z_0` for `α = 0`.
pub fn variance_constant(alpha: f64) -> Result<f64> {
    let law = LimitLaw::new(alpha)?;
    let y_max = law.cutoff(1.0)?;
    let r = integrate_fallible(
        |y| {
            let (f, s) = law.pair(y)?;
            Ok(f * s)
        },
        0.0,
        y_max,
        Tolerance::new(1e-14, 1e-14),
    )?;
    let scale = if alpha == 0.0 {
        1.0
    } else {
        inverse_stable_mean(alpha)
    };
    Ok(scale * r.value)
}

/// `E exp(s Γ(1-α) W_α^←(1))`, written as
/// `1 + c ∫₀^∞ e^{cu} P{W_α^←(1) > u} du` with `c = sΓ(1-α)`.
pub fn inverse_stable_mgf(alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let law = LimitLaw::new(alpha)?;
    let mean = inverse_stable_mean(alpha);
    let c = s * crate::special::gamma(1.0 - alpha);
    // cutoff in u; P{W^← > u} = P{Z > u/mean}
    let mut u: f64 = 1.0;
    while (c * u).max(0.0).exp() * law.pair(u / mean)?.1 >= 1e-17 {
        u *= 2.0;
        if u > 1e6 {
            return Err(Error::Range(format!("no cutoff for s = {s}")));
        }
    }
    let r = integrate_fallible(
        |v| Ok((c * v).exp() * law.pair(v / mean)?.1),
        0.0,
        u,
        Tolerance::new(1e-13, 1e-13),
    )?;
    Ok(1.0 + c * r.value)
}

/// `∫₀^∞ -log P{Z_α ≤ y} dy`, the conjectured value of `lim_{b→0+} J_α(b)`.
pub fn zero_level_integral(alpha: f64) -> Result<f64> {
    let law = LimitLaw::new(alpha)?;
    let y_max = law.cutoff(1.0)?;
    let r = integrate_fallible(
        |y| {
            let (f, s) = law.pair(y)?;
            Ok(if f < 0.5 { -f.ln() } else { -(-s).ln_1p() })
        },
        0.0,
        y_max,
        Tolerance::new(1e-11, 1e-12),
    )?;
    Ok(r.value)
}
