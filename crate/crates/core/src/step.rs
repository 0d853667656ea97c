//! Step laws `ξ ≥ 0` and their distribution and Laplace data.
//!
//! Four families are supported:
//!
//! | family        | law                                    | tail class              |
//! |---------------|----------------------------------------|-------------------------|
//! | `gamma`       | gamma(shape, 1)                        | light, `B = 1`          |
//! | `pareto`      | `P{ξ > x} = (x_m/x)^α`, `x ≥ x_m`      | regularly varying       |
//! | `weibull-type`| `P{ξ > x} = exp(-c x^α)`, `α ∈ (0,1)`  | semi-exponential        |
//! | `sqrt-exp`    | `E e^{-uξ} = e^{-√u}(1 + √u)`          | regularly varying, 3/2  |
//!
//! The last one is known only through its Laplace transform; asking for its
//! distribution function is an error.
//!
//! Config form (TOML / key-value):
//!
//! ```text
//! family = "gamma"         shape = 1.0
//! family = "pareto"        alpha = 3.0   scale = 1.0
//! family = "weibull-type"  alpha = 0.5   c = 1.0
//! family = "sqrt-exp"
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{gamma, ln_regularized_gamma_pq};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepDistribution {
    Gamma { shape: f64 },
    Pareto { alpha: f64, scale: f64 },
    WeibullType { alpha: f64, c: f64 },
    SqrtExp,
}

/// Right-tail behaviour; selects the applicable deviation regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// `P{ξ > t} ~ constant · t^{-index}`.
    RegularlyVarying { index: f64, constant: f64 },
    /// `-log P{ξ > t} = coefficient · t^index`, `index ∈ (0, 1)`.
    SemiExponential { index: f64, coefficient: f64 },
    /// `E e^{sξ} < ∞` for some `s > 0`.
    Light,
}

/// Exponential-moment data on the right half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightTailAnalysis {
    /// `sup{s ≥ 0 : Λ(s) < ∞}`.
    pub b: f64,
    /// `lim_{s → B-} Λ'(s)/Λ(s)`; equals `μ` when `B = 0`.
    pub a0: f64,
    /// Whether `B` itself belongs to the domain `{s ≥ 0 : Λ(s) < ∞}`.
    pub closed_at_b: bool,
}

/// Value of `P{ξ > t}`, flagged when only an asymptotic equivalent is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub value: f64,
    pub asymptotic_only: bool,
}

/// `(log Λ(s), m(s), m'(s))` with `m = Λ'/Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cumulant {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl StepDistribution {
    pub fn gamma(shape: f64) -> Result<Self> {
        Self::Gamma { shape }.validated()
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        Self::Pareto { alpha, scale }.validated()
    }

    pub fn weibull_type(alpha: f64, c: f64) -> Result<Self> {
        Self::WeibullType { alpha, c }.validated()
    }

    pub fn sqrt_exp() -> Self {
        Self::SqrtExp
    }

    /// Checks parameter constraints; used after deserialization.
    pub fn validated(self) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        match self {
            Self::Gamma { shape } if !ok(shape) => domain(format!("gamma shape {shape}")),
            Self::Pareto { alpha, scale } if !ok(alpha) || !ok(scale) => {
                domain(format!("pareto parameters ({alpha}, {scale})"))
            }
            Self::WeibullType { alpha, c } if !(alpha > 0.0 && alpha < 1.0) || !ok(c) => domain(
                format!("weibull-type needs alpha in (0,1), c > 0; got ({alpha}, {c})"),
            ),
            s => Ok(s),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gamma { .. } => "gamma",
            Self::Pareto { .. } => "pareto",
            Self::WeibullType { .. } => "weibull-type",
            Self::SqrtExp => "sqrt-exp",
        }
    }

    /// `μ = E ξ`, possibly infinite.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Gamma { shape } => shape,
            Self::Pareto { alpha, scale } if alpha > 1.0 => alpha * scale / (alpha - 1.0),
            Self::Pareto { .. } => f64::INFINITY,
            Self::WeibullType { alpha, c } => c.powf(-1.0 / alpha) * gamma(1.0 + 1.0 / alpha),
            Self::SqrtExp => 0.5,
        }
    }

    /// `σ² = Var ξ`, possibly infinite.
    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gamma { shape } => shape,
            Self::Pareto { alpha, scale } if alpha > 2.0 => {
                scale * scale * alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0))
            }
            Self::Pareto { .. } => f64::INFINITY,
            Self::WeibullType { alpha, c } => {
                let g1 = gamma(1.0 + 1.0 / alpha);
                c.powf(-2.0 / alpha) * (gamma(1.0 + 2.0 / alpha) - g1 * g1)
            }
            Self::SqrtExp => f64::INFINITY,
        }
    }

    /// Essential infimum of the support.
    pub fn support_min(&self) -> f64 {
        match *self {
            Self::Pareto { scale, .. } => scale,
            _ => 0.0,
        }
    }

    pub fn tail_class(&self) -> TailClass {
        match *self {
            Self::Gamma { .. } => TailClass::Light,
            Self::Pareto { alpha, scale } => TailClass::RegularlyVarying {
                index: alpha,
                constant: scale.powf(alpha),
            },
            Self::WeibullType { alpha, c } => TailClass::SemiExponential {
                index: alpha,
                coefficient: c,
            },
            Self::SqrtExp => TailClass::RegularlyVarying {
                index: 1.5,
                constant: 1.0 / (6.0 * PI.sqrt()),
            },
        }
    }

    pub fn has_cdf(&self) -> bool {
        !matches!(self, Self::SqrtExp)
    }

    /// `(P{ξ ≤ x}, P{ξ > x})`, each accurate in relative terms.
    pub fn cdf_and_tail(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return domain(format!("step CDF needs x >= 0, got {x}"));
        }
        match *self {
            Self::Gamma { shape } => {
                let (lp, lq) = ln_regularized_gamma_pq(shape, x)?;
                Ok((lp.exp(), lq.exp()))
            }
            Self::Pareto { alpha, scale } => {
                if x < scale {
                    Ok((0.0, 1.0))
                } else {
                    let l = alpha * (scale / x).ln();
                    Ok((-l.exp_m1(), l.exp()))
                }
            }
            Self::WeibullType { alpha, c } => {
                let h = c * x.powf(alpha);
                Ok((-(-h).exp_m1(), (-h).exp()))
            }
            Self::SqrtExp => Err(Error::Unavailable("distribution function")),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.cdf_and_tail(x).map(|(f, _)| f)
    }

    /// `P{ξ > t}`; the `sqrt-exp` law returns its asymptotic equivalent
    /// `(6√π)^{-1} t^{-3/2}` flagged as such.
    pub fn tail(&self, t: f64) -> Result<TailValue> {
        if !(t > 0.0) {
            return domain(format!("step tail needs t > 0, got {t}"));
        }
        if let Self::SqrtExp = self {
            return Ok(TailValue {
                value: t.powf(-1.5) / (6.0 * PI.sqrt()),
                asymptotic_only: true,
            });
        }
        let (_, q) = self.cdf_and_tail(t)?;
        Ok(TailValue {
            value: q,
            asymptotic_only: false,
        })
    }

    pub fn light_tail_analysis(&self) -> LightTailAnalysis {
        match *self {
            Self::Gamma { .. } => LightTailAnalysis {
                b: 1.0,
                a0: f64::INFINITY,
                closed_at_b: false,
            },
            _ => LightTailAnalysis {
                b: 0.0,
                a0: self.mean(),
                closed_at_b: true,
            },
        }
    }

    /// Moment generating function `Λ(s) = E e^{sξ}`; `+∞` outside the domain.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if s.is_nan() {
            return domain("Laplace argument is NaN");
        }
        match *self {
            Self::Gamma { shape } => {
                if s >= 1.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok((-shape * (-s).ln_1p()).exp())
                }
            }
            Self::SqrtExp if s > 0.0 => domain(format!(
                "sqrt-exp Laplace data exists only for s <= 0, got {s}"
            )),
            Self::SqrtExp => {
                let v = (-s).sqrt();
                Ok((-v).exp() * (1.0 + v))
            }
            _ if s > 0.0 => Ok(f64::INFINITY),
            _ if s == 0.0 => Ok(1.0),
            _ => Ok((s * self.support_min()).exp() * self.quantile_moment(s, 0)?),
        }
    }

    /// `log Λ` and its first two derivatives at `s` inside the domain.
    pub fn cumulant(&self, s: f64) -> Result<Cumulant> {
        match *self {
            Self::Gamma { shape } => {
                if !(s < 1.0) {
                    return domain(format!("gamma log-MGF finite only for s < 1, got {s}"));
                }
                let r = 1.0 / (1.0 - s);
                Ok(Cumulant {
                    value: -shape * (-s).ln_1p(),
                    slope: shape * r,
                    curvature: shape * r * r,
                })
            }
            Self::SqrtExp => {
                if s > 0.0 {
                    return domain(format!("sqrt-exp log-Laplace needs s <= 0, got {s}"));
                }
                let v = (-s).sqrt();
                Ok(Cumulant {
                    value: -v + v.ln_1p(),
                    slope: 0.5 / (1.0 + v),
                    curvature: if v == 0.0 {
                        f64::INFINITY
                    } else {
                        0.25 / (v * (1.0 + v) * (1.0 + v))
                    },
                })
            }
            _ if s > 0.0 => domain(format!("{} has no exponential moments", self.name())),
            _ if s == 0.0 => Ok(Cumulant {
                value: 0.0,
                slope: self.mean(),
                curvature: self.variance(),
            }),
            _ => {
                // moments of ξ - x_min keep e^{s(ξ - x_min)} away from underflow
                let c = self.support_min();
                let l0 = self.quantile_moment(s, 0)?;
                let l1 = self.quantile_moment(s, 1)?;
                let l2 = self.quantile_moment(s, 2)?;
                let m = l1 / l0;
                Ok(Cumulant {
                    value: s * c + l0.ln(),
                    slope: c + m,
                    curvature: l2 / l0 - m * m,
                })
            }
        }
    }

    /// `E[η^k e^{sη}]`, `η = ξ - x_min`, for `s < 0` through the quantile
    /// substitution `ξ = F̄^{-1}(u)`, `u ∈ (0, 1)`; the integrand is bounded.
    fn quantile_moment(&self, s: f64, k: i32) -> Result<f64> {
        let c = self.support_min();
        let quantile = |u: f64| -> f64 {
            match *self {
                Self::Pareto { alpha, scale } => scale * u.powf(-1.0 / alpha),
                Self::WeibullType { alpha, c } => (-u.ln() / c).powf(1.0 / alpha),
                _ => unreachable!("closed-form families handled by the caller"),
            }
        };
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let q = quantile(u) - c;
            let e = (s * q).exp();
            if e == 0.0 {
                0.0
            } else {
                q.powi(k) * e
            }
        };
        Ok(integrate(f, 0.0, 1.0, Tolerance::new(1e-15, 1e-14))?.value)
    }
}
