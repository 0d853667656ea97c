//! Exact probabilities, rate functions and tilted estimators for decoupled
//! renewal processes.
//!
//! A decoupled random walk is a sequence of independent variables `Ŝ_n`
//! where each `Ŝ_n` has the law of the `n`-th partial sum of i.i.d.
//! nonnegative steps. The count `N̂(t) = #{n : Ŝ_n ≤ t}` is a sum of
//! independent Bernoulli variables with success probabilities
//! `p_n(t) = P{S_n ≤ t}`, so its distribution can be computed exactly.
//!
//! Module map:
//!
//! * [`special`]: Mittag-Leffler function, one-sided stable laws, incomplete
//!   gamma, error function and dilogarithm.
//! * [`step`]: the step laws and their Laplace data.
//! * [`marginals`]: walk marginals `p_n(t)` with truncation certificates.
//! * [`rates`]: `f_α`, `J_α`, the Cramér rates `I` and `I*` and the
//!   deviation integrals.
//! * [`poisson_binomial`]: exact log-scale PMF of `N̂(t)`.
//! * [`tilting`]: exponential change of measure, importance sampling and
//!   samplers for the decoupled walk and determinantal radii.

pub mod error;
pub mod marginals;
pub mod poisson_binomial;
pub mod quadrature;
pub mod rates;
pub mod rng;
pub mod roots;
pub mod special;
pub mod step;
pub mod sum;
pub mod tilting;

pub use error::{Error, Result};
pub use marginals::{
    marginals_exact_gamma, marginals_exact_gamma_min_len, marginals_lattice, LatticeOptions,
    MarginalMethod, WalkMarginals,
};
pub use poisson_binomial::{
    certified_point_log_prob, dominant_product, exact_log_pmf, local_clt_error, log_prob_zero,
    point_log_prob, LogPMF,
};
pub use rates::LegendreSolution;
pub use rng::SeededSampler;
pub use step::{LightTailAnalysis, StepDistribution};
pub use tilting::TiltedModel;
