//! Special-function kernel. Everything here is pure and reentrant.

pub mod dilog;
pub mod erf;
pub mod gamma;
pub mod mittag_leffler;
pub mod stable;

pub use dilog::dilog;
pub use erf::{erf, erfc, normal_cdf, normal_pdf};
pub use gamma::{
    gamma, ln_gamma, ln_regularized_gamma_pq, regularized_gamma_p, regularized_gamma_q,
};
pub use mittag_leffler::{mittag_leffler, MittagLefflerParams};
pub use stable::{
    inverse_stable_cdf, inverse_stable_mean, inverse_stable_pair, inverse_stable_survival,
    stable_cdf, stable_sf, StableSubordinatorLaw,
};
