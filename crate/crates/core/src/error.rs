use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("{0} unavailable for this step law")]
    Unavailable(&'static str),

    #[error("quadrature did not converge: achieved error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("no bracket for target {target}: function range reached [{low}, {high}]")]
    Bracket { target: f64, low: f64, high: f64 },

    #[error("lattice too coarse: enclosure width {width:e} at n = {n} exceeds {limit:e}")]
    LatticeTooCoarse { n: usize, width: f64, limit: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
