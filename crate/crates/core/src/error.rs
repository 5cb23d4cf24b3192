use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("site {site} is not valid here ({reason})")]
    InvalidSite { site: usize, reason: &'static str },

    #[error("invalid mode pair ({n}, {m}): {reason}")]
    InvalidModes { n: usize, m: usize, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    BracketFailure { what: String, lo: f64, hi: f64 },

    #[error("stationarity violated for pair ({n}, {m}) at t = {t}: |dQ| = {delta:e}")]
    StationarityViolated { n: usize, m: usize, t: f64, delta: f64 },

    #[error("realization {index} failed: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
