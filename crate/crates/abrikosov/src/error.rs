use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance {requested:e} unreachable: best bound {achievable:e} at radius {radius}")]
    Tolerance {
        requested: f64,
        achievable: f64,
        radius: usize,
    },

    #[error("quadrature did not converge: grid {grid}, last doubling difference {difference:e}")]
    Quadrature { grid: usize, difference: f64 },

    #[error("minimization failed to converge from {starts} starts")]
    Convergence { starts: usize },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("complement block not invertible at lambda = {lambda}")]
    Invertibility { lambda: f64 },

    #[error("basis truncation: {0}")]
    Truncation(String),

    #[error("no certified sign change in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
