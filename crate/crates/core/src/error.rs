use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial is not square-free; apply squarefree_part first")]
    NotSquareFree,

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("unsupported expression: {0}")]
    Unsupported(String),

    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("collocation matrix is ill-conditioned (singular values {singular_values:?})")]
    Conditioning { singular_values: Vec<f64> },

    #[error("invalid design targets: {0}")]
    Targets(String),

    #[error("orbit left the period annulus at t = {t} (H4 = {h})")]
    Escape { t: f64, h: f64 },

    #[error("step size underflow at t = {t}, (x, y) = ({x}, {y}); possible sliding motion")]
    Sliding { t: f64, x: f64, y: f64 },

    #[error("no return to the section within t = {t}")]
    NoReturn { t: f64 },

    #[error("invalid simulation configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
