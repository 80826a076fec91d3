use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid norm exponent p = {0} (need 1 <= p <= inf)")]
    InvalidExponent(f64),

    #[error("operation requires {required}, got p = {p}")]
    UnsupportedExponent { p: String, required: &'static str },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected: eigenvalue 0 has multiplicity {zero_multiplicity}")]
    Disconnected { zero_multiplicity: usize },

    #[error("sampling grid is empty")]
    EmptyGrid,

    #[error("estimator trace is not monotone at h = {h:e} (quotient rose by {excess:e})")]
    NonMonotoneTrace {
        h: f64,
        excess: f64,
        trace: Vec<(f64, f64)>,
    },

    #[error("state left the domain at t = {time} (component {component}, value {value})")]
    DomainEscape {
        time: f64,
        component: usize,
        value: f64,
    },

    #[error(
        "time step {dt:e} exceeds the explicit stability limit {max_dt:e}; use dt <= {max_dt:e}"
    )]
    StepTooLarge { dt: f64, max_dt: f64 },

    #[error("invalid integration setting: {0}")]
    InvalidIntegration(String),

    #[error("no impossibility witness found below b_cap = {b_cap:e}; raise the cap")]
    CapExceeded { b_cap: f64 },

    #[error("certificate refused: rate {rate} >= 0 at {argmax:?}")]
    Refused { rate: f64, argmax: Vec<f64> },

    #[error("finite-difference Jacobian failed the agreement check (max error {max_error:e})")]
    JacobianCheckFailed { max_error: f64 },

    #[error("empty candidate set")]
    EmptyCandidates,

    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
