use thiserror::Error;

/// Single error type for the whole crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("solver failure in {what}: {diagnostics}")]
    Solver { what: &'static str, diagnostics: String },

    #[error("no finite model ball has eigenvalue {lambda} (must exceed {floor})")]
    NoFiniteBall { lambda: f64, floor: f64 },

    #[error("exponents must satisfy 0 < p < q, got p = {p}, q = {q}")]
    ExponentOrder { p: f64, q: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh refinement error: {0}")]
    Refinement(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("eigen iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("input error: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("map is not injective: {0}")]
    Injectivity(String),

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("flow error: {0}")]
    Flow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
