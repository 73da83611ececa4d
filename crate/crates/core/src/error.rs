use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gram matrix is not diagonalized by the fourier basis (off-diagonal residual {residual:e} > {tolerance:e})")]
    NotStructured { residual: f64, tolerance: f64 },

    #[error("generator sampler produced no well-conditioned lattice after {attempts} attempts")]
    DegenerateSampler { attempts: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("constraints matrix has no columns (kernel is the zero state only)")]
    EmptyKernel,

    #[error("resource limit: {required} qubits requested, limit is {limit}")]
    ResourceLimit { required: usize, limit: usize },

    #[error("integer entry does not fit in 64 bits")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
