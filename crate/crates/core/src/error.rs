use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcfError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("pole of Gamma at {0}")]
    Pole(f64),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("path resolution too coarse at sample {0}")]
    Resolution(usize),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("contour error: {0}")]
    Contour(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, PcfError>;
