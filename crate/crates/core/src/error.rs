use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("evaluation at root")]
    EvaluationAtRoot,

    #[error("derivative vanished")]
    DerivativeVanished,

    #[error("degree too small: n = {0}, need n >= 2")]
    DegreeTooSmall(usize),

    #[error("did not converge after {sweeps} sweeps")]
    DidNotConverge { sweeps: usize },

    #[error("support not covered: bump disk is not inside the grid rectangle")]
    SupportNotCovered,

    #[error("degenerate probe region")]
    DegenerateRegion,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
