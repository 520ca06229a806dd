use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular linear system")]
    Singular,
    #[error("root finder did not converge for polynomial {0}")]
    NoConvergence(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("zero coefficient at n={0}, ratio undefined")]
    ZeroCoefficient(u64),
    #[error("quotient-difference breakdown at alpha index {0}: no S-fraction at this depth")]
    QdBreakdown(usize),
    #[error("negative continued-fraction coefficient alpha_{0}: not a Stieltjes sequence at this depth")]
    NegativeAlpha(usize),
    #[error("defective approximant: {0}")]
    Defective(String),
    #[error("every ensemble member was rejected; widen the configuration grid")]
    EnsembleEmpty,
    #[error("resource cap reached: {0}")]
    ResourceCap(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<crate::numeric::Singular> for Error {
    fn from(_: crate::numeric::Singular) -> Self {
        Error::Singular
    }
}
