use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("character does not vanish on relator {relator}")]
    InvalidCharacter { relator: usize },
    #[error("relator {relator} is not the identity under the quotient")]
    InvalidQuotient { relator: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(
        "row {row} of the Laplacian in degree {degree} is zero; the complex is not L2-acyclic"
    )]
    SingularRow { degree: usize, row: usize },
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("psi sequence violates monotonicity or concavity at mu = {mu}: {detail}")]
    Concavity { mu: usize, detail: String },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Input(_)
                | Error::InvalidCharacter { .. }
                | Error::InvalidQuotient { .. }
                | Error::Shape(_)
                | Error::Unsupported(_)
                | Error::File { .. }
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
