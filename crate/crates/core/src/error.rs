use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A network, packet, or state was assembled inconsistently.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation received an out-of-range or malformed argument.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A text format (truth table, packet) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A network did not reproduce the truth table it was built for.
    #[error("verification failed for input {input}: expected output {expected}, observed probability {probability}")]
    Verification {
        input: String,
        expected: String,
        probability: f64,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
