use thiserror::Error;
use underlay_core::NumericError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("numerical failure in {op}: {source}", op = .source.op())]
    Numeric {
        #[from]
        source: NumericError,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the invocation, 3 for numerics.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric { .. } => 3,
            _ => 2,
        }
    }
}
