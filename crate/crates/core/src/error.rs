use std::path::PathBuf;

use thiserror::Error;

use crate::scalar::LiteralError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("NegativeQuadraticStake: V = {stake} is negative, which the standard protocol forbids")]
    NegativeQuadraticStake { stake: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("horizon must be at least 1")]
    InvalidHorizon,

    #[error("round {round}: {source}")]
    IllegalMove {
        round: u64,
        #[source]
        source: MoveError,
    },

    #[error("GameOver: Skeptic went bankrupt at round {bankrupt_at} and the game stops on bankruptcy")]
    GameOver { bankrupt_at: u64 },

    #[error("NegativeVariance: v_{round} = {value} is negative")]
    NegativeVariance { round: u64, value: String },

    #[error("SequenceExhausted: variance sequence has {len} entries, round {round} requested")]
    SequenceExhausted { round: u64, len: usize },

    #[error("ScriptExhausted: replay script has {len} moves, round {round} requested")]
    ScriptExhausted { round: u64, len: usize },

    #[error("invalid epsilon schedule: {0}")]
    InvalidSchedule(&'static str),

    #[error("MalformedTrace at round {round}: {reason}")]
    MalformedTrace { round: u64, reason: String },

    #[error("{path}:{line}: {source}")]
    Literal {
        path: PathBuf,
        line: usize,
        #[source]
        source: LiteralError,
    },

    #[error("{path}:{line}: {reason}")]
    TraceFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the input's content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
