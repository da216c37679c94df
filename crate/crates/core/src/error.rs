use thiserror::Error;

use crate::alphabet::AlphabetError;
use crate::analysis::AnalysisError;
use crate::features::FeatureError;
use crate::rule::RuleError;
use crate::synthesis::SynthesisError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("input has {len} segments, more than the limit of {max}")]
    TooLong { len: usize, max: usize },
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Command(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
