use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum OdrcError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("neural oscillator stayed at a fixed point after {attempts} weight draws")]
    OscillatorConstruction { attempts: usize },

    #[error("series normalization failed: {0}")]
    Normalization(String),

    #[error("target generation failed: {0}")]
    Generation(String),

    #[error(
        "lyapunov estimation failed: {failed} of {total} reference points lacked enough neighbours"
    )]
    Estimation { failed: usize, total: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, OdrcError>;

impl OdrcError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        OdrcError::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(OdrcError::Dimension {
            context,
            expected,
            got,
        })
    }
}
