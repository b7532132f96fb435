use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("insufficient record: need {needed} whole cycles, have {available:.3}")]
    InsufficientRecord { needed: usize, available: f64 },

    #[error("degenerate excitation: angle amplitude {amplitude:e} rad below noise floor")]
    DegenerateExcitation { amplitude: f64 },

    #[error("degenerate impedance: storage + loss = 0")]
    DegenerateImpedance,

    #[error("fit did not converge: best relative residual {best_residual:e}")]
    Fit { best_residual: f64 },

    #[error("integration diverged at step {step} (t = {time:.6} s)")]
    Divergence { step: usize, time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown design `{0}`")]
    UnknownDesign(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Broad failure class, used by the command line front end to pick an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::UnknownDesign(_) | Error::Arity(_) => ErrorClass::Config,
            Error::Io { .. } | Error::Csv(_) => ErrorClass::Io,
            Error::Context { source, .. } => source.class(),
            _ => ErrorClass::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context_with<F: FnOnce() -> String>(self, f: F) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context_with<F: FnOnce() -> String>(self, f: F) -> Result<T> {
        self.map_err(|e| e.context(f()))
    }
}
