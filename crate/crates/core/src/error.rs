use std::fmt;

use crate::tree::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid tree: {}", DisplayViolations(.0))]
    InvalidTree(Vec<Violation>),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("ambiguous attachment: {0}")]
    Ambiguous(String),

    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("degenerate subtree: {0}")]
    Degenerate(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("statistical test could not run: {0}")]
    Statistical(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            value,
            range: range.into(),
        }
    }
}

struct DisplayViolations<'a>(&'a [Violation]);

impl fmt::Display for DisplayViolations<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
