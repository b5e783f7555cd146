use std::fmt;

use quaddom::io::ReadError;
use quaddom::Error;

pub const EXIT_SCHEMA: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_ADMISSIBILITY: u8 = 4;
pub const EXIT_GEOMETRY: u8 = 5;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(EXIT_SCHEMA, message)
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self::new(EXIT_NUMERIC, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::InvalidTestFunction(_) | Error::InvalidTolerance(_) | Error::InvalidPolyline(_) => {
            EXIT_SCHEMA
        }
        Error::InadmissibleTestFunction { .. } | Error::NodeAtPole { .. } => EXIT_ADMISSIBILITY,
        Error::EvaluationBelowStrip { .. } | Error::CurveOutsideStrip(_) | Error::NonHorizontalAsymptote => {
            EXIT_GEOMETRY
        }
        _ => EXIT_NUMERIC,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(exit_code(&e), e.to_string())
    }
}

impl From<ReadError> for Failure {
    fn from(e: ReadError) -> Self {
        match e {
            ReadError::Schema(e) => Self::schema(format!("schema error: {e}")),
            ReadError::Spec(e) => e.into(),
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;
