use thiserror::Error;

use crate::field::{FieldError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("divisor is not left-justified")]
    DivisorNotLeftJustified,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("all polynomials are zero")]
    AllZero,
    #[error("not perfect reconstruction: {0}")]
    NotPerfectReconstruction(String),
    #[error("invalid coprimification: {0}")]
    InvalidCoprimification(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("quotient matrix has a zero entry; terminate instead")]
    QuotientHasZero,
    #[error("matrix has more than one zero entry")]
    MultipleZeros,
    #[error("matrix has no zero entry")]
    NoZero,
    #[error("brace members disagree: {0}")]
    BraceMismatch(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("step {step}: {source}")]
    AtStep { step: usize, source: Box<Error> },
    #[error("rows or columns are not coprime")]
    NotCoprime,
    #[error("cascades come from different matrices")]
    MixedSources,
    #[error("unknown name '{0}'")]
    UnknownName(String),
    #[error("session already terminated")]
    Terminated,
    #[error("illegal choice: {0}")]
    IllegalChoice(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn at_step(self, step: usize) -> Error {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep { step, source: Box::new(e) },
        }
    }

    pub fn step_index(&self) -> Option<usize> {
        match self {
            Error::AtStep { step, .. } => Some(*step),
            _ => None,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Field(FieldError::DivisionByZero) => "DivisionByZero",
            Error::Field(FieldError::MixedRealizations(..)) => "MixedRealizations",
            Error::Parse(_) => "ParseError",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::ZeroDivisor => "ZeroDivisor",
            Error::DivisorNotLeftJustified => "DivisorNotLeftJustified",
            Error::InexactDivision => "InexactDivision",
            Error::AllZero => "AllZero",
            Error::NotPerfectReconstruction(_) => "NotPerfectReconstruction",
            Error::InvalidCoprimification(_) => "InvalidCoprimification",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::QuotientHasZero => "QuotientHasZero",
            Error::MultipleZeros => "MultipleZeros",
            Error::NoZero => "NoZero",
            Error::BraceMismatch(_) => "BraceMismatch",
            Error::Schema(_) => "SchemaError",
            Error::AtStep { source, .. } => source.code(),
            Error::NotCoprime => "NotCoprime",
            Error::MixedSources => "MixedSources",
            Error::UnknownName(_) => "UnknownName",
            Error::Terminated => "Terminated",
            Error::IllegalChoice(_) => "IllegalChoice",
            Error::NothingToUndo => "NothingToUndo",
            Error::Invalid(_) => "InvalidInput",
        }
    }

    /// Errors caused by the schema or step choices rather than the input bank.
    pub fn is_schema_error(&self) -> bool {
        matches!(
            self,
            Error::AtStep { .. }
                | Error::BraceMismatch(_)
                | Error::Schema(_)
                | Error::PreconditionViolated(_)
                | Error::QuotientHasZero
                | Error::DivisorNotLeftJustified
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
