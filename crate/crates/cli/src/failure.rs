//! Exit-code classes.

use std::fmt;

use tailcomb::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Validation,
    Config,
    Numerical,
}

impl Failure {
    pub fn code(self) -> u8 {
        match self {
            Failure::Validation => 1,
            Failure::Config => 2,
            Failure::Numerical => 3,
        }
    }

    pub fn msg(self, message: impl Into<String>) -> anyhow::Error {
        anyhow::Error::new(Tagged(self, message.into()))
    }

    pub fn wrap(self, err: anyhow::Error) -> anyhow::Error {
        err.context(Tagged(self, String::new()))
    }

    /// Class of a library error.
    pub fn of(err: &Error) -> Failure {
        match err {
            Error::Domain(_)
            | Error::InfiniteQuantile(_)
            | Error::Shape { .. }
            | Error::Capacity { .. } => Failure::Validation,
            Error::MethodMisuse(_) | Error::Model(_) | Error::Config(_) => Failure::Config,
            Error::NotBracketed { .. }
            | Error::NoConvergence(_)
            | Error::InsufficientEvents { .. }
            | Error::Numerical(_) => Failure::Numerical,
        }
    }

    /// First classified cause in the chain; unclassified errors are treated
    /// as configuration problems.
    pub fn classify(err: &anyhow::Error) -> Failure {
        for cause in err.chain() {
            if let Some(Tagged(f, _)) = cause.downcast_ref::<Tagged>() {
                return *f;
            }
            if let Some(e) = cause.downcast_ref::<Error>() {
                return Failure::of(e);
            }
        }
        Failure::Config
    }
}

#[derive(Debug)]
struct Tagged(Failure, String);

impl fmt::Display for Tagged {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1.is_empty() {
            let label = match self.0 {
                Failure::Validation => "invalid input",
                Failure::Config => "configuration error",
                Failure::Numerical => "numerical failure",
            };
            f.write_str(label)
        } else {
            f.write_str(&self.1)
        }
    }
}

impl std::error::Error for Tagged {}
