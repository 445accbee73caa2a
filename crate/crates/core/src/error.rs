use thiserror::Error;

use crate::oracle::EnumerationResult;

/// Errors raised anywhere in the crate.
///
/// Variants fall into two families: input validation problems
/// ([`Error::is_validation`]) and budget or tolerance failures raised while a
/// computation was running.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("basis is rank deficient: column {index} is linearly dependent on the previous ones")]
    RankDeficient { index: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{what} did not reach tolerance {tolerance:e} (residual {residual:e})")]
    Tolerance {
        what: &'static str,
        tolerance: f64,
        residual: f64,
    },

    #[error("enumeration budget of {budget} nodes exhausted")]
    BudgetExceeded {
        budget: u64,
        best: Option<Box<EnumerationResult>>,
    },

    #[error("rejection sampling infeasible: estimated acceptance {acceptance:e} below floor {floor:e}")]
    SamplingInfeasible { acceptance: f64, floor: f64 },

    #[error("sieve list exceeded {cap} vectors (kissing estimate {kissing_estimate})")]
    ListOverflow { cap: usize, kissing_estimate: usize },

    #[error("sieve failed: {failures} of {attempts} attempts exceeded the output bound")]
    SieveFailure { attempts: usize, failures: usize },

    #[error("symmetrization loop diverged at step {step}: distance estimate rose from {previous} to {current}")]
    LoopDivergence {
        step: usize,
        previous: f64,
        current: f64,
        trajectory: Vec<f64>,
    },

    #[error("symmetrization loop hit the iteration cap of {cap} (distance trajectory {trajectory:?})")]
    LoopIterationCap { cap: usize, trajectory: Vec<f64> },

    #[error("roundness violated: R/r = {ratio} exceeds {limit}")]
    Roundness { ratio: f64, limit: f64 },

    #[error("{0}")]
    Failure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by malformed or inconsistent input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::RankDeficient { .. } | Error::NotPrime(_) | Error::Json(_)
        )
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            e if e.is_validation() => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
