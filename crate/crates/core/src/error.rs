use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

/// State blow-up detected during integration.
///
/// Carries the partial trajectory up to the last finite node so callers can
/// still emit diagnostics for unstable runs.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub time: f64,
    pub agent: usize,
    pub partial: Trajectory,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid initial datum: {0}")]
    InvalidDatum(String),

    #[error("invalid integrator settings: {0}")]
    InvalidIntegrator(String),

    #[error("history lookup at t={t} precedes available data starting at {start}")]
    HistoryUnderflow { t: f64, start: f64 },

    #[error("time {t} outside trajectory range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("state of agent {} became non-finite at t={}", .0.agent, .0.time)]
    NonFinite(Box<BlowUp>),

    #[error("series is not strictly positive on the fit window (first offending t={t})")]
    NonPositiveSeries { t: f64 },

    #[error("invalid Halanay problem: {0}")]
    InvalidProblem(String),

    #[error("theorem precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid convex weights: {0}")]
    InvalidWeights(String),

    #[error("no characteristic root found in Re [{re_lo}, {re_hi}] x Im [{im_lo}, {im_hi}]")]
    NoRootFound {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Blow-up time for [`Error::NonFinite`], `None` otherwise.
    pub fn blow_up_time(&self) -> Option<f64> {
        match self {
            Error::NonFinite(b) => Some(b.time),
            _ => None,
        }
    }
}
