//! Numerical core: profile validation, the transformed mean `S(x)`, and the
//! exponent solve with its feasibility and clamping rules.
//!
//! All functions here are pure and operate on borrowed data.

mod profile;
mod solve;

use thiserror::Error;

pub use profile::{
    apply_exponent, mean_power, mean_power_derivative, profile_stats, sigma_pow, validate_profile,
    Profile, ProfileStats,
};
pub use solve::{
    bisect_root, classify_feasibility, find_search_interval, find_solution, Feasibility,
    FitOptions, FitOutcome, FitStatus, DEFAULT_INTERVAL_TOL, DEFAULT_LARGE_EXPONENT,
    DEFAULT_MAX_BISECT_ITER, DEFAULT_RESIDUAL_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("profile is empty")]
    EmptyProfile,
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("value at index {index} is not finite")]
    NotFinite { index: usize },
    #[error("target mean {0} is not in the open interval (0, 1)")]
    TargetOutOfRange(f64),
    #[error("invalid fit options: {0}")]
    InvalidOptions(&'static str),
    #[error(
        "no sign change of S(x) - {mu} up to x = {last_point} (S = {last_mean}); \
         values very close to 1 may need a larger exponent"
    )]
    BracketNotFound {
        mu: f64,
        last_point: f64,
        last_mean: f64,
    },
    #[error("[{a}, {b}] does not bracket a root")]
    InvalidBracket { a: f64, b: f64 },
    #[error("bisection did not converge within {0} iterations")]
    MaxIterationsExceeded(usize),
    #[error("bracket collapsed at x = {exponent} with residual {residual} above tolerance")]
    ToleranceNotReached { exponent: f64, residual: f64 },
}
