//! Fit renewable-energy availability profiles to a target capacity factor.
//!
//! Given per-unit values `p₁ … pₘ` in `[0, 1]` and a target mean `μ`, the
//! fitted profile is `pᵢˣ` where `x` solves `(1/m) Σ pᵢˣ = μ` (with `0ˣ = 0`
//! for every `x`, including `x = 0`). Raising to a power keeps every value in
//! `[0, 1]`, leaves `0` and `1` untouched, and moves the mid-range values.
//!
//! ```
//! use profilefit::fitcore::{apply_exponent, find_solution, validate_profile, FitOptions, FitStatus};
//!
//! let profile = validate_profile(&[0.25, 0.5, 0.75]).unwrap();
//! let outcome = find_solution(&profile, 0.6, &FitOptions::default()).unwrap();
//! assert_eq!(outcome.status, FitStatus::Exact);
//! let fitted = apply_exponent(&profile, outcome.exponent);
//! let mean = fitted.values().iter().sum::<f64>() / 3.0;
//! assert!((mean - 0.6).abs() < 1e-10);
//! ```

pub mod cli;
pub mod fitcore;
pub mod profile_io;

pub use fitcore::{find_solution, FitError, FitOptions, FitOutcome, FitStatus, Profile};
