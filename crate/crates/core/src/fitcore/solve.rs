//! Solving `S(x) = μ` for the exponent `x`.
//!
//! `S` is non-increasing on `[0, ∞)`, starts at `r/m` and tends to `n/m`.
//! A root exists iff `n/m < μ ≤ r/m`. The root is bracketed by probing the
//! doubling sequence `0, 1, 2, 4, 8, …` and then refined by plain bisection.
//! Targets outside the reachable range are clamped to `x = 0` (target too
//! high) or to a large fixed exponent (target at or below the asymptote).

use super::profile::{mean_power, Profile, ProfileStats};
use super::FitError;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_INTERVAL_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_BISECT_ITER: usize = 200;
pub const DEFAULT_LARGE_EXPONENT: f64 = 1000.0;

/// Solver settings. The target mean is passed separately to each call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on `|S(x) − μ|`.
    pub residual_tol: f64,
    /// Convergence threshold on the bisection bracket width.
    pub interval_tol: f64,
    pub max_bisect_iter: usize,
    /// Exponent returned when `μ ≤ n/m`; also caps the bracket search.
    pub large_exponent: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            residual_tol: DEFAULT_RESIDUAL_TOL,
            interval_tol: DEFAULT_INTERVAL_TOL,
            max_bisect_iter: DEFAULT_MAX_BISECT_ITER,
            large_exponent: DEFAULT_LARGE_EXPONENT,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<(), FitError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.residual_tol) {
            return Err(FitError::InvalidOptions(
                "residual_tol must be a positive number",
            ));
        }
        if !positive(self.interval_tol) {
            return Err(FitError::InvalidOptions(
                "interval_tol must be a positive number",
            ));
        }
        if self.max_bisect_iter == 0 {
            return Err(FitError::InvalidOptions(
                "max_bisect_iter must be at least 1",
            ));
        }
        if !positive(self.large_exponent) {
            return Err(FitError::InvalidOptions(
                "large_exponent must be a positive number",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// `n/m < μ ≤ r/m`: an exact root exists.
    Feasible,
    /// `μ > r/m`: the target exceeds `S(0)`.
    InfeasibleHigh,
    /// `μ ≤ n/m`: the target is at or below the asymptote of `S`.
    InfeasibleLow,
}

pub fn classify_feasibility(stats: &ProfileStats, mu: f64) -> Feasibility {
    if mu > stats.upper_bound() {
        Feasibility::InfeasibleHigh
    } else if mu <= stats.lower_bound() {
        Feasibility::InfeasibleLow
    } else {
        Feasibility::Feasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Exact,
    /// Target above `r/m`; exponent is `0`.
    ClampedLow,
    /// Target at or below `n/m`; exponent is the large fallback.
    ClampedHigh,
}

impl FitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitStatus::Exact => "exact",
            FitStatus::ClampedLow => "clamped_low",
            FitStatus::ClampedHigh => "clamped_high",
        }
    }

    pub fn is_clamped(&self) -> bool {
        !matches!(self, FitStatus::Exact)
    }
}

impl std::fmt::Display for FitStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub exponent: f64,
    /// `S(exponent)`.
    pub achieved_mean: f64,
    pub status: FitStatus,
    /// Bisection steps taken; zero for clamped fits and exact hits on the
    /// doubling sequence.
    pub iterations: usize,
    /// Bracket handed to the bisection, if one was searched for.
    pub bracket: Option<(f64, f64)>,
    pub stats: ProfileStats,
}

fn same_side(a: f64, b: f64) -> bool {
    (a > 0.0) == (b > 0.0)
}

/// Finds consecutive points `a`, `b` of `0, 1, 2, 4, …` with `S(a) − μ` and
/// `S(b) − μ` of opposite sign (or zero).
///
/// An exact hit on a sequence point `v` returns `(v, v)`. Probing stops once
/// the next point would exceed `opts.large_exponent`.
pub fn find_search_interval(
    profile: &Profile,
    mu: f64,
    opts: &FitOptions,
) -> Result<(f64, f64), FitError> {
    let residual = |x: f64| mean_power(profile, x) - mu;

    let mut prev = 0.0;
    let mut f_prev = residual(prev);
    if f_prev == 0.0 {
        return Ok((prev, prev));
    }
    let mut next = 1.0;
    while next <= opts.large_exponent {
        let f_next = residual(next);
        if f_next == 0.0 {
            return Ok((next, next));
        }
        if !same_side(f_prev, f_next) {
            return Ok((prev, next));
        }
        prev = next;
        f_prev = f_next;
        next *= 2.0;
    }
    Err(FitError::BracketNotFound {
        mu,
        last_point: prev,
        last_mean: f_prev + mu,
    })
}

/// Bisects `[a, b]` for a root of `S(x) − μ`.
///
/// Stops as soon as `|S(x) − μ| ≤ residual_tol`, or when the bracket has
/// shrunk below `interval_tol`, in which case the endpoint with the smaller
/// residual is returned. A degenerate bracket returns `a` after 0 steps.
pub fn bisect_root(
    profile: &Profile,
    mu: f64,
    a: f64,
    b: f64,
    opts: &FitOptions,
) -> Result<(f64, usize), FitError> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(FitError::InvalidBracket { a, b });
    }
    if a == b {
        return Ok((a, 0));
    }
    let residual = |x: f64| mean_power(profile, x) - mu;
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = residual(lo);
    let mut f_hi = residual(hi);
    if f_lo.abs() <= opts.residual_tol {
        return Ok((lo, 0));
    }
    if f_hi.abs() <= opts.residual_tol {
        return Ok((hi, 0));
    }
    if same_side(f_lo, f_hi) && f_lo != 0.0 && f_hi != 0.0 {
        return Err(FitError::InvalidBracket { a, b });
    }

    for iteration in 1..=opts.max_bisect_iter {
        let mid = lo + 0.5 * (hi - lo);
        let f_mid = residual(mid);
        if f_mid.abs() <= opts.residual_tol {
            return Ok((mid, iteration));
        }
        if same_side(f_mid, f_lo) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if hi - lo <= opts.interval_tol {
            let x = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
            return Ok((x, iteration));
        }
    }
    Err(FitError::MaxIterationsExceeded(opts.max_bisect_iter))
}

/// Finds the exponent that brings the mean of `profile` to `mu`, clamping
/// when no exact root exists.
pub fn find_solution(
    profile: &Profile,
    mu: f64,
    opts: &FitOptions,
) -> Result<FitOutcome, FitError> {
    if mu.is_nan() || mu <= 0.0 || mu >= 1.0 {
        return Err(FitError::TargetOutOfRange(mu));
    }
    opts.validate()?;

    let stats = profile.stats();
    match classify_feasibility(&stats, mu) {
        Feasibility::InfeasibleHigh => Ok(FitOutcome {
            exponent: 0.0,
            achieved_mean: mean_power(profile, 0.0),
            status: FitStatus::ClampedLow,
            iterations: 0,
            bracket: None,
            stats,
        }),
        Feasibility::InfeasibleLow => Ok(FitOutcome {
            exponent: opts.large_exponent,
            achieved_mean: mean_power(profile, opts.large_exponent),
            status: FitStatus::ClampedHigh,
            iterations: 0,
            bracket: None,
            stats,
        }),
        Feasibility::Feasible => {
            let (a, b) = find_search_interval(profile, mu, opts)?;
            let (exponent, iterations) = bisect_root(profile, mu, a, b, opts)?;
            let achieved_mean = mean_power(profile, exponent);
            let residual = (achieved_mean - mu).abs();
            if residual > opts.residual_tol {
                // Only reachable when S is so steep near the root that the
                // interval tolerance is hit first.
                return Err(FitError::ToleranceNotReached { exponent, residual });
            }
            Ok(FitOutcome {
                exponent,
                achieved_mean,
                status: FitStatus::Exact,
                iterations,
                bracket: Some((a, b)),
                stats,
            })
        }
    }
}
