//! Availability profiles and the transformed mean `S(x) = (1/m) Σ σ(pᵢ, x)`.

use super::FitError;

/// A validated per-unit availability profile.
///
/// Every value is finite and lies in `[0, 1]`, and there is at least one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    /// Validates `values` and wraps them, keeping their order.
    pub fn new(values: Vec<f64>) -> Result<Self, FitError> {
        if values.is_empty() {
            return Err(FitError::EmptyProfile);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(FitError::NotFinite { index });
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(FitError::OutOfRange { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a validated profile; provided for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn stats(&self) -> ProfileStats {
        profile_stats(self)
    }
}

impl AsRef<[f64]> for Profile {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Validates raw values into a [`Profile`].
pub fn validate_profile(values: &[f64]) -> Result<Profile, FitError> {
    Profile::new(values.to_vec())
}

/// Counts that bound the reachable range of `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileStats {
    /// Total number of values.
    pub m: usize,
    /// Values strictly greater than zero.
    pub r: usize,
    /// Values exactly equal to one.
    pub n: usize,
    /// Arithmetic mean, equal to `S(1)`.
    pub mean: f64,
}

impl ProfileStats {
    /// `r/m`, the value of `S(0)` and the largest reachable mean.
    pub fn upper_bound(&self) -> f64 {
        self.r as f64 / self.m as f64
    }

    /// `n/m`, the limit of `S(x)` as `x` grows without bound.
    pub fn lower_bound(&self) -> f64 {
        self.n as f64 / self.m as f64
    }
}

pub fn profile_stats(profile: &Profile) -> ProfileStats {
    let values = profile.values();
    let m = values.len();
    let r = values.iter().filter(|&&v| v > 0.0).count();
    let n = values.iter().filter(|&&v| v == 1.0).count();
    let mean = values.iter().sum::<f64>() / m as f64;
    ProfileStats { m, r, n, mean }
}

/// `p^x` for `p > 0`, and `0` otherwise.
///
/// `sigma_pow(0.0, 0.0)` is `0`, unlike `0f64.powf(0.0)` which is `1`. This
/// keeps `x ↦ sigma_pow(p, x)` continuous on `[0, ∞)` for every `p`.
#[inline]
pub fn sigma_pow(p: f64, x: f64) -> f64 {
    if p > 0.0 {
        p.powf(x)
    } else {
        0.0
    }
}

/// `S(x)`: the mean of `σ(pᵢ, x)` over all `m` values, zeros included.
pub fn mean_power(profile: &Profile, x: f64) -> f64 {
    let values = profile.values();
    let sum: f64 = values.iter().map(|&p| sigma_pow(p, x)).sum();
    sum / values.len() as f64
}

/// `S'(x) = (1/m) Σ_{pᵢ > 0} pᵢ^x ln pᵢ`, which is never positive.
pub fn mean_power_derivative(profile: &Profile, x: f64) -> f64 {
    let values = profile.values();
    let sum: f64 = values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(x) * p.ln())
        .sum();
    sum / values.len() as f64
}

/// Raises every value to `x` under the `σ` convention.
pub fn apply_exponent(profile: &Profile, x: f64) -> Profile {
    let values = profile.values().iter().map(|&p| sigma_pow(p, x)).collect();
    // p^x with p in (0, 1] and x >= 0 stays in [0, 1], so no revalidation.
    Profile { values }
}
