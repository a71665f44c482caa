//! Test-only oracles. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `S(x)` evaluated directly from its definition.
pub fn s_direct(values: &[f64], x: f64) -> f64 {
    let sum: f64 = values.iter().filter(|&&p| p > 0.0).map(|p| p.powf(x)).sum();
    sum / values.len() as f64
}

pub fn central_difference(values: &[f64], x: f64, h: f64) -> f64 {
    (s_direct(values, x + h) - s_direct(values, x - h)) / (2.0 * h)
}

/// Brute-force scan of `S` over `[lo, hi]` at `step`, returning
/// `(x, S(x))` at the grid point minimising `|S(x) − mu|`.
///
/// Consecutive powers are advanced by multiplying with `p^step` and
/// recomputed exactly every 1024 steps to stop rounding drift.
pub fn grid_oracle(values: &[f64], mu: f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let positive: Vec<f64> = values.iter().copied().filter(|&p| p > 0.0).collect();
    let m = values.len() as f64;
    let ratio: Vec<f64> = positive.iter().map(|p| p.powf(step)).collect();
    let mut power: Vec<f64> = Vec::with_capacity(positive.len());
    let steps = ((hi - lo) / step).round() as u64;

    let mut best = (f64::INFINITY, lo, 0.0);
    for k in 0..=steps {
        let x = lo + k as f64 * step;
        if k % 1024 == 0 {
            power.clear();
            power.extend(positive.iter().map(|p| p.powf(x)));
        } else {
            for (p, r) in power.iter_mut().zip(&ratio) {
                *p *= r;
            }
        }
        let s = power.iter().sum::<f64>() / m;
        let err = (s - mu).abs();
        if err < best.0 {
            best = (err, x, s);
        }
    }
    (best.1, best.2)
}

/// Values mixing exact zeros, exact ones and uniform draws.
pub fn mixed_profile(rng: &mut impl Rng, len: usize, p_zero: f64, p_one: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            if u < p_zero {
                0.0
            } else if u < p_zero + p_one {
                1.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

pub fn counts(values: &[f64]) -> (usize, usize, usize) {
    let r = values.iter().filter(|&&v| v > 0.0).count();
    let n = values.iter().filter(|&&v| v == 1.0).count();
    (values.len(), r, n)
}

/// A year of hourly wind-like values in a renewables.ninja style file:
/// three metadata lines, a `time,electricity` header, then 8760 rows.
pub fn write_ninja_fixture(path: &Path, seed: u64) {
    let mut rng = rng(seed);
    let mut text = String::new();
    text.push_str("# Renewables.ninja Wind Output - synthetic test fixture\n");
    text.push_str("# Units: time in UTC, electricity in per-unit of capacity\n");
    text.push_str("# License: test data\n");
    text.push_str("time,local_time,electricity\n");
    let mut level: f64 = rng.random();
    for hour in 0..8760u32 {
        level = (level + rng.random_range(-0.12..0.12)).clamp(0.0, 1.0);
        // Occasional calm and full-output hours, like a real turbine curve.
        let value = if level < 0.05 {
            0.0
        } else if level > 0.97 {
            1.0
        } else {
            (level * 1000.0).round() / 1000.0
        };
        let (day, h) = (hour / 24, hour % 24);
        let _ = writeln!(
            text,
            "2019-d{day:03} {h:02}:00,2019-d{day:03} {h:02}:00,{value}"
        );
    }
    std::fs::write(path, text).unwrap();
}
