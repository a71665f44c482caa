mod common;

use proptest::prelude::*;

use profilefit::fitcore::*;
use profilefit::profile_io::{read_profile, write_profile, CsvLayout};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        1 => Just(1.0),
        6 => 0.0..=1.0f64,
    ]
}

fn profile_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(value(), 1..=max_len)
}

/// A profile together with a target inside its feasible range.
fn feasible_case() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (profile_values(60), 0.0..=1.0f64).prop_filter_map("empty feasible range", |(values, u)| {
        let (m, r, n) = common::counts(&values);
        let (lo, hi) = (n as f64 / m as f64, r as f64 / m as f64);
        let mu = lo + (0.02 + 0.98 * u) * (hi - lo);
        // the root must lie below the last doubling point probed (512)
        let reachable = common::s_direct(&values, 512.0) < mu;
        (reachable && mu > lo && mu <= hi && mu > 0.0 && mu < 1.0).then_some((values, mu))
    })
}

fn profile(values: &[f64]) -> Profile {
    validate_profile(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mean_power_is_non_increasing(values in profile_values(80), x1 in 0.0..50.0f64, dx in 0.0..50.0f64) {
        let p = profile(&values);
        prop_assert!(mean_power(&p, x1) >= mean_power(&p, x1 + dx));
    }

    #[test]
    fn mean_power_strictly_decreases_with_interior_values(
        mut values in profile_values(40),
        interior in 0.05..0.95f64,
        x1 in 0.0..10.0f64,
        dx in 0.01..5.0f64,
    ) {
        values.push(interior);
        let p = profile(&values);
        prop_assert!(mean_power(&p, x1) > mean_power(&p, x1 + dx));
    }

    #[test]
    fn mean_power_at_zero_is_share_of_nonzero(values in profile_values(100)) {
        let (m, r, _) = common::counts(&values);
        prop_assert_eq!(mean_power(&profile(&values), 0.0), r as f64 / m as f64);
    }

    #[test]
    fn mean_power_tends_to_share_of_ones(
        values in prop::collection::vec(prop_oneof![Just(1.0), 0.0..=0.97f64], 1..80)
    ) {
        let (m, _, n) = common::counts(&values);
        let s = mean_power(&profile(&values), 1000.0);
        prop_assert!((s - n as f64 / m as f64).abs() <= 1e-9, "S(1000) = {}", s);
    }

    #[test]
    fn apply_exponent_preserves_range_order_and_endpoints(values in profile_values(60), x in 0.0..200.0f64) {
        let p = profile(&values);
        let fitted = apply_exponent(&p, x);
        prop_assert_eq!(fitted.len(), p.len());
        for (&orig, &new) in p.values().iter().zip(fitted.values()) {
            prop_assert!((0.0..=1.0).contains(&new));
            if orig == 0.0 { prop_assert_eq!(new, 0.0); }
            if orig == 1.0 { prop_assert_eq!(new, 1.0); }
        }
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] <= values[j] {
                    prop_assert!(fitted.values()[i] <= fitted.values()[j]);
                }
            }
        }
    }

    #[test]
    fn derivative_is_non_positive_and_matches_finite_differences(values in profile_values(40), x in 0.0..8.0f64) {
        prop_assume!(values.iter().all(|&v| v == 0.0 || v > 1e-3));
        let p = profile(&values);
        let d = mean_power_derivative(&p, x);
        prop_assert!(d <= 0.0);
        prop_assert!((d - common::central_difference(&values, x, 1e-6)).abs() <= 1e-6);
    }

    #[test]
    fn search_interval_brackets_the_target((values, mu) in feasible_case()) {
        let p = profile(&values);
        let (a, b) = find_search_interval(&p, mu, &FitOptions::default()).unwrap();
        prop_assert!(a <= b);
        prop_assert!((mean_power(&p, a) - mu) * (mean_power(&p, b) - mu) <= 0.0);
        prop_assert!(a == 0.0 || a.log2().fract() == 0.0);
        let next = if a == 0.0 { 1.0 } else { 2.0 * a };
        prop_assert!(b == a || b == next);
    }

    #[test]
    fn exact_fits_meet_residual_tolerance((values, mu) in feasible_case()) {
        let opts = FitOptions::default();
        let out = find_solution(&profile(&values), mu, &opts).unwrap();
        prop_assert_eq!(out.status, FitStatus::Exact);
        prop_assert!((out.achieved_mean - mu).abs() <= opts.residual_tol);
        prop_assert!((common::s_direct(&values, out.exponent) - mu).abs() <= opts.residual_tol);
    }

    #[test]
    fn status_follows_feasibility(values in profile_values(60), mu in 0.001..0.999f64) {
        let (m, r, n) = common::counts(&values);
        let (lo, hi) = (n as f64 / m as f64, r as f64 / m as f64);
        let opts = FitOptions::default();
        match find_solution(&profile(&values), mu, &opts) {
            Ok(out) => match out.status {
                FitStatus::ClampedLow => {
                    prop_assert!(mu > hi);
                    prop_assert_eq!(out.exponent, 0.0);
                    prop_assert_eq!(out.achieved_mean, hi);
                }
                FitStatus::ClampedHigh => {
                    prop_assert!(mu <= lo);
                    prop_assert_eq!(out.exponent, opts.large_exponent);
                }
                FitStatus::Exact => {
                    prop_assert!(lo < mu && mu <= hi);
                }
            },
            // Feasible targets just above n/m can need exponents beyond the cap.
            Err(FitError::BracketNotFound { .. }) => {
                prop_assert!(lo < mu && mu <= hi);
                prop_assert!(common::s_direct(&values, 512.0) > mu);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fitted_column_round_trips_through_csv(values in profile_values(200), x in 0.0..20.0f64) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fitted.csv");
        let original = profile(&values);
        let fitted = apply_exponent(&original, x);
        let layout = CsvLayout::default();
        write_profile(&path, None, &original, &fitted, &layout).unwrap();

        let fitted_layout = CsvLayout { preamble_lines: 0, value_column: "fitted".into(), ..layout };
        let back = read_profile(&path, &fitted_layout).unwrap();
        prop_assert_eq!(back.profile.len(), fitted.len());
        for (a, b) in back.profile.values().iter().zip(fitted.values()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }
}
