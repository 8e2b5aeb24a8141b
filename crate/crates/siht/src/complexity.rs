//! Dynamic sample complexity and the sufficient-condition evaluator.
//!
//! For phase measurement counts `M_j` with fractions `p_j`, the dynamic sample
//! complexity is
//!
//! ```text
//! M_d = g^2 / (s * p_max * a),   a = sum_j p_j M_j,   g = prod_j M_j^{p_j}
//! ```
//!
//! where `a` is the duration-weighted arithmetic mean and `g` the weighted
//! geometric mean of the counts. The sufficient condition compares `M_d`
//! against `C1 ln(6K) + C2 K ln(3Ne/K) + C3 ln(1/eps)` with
//! `C1 = C3 = 96/c~` and `C2 = 288/c~`; the constant `c~` depends only on the
//! sub-Gaussian tail parameter and is a caller-supplied knob here (default 96
//! in the CLI, making the coefficients 1, 3, 1).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SihtError};
use crate::rng;
use crate::sampling::draw_phase_sizes;
use crate::schedule::PhaseSchedule;

/// The pieces of the dynamic sample complexity for one phase configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexityBreakdown {
    /// Phase fractions `p_j`.
    pub fractions: Vec<f64>,
    /// Largest fraction.
    #[serde(rename = "p_bar")]
    pub max_fraction: f64,
    /// Duration-weighted arithmetic mean of the counts.
    #[serde(rename = "a_m")]
    pub weighted_mean: f64,
    /// Duration-weighted geometric mean of the counts.
    #[serde(rename = "g_m")]
    pub weighted_geometric_mean: f64,
    /// Number of phases.
    #[serde(rename = "s")]
    pub phase_count: usize,
    /// The dynamic sample complexity itself.
    #[serde(rename = "md")]
    pub dynamic_complexity: f64,
}

/// Evaluate the breakdown for integer phase durations.
///
/// The weighted mean and the `s * p_max` factor are accumulated in integer
/// arithmetic before a single division each, so the equal-count identities
/// (`M_d == M` for one phase, and for equal counts with equal durations) hold
/// exactly in floating point.
pub fn dynamic_sample_complexity(
    counts: &[usize],
    schedule: &PhaseSchedule,
) -> Result<ComplexityBreakdown> {
    if counts.len() != schedule.phase_count() {
        return Err(SihtError::DimensionMismatch(format!(
            "{} measurement counts for {} phases",
            counts.len(),
            schedule.phase_count()
        )));
    }
    if counts.contains(&0) {
        return Err(SihtError::InvalidArgument("measurement counts must be positive".into()));
    }
    let horizon = schedule.horizon() as u128;
    let weighted_sum: u128 = counts
        .iter()
        .zip(schedule.durations().iter())
        .map(|(&m, &tau)| m as u128 * tau as u128)
        .sum();
    let weighted_mean = weighted_sum as f64 / horizon as f64;
    let s_times_pmax =
        (schedule.phase_count() as u128 * schedule.max_duration() as u128) as f64 / horizon as f64;

    let geometric = weighted_geometric(counts, schedule.fractions());
    let dynamic_complexity = geometric * geometric / (s_times_pmax * weighted_mean);

    Ok(ComplexityBreakdown {
        fractions: schedule.fractions().to_vec(),
        max_fraction: schedule.max_fraction(),
        weighted_mean,
        weighted_geometric_mean: geometric,
        phase_count: schedule.phase_count(),
        dynamic_complexity,
    })
}

/// Evaluate the breakdown from raw fractions (the CLI path, where durations
/// are not available). Fractions must be positive and sum to 1 within 1e-9.
pub fn breakdown_from_fractions(counts: &[usize], fractions: &[f64]) -> Result<ComplexityBreakdown> {
    if counts.is_empty() {
        return Err(SihtError::InvalidArgument("need at least one phase".into()));
    }
    if counts.len() != fractions.len() {
        return Err(SihtError::DimensionMismatch(format!(
            "{} measurement counts for {} fractions",
            counts.len(),
            fractions.len()
        )));
    }
    if counts.contains(&0) {
        return Err(SihtError::InvalidArgument("measurement counts must be positive".into()));
    }
    if fractions.iter().any(|&p| p <= 0.0 || !p.is_finite()) {
        return Err(SihtError::InvalidArgument("fractions must be positive".into()));
    }
    let total = pairwise_sum(fractions);
    if (total - 1.0).abs() > 1e-9 {
        return Err(SihtError::InvalidArgument(format!(
            "fractions must sum to 1, got {total}"
        )));
    }
    let max_fraction = fractions.iter().copied().fold(0.0, f64::max);
    let products: Vec<f64> = counts
        .iter()
        .zip(fractions.iter())
        .map(|(&m, &p)| m as f64 * p)
        .collect();
    let weighted_mean = pairwise_sum(&products);
    let s_times_pmax = counts.len() as f64 * max_fraction;
    let geometric = weighted_geometric(counts, fractions);
    let dynamic_complexity = geometric * geometric / (s_times_pmax * weighted_mean);
    Ok(ComplexityBreakdown {
        fractions: fractions.to_vec(),
        max_fraction,
        weighted_mean,
        weighted_geometric_mean: geometric,
        phase_count: counts.len(),
        dynamic_complexity,
    })
}

/// `prod M_j^{p_j}`, in log space for overflow safety. Equal counts short-cut
/// to the count itself so the AM-GM equality case is exact.
fn weighted_geometric(counts: &[usize], fractions: &[f64]) -> f64 {
    let first = counts[0];
    if counts.iter().all(|&m| m == first) {
        return first as f64;
    }
    let log_sum: f64 = counts
        .iter()
        .zip(fractions.iter())
        .map(|(&m, &p)| p * (m as f64).ln())
        .sum();
    log_sum.exp()
}

/// Result of checking the sufficient condition.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub rhs: f64,
    pub satisfied: bool,
    pub margin: f64,
}

/// The sample-complexity threshold `C1 ln(6K) + C2 K ln(3Ne/K) + C3 ln(1/eps)`.
///
/// `epsilon = 1` is allowed so the logarithmic terms can be probed alone.
pub fn theorem_rhs(k: usize, n: usize, epsilon: f64, c_tilde: f64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(SihtError::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon > 1.0 {
        return Err(SihtError::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if c_tilde.is_nan() || c_tilde <= 0.0 {
        return Err(SihtError::InvalidArgument(format!("c_tilde must be positive, got {c_tilde}")));
    }
    let c1 = 96.0 / c_tilde;
    let c2 = 288.0 / c_tilde;
    let c3 = c1;
    let kf = k as f64;
    let nf = n as f64;
    Ok(c1 * (6.0 * kf).ln()
        + c2 * kf * (3.0 * nf * std::f64::consts::E / kf).ln()
        + c3 * (1.0 / epsilon).ln())
}

/// Compare a breakdown's dynamic complexity against the threshold.
pub fn satisfies_theorem(
    breakdown: &ComplexityBreakdown,
    k: usize,
    n: usize,
    epsilon: f64,
    c_tilde: f64,
) -> Result<TheoremCheck> {
    let rhs = theorem_rhs(k, n, epsilon, c_tilde)?;
    let margin = breakdown.dynamic_complexity - rhs;
    Ok(TheoremCheck {
        rhs,
        satisfied: margin >= 0.0,
        margin,
    })
}

/// Closed-form lower bound `2 b^2 / (9 (a + b))` on the expected dynamic
/// complexity when counts are uniform on `[a, b]` with equal fractions.
/// The derivation needs `2 <= a <= b`.
pub fn expected_md_lower_bound(a: usize, b: usize) -> Result<f64> {
    if a < 2 || a > b {
        return Err(SihtError::InvalidArgument(format!(
            "bound requires 2 <= a <= b, got [{a}, {b}]"
        )));
    }
    let af = a as f64;
    let bf = b as f64;
    Ok(2.0 * bf * bf / (9.0 * (af + bf)))
}

/// Monte Carlo estimate of the expected dynamic complexity.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Estimate `E[M_d]` for counts uniform on `[a, b]` over `s` equal-fraction
/// phases by drawing `trials` independent configurations.
///
/// Trials use derived seeds and are gathered in trial order, then reduced with
/// pairwise summation, so the estimate is independent of execution order.
pub fn estimate_expected_md(
    a: usize,
    b: usize,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if a < 2 || a > b {
        return Err(SihtError::InvalidArgument(format!(
            "estimator requires 2 <= a <= b, got [{a}, {b}]"
        )));
    }
    if s < 1 || trials < 1 {
        return Err(SihtError::InvalidArgument(
            "need at least one phase and one trial".into(),
        ));
    }
    let schedule = PhaseSchedule::per_step(s)?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let counts = draw_phase_sizes(a, b, s, rng::derive(seed, &[trial as u64]))?;
            Ok(dynamic_sample_complexity(&counts, &schedule)?.dynamic_complexity)
        })
        .collect::<Result<_>>()?;

    let mean = pairwise_sum(&values) / trials as f64;
    let std_error = if trials > 1 {
        let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&squares) / (trials - 1) as f64 / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate { mean, std_error })
}

/// Pairwise (cascade) summation: deterministic and accurate regardless of how
/// the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_phase_is_exactly_the_count() {
        let schedule = PhaseSchedule::single_phase(10).unwrap();
        let b = dynamic_sample_complexity(&[100], &schedule).unwrap();
        assert_eq!(b.dynamic_complexity, 100.0);
        assert_eq!(b.weighted_mean, 100.0);
        assert_eq!(b.weighted_geometric_mean, 100.0);
    }

    #[test]
    fn equal_counts_equal_fractions_exact() {
        for (s, m) in [(3usize, 7usize), (49, 12), (100, 85), (5, 1_000_000_000)] {
            let schedule = PhaseSchedule::per_step(s).unwrap();
            let b = dynamic_sample_complexity(&vec![m; s], &schedule).unwrap();
            assert_eq!(b.dynamic_complexity, m as f64, "s={s} m={m}");
        }
    }

    #[test]
    fn hand_evaluated_mixed_case() {
        let schedule = PhaseSchedule::per_step(4).unwrap();
        let b = dynamic_sample_complexity(&[4, 16, 4, 16], &schedule).unwrap();
        assert!((b.weighted_geometric_mean - 8.0).abs() < 1e-12);
        assert_eq!(b.weighted_mean, 10.0);
        assert_eq!(b.max_fraction, 0.25);
        assert!((b.dynamic_complexity - 6.4).abs() < 1e-12);
    }

    #[test]
    fn fraction_path_matches_schedule_path() {
        let schedule = PhaseSchedule::from_boundaries(&[0, 2, 10]).unwrap();
        let counts = [30usize, 7];
        let a = dynamic_sample_complexity(&counts, &schedule).unwrap();
        let b = breakdown_from_fractions(&counts, &[0.2, 0.8]).unwrap();
        assert!((a.dynamic_complexity - b.dynamic_complexity).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let schedule = PhaseSchedule::per_step(2).unwrap();
        assert!(dynamic_sample_complexity(&[3], &schedule).is_err());
        assert!(dynamic_sample_complexity(&[3, 0], &schedule).is_err());
        assert!(breakdown_from_fractions(&[3, 4], &[0.5, 0.4]).is_err());
        assert!(breakdown_from_fractions(&[3, 4], &[0.5]).is_err());
        assert!(breakdown_from_fractions(&[], &[]).is_err());
        assert!(breakdown_from_fractions(&[3, 4], &[1.5, -0.5]).is_err());
    }

    #[test]
    fn theorem_rhs_hand_value() {
        // c~ = 96 gives coefficients 1, 3, 1. With K = N = 1 and eps = 1:
        // ln 6 + 3 ln(3e) = 8.087596...
        let rhs = theorem_rhs(1, 1, 1.0, 96.0).unwrap();
        assert!((rhs - 8.0876).abs() < 1e-3, "rhs {rhs}");
    }

    #[test]
    fn theorem_rhs_scales_and_monotone() {
        let base = theorem_rhs(5, 1000, 0.5, 96.0).unwrap();
        let doubled = theorem_rhs(5, 1000, 0.5, 192.0).unwrap();
        assert!((base - 2.0 * doubled).abs() < 1e-9 * base);

        let tighter = theorem_rhs(5, 1000, 0.25, 96.0).unwrap();
        assert!(tighter > base);

        assert!(theorem_rhs(0, 10, 0.5, 96.0).is_err());
        assert!(theorem_rhs(11, 10, 0.5, 96.0).is_err());
        assert!(theorem_rhs(1, 10, 0.0, 96.0).is_err());
        assert!(theorem_rhs(1, 10, 0.5, 0.0).is_err());
    }

    #[test]
    fn satisfaction_boundary_and_extremes() {
        let schedule = PhaseSchedule::single_phase(5).unwrap();
        let rhs = theorem_rhs(2, 100, 0.5, 96.0).unwrap();
        // Construct a breakdown sitting exactly on the boundary.
        let mut boundary = dynamic_sample_complexity(&[1], &schedule).unwrap();
        boundary.dynamic_complexity = rhs;
        let check = satisfies_theorem(&boundary, 2, 100, 0.5, 96.0).unwrap();
        assert!(check.satisfied);
        assert_eq!(check.margin, 0.0);

        let huge = dynamic_sample_complexity(&[1_000_000_000], &schedule).unwrap();
        assert!(satisfies_theorem(&huge, 5, 1000, 0.5, 96.0).unwrap().satisfied);

        let tiny = dynamic_sample_complexity(&[1], &schedule).unwrap();
        assert!(!satisfies_theorem(&tiny, 5, 1000, 0.5, 96.0).unwrap().satisfied);
    }

    #[test]
    fn lower_bound_hand_values() {
        assert!((expected_md_lower_bound(2, 2).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert!((expected_md_lower_bound(5, 20).unwrap() - 800.0 / 225.0).abs() < 1e-12);
        assert!((expected_md_lower_bound(20, 150).unwrap() - 45000.0 / 1530.0).abs() < 1e-12);
        assert!(expected_md_lower_bound(1, 5).is_err());
        assert!(expected_md_lower_bound(6, 5).is_err());
    }

    #[test]
    fn estimator_degenerate_range() {
        let est = estimate_expected_md(7, 7, 4, 100, 1).unwrap();
        assert_eq!(est.mean, 7.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn estimator_matches_exhaustive_enumeration() {
        // s = 2 with equal fractions gives M_d = 2 M1 M2 / (M1 + M2); over
        // {2,3}^2 the average is (2 + 2.4 + 2.4 + 3) / 4 = 2.45.
        let mut exact = 0.0;
        let schedule = PhaseSchedule::per_step(2).unwrap();
        for m1 in 2..=3usize {
            for m2 in 2..=3usize {
                exact += dynamic_sample_complexity(&[m1, m2], &schedule)
                    .unwrap()
                    .dynamic_complexity;
            }
        }
        exact /= 4.0;
        assert!((exact - 2.45).abs() < 1e-12);

        let est = estimate_expected_md(2, 3, 2, 20_000, 9).unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.std_error,
            "estimate {} vs exact {exact} (se {})",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn estimator_is_deterministic() {
        let a = estimate_expected_md(5, 20, 10, 500, 3).unwrap();
        let b = estimate_expected_md(5, 20, 10, 500, 3).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std_error, b.std_error);
    }

    #[test]
    fn pairwise_sum_matches_exact_integer_case() {
        let values: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&values), 500500.0);
    }

    proptest! {
        #[test]
        fn am_gm_and_scale_law(
            counts in proptest::collection::vec(1usize..1_000_000, 1..40),
            gaps in proptest::collection::vec(1usize..20, 1..40),
            scale in 2usize..10,
        ) {
            let s = counts.len().min(gaps.len());
            let counts = &counts[..s];
            let mut boundaries = vec![0usize];
            for g in &gaps[..s] {
                boundaries.push(boundaries.last().unwrap() + g);
            }
            let schedule = PhaseSchedule::from_boundaries(&boundaries).unwrap();
            let b = dynamic_sample_complexity(counts, &schedule).unwrap();
            // AM-GM with a hair of float slack.
            prop_assert!(
                b.weighted_geometric_mean <= b.weighted_mean * (1.0 + 1e-12),
                "g {} > a {}", b.weighted_geometric_mean, b.weighted_mean
            );
            prop_assert!(b.dynamic_complexity > 0.0);

            // Scaling every count by an integer scales M_d by the same factor.
            let scaled: Vec<usize> = counts.iter().map(|&m| m * scale).collect();
            let sb = dynamic_sample_complexity(&scaled, &schedule).unwrap();
            let expect = b.dynamic_complexity * scale as f64;
            prop_assert!(
                (sb.dynamic_complexity - expect).abs() <= 1e-12 * expect,
                "{} vs {}", sb.dynamic_complexity, expect
            );
        }

        #[test]
        fn breakdown_is_permutation_invariant(
            pairs in proptest::collection::vec((1usize..10_000, 1usize..15), 2..20),
            rotate in 1usize..19,
        ) {
            let counts: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let gaps: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let rot = rotate % counts.len();

            let build = |cs: &[usize], gs: &[usize]| {
                let mut boundaries = vec![0usize];
                for g in gs {
                    boundaries.push(boundaries.last().unwrap() + g);
                }
                let schedule = PhaseSchedule::from_boundaries(&boundaries).unwrap();
                dynamic_sample_complexity(cs, &schedule).unwrap()
            };

            let base = build(&counts, &gaps);
            let mut rc = counts.clone();
            rc.rotate_left(rot);
            let mut rg = gaps.clone();
            rg.rotate_left(rot);
            let rotated = build(&rc, &rg);

            prop_assert!((base.dynamic_complexity - rotated.dynamic_complexity).abs()
                <= 1e-9 * base.dynamic_complexity.max(1.0));
            prop_assert!((base.weighted_mean - rotated.weighted_mean).abs()
                <= 1e-9 * base.weighted_mean);
        }
    }
}
