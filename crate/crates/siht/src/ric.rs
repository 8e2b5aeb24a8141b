//! Exact restricted isometry constants by subset enumeration, and the
//! contraction checks built on them.
//!
//! The constant of order R is the maximum over all column subsets S with
//! |S| = R of the spectral norm of `Phi_S^T Phi_S - I`. Restricting to
//! subsets of size exactly R is sufficient: principal-submatrix eigenvalue
//! interlacing makes the maximum over `|S| <= R` attained at full size.
//!
//! Enumeration is exact with a hard cap on the subset count; there is no
//! randomized fallback. This module exists to provide ground truth for the
//! recovery iteration, so an approximation would defeat its purpose.

use crate::eigen::jacobi_eigenvalues;
use crate::error::{Result, SihtError};
use crate::matrix::Matrix;
use crate::recovery::{iht_step, run_siht};
use crate::sampling::MeasurementPhase;
use crate::schedule::PhaseSchedule;
use crate::sparse::{l2_error, IndexSet, SparseSignal};

/// Default cap on the number of enumerated subsets.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

/// Entrywise symmetry tolerance accepted by [`operator_norm_sym`].
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Slack on contraction inequality checks; absorbs float error accumulated
/// over runs of up to a few hundred steps.
const INEQUALITY_SLACK: f64 = 1e-9;

/// Errors below this are treated as zero when forming contraction ratios.
const NEGLIGIBLE_ERROR: f64 = 1e-12;

/// A restricted isometry constant together with the subset achieving it.
#[derive(Debug, Clone)]
pub struct RicResult {
    pub order: usize,
    pub value: f64,
    pub witness: IndexSet,
}

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
pub fn operator_norm_sym(matrix: &Matrix) -> Result<f64> {
    if matrix.rows() != matrix.cols() {
        return Err(SihtError::InvalidArgument(format!(
            "operator norm needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let asym = matrix.asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(SihtError::InvalidArgument(format!(
            "matrix is asymmetric by {asym:e}, tolerance {SYMMETRY_TOLERANCE:e}"
        )));
    }
    let eigenvalues = jacobi_eigenvalues(matrix)?;
    Ok(eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

/// Number of R-subsets of an n-set, saturating at `u128::MAX`.
fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exact RIC of order `order` with the default enumeration cap.
pub fn ric(phi: &Matrix, order: usize) -> Result<RicResult> {
    ric_with_cap(phi, order, DEFAULT_SUBSET_CAP)
}

/// Exact RIC of order `order`, refusing outright if the subset count exceeds
/// `cap`.
pub fn ric_with_cap(phi: &Matrix, order: usize, cap: u128) -> Result<RicResult> {
    let n = phi.cols();
    if order < 1 || order > n {
        return Err(SihtError::InvalidArgument(format!(
            "RIC order {order} out of range [1, {n}]"
        )));
    }
    let count = binomial(n, order);
    if count > cap {
        return Err(SihtError::EnumerationCapExceeded {
            n,
            r: order,
            count,
            cap,
        });
    }

    // Full Gram matrix once; each subset then reads O(R^2) entries.
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let d = phi.column_dot(i, j);
            gram[i * n + j] = d;
            gram[j * n + i] = d;
        }
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_subset: Vec<usize> = Vec::new();
    let mut subset: Vec<usize> = (0..order).collect();
    let mut deviation = Matrix::zeros(order, order);
    loop {
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                let shift = if a == b { 1.0 } else { 0.0 };
                deviation.set(a, b, gram[i * n + j] - shift);
            }
        }
        let value = operator_norm_sym(&deviation)?;
        // Lexicographic enumeration order makes the first maximum the
        // lexicographically smallest witness, deterministically.
        if value > best_value {
            best_value = value;
            best_subset = subset.clone();
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }

    Ok(RicResult {
        order,
        value: best_value,
        witness: IndexSet::new(best_subset),
    })
}

/// Advance `subset` to the next R-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] != i + n - r {
            subset[i] += 1;
            for j in (i + 1)..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Outcome of a single-step contraction check.
#[derive(Debug, Clone)]
pub struct ContractionCheck {
    /// Error after one step divided by error before (0 when the previous
    /// error was negligible).
    pub ratio: f64,
    /// `sqrt(3) * delta_{3K}` for this matrix.
    pub bound: f64,
    pub holds: bool,
}

/// Check that one thresholded gradient step contracts the estimation error by
/// at least `sqrt(3) * delta_{3K}`.
///
/// Vacuously holds when the starting error is below 1e-12 (the ratio would be
/// 0/0).
pub fn verify_contraction(
    phi: &Matrix,
    truth: &SparseSignal,
    x_prev: &SparseSignal,
    k: usize,
) -> Result<ContractionCheck> {
    let n = phi.cols();
    if truth.dimension() != n || x_prev.dimension() != n {
        return Err(SihtError::DimensionMismatch(
            "signal dimensions must match the matrix columns".into(),
        ));
    }
    if x_prev.nonzero_count() > k {
        return Err(SihtError::InvalidArgument(format!(
            "previous iterate has {} nonzeros, more than budget {k}",
            x_prev.nonzero_count()
        )));
    }
    if 3 * k > n {
        return Err(SihtError::InvalidArgument(format!(
            "contraction bound needs 3K <= N, got K={k}, N={n}"
        )));
    }
    let delta = ric(phi, 3 * k)?.value;
    let bound = 3f64.sqrt() * delta;

    let previous_error = l2_error(x_prev.values(), truth.values())?;
    if previous_error < NEGLIGIBLE_ERROR {
        return Ok(ContractionCheck {
            ratio: 0.0,
            bound,
            holds: true,
        });
    }
    let phase = MeasurementPhase::observe(phi.clone(), truth)?;
    let next = iht_step(x_prev, &phase, k)?;
    let next_error = l2_error(next.values(), truth.values())?;
    let ratio = next_error / previous_error;
    Ok(ContractionCheck {
        ratio,
        bound,
        holds: ratio <= bound + INEQUALITY_SLACK,
    })
}

/// Outcome of the multi-phase product bound check. `lhs` and `rhs` report the
/// phase boundary with the smallest margin.
#[derive(Debug, Clone)]
pub struct ProductBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Run the phase-wise iteration on the given per-phase matrices and verify
/// that at every phase boundary `t_i` the error is at most
/// `3^{t_i/2} * prod_j delta_{3K}(Phi_j)^{tau_j} * ||x0 - x||`.
pub fn product_contraction_bound(
    phase_matrices: &[Matrix],
    schedule: &PhaseSchedule,
    k: usize,
    truth: &SparseSignal,
    x0: &SparseSignal,
) -> Result<ProductBoundCheck> {
    if phase_matrices.len() != schedule.phase_count() {
        return Err(SihtError::DimensionMismatch(format!(
            "{} matrices for {} phases",
            phase_matrices.len(),
            schedule.phase_count()
        )));
    }
    let deltas: Vec<f64> = phase_matrices
        .iter()
        .map(|m| ric(m, 3 * k).map(|r| r.value))
        .collect::<Result<_>>()?;

    let phases: Vec<MeasurementPhase> = phase_matrices
        .iter()
        .map(|m| MeasurementPhase::observe(m.clone(), truth))
        .collect::<Result<_>>()?;
    let trace = run_siht(schedule, phases, k, x0, Some(truth))?;
    let errors = trace.errors().expect("truth supplied");
    let initial_error = errors[0];

    let ln3 = 3f64.ln();
    let mut holds = true;
    let mut worst = ProductBoundCheck {
        lhs: initial_error,
        rhs: initial_error,
        holds: true,
    };
    let mut worst_margin = f64::INFINITY;
    let mut log_delta_product = 0.0;
    let mut delta_product_is_zero = false;
    for (i, &boundary) in schedule.boundaries().iter().enumerate().skip(1) {
        let duration = schedule.durations()[i - 1];
        let delta = deltas[i - 1];
        if delta == 0.0 {
            delta_product_is_zero = true;
        } else {
            log_delta_product += duration as f64 * delta.ln();
        }
        let lhs = errors[boundary];
        let rhs = if delta_product_is_zero || initial_error == 0.0 {
            0.0
        } else {
            ((boundary as f64 / 2.0) * ln3 + log_delta_product + initial_error.ln()).exp()
        };
        let ok = lhs <= rhs + INEQUALITY_SLACK;
        holds &= ok;
        let margin = rhs - lhs;
        if margin < worst_margin {
            worst_margin = margin;
            worst = ProductBoundCheck { lhs, rhs, holds };
        }
    }
    worst.holds = holds;
    Ok(worst)
}
