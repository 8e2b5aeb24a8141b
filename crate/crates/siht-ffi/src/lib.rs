//! C ABI for the siht library.
//!
//! Conventions:
//! - Every fallible call returns a [`SihtStatus`]; results come back through
//!   out-pointers supplied by the caller.
//! - The phase-wise recovery session is an opaque handle created with
//!   [`siht_recovery_new`] and released with [`siht_recovery_free`]. Matrices
//!   cross the boundary as row-major `double` buffers.
//! - No allocation crosses the boundary except the opaque handle itself;
//!   status messages are static strings and must not be freed.
//!
//! The generated header lands in `include/siht.h`.

use std::ffi::{c_char, CStr};

use siht::complexity;
use siht::error::SihtError;
use siht::matrix::Matrix;
use siht::recovery::iht_step;
use siht::ric;
use siht::sampling::MeasurementPhase;
use siht::sparse::{hard_threshold, SparseSignal};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SihtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was outside its documented domain.
    InvalidArgument = 2,
    /// Buffer shapes disagree.
    DimensionMismatch = 3,
    /// Exact subset enumeration would exceed the cap.
    EnumerationCapExceeded = 4,
    /// An internal numerical routine failed to converge.
    NumericalFailure = 5,
}

impl From<&SihtError> for SihtStatus {
    fn from(e: &SihtError) -> Self {
        match e {
            SihtError::InvalidArgument(_) => SihtStatus::InvalidArgument,
            SihtError::DimensionMismatch(_) => SihtStatus::DimensionMismatch,
            SihtError::PhaseStreamExhausted { .. } => SihtStatus::InvalidArgument,
            SihtError::EnumerationCapExceeded { .. } => SihtStatus::EnumerationCapExceeded,
            SihtError::EigenNoConvergence { .. } => SihtStatus::NumericalFailure,
        }
    }
}

/// The pieces of the dynamic sample complexity for one phase configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SihtComplexityBreakdown {
    /// Number of phases.
    pub phase_count: usize,
    /// Largest phase fraction.
    pub max_fraction: f64,
    /// Duration-weighted arithmetic mean of the measurement counts.
    pub weighted_mean: f64,
    /// Duration-weighted geometric mean of the measurement counts.
    pub weighted_geometric_mean: f64,
    /// The dynamic sample complexity itself.
    pub dynamic_complexity: f64,
}

/// Library version as a static, nul-terminated string.
#[no_mangle]
pub extern "C" fn siht_version() -> *const c_char {
    static VERSION: &CStr = c"0.1.0";
    VERSION.as_ptr()
}

/// Static human-readable message for a status code. Never null; do not free.
#[no_mangle]
pub extern "C" fn siht_status_message(status: SihtStatus) -> *const c_char {
    let message: &CStr = match status {
        SihtStatus::Ok => c"ok",
        SihtStatus::NullPointer => c"a required pointer argument was null",
        SihtStatus::InvalidArgument => c"a parameter was outside its documented domain",
        SihtStatus::DimensionMismatch => c"buffer shapes disagree",
        SihtStatus::EnumerationCapExceeded => c"exact subset enumeration would exceed the cap",
        SihtStatus::NumericalFailure => c"an internal numerical routine failed to converge",
    };
    message.as_ptr()
}

/// Keep the `k` largest-magnitude entries of `values` and zero the rest, in
/// place. Ties keep the lower index.
///
/// # Safety
/// `values` must point to `len` readable and writable doubles.
#[no_mangle]
pub unsafe extern "C" fn siht_hard_threshold(values: *mut f64, len: usize, k: usize) -> SihtStatus {
    if values.is_null() {
        return SihtStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts_mut(values, len);
    match hard_threshold(slice, k) {
        Ok(result) => {
            slice.copy_from_slice(&result);
            SihtStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Evaluate the dynamic sample complexity of `len` phases with measurement
/// counts `counts` and fractions `fractions` (positive, summing to 1 within
/// 1e-9).
///
/// # Safety
/// `counts` and `fractions` must point to `len` readable elements each, and
/// `out` to a writable [`SihtComplexityBreakdown`].
#[no_mangle]
pub unsafe extern "C" fn siht_complexity(
    counts: *const usize,
    fractions: *const f64,
    len: usize,
    out: *mut SihtComplexityBreakdown,
) -> SihtStatus {
    if counts.is_null() || fractions.is_null() || out.is_null() {
        return SihtStatus::NullPointer;
    }
    let counts = std::slice::from_raw_parts(counts, len);
    let fractions = std::slice::from_raw_parts(fractions, len);
    match complexity::breakdown_from_fractions(counts, fractions) {
        Ok(b) => {
            *out = SihtComplexityBreakdown {
                phase_count: b.phase_count,
                max_fraction: b.max_fraction,
                weighted_mean: b.weighted_mean,
                weighted_geometric_mean: b.weighted_geometric_mean,
                dynamic_complexity: b.dynamic_complexity,
            };
            SihtStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Evaluate the sample-complexity threshold
/// `C1 ln(6K) + C2 K ln(3Ne/K) + C3 ln(1/epsilon)` with `C1 = C3 = 96/c_tilde`
/// and `C2 = 288/c_tilde`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn siht_theorem_rhs(
    k: usize,
    n: usize,
    epsilon: f64,
    c_tilde: f64,
    out: *mut f64,
) -> SihtStatus {
    if out.is_null() {
        return SihtStatus::NullPointer;
    }
    match complexity::theorem_rhs(k, n, epsilon, c_tilde) {
        Ok(v) => {
            *out = v;
            SihtStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Closed-form lower bound `2 b^2 / (9 (a + b))` on the expected dynamic
/// complexity for counts uniform on `[a, b]`; requires `2 <= a <= b`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn siht_expected_md_lower_bound(
    a: usize,
    b: usize,
    out: *mut f64,
) -> SihtStatus {
    if out.is_null() {
        return SihtStatus::NullPointer;
    }
    match complexity::expected_md_lower_bound(a, b) {
        Ok(v) => {
            *out = v;
            SihtStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Exact restricted isometry constant of order `order` for the row-major
/// `rows x cols` matrix `phi`, enumerating at most `cap` column subsets.
/// On success writes the constant to `out_value` and, when `out_witness` is
/// not null, the `order` maximizing column indices to it.
///
/// # Safety
/// `phi` must point to `rows * cols` readable doubles, `out_value` to a
/// writable double, and `out_witness` (when not null) to `order` writable
/// `size_t`s.
#[no_mangle]
pub unsafe extern "C" fn siht_ric(
    phi: *const f64,
    rows: usize,
    cols: usize,
    order: usize,
    cap: usize,
    out_value: *mut f64,
    out_witness: *mut usize,
) -> SihtStatus {
    if phi.is_null() || out_value.is_null() {
        return SihtStatus::NullPointer;
    }
    let data = std::slice::from_raw_parts(phi, rows.saturating_mul(cols));
    let matrix = match Matrix::from_vec(rows, cols, data.to_vec()) {
        Ok(m) => m,
        Err(e) => return (&e).into(),
    };
    match ric::ric_with_cap(&matrix, order, cap as u128) {
        Ok(result) => {
            *out_value = result.value;
            if !out_witness.is_null() {
                let witness = std::slice::from_raw_parts_mut(out_witness, order);
                for (slot, index) in witness.iter_mut().zip(result.witness.iter()) {
                    *slot = index;
                }
            }
            SihtStatus::Ok
        }
        Err(e) => (&e).into(),
    }
}

/// Opaque phase-wise recovery session. Create with [`siht_recovery_new`],
/// feed phases with [`siht_recovery_run_phase`], read the estimate with
/// [`siht_recovery_estimate`], release with [`siht_recovery_free`].
pub struct SihtRecovery {
    estimate: SparseSignal,
    iterations: usize,
}

/// Start a recovery session for signals of the given dimension and sparsity
/// budget, initialized at zero. Returns null when the parameters are invalid.
#[no_mangle]
pub extern "C" fn siht_recovery_new(dimension: usize, sparsity: usize) -> *mut SihtRecovery {
    match SparseSignal::zeros(dimension, sparsity) {
        Ok(estimate) => Box::into_raw(Box::new(SihtRecovery {
            estimate,
            iterations: 0,
        })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Run `steps` iterations against one phase's measurement pair. `matrix` is
/// row-major `rows x dimension`; `measurement` has `rows` entries.
///
/// # Safety
/// `handle` must come from [`siht_recovery_new`] and not be freed; `matrix`
/// and `measurement` must point to `rows * dimension` and `rows` readable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn siht_recovery_run_phase(
    handle: *mut SihtRecovery,
    matrix: *const f64,
    rows: usize,
    measurement: *const f64,
    steps: usize,
) -> SihtStatus {
    let Some(session) = handle.as_mut() else {
        return SihtStatus::NullPointer;
    };
    if matrix.is_null() || measurement.is_null() {
        return SihtStatus::NullPointer;
    }
    if steps < 1 {
        return SihtStatus::InvalidArgument;
    }
    let dimension = session.estimate.dimension();
    let data = std::slice::from_raw_parts(matrix, rows.saturating_mul(dimension));
    let matrix = match Matrix::from_vec(rows, dimension, data.to_vec()) {
        Ok(m) => m,
        Err(e) => return (&e).into(),
    };
    let measurement = std::slice::from_raw_parts(measurement, rows).to_vec();
    let phase = match MeasurementPhase::new(matrix, measurement) {
        Ok(p) => p,
        Err(e) => return (&e).into(),
    };
    let budget = session.estimate.sparsity_budget();
    for _ in 0..steps {
        session.estimate = match iht_step(&session.estimate, &phase, budget) {
            Ok(next) => next,
            Err(e) => return (&e).into(),
        };
        session.iterations += 1;
    }
    SihtStatus::Ok
}

/// Copy the current estimate into `out` (length = session dimension).
///
/// # Safety
/// `handle` must come from [`siht_recovery_new`] and not be freed; `out` must
/// point to `dimension` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn siht_recovery_estimate(
    handle: *const SihtRecovery,
    out: *mut f64,
) -> SihtStatus {
    let Some(session) = handle.as_ref() else {
        return SihtStatus::NullPointer;
    };
    if out.is_null() {
        return SihtStatus::NullPointer;
    }
    let out = std::slice::from_raw_parts_mut(out, session.estimate.dimension());
    out.copy_from_slice(session.estimate.values());
    SihtStatus::Ok
}

/// Total iterations run so far; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`siht_recovery_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn siht_recovery_iterations(handle: *const SihtRecovery) -> usize {
    handle.as_ref().map_or(0, |s| s.iterations)
}

/// Release a session. Null is a no-op.
///
/// # Safety
/// `handle` must be null or come from [`siht_recovery_new`], and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn siht_recovery_free(handle: *mut SihtRecovery) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
