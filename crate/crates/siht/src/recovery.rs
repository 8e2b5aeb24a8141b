//! The hard-thresholded gradient iteration and its phase-wise driver.
//!
//! One step with measurement pair `(Phi, y)` and budget K is
//!
//! ```text
//! x_next = H_K( x + Phi^T (y - Phi x) )
//! ```
//!
//! with unit step size and no step-size adaptation. The phase driver runs the
//! step against a stream of measurement pairs, consuming exactly one pair per
//! phase at the phase boundary: matrices arrive over time and must never be
//! required up front.

use crate::error::{Result, SihtError};
use crate::sampling::MeasurementPhase;
use crate::schedule::PhaseSchedule;
use crate::sparse::{hard_threshold, l2_error, SparseSignal};

/// Outcome of a recovery run.
///
/// `errors` is populated only when a ground truth was supplied: entry `t` is
/// the estimation error of the iterate after `t` steps, so the vector has
/// `iterations + 1` entries starting at the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryTrace {
    errors: Option<Vec<f64>>,
    final_estimate: SparseSignal,
    iterations: usize,
}

impl RecoveryTrace {
    pub fn errors(&self) -> Option<&[f64]> {
        self.errors.as_deref()
    }

    pub fn final_estimate(&self) -> &SparseSignal {
        &self.final_estimate
    }

    pub fn into_final_estimate(self) -> SparseSignal {
        self.final_estimate
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Estimation error of the final iterate, if a ground truth was supplied.
    pub fn final_error(&self) -> Option<f64> {
        self.errors.as_ref().map(|e| *e.last().expect("nonempty trace"))
    }

    /// Whether the final error is at or below `threshold`; `None` without a
    /// ground truth.
    pub fn succeeded(&self, threshold: f64) -> Option<bool> {
        self.final_error().map(|e| e <= threshold)
    }
}

/// One gradient step followed by the top-K projection.
pub fn iht_step(x_prev: &SparseSignal, phase: &MeasurementPhase, k: usize) -> Result<SparseSignal> {
    let n = x_prev.dimension();
    if phase.signal_dimension() != n {
        return Err(SihtError::DimensionMismatch(format!(
            "phase expects signals of dimension {}, iterate has {}",
            phase.signal_dimension(),
            n
        )));
    }
    let r = residual(phase, x_prev)?;
    let correction = phase.matrix().transpose_matvec(&r);
    let mut z = x_prev.values().to_vec();
    for (zi, ci) in z.iter_mut().zip(correction.iter()) {
        *zi += ci;
    }
    let thresholded = hard_threshold(&z, k)?;
    let next = SparseSignal::new(thresholded, k)?;
    debug_assert!(next.nonzero_count() <= k, "iterate broke the sparsity budget");
    Ok(next)
}

/// Residual `y - Phi x` of an estimate against a phase.
pub fn residual(phase: &MeasurementPhase, x: &SparseSignal) -> Result<Vec<f64>> {
    if phase.signal_dimension() != x.dimension() {
        return Err(SihtError::DimensionMismatch(format!(
            "phase expects signals of dimension {}, estimate has {}",
            phase.signal_dimension(),
            x.dimension()
        )));
    }
    let predicted = phase.matrix().matvec(x.values());
    Ok(phase
        .measurement()
        .iter()
        .zip(predicted.iter())
        .map(|(y, p)| y - p)
        .collect())
}

/// Run `iterations` steps against a single fixed phase.
pub fn run_offline_iht(
    phase: &MeasurementPhase,
    k: usize,
    iterations: usize,
    x0: &SparseSignal,
    truth: Option<&SparseSignal>,
) -> Result<RecoveryTrace> {
    if iterations < 1 {
        return Err(SihtError::InvalidArgument("need at least one iteration".into()));
    }
    let mut errors = start_trace(x0, truth)?;
    let mut x = x0.clone();
    for _ in 0..iterations {
        x = iht_step(&x, phase, k)?;
        record(&mut errors, &x, truth)?;
    }
    Ok(RecoveryTrace {
        errors,
        final_estimate: x,
        iterations,
    })
}

/// Run the phase-wise iteration over a schedule.
///
/// `phases` is pulled lazily: exactly one `next()` per phase, issued when the
/// phase begins. The stream must yield a phase with `M_j` rows for every
/// scheduled phase `j`; ending early is a protocol error.
pub fn run_siht<I>(
    schedule: &PhaseSchedule,
    phases: I,
    k: usize,
    x0: &SparseSignal,
    truth: Option<&SparseSignal>,
) -> Result<RecoveryTrace>
where
    I: IntoIterator<Item = MeasurementPhase>,
{
    let mut stream = phases.into_iter();
    let mut errors = start_trace(x0, truth)?;
    let mut x = x0.clone();
    for (index, &duration) in schedule.durations().iter().enumerate() {
        let phase = stream.next().ok_or(SihtError::PhaseStreamExhausted {
            expected: schedule.phase_count(),
            received: index,
        })?;
        for _ in 0..duration {
            x = iht_step(&x, &phase, k)?;
            record(&mut errors, &x, truth)?;
        }
    }
    Ok(RecoveryTrace {
        errors,
        final_estimate: x,
        iterations: schedule.horizon(),
    })
}

fn start_trace(x0: &SparseSignal, truth: Option<&SparseSignal>) -> Result<Option<Vec<f64>>> {
    match truth {
        Some(t) => Ok(Some(vec![l2_error(x0.values(), t.values())?])),
        None => Ok(None),
    }
}

fn record(errors: &mut Option<Vec<f64>>, x: &SparseSignal, truth: Option<&SparseSignal>) -> Result<()> {
    if let (Some(errs), Some(t)) = (errors.as_mut(), truth) {
        errs.push(l2_error(x.values(), t.values())?);
    }
    Ok(())
}
