//! Phase schedules: how a horizon of T steps is split into phases.
//!
//! Boundaries are 0-based: `t_0 = 0 < t_1 < ... < t_s = T`, and phase `i`
//! (0-based) covers steps `t_i + 1 ..= t_{i+1}`, so phase durations are
//! `tau_j = t_j - t_{j-1}` and fractions `p_j = tau_j / T`.

use crate::error::{Result, SihtError};

/// An immutable split of `T` time steps into `s` consecutive phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    boundaries: Vec<usize>,
    durations: Vec<usize>,
    fractions: Vec<f64>,
    horizon: usize,
}

impl PhaseSchedule {
    /// Build from explicit boundaries `[0, t_1, ..., T]`.
    pub fn from_boundaries(boundaries: &[usize]) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(SihtError::InvalidArgument(
                "schedule needs at least two boundaries (0 and T)".into(),
            ));
        }
        if boundaries[0] != 0 {
            return Err(SihtError::InvalidArgument(format!(
                "first boundary must be 0, got {}",
                boundaries[0]
            )));
        }
        if let Some(w) = boundaries.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SihtError::InvalidArgument(format!(
                "boundaries must be strictly increasing, violated at position {w}"
            )));
        }
        let horizon = *boundaries.last().expect("nonempty");
        let durations: Vec<usize> = boundaries.windows(2).map(|w| w[1] - w[0]).collect();
        let fractions: Vec<f64> = durations
            .iter()
            .map(|&tau| tau as f64 / horizon as f64)
            .collect();
        Ok(PhaseSchedule {
            boundaries: boundaries.to_vec(),
            durations,
            fractions,
            horizon,
        })
    }

    /// The schedule with one phase per step: `s = T`, every duration 1.
    pub fn per_step(horizon: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(SihtError::InvalidArgument("horizon must be at least 1".into()));
        }
        Self::from_boundaries(&(0..=horizon).collect::<Vec<_>>())
    }

    /// Single phase covering the whole horizon.
    pub fn single_phase(horizon: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(SihtError::InvalidArgument("horizon must be at least 1".into()));
        }
        Self::from_boundaries(&[0, horizon])
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn durations(&self) -> &[usize] {
        &self.durations
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn phase_count(&self) -> usize {
        self.durations.len()
    }

    /// Largest phase fraction, `max_j p_j`.
    pub fn max_fraction(&self) -> f64 {
        self.fractions.iter().copied().fold(0.0, f64::max)
    }

    /// Longest phase duration in steps.
    pub fn max_duration(&self) -> usize {
        *self.durations.iter().max().expect("nonempty")
    }
}
