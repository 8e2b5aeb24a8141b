//! Sequential iterative hard thresholding for exact sparse recovery.
//!
//! A K-sparse vector is recovered from linear measurements that arrive in
//! phases: each phase delivers a fresh measurement matrix and its noiseless
//! observation, and the thresholded gradient iteration runs against whatever
//! phase is current. The crate provides:
//!
//! - the projection and recovery iteration ([`sparse`], [`recovery`]);
//! - seeded generation of sub-Gaussian measurement ensembles, phase
//!   schedules, and ground truths ([`sampling`], [`schedule`], [`rng`]);
//! - the dynamic sample complexity of a phase configuration and the
//!   sufficient-condition evaluator built on it ([`complexity`]);
//! - exact brute-force restricted isometry constants at desk scale, used to
//!   verify the per-step and multi-phase contraction bounds independently of
//!   the recovery code ([`ric`], [`eigen`]);
//! - a reproducible Monte Carlo harness for recovery-probability sweeps and
//!   phase-transition diagrams, with CSV and binary PGM outputs
//!   ([`experiment`], [`pgm`]).
//!
//! Everything is deterministic given a master seed; parallel runs produce
//! byte-identical outputs regardless of worker count.

pub mod complexity;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod pgm;
pub mod recovery;
pub mod ric;
pub mod rng;
pub mod sampling;
pub mod schedule;
pub mod sparse;

pub use error::{Result, SihtError};
pub use matrix::Matrix;
pub use recovery::{iht_step, residual, run_offline_iht, run_siht, RecoveryTrace};
pub use sampling::{draw_phase_sizes, sample_matrix, sample_signal, Ensemble, MeasurementPhase};
pub use schedule::PhaseSchedule;
pub use sparse::{hard_threshold, l2_error, l2_norm, support, IndexSet, SparseSignal};
