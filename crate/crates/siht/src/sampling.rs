//! Seeded generation of measurement matrices, phase sizes, and ground truths.
//!
//! A measurement matrix is drawn as `A / sqrt(M)` where `A` has i.i.d. entries
//! of variance exactly 1 from one of the supported sub-Gaussian families. The
//! sub-Gaussian tail parameter of the family never enters any computation in
//! this crate (it only shifts unknowable constants), so it is documented here
//! rather than carried as a numeric field.
//!
//! All draws are pure functions of their `u64` stream seed; see [`crate::rng`].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SihtError};
use crate::matrix::Matrix;
use crate::rng;
use crate::sparse::SparseSignal;

/// Supported unit-variance sub-Gaussian entry families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Standard normal entries.
    Gaussian,
    /// Entries +-1 with equal probability.
    Rademacher,
    /// Entries uniform on [-sqrt(3), sqrt(3)].
    UniformSymmetric,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::Rademacher => "rademacher",
            Ensemble::UniformSymmetric => "uniform-symmetric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(Ensemble::Gaussian),
            "rademacher" => Some(Ensemble::Rademacher),
            "uniform-symmetric" | "uniform" => Some(Ensemble::UniformSymmetric),
            _ => None,
        }
    }
}

/// One phase's measurement pair: the matrix and the noiseless observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPhase {
    matrix: Matrix,
    measurement: Vec<f64>,
}

impl MeasurementPhase {
    /// Pair an existing matrix with an existing measurement vector.
    pub fn new(matrix: Matrix, measurement: Vec<f64>) -> Result<Self> {
        if matrix.rows() != measurement.len() {
            return Err(SihtError::DimensionMismatch(format!(
                "matrix has {} rows but measurement has {} entries",
                matrix.rows(),
                measurement.len()
            )));
        }
        Ok(MeasurementPhase { matrix, measurement })
    }

    /// Observe a ground truth through a matrix: `y = Phi x`, noiseless.
    pub fn observe(matrix: Matrix, truth: &SparseSignal) -> Result<Self> {
        if matrix.cols() != truth.dimension() {
            return Err(SihtError::DimensionMismatch(format!(
                "matrix has {} columns but signal has dimension {}",
                matrix.cols(),
                truth.dimension()
            )));
        }
        let measurement = matrix.matvec(truth.values());
        Ok(MeasurementPhase { matrix, measurement })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn measurement(&self) -> &[f64] {
        &self.measurement
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn signal_dimension(&self) -> usize {
        self.matrix.cols()
    }
}

/// Draw `count` measurement sizes, each independently uniform on the integers
/// `a ..= b`.
pub fn draw_phase_sizes(a: usize, b: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if a < 1 || a > b {
        return Err(SihtError::InvalidArgument(format!(
            "size range must satisfy 1 <= a <= b, got [{a}, {b}]"
        )));
    }
    if count < 1 {
        return Err(SihtError::InvalidArgument("need at least one phase".into()));
    }
    let mut rng = rng::stream(seed);
    Ok((0..count).map(|_| rng.random_range(a..=b)).collect())
}

/// Draw an `m x n` matrix with i.i.d. unit-variance entries from `ensemble`,
/// divided by `sqrt(m)`.
pub fn sample_matrix(ensemble: Ensemble, m: usize, n: usize, seed: u64) -> Result<Matrix> {
    if m < 1 || n < 1 {
        return Err(SihtError::InvalidArgument(format!(
            "matrix dimensions must be positive, got {m}x{n}"
        )));
    }
    let mut rng = rng::stream(seed);
    let root_m = (m as f64).sqrt();
    let mut data = Vec::with_capacity(m * n);
    match ensemble {
        Ensemble::Gaussian => {
            for _ in 0..m * n {
                let g: f64 = StandardNormal.sample(&mut rng);
                data.push(g / root_m);
            }
        }
        Ensemble::Rademacher => {
            for _ in 0..m * n {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                data.push(sign / root_m);
            }
        }
        Ensemble::UniformSymmetric => {
            let half_width = 3f64.sqrt();
            for _ in 0..m * n {
                let u: f64 = rng.random();
                data.push((2.0 * u - 1.0) * half_width / root_m);
            }
        }
    }
    Matrix::from_vec(m, n, data)
}

/// Draw a ground truth with support uniform over all K-subsets of `0..n` and
/// standard normal values on the support.
pub fn sample_signal(n: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    if n < 1 || k < 1 || k > n {
        return Err(SihtError::InvalidArgument(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut rng = rng::stream(seed);
    // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        indices.swap(i, j);
    }
    let mut support: Vec<usize> = indices[..k].to_vec();
    support.sort_unstable();

    let mut values = vec![0.0; n];
    for &i in &support {
        values[i] = StandardNormal.sample(&mut rng);
    }
    SparseSignal::truth(values, k)
}
