//! Dense row-major matrices.
//!
//! Everything in this crate runs at desk scale (a few thousand columns, a few
//! hundred rows), so a flat `Vec<f64>` with explicit loops is all that is
//! needed. No sparse storage, no BLAS.

use crate::error::{Result, SihtError};

/// Dense `rows x cols` matrix of `f64`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(SihtError::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(SihtError::InvalidArgument("matrix needs at least one column".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(SihtError::InvalidArgument(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for r in rows {
            data.extend_from_slice(&r);
        }
        Ok(Matrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Wrap an existing row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SihtError::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(SihtError::DimensionMismatch(format!(
                "buffer has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `y = A x`. Panics if `x.len() != cols`; callers validate shapes at API
    /// boundaries.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec operand length");
        let mut y = vec![0.0; self.rows];
        for (i, yi) in y.iter_mut().enumerate() {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            *yi = acc;
        }
        y
    }

    /// `z = A^T r`, accumulated row by row so the row-major layout stays
    /// cache-friendly.
    pub fn transpose_matvec(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.rows, "transpose_matvec operand length");
        let mut z = vec![0.0; self.cols];
        for (i, ri) in r.iter().enumerate() {
            if *ri == 0.0 {
                continue;
            }
            let row = self.row(i);
            for (zj, aij) in z.iter_mut().zip(row.iter()) {
                *zj += aij * ri;
            }
        }
        z
    }

    /// Dot product of columns `j1` and `j2`.
    pub fn column_dot(&self, j1: usize, j2: usize) -> f64 {
        debug_assert!(j1 < self.cols && j2 < self.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            acc += self.data[i * self.cols + j1] * self.data[i * self.cols + j2];
        }
        acc
    }

    /// Largest absolute asymmetry `max |A_ij - A_ji|`; 0 for non-square.
    pub fn asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}
