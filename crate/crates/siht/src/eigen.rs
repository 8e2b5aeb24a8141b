//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Plane rotations annihilate one off-diagonal element at a time; sweeps stop
//! once the off-diagonal Frobenius norm drops below 1e-12. The matrices this
//! crate feeds in are Gram deviations of a handful of columns, so convergence
//! takes a few sweeps; 100 is a hard cap.

use crate::error::{Result, SihtError};
use crate::matrix::Matrix;

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (unsorted) of a symmetric matrix.
///
/// The input is symmetrized as `(A + A^T) / 2` before rotating; callers that
/// need a symmetry guarantee validate it themselves.
pub fn jacobi_eigenvalues(matrix: &Matrix) -> Result<Vec<f64>> {
    if matrix.rows() != matrix.cols() {
        return Err(SihtError::InvalidArgument(format!(
            "eigenvalues need a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let n = matrix.rows();
    if n == 1 {
        return Ok(vec![matrix.get(0, 0)]);
    }

    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (matrix.get(i, j) + matrix.get(j, i));
        }
    }

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < OFF_DIAGONAL_TOLERANCE {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Rotation angle from the standard stable formula.
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
            }
        }
    }
    Err(SihtError::EigenNoConvergence { sweeps: MAX_SWEEPS })
}
