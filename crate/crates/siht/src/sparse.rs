//! Sparse signal containers and the top-K magnitude projection.
//!
//! The projection keeps the K entries of largest absolute value and zeroes the
//! rest. Ties are broken toward the lower index, and magnitudes are compared
//! exactly (no tolerance): both choices keep the operator deterministic and
//! idempotent, which every reproducibility contract downstream relies on.

use crate::error::{Result, SihtError};

/// A length-N vector carrying its sparsity budget K.
///
/// Holds both ground-truth signals and algorithm iterates. The only invariant
/// enforced on every value is `1 <= K <= N`; ground-truth constructors
/// additionally require at most K nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    sparsity_budget: usize,
}

impl SparseSignal {
    /// General constructor (iterates, intermediate vectors).
    pub fn new(values: Vec<f64>, sparsity_budget: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(SihtError::InvalidArgument("signal dimension must be positive".into()));
        }
        if sparsity_budget < 1 || sparsity_budget > values.len() {
            return Err(SihtError::InvalidArgument(format!(
                "sparsity budget {} out of range [1, {}]",
                sparsity_budget,
                values.len()
            )));
        }
        Ok(SparseSignal {
            values,
            sparsity_budget,
        })
    }

    /// Ground-truth constructor: additionally requires at most K nonzeros.
    pub fn truth(values: Vec<f64>, sparsity_budget: usize) -> Result<Self> {
        let signal = Self::new(values, sparsity_budget)?;
        let nnz = signal.nonzero_count();
        if nnz > signal.sparsity_budget {
            return Err(SihtError::InvalidArgument(format!(
                "ground truth has {nnz} nonzeros, more than budget {}",
                signal.sparsity_budget
            )));
        }
        Ok(signal)
    }

    /// The all-zero signal of dimension `n` with budget `k`.
    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![0.0; n], k)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn sparsity_budget(&self) -> usize {
        self.sparsity_budget
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn support(&self) -> IndexSet {
        support(&self.values)
    }
}

/// A sorted, duplicate-free set of coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Build from arbitrary indices; sorts and removes duplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet { indices }
    }

    pub fn empty() -> Self {
        IndexSet { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|i| other.contains(*i))
    }

    /// Largest index, if any. Useful for validating against a dimension.
    pub fn max(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

/// Keep the K largest-magnitude entries of `v`, zero the rest.
///
/// Ties in magnitude keep the lower index. When `v` already has at most K
/// nonzeros the input is returned unchanged.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k < 1 || k > v.len() {
        return Err(SihtError::InvalidArgument(format!(
            "threshold budget {k} out of range [1, {}]",
            v.len()
        )));
    }
    let nonzeros = v.iter().filter(|x| **x != 0.0).count();
    if nonzeros <= k {
        return Ok(v.to_vec());
    }

    // Rank indices by (magnitude descending, index ascending). `total_cmp`
    // keeps the order deterministic for every bit pattern.
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_unstable_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));

    let mut out = vec![0.0; v.len()];
    for &i in order.iter().take(k) {
        out[i] = v[i];
    }
    Ok(out)
}

/// Indices of the nonzero entries of `v`.
pub fn support(v: &[f64]) -> IndexSet {
    IndexSet {
        indices: v
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, _)| i)
            .collect(),
    }
}

/// Euclidean norm of `v - w`.
pub fn l2_error(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(SihtError::DimensionMismatch(format!(
            "l2_error operands have lengths {} and {}",
            v.len(),
            w.len()
        )));
    }
    let mut acc = 0.0;
    for (a, b) in v.iter().zip(w.iter()) {
        let d = a - b;
        acc += d * d;
    }
    Ok(acc.sqrt())
}

/// Euclidean norm of `v`.
pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
