//! Sparse row vectors used for feature matrices.

use crate::error::{Error, Result};

/// An immutable sparse vector: sorted `(index, value)` pairs plus a logical
/// dimension. Indices are strictly increasing and stored values are never
/// exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dim: usize,
}

impl SparseVector {
    /// Build from `(index, value)` pairs in any order. Zero values are
    /// dropped and duplicate indices are summed.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().filter(|(_, v)| *v != 0.0).collect();
        entries.sort_by_key(|(i, _)| *i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            debug_assert!(i < dim, "index {i} out of bounds for dimension {dim}");
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|(_, v)| *v != 0.0);
        SparseVector {
            entries: merged,
            dim,
        }
    }

    /// The all-zero vector of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            entries: Vec::new(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored `(index, value)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Value at `index`, zero when not stored.
    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Divide every entry by the L2 norm; the zero vector is left unchanged.
    pub fn l2_normalize(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            for (_, v) in &mut self.entries {
                *v /= norm;
            }
        }
    }

    /// Multiply every stored entry by `factor`, dropping entries that become
    /// exactly zero.
    pub fn scale(&mut self, factor: f64) {
        for (_, v) in &mut self.entries {
            *v *= factor;
        }
        self.entries.retain(|(_, v)| *v != 0.0);
    }

    /// Dot product against a dense weight slice.
    pub fn dot_dense(&self, dense: &[f64]) -> Result<f64> {
        if dense.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: dense.len(),
            });
        }
        Ok(self.entries.iter().map(|(i, v)| v * dense[*i]).sum())
    }

    /// Materialize as a dense vector.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in &self.entries {
            out[*i] = *v;
        }
        out
    }

    /// Concatenate blocks horizontally; the result's dimension is the sum of
    /// the block dimensions and each block keeps its internal order.
    pub fn hconcat(blocks: &[SparseVector]) -> SparseVector {
        let dim = blocks.iter().map(|b| b.dim).sum();
        let mut entries = Vec::with_capacity(blocks.iter().map(|b| b.nnz()).sum());
        let mut offset = 0;
        for block in blocks {
            entries.extend(block.iter().map(|(i, v)| (i + offset, v)));
            offset += block.dim;
        }
        SparseVector { entries, dim }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pairs_sorts_and_drops_zeros() {
        let v = SparseVector::from_pairs(5, vec![(3, 2.0), (1, 0.0), (0, -1.0)]);
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![(0, -1.0), (3, 2.0)]);
        assert_eq!(v.dim(), 5);
    }

    #[test]
    fn duplicate_indices_are_summed() {
        let v = SparseVector::from_pairs(4, vec![(2, 1.5), (2, 0.5), (2, -2.0)]);
        assert!(v.is_zero());
    }

    #[test]
    fn normalize_gives_unit_length() {
        let mut v = SparseVector::from_pairs(3, vec![(0, 3.0), (2, 4.0)]);
        v.l2_normalize();
        assert!((v.l2_norm() - 1.0).abs() < 1e-12);
        assert_eq!(v.get(0), 0.6);
        assert_eq!(v.get(2), 0.8);
    }

    #[test]
    fn normalize_leaves_zero_vector() {
        let mut v = SparseVector::zeros(7);
        v.l2_normalize();
        assert!(v.is_zero());
        assert_eq!(v.dim(), 7);
    }

    #[test]
    fn dot_checks_dimension() {
        let v = SparseVector::from_pairs(3, vec![(1, 2.0)]);
        assert!(v.dot_dense(&[1.0, 1.0]).is_err());
        assert_eq!(v.dot_dense(&[0.0, 4.0, 0.0]).unwrap(), 8.0);
    }

    #[test]
    fn hconcat_shifts_offsets() {
        let a = SparseVector::from_pairs(2, vec![(1, 1.0)]);
        let b = SparseVector::from_pairs(3, vec![(0, 2.0)]);
        let c = SparseVector::hconcat(&[a, b]);
        assert_eq!(c.dim(), 5);
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![(1, 1.0), (2, 2.0)]);
    }
}
