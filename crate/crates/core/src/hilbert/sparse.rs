//! Compressed-sparse-row complex matrices.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

/// Square complex matrix in CSR form. Column indices within a row are sorted
/// and unique; explicit zeros are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, v)| (i, i, *v)))
    }

    /// Builds the matrix from `(row, col, value)` triplets; duplicates are summed.
    ///
    /// *Panics* if an index is out of range.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(
                r < dim && c < dim,
                "triplet ({r}, {c}) out of range for dim {dim}"
            );
            *rows[r].entry(c).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(row, col, value)` over the stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |i| (r, self.col_idx[i], self.values[i]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, v * s)))
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    /// Sparse matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::new();
        for (r, k, a) in self.triplets() {
            for i in other.row_ptr[k]..other.row_ptr[k + 1] {
                trip.push((r, other.col_idx[i], a * other.values[i]));
            }
        }
        Self::from_triplets(self.dim, trip)
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other)
            .add(&other.matmul(self).scaled(C64::new(-1.0, 0.0)))
    }

    /// Largest entry modulus (0 for the zero matrix).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max |A − A†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.add(&self.adjoint().scaled(C64::new(-1.0, 0.0)))
            .max_abs()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec_acc(C64::new(1.0, 0.0), x, &mut y);
        y
    }

    /// `y += alpha · A x`, row by row with a fixed accumulation order.
    #[inline]
    pub fn matvec_acc(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            if lo == hi {
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            for i in lo..hi {
                acc += self.values[i] * x[self.col_idx[i]];
            }
            *yr += alpha * acc;
        }
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = SparseOperator::from_triplets(
            3,
            [
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(2.0, 1.0)),
                (2, 2, c(1.0, 0.0)),
                (2, 2, c(-1.0, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(2, 2), c(0.0, 0.0));
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let m = SparseOperator::from_triplets(2, [(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]);
        assert_eq!(m.hermiticity_defect(), 0.0);
        let n = SparseOperator::from_triplets(2, [(0, 1, c(0.0, 1.0))]);
        assert_eq!(n.adjoint().get(1, 0), c(0.0, -1.0));
        assert!(!n.is_hermitian(1e-12));
    }

    #[test]
    fn matvec_and_matmul() {
        // Pauli X and Z
        let x = SparseOperator::from_triplets(2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let z = SparseOperator::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(
            x.matvec(&[c(1.0, 0.0), c(0.0, 2.0)]),
            vec![c(0.0, 2.0), c(1.0, 0.0)]
        );
        // [X, Z] = −2iY = [[0, −2], [2, 0]]
        let com = x.commutator(&z);
        assert_eq!(com.get(0, 1), c(-2.0, 0.0));
        assert_eq!(com.get(1, 0), c(2.0, 0.0));
        assert_eq!(x.matmul(&x), SparseOperator::identity(2));
    }
}
