//! Compressed sparse row matrices with 64-bit float values.
//!
//! Column indices are sorted within each row, which fixes the iteration
//! order of every product and keeps repeated runs bit-identical.

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Duplicate coordinates are
    /// rejected; callers that want accumulation must pre-combine.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &entries {
            if r >= rows {
                return Err(Error::NodeOutOfRange {
                    index: r,
                    n_nodes: rows,
                });
            }
            if c >= cols {
                return Err(Error::NodeOutOfRange {
                    index: c,
                    n_nodes: cols,
                });
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidConfig(format!(
                    "duplicate sparse entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (col_idx, values) = entries.into_iter().map(|(_, c, v)| (c, v)).unzip();
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble directly from per-row sorted columns and values.
    pub(crate) fn from_sorted_rows(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), rows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        debug_assert_eq!(*row_ptr.last().unwrap(), col_idx.len());
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Sorted column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Divide each row by its L1 norm; all-zero rows are left untouched.
    pub fn l1_normalize_rows(&mut self) {
        for r in 0..self.rows {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let norm: f64 = self.values[span.clone()].iter().map(|v| v.abs()).sum();
            if norm > 0.0 {
                for v in &mut self.values[span] {
                    *v /= norm;
                }
            }
        }
    }

    /// `self (m×n) · dense (n×p)`.
    pub fn mul_dense(&self, dense: &Array2<f64>) -> Array2<f64> {
        self.mul_dense_impl(dense, None)
    }

    /// Same as [`mul_dense`](Self::mul_dense) but with an entrywise keep
    /// mask over the stored nonzeros: dropped entries contribute nothing,
    /// kept ones are scaled by `scale` (inverted dropout).
    pub fn mul_dense_masked(&self, dense: &Array2<f64>, keep: &[bool], scale: f64) -> Array2<f64> {
        debug_assert_eq!(keep.len(), self.nnz());
        self.mul_dense_impl(dense, Some((keep, scale)))
    }

    fn mul_dense_impl(&self, dense: &Array2<f64>, mask: Option<(&[bool], f64)>) -> Array2<f64> {
        assert_eq!(
            self.cols,
            dense.nrows(),
            "sparse-dense product dimension mismatch"
        );
        let p = dense.ncols();
        let mut out = Array2::zeros((self.rows, p));
        for r in 0..self.rows {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let mut out_row = out.row_mut(r);
            for idx in span {
                let v = match mask {
                    None => self.values[idx],
                    Some((keep, scale)) => {
                        if keep[idx] {
                            self.values[idx] * scale
                        } else {
                            continue;
                        }
                    }
                };
                let d_row = dense.row(self.col_idx[idx]);
                for j in 0..p {
                    out_row[j] += v * d_row[j];
                }
            }
        }
        out
    }

    /// `selfᵀ (n×m) · dense (m×p)`, computed by scattering rows.
    pub fn transpose_mul_dense(&self, dense: &Array2<f64>) -> Array2<f64> {
        self.transpose_mul_dense_impl(dense, None)
    }

    /// Transposed product with the same nonzero mask semantics as
    /// [`mul_dense_masked`](Self::mul_dense_masked).
    pub fn transpose_mul_dense_masked(
        &self,
        dense: &Array2<f64>,
        keep: &[bool],
        scale: f64,
    ) -> Array2<f64> {
        debug_assert_eq!(keep.len(), self.nnz());
        self.transpose_mul_dense_impl(dense, Some((keep, scale)))
    }

    fn transpose_mul_dense_impl(
        &self,
        dense: &Array2<f64>,
        mask: Option<(&[bool], f64)>,
    ) -> Array2<f64> {
        assert_eq!(
            self.rows,
            dense.nrows(),
            "sparse-dense product dimension mismatch"
        );
        let p = dense.ncols();
        let mut out = Array2::zeros((self.cols, p));
        for r in 0..self.rows {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let d_row = dense.row(r);
            for idx in span {
                let v = match mask {
                    None => self.values[idx],
                    Some((keep, scale)) => {
                        if keep[idx] {
                            self.values[idx] * scale
                        } else {
                            continue;
                        }
                    }
                };
                let mut out_row = out.row_mut(self.col_idx[idx]);
                for j in 0..p {
                    out_row[j] += v * d_row[j];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[[r, c]] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample() -> CsrMatrix {
        // [[1, 0, 2], [0, 3, 0]]
        CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]).unwrap()
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
        assert!(CsrMatrix::from_triplets(2, 2, vec![(0, 2, 1.0)]).is_err());
        assert!(CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (0, 1, 2.0)]).is_err());
    }

    #[test]
    fn mul_dense_matches_hand_result() {
        let m = sample();
        let x = array![[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]];
        let y = m.mul_dense(&x);
        assert_eq!(y, array![[7.0, 70.0], [6.0, 60.0]]);
    }

    #[test]
    fn transpose_mul_matches_dense_transpose() {
        let m = sample();
        let x = array![[1.0], [2.0]];
        let y = m.transpose_mul_dense(&x);
        assert_eq!(y, m.to_dense().t().dot(&x));
    }

    #[test]
    fn masked_products_zero_out_dropped_entries() {
        let m = sample();
        let x = array![[1.0], [1.0], [1.0]];
        // Drop the (0, 2) entry (second stored nonzero), scale kept ones by 2.
        let keep = vec![true, false, true];
        let y = m.mul_dense_masked(&x, &keep, 2.0);
        assert_eq!(y, array![[2.0], [6.0]]);
        let z = m.transpose_mul_dense_masked(&array![[1.0], [1.0]], &keep, 2.0);
        assert_eq!(z, array![[2.0], [6.0], [0.0]]);
    }

    #[test]
    fn l1_normalization_skips_zero_rows() {
        let mut m =
            CsrMatrix::from_triplets(3, 3, vec![(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        m.l1_normalize_rows();
        let third = 1.0 / 3.0;
        assert_eq!(m.row(0).1, &[third, third, third]);
        assert_eq!(m.row(1).1.len(), 0);
    }
}
