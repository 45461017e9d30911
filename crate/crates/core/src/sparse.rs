//! Compressed sparse row storage and the sparse kernels used by the pipeline.

use crate::dense::{check_capacity, DenseMatrix, DENSE_CAPACITY};
use crate::error::{Error, Result};

/// Real matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored, so `nnz()` is the number of nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Sparse vector with sorted, unique indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    pub len: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(len: usize) -> Self {
        SparseVector {
            len,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(x: &[f64]) -> Self {
        let (indices, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        SparseVector {
            len: x.len(),
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

impl SparseMatrix {
    /// Validating constructor from raw CSR arrays.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 || row_offsets[0] != 0 {
            return Err(Error::domain("row_offsets must have length n_rows+1 and start at 0"));
        }
        if col_indices.len() != values.len() || row_offsets[n_rows] != values.len() {
            return Err(Error::domain("row_offsets, col_indices and values disagree on nnz"));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::domain(format!("row_offsets decreases at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain(format!("columns of row {i} not strictly increasing")));
            }
            if cols.last().is_some_and(|&c| c >= n_cols) {
                return Err(Error::domain(format!("column index out of range in row {i}")));
            }
        }
        if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::domain("stored values must be finite and nonzero"));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles a matrix from `(row, col, value)` triplets.
    ///
    /// Zero values are dropped; duplicate coordinates are rejected.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::domain(format!(
                    "triplet ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::domain(format!("non-finite value at ({i}, {j})")));
            }
            if v != 0.0 {
                counts[i + 1] += 1;
            }
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[n_rows];
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        for &(i, j, v) in triplets {
            if v != 0.0 {
                col_indices[next[i]] = j;
                values[next[i]] = v;
                next[i] += 1;
            }
        }
        for i in 0..n_rows {
            let (lo, hi) = (counts[i], counts[i + 1]);
            let mut row: Vec<(usize, f64)> = col_indices[lo..hi]
                .iter()
                .copied()
                .zip(values[lo..hi].iter().copied())
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::domain(format!("duplicate entry at ({i}, {})", w[0].0)));
            }
            for (k, (j, v)) in row.into_iter().enumerate() {
                col_indices[lo + k] = j;
                values[lo + k] = v;
            }
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets: counts,
            col_indices,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Sparse copy of a dense matrix, dropping zeros.
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut row_offsets = Vec::with_capacity(d.n_rows() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..d.n_rows() {
            for (j, &v) in d.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        SparseMatrix {
            n_rows: d.n_rows(),
            n_cols: d.n_cols(),
            row_offsets,
            col_indices,
            values,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_vector(&self, i: usize) -> SparseVector {
        let (cols, vals) = self.row(i);
        SparseVector {
            len: self.n_cols,
            indices: cols.to_vec(),
            values: vals.to_vec(),
        }
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Fraction of zero entries, `1 - nnz / (rows * cols)`.
    pub fn sparsity(&self) -> Result<f64> {
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err(Error::domain("sparsity of a matrix with a zero dimension"));
        }
        Ok(1.0 - self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Explicit transpose (the CSR form of the CSC view).
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_indices[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        check_capacity("densify sparse matrix", self.n_rows, self.n_cols, DENSE_CAPACITY)?;
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            out.set(i, j, v);
        }
        Ok(out)
    }

    /// Dense copy of the sub-block `rows x cols`.
    pub fn dense_block(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), cols.len());
        for (bi, i) in rows.enumerate() {
            let (cs, vs) = self.row(i);
            let start = cs.partition_point(|&c| c < cols.start);
            for (&j, &v) in cs[start..].iter().zip(&vs[start..]) {
                if j >= cols.end {
                    break;
                }
                out.set(bi, j - cols.start, v);
            }
        }
        out
    }

    /// Sparse copy of the sub-block `rows x cols`, re-indexed from zero.
    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> SparseMatrix {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in rows.clone() {
            let (cs, vs) = self.row(i);
            let start = cs.partition_point(|&c| c < cols.start);
            for (&j, &v) in cs[start..].iter().zip(&vs[start..]) {
                if j >= cols.end {
                    break;
                }
                col_indices.push(j - cols.start);
                values.push(v);
            }
            row_offsets.push(values.len());
        }
        SparseMatrix {
            n_rows: rows.len(),
            n_cols: cols.len(),
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for &i in rows {
            let (cs, vs) = self.row(i);
            col_indices.extend_from_slice(cs);
            values.extend_from_slice(vs);
            row_offsets.push(values.len());
        }
        SparseMatrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// `self * b` for dense `b`.
    pub fn multiply(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != b.n_rows() {
            return Err(Error::domain(format!(
                "inner dimensions disagree: {}x{} * {}x{}",
                self.n_rows,
                self.n_cols,
                b.n_rows(),
                b.n_cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, b.n_cols());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let dst = out.row_mut(i);
            for (&j, &v) in cols.iter().zip(vals) {
                for (d, s) in dst.iter_mut().zip(b.row(j)) {
                    *d += v * s;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ * b` for dense `b`, without forming the transpose.
    pub fn multiply_transposed(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != b.n_rows() {
            return Err(Error::domain(format!(
                "inner dimensions disagree: ({}x{})ᵀ * {}x{}",
                self.n_rows,
                self.n_cols,
                b.n_rows(),
                b.n_cols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_cols, b.n_cols());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let src = b.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                for (d, s) in out.row_mut(j).iter_mut().zip(src) {
                    *d += v * s;
                }
            }
        }
        Ok(out)
    }

    /// `self * x` for a dense vector.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::domain("matvec: length mismatch"));
        }
        Ok((0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect())
    }

    /// Stacks `self` above `bottom`.
    pub fn vstack(&self, bottom: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != bottom.n_cols {
            return Err(Error::domain("vstack: column counts differ"));
        }
        let mut row_offsets = self.row_offsets.clone();
        let base = self.nnz();
        row_offsets.extend(bottom.row_offsets[1..].iter().map(|o| o + base));
        let mut col_indices = self.col_indices.clone();
        col_indices.extend_from_slice(&bottom.col_indices);
        let mut values = self.values.clone();
        values.extend_from_slice(&bottom.values);
        Ok(SparseMatrix {
            n_rows: self.n_rows + bottom.n_rows,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Number of stored entries in each column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_cols];
        for &j in &self.col_indices {
            counts[j] += 1;
        }
        counts
    }
}
