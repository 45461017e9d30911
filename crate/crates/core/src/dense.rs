//! Row-major dense matrices and the faer bridge used for the heavy kernels.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};

/// Largest dense matrix (in entries) any operation is allowed to allocate.
pub const DENSE_CAPACITY: usize = 100_000_000;

/// Dense real matrix stored in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::domain(format!(
                "dense data has {} entries, expected {}x{}",
                data.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(DenseMatrix {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    /// Builds a diagonal (possibly rectangular) matrix.
    pub fn from_diagonal(n_rows: usize, n_cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for (i, &d) in diag.iter().enumerate().take(n_rows.min(n_cols)) {
            m.set(i, i, d);
        }
        m
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                out.data[j * self.n_rows + i] = v;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        })
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::domain(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Dense product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::domain(format!(
                "inner dimensions disagree: {}x{} * {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        if self.n_rows == 0 || rhs.n_cols == 0 || self.n_cols == 0 {
            return Ok(Self::zeros(self.n_rows, rhs.n_cols));
        }
        let prod = self.as_faer() * rhs.as_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// Dense product `selfᵀ * rhs` without forming the transpose.
    pub fn t_matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != rhs.n_rows {
            return Err(Error::domain(format!(
                "inner dimensions disagree: ({}x{})ᵀ * {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        if self.n_cols == 0 || rhs.n_cols == 0 || self.n_rows == 0 {
            return Ok(Self::zeros(self.n_cols, rhs.n_cols));
        }
        let prod = self.as_faer().transpose() * rhs.as_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// Multiplies column `j` by `scale[j]`.
    pub fn scale_columns(&self, scale: &[f64]) -> DenseMatrix {
        assert_eq!(scale.len(), self.n_cols);
        let mut out = self.clone();
        for i in 0..self.n_rows {
            for (v, s) in out.row_mut(i).iter_mut().zip(scale) {
                *v *= s;
            }
        }
        out
    }

    /// Multiplies row `i` by `scale[i]`.
    pub fn scale_rows(&self, scale: &[f64]) -> DenseMatrix {
        assert_eq!(scale.len(), self.n_rows);
        let mut out = self.clone();
        for (i, &s) in scale.iter().enumerate() {
            for v in out.row_mut(i) {
                *v *= s;
            }
        }
        out
    }

    /// Copy of the rows in `range`.
    pub fn rows_range(&self, range: std::ops::Range<usize>) -> DenseMatrix {
        DenseMatrix {
            n_rows: range.len(),
            n_cols: self.n_cols,
            data: self.data[range.start * self.n_cols..range.end * self.n_cols].to_vec(),
        }
    }

    /// Copy of the columns in `range`.
    pub fn cols_range(&self, range: std::ops::Range<usize>) -> DenseMatrix {
        let mut out = Self::zeros(self.n_rows, range.len());
        for i in 0..self.n_rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[range.clone()]);
        }
        out
    }

    /// Stacks `self` above `bottom`.
    pub fn vstack(&self, bottom: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != bottom.n_cols {
            return Err(Error::domain("vstack: column counts differ"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(DenseMatrix {
            n_rows: self.n_rows + bottom.n_rows,
            n_cols: self.n_cols,
            data,
        })
    }

    /// Places `self` left of `right`.
    pub fn hstack(&self, right: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != right.n_rows {
            return Err(Error::domain("hstack: row counts differ"));
        }
        let n_cols = self.n_cols + right.n_cols;
        let mut data = Vec::with_capacity(self.n_rows * n_cols);
        for i in 0..self.n_rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(right.row(i));
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols,
            data,
        })
    }

    /// `self * x` for a dense vector.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::domain("matvec: length mismatch"));
        }
        Ok((0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Borrowed faer view over the row-major buffer.
    pub fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.n_rows, self.n_cols)
    }

    pub fn from_faer(m: MatRef<'_, f64>) -> DenseMatrix {
        let (n_rows, n_cols) = m.shape();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(m[(i, j)]);
            }
        }
        DenseMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn to_faer(&self) -> Mat<f64> {
        self.as_faer().to_owned()
    }
}

/// Errors out if a `rows x cols` dense allocation would exceed `limit`.
pub(crate) fn check_capacity(what: &str, rows: usize, cols: usize, limit: usize) -> Result<()> {
    let entries = rows.saturating_mul(cols);
    if entries > limit {
        return Err(Error::Capacity {
            what: what.to_string(),
            entries,
            limit,
        });
    }
    Ok(())
}

/// Max-abs deviation of `QᵀQ` from the identity, i.e. column orthonormality of `q`.
pub fn column_orthonormality_error(q: &DenseMatrix) -> f64 {
    let gram = q.t_matmul(q).expect("shapes agree");
    gram_identity_error(&gram)
}

/// Max-abs deviation of `QQᵀ` from the identity, i.e. row orthonormality of `q`.
pub fn row_orthonormality_error(q: &DenseMatrix) -> f64 {
    let qt = q.transpose();
    column_orthonormality_error(&qt)
}

fn gram_identity_error(gram: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..gram.n_rows() {
        for j in 0..gram.n_cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram.get(i, j) - target).abs());
        }
    }
    worst
}
