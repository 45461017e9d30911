//! Matrix-free views used by the randomized SVD engine.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// A real matrix that can only be applied to dense blocks of vectors.
pub trait LinearOperator {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// `self * x`
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix>;
    /// `selfᵀ * x`
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix>;
}

impl LinearOperator for SparseMatrix {
    fn n_rows(&self) -> usize {
        SparseMatrix::n_rows(self)
    }
    fn n_cols(&self) -> usize {
        SparseMatrix::n_cols(self)
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.multiply(x)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.multiply_transposed(x)
    }
}

impl LinearOperator for DenseMatrix {
    fn n_rows(&self) -> usize {
        DenseMatrix::n_rows(self)
    }
    fn n_cols(&self) -> usize {
        DenseMatrix::n_cols(self)
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.matmul(x)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.t_matmul(x)
    }
}

/// `[top; bottom]` with a dense top and a sparse bottom.
pub struct VStackOperator<'a> {
    top: &'a DenseMatrix,
    bottom: &'a SparseMatrix,
}

impl<'a> VStackOperator<'a> {
    pub fn new(top: &'a DenseMatrix, bottom: &'a SparseMatrix) -> Result<Self> {
        if top.n_cols() != bottom.n_cols() {
            return Err(Error::domain(format!(
                "stacked blocks disagree on columns: {} vs {}",
                top.n_cols(),
                bottom.n_cols()
            )));
        }
        Ok(VStackOperator { top, bottom })
    }
}

impl LinearOperator for VStackOperator<'_> {
    fn n_rows(&self) -> usize {
        self.top.n_rows() + self.bottom.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.top.n_cols()
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.top.matmul(x)?.vstack(&self.bottom.multiply(x)?)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let k = self.top.n_rows();
        let upper = self.top.t_matmul(&x.rows_range(0..k))?;
        let lower = self
            .bottom
            .multiply_transposed(&x.rows_range(k..x.n_rows()))?;
        upper.add(&lower)
    }
}

/// `[left | right]` with a dense left part and a sparse right part.
pub struct HStackOperator<'a> {
    left: &'a DenseMatrix,
    right: &'a SparseMatrix,
}

impl<'a> HStackOperator<'a> {
    pub fn new(left: &'a DenseMatrix, right: &'a SparseMatrix) -> Result<Self> {
        if left.n_rows() != right.n_rows() {
            return Err(Error::domain(format!(
                "side-by-side blocks disagree on rows: {} vs {}",
                left.n_rows(),
                right.n_rows()
            )));
        }
        Ok(HStackOperator { left, right })
    }
}

impl LinearOperator for HStackOperator<'_> {
    fn n_rows(&self) -> usize {
        self.left.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.left.n_cols() + self.right.n_cols()
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let k = self.left.n_cols();
        let a = self.left.matmul(&x.rows_range(0..k))?;
        let b = self.right.multiply(&x.rows_range(k..x.n_rows()))?;
        a.add(&b)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.left
            .t_matmul(x)?
            .vstack(&self.right.multiply_transposed(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_against_dense(op: &impl LinearOperator, dense: &DenseMatrix) {
        let x = DenseMatrix::from_fn(op.n_cols(), 3, |i, j| (i as f64 - j as f64) * 0.3);
        let y = DenseMatrix::from_fn(op.n_rows(), 2, |i, j| (i * j) as f64 * 0.1 + 1.0);
        let ax = op.apply(&x).unwrap();
        assert!(ax.sub(&dense.matmul(&x).unwrap()).unwrap().max_abs() < 1e-12);
        let aty = op.apply_transpose(&y).unwrap();
        assert!(aty.sub(&dense.t_matmul(&y).unwrap()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn stacked_operators_match_dense_assembly() {
        let top = DenseMatrix::from_fn(2, 4, |i, j| (i + j) as f64);
        let sp = SparseMatrix::from_triplets(3, 4, &[(0, 1, 2.0), (2, 3, -1.0)]).unwrap();
        let v = VStackOperator::new(&top, &sp).unwrap();
        check_against_dense(&v, &top.vstack(&sp.to_dense().unwrap()).unwrap());

        let left = DenseMatrix::from_fn(3, 2, |i, j| (2 * i + j) as f64);
        let h = HStackOperator::new(&left, &sp).unwrap();
        check_against_dense(&h, &left.hstack(&sp.to_dense().unwrap()).unwrap());

        assert!(VStackOperator::new(&left, &sp).is_err());
        assert!(HStackOperator::new(&top, &sp).is_err());
    }
}
