//! Incremental SVD updates: appending hub rows, then hub columns.
//!
//! Row update: `[U11 Σ Vt; A21] = diag(U11, I) · [Σ Vt; A21]`, so only the
//! small stacked inner matrix is decomposed and its left factor is lifted
//! through `U11` block by block.
//!
//! Column update: `[U Σ Vt | T] = [U Σ | T] · diag(Vt, I)`, so the inner
//! matrix is `[U Σ | T]` and its right factor is lifted through `Vt`.

use crate::block_svd::RowFactorization;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::operator::{HStackOperator, LinearOperator, VStackOperator};
use crate::sparse::SparseMatrix;
use crate::svd::{dense_svd, randomized_svd_op, truncate_unchecked, SvdFactors};

/// Chooses between the randomized and the dense SVD for inner matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerSvdEngine {
    /// Randomized SVD is used when `target < low_rank_threshold * inner_cols`.
    pub low_rank_threshold: f64,
    pub seed: u64,
}

impl Default for InnerSvdEngine {
    fn default() -> Self {
        InnerSvdEngine {
            low_rank_threshold: 0.3,
            seed: 0,
        }
    }
}

impl InnerSvdEngine {
    pub fn uses_randomized(&self, target: usize, inner_cols: usize) -> bool {
        (target as f64) < self.low_rank_threshold * inner_cols as f64
    }

    fn decompose<O: LinearOperator>(
        &self,
        op: &O,
        densify: impl FnOnce() -> Result<DenseMatrix>,
        target: usize,
    ) -> Result<SvdFactors> {
        if self.uses_randomized(target, op.n_cols()) {
            randomized_svd_op(op, target, self.seed)
        } else {
            Ok(truncate_unchecked(&dense_svd(&densify()?)?, target))
        }
    }
}

/// Result of one incremental update.
#[derive(Clone, Debug)]
pub struct Update {
    pub factors: SvdFactors,
    pub requested_rank: usize,
    /// Rank actually produced after clamping to what the inner matrix supports.
    pub rank: usize,
}

impl Update {
    pub fn was_clamped(&self) -> bool {
        self.rank < self.requested_rank
    }
}

/// Extends a factorization of `A11` (m1 x n1) to one of `[A11; A21]` with rank `target`.
pub fn row_update<F: RowFactorization + ?Sized>(
    f11: &F,
    a21: &SparseMatrix,
    target: usize,
    engine: &InnerSvdEngine,
) -> Result<Update> {
    let n1 = f11.n_cols();
    if a21.n_cols() != n1 {
        return Err(Error::domain(format!(
            "A21 has {} columns, A11 factors have {n1}",
            a21.n_cols()
        )));
    }
    if target > n1 {
        return Err(Error::domain(format!("row update rank {target} exceeds n1 = {n1}")));
    }
    let (m1, m2) = (f11.n_rows(), a21.n_rows());
    let s0 = f11.rank();
    let rank = target.min(s0 + m2);
    if rank == 0 {
        return Ok(Update {
            factors: SvdFactors::empty(m1 + m2, n1),
            requested_rank: target,
            rank,
        });
    }

    let top = f11.scaled_vt();
    let op = VStackOperator::new(&top, a21)?;
    let inner = engine.decompose(&op, || top.vstack(&a21.to_dense()?), rank)?;

    let lifted_top = f11.lift_left(&inner.u.rows_range(0..s0))?;
    let u = lifted_top.vstack(&inner.u.rows_range(s0..s0 + m2))?;
    Ok(Update {
        factors: SvdFactors {
            u,
            sigma: inner.sigma,
            vt: inner.vt,
            sorted: true,
        },
        requested_rank: target,
        rank,
    })
}

/// Extends a factorization of `[A11; A21]` (m x n1) by the columns `T = [A12; A22]`.
pub fn column_update(
    f: &SvdFactors,
    t: &SparseMatrix,
    target: usize,
    engine: &InnerSvdEngine,
) -> Result<Update> {
    let m = f.n_rows();
    if t.n_rows() != m {
        return Err(Error::domain(format!(
            "appended columns have {} rows, factors have {m}",
            t.n_rows()
        )));
    }
    let (n1, n2) = (f.n_cols(), t.n_cols());
    if target > n1 + n2 {
        return Err(Error::domain(format!(
            "column update rank {target} exceeds n = {}",
            n1 + n2
        )));
    }
    let s = f.rank();
    let rank = target.min(s + n2).min(m);
    if rank == 0 {
        return Ok(Update {
            factors: SvdFactors::empty(m, n1 + n2),
            requested_rank: target,
            rank,
        });
    }

    let left = f.u.scale_columns(&f.sigma);
    let op = HStackOperator::new(&left, t)?;
    let inner = engine.decompose(&op, || left.hstack(&t.to_dense()?), rank)?;

    let vt_left = inner.vt.cols_range(0..s).matmul(&f.vt)?;
    let vt = vt_left.hstack(&inner.vt.cols_range(s..s + n2))?;
    Ok(Update {
        factors: SvdFactors {
            u: inner.u,
            sigma: inner.sigma,
            vt,
            sorted: true,
        },
        requested_rank: target,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_plus_zero_rows() {
        let f11 = dense_svd(&DenseMatrix::identity(3)).unwrap();
        let out = row_update(&f11, &SparseMatrix::zeros(2, 3), 3, &InnerSvdEngine::default())
            .unwrap();
        let f = out.factors;
        assert!(f.sigma.iter().all(|s| (s - 1.0).abs() < 1e-14));
        for i in 3..5 {
            assert!(f.u.row(i).iter().all(|v| v.abs() < 1e-14));
        }
        assert!(f.orthonormality_error() < 1e-12);
    }

    #[test]
    fn zero_columns_keep_spectrum() {
        let a = DenseMatrix::from_fn(6, 3, |i, j| ((i * 3 + j) % 5) as f64 - 1.0);
        let f = dense_svd(&a).unwrap();
        let out = column_update(&f, &SparseMatrix::zeros(6, 2), 3, &InnerSvdEngine::default())
            .unwrap();
        for (x, y) in out.factors.sigma.iter().zip(&f.sigma) {
            assert!((x - y).abs() < 1e-12);
        }
        for k in 0..3 {
            assert!(out.factors.vt.row(k)[3..].iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn empty_append_is_noop_up_to_sign() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| (i + 1) as f64 * (j as f64 + 0.5) + (i % 2) as f64);
        let f = dense_svd(&a).unwrap();
        let out = column_update(&f, &SparseMatrix::zeros(5, 0), 3, &InnerSvdEngine::default())
            .unwrap();
        let rec = out.factors.reconstruct().unwrap();
        assert!(rec.sub(&a).unwrap().max_abs() < 1e-12);
        for k in 0..3 {
            let dot: f64 = (0..5).map(|i| out.factors.u.get(i, k) * f.u.get(i, k)).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shape_errors() {
        let f = dense_svd(&DenseMatrix::identity(3)).unwrap();
        let e = InnerSvdEngine::default();
        assert!(row_update(&f, &SparseMatrix::zeros(1, 2), 2, &e).is_err());
        assert!(row_update(&f, &SparseMatrix::zeros(1, 3), 4, &e).is_err());
        assert!(column_update(&f, &SparseMatrix::zeros(2, 1), 2, &e).is_err());
        assert!(column_update(&f, &SparseMatrix::zeros(3, 1), 5, &e).is_err());
    }

    #[test]
    fn clamp_is_reported() {
        let f = dense_svd(&DenseMatrix::from_diagonal(3, 3, &[2.0, 1.0, 0.5])).unwrap();
        let f = truncate_unchecked(&f, 1);
        let out = row_update(&f, &SparseMatrix::zeros(1, 3), 3, &InnerSvdEngine::default())
            .unwrap();
        assert_eq!(out.rank, 2);
        assert!(out.was_clamped());
    }
}
