//! SVD of the block-diagonal spoke submatrix, assembled from per-block SVDs.
//!
//! The factors stay block-sparse: each block keeps its own small `U` and
//! `Vt`, positioned by its row/column offset and its slice of the rank.

use crate::dense::{check_capacity, DenseMatrix};
use crate::error::{Error, Result};
use crate::reorder::A11Block;
use crate::svd::{dense_svd, truncate_unchecked, SvdFactors};

/// Largest single block (in entries) the dense per-block path accepts.
pub const BLOCK_CAPACITY: usize = 4_000_000;

/// `ceil(alpha * n)`, ignoring floating-point noise just above an integer.
pub fn target_rank(alpha: f64, n: usize) -> usize {
    let x = alpha * n as f64;
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("target rank ratio {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// Operations the row update needs from the factorization it extends.
pub trait RowFactorization {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn rank(&self) -> usize;
    /// `diag(sigma) · Vt`, dense `rank x n_cols`.
    fn scaled_vt(&self) -> DenseMatrix;
    /// `U · top` for a dense `rank x k` matrix.
    fn lift_left(&self, top: &DenseMatrix) -> Result<DenseMatrix>;
}

impl RowFactorization for SvdFactors {
    fn n_rows(&self) -> usize {
        SvdFactors::n_rows(self)
    }
    fn n_cols(&self) -> usize {
        SvdFactors::n_cols(self)
    }
    fn rank(&self) -> usize {
        SvdFactors::rank(self)
    }
    fn scaled_vt(&self) -> DenseMatrix {
        self.vt.scale_rows(&self.sigma)
    }
    fn lift_left(&self, top: &DenseMatrix) -> Result<DenseMatrix> {
        self.u.matmul(top)
    }
}

/// Factors of one diagonal block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFactors {
    pub row_start: usize,
    pub col_start: usize,
    /// Index of this block's first triplet in the concatenated spectrum.
    pub rank_offset: usize,
    pub factors: SvdFactors,
}

/// Block-diagonal SVD `bdiag(U_i) · bdiag(Σ_i) · bdiag(Vt_i)`; unsorted.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSvd {
    n_rows: usize,
    n_cols: usize,
    rank: usize,
    blocks: Vec<BlockFactors>,
}

impl BlockSvd {
    pub fn blocks(&self) -> &[BlockFactors] {
        &self.blocks
    }

    /// Singular values in block order.
    pub fn sigma(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| b.factors.sigma.iter().copied())
            .collect()
    }

    /// Dense assembly of the three factors (for testing and small problems).
    pub fn to_factors(&self) -> SvdFactors {
        let mut u = DenseMatrix::zeros(self.n_rows, self.rank);
        let mut vt = DenseMatrix::zeros(self.rank, self.n_cols);
        for b in &self.blocks {
            let f = &b.factors;
            for i in 0..f.u.n_rows() {
                for k in 0..f.rank() {
                    u.set(b.row_start + i, b.rank_offset + k, f.u.get(i, k));
                }
            }
            for k in 0..f.rank() {
                for j in 0..f.vt.n_cols() {
                    vt.set(b.rank_offset + k, b.col_start + j, f.vt.get(k, j));
                }
            }
        }
        SvdFactors {
            u,
            sigma: self.sigma(),
            vt,
            sorted: self.blocks.len() <= 1,
        }
    }
}

impl RowFactorization for BlockSvd {
    fn n_rows(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn scaled_vt(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rank, self.n_cols);
        for b in &self.blocks {
            let f = &b.factors;
            for k in 0..f.rank() {
                let s = f.sigma[k];
                let dst = &mut out.row_mut(b.rank_offset + k)
                    [b.col_start..b.col_start + f.vt.n_cols()];
                for (d, v) in dst.iter_mut().zip(f.vt.row(k)) {
                    *d = s * v;
                }
            }
        }
        out
    }
    fn lift_left(&self, top: &DenseMatrix) -> Result<DenseMatrix> {
        if top.n_rows() != self.rank {
            return Err(Error::domain(format!(
                "lift: expected {} rows, got {}",
                self.rank,
                top.n_rows()
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, top.n_cols());
        for b in &self.blocks {
            let f = &b.factors;
            let slice = top.rows_range(b.rank_offset..b.rank_offset + f.rank());
            let lifted = f.u.matmul(&slice)?;
            for i in 0..lifted.n_rows() {
                out.row_mut(b.row_start + i).copy_from_slice(lifted.row(i));
            }
        }
        Ok(out)
    }
}

/// Rank-`ceil(alpha·min(h, w))` SVD of every block, assembled block-diagonally.
///
/// Blocks with an empty row or column span contribute rank 0.
pub fn block_diagonal_svd(
    blocks: &[A11Block],
    n_rows: usize,
    n_cols: usize,
    alpha: f64,
) -> Result<BlockSvd> {
    check_alpha(alpha)?;
    let mut out = Vec::new();
    let mut rank = 0;
    for block in blocks {
        let (h, w) = block.matrix.shape();
        if h == 0 || w == 0 {
            continue;
        }
        if block.row_start + h > n_rows || block.col_start + w > n_cols {
            return Err(Error::domain("block lies outside the spoke region"));
        }
        check_capacity("diagonal block", h, w, BLOCK_CAPACITY)?;
        let full = dense_svd(&block.matrix.to_dense()?)?;
        let s = target_rank(alpha, h.min(w));
        let factors = truncate_unchecked(&full, s);
        out.push(BlockFactors {
            row_start: block.row_start,
            col_start: block.col_start,
            rank_offset: rank,
            factors,
        });
        rank += s;
    }
    Ok(BlockSvd {
        n_rows,
        n_cols,
        rank,
        blocks: out,
    })
}
