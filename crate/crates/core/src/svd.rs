//! SVD engines: the dense reference SVD, truncation, and the randomized SVD
//! with 2r Gaussian oversampling.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{
    check_capacity, column_orthonormality_error, row_orthonormality_error, DenseMatrix,
    DENSE_CAPACITY,
};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::sparse::SparseMatrix;

/// Rank-r factorization `U · diag(sigma) · Vt` with orthonormal columns in `U`
/// and orthonormal rows in `Vt`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub vt: DenseMatrix,
    /// Set when `sigma` is known to be non-increasing.
    pub sorted: bool,
}

impl SvdFactors {
    pub fn new(u: DenseMatrix, sigma: Vec<f64>, vt: DenseMatrix, sorted: bool) -> Result<Self> {
        let r = sigma.len();
        if u.n_cols() != r || vt.n_rows() != r {
            return Err(Error::domain(format!(
                "factor shapes disagree: U is {:?}, sigma has {}, Vt is {:?}",
                u.shape(),
                r,
                vt.shape()
            )));
        }
        if sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::domain("singular values must be non-negative"));
        }
        if sorted && sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("sorted flag set on unsorted singular values"));
        }
        Ok(SvdFactors { u, sigma, vt, sorted })
    }

    /// Factors of the `p x q` zero matrix with rank 0.
    pub fn empty(p: usize, q: usize) -> Self {
        SvdFactors {
            u: DenseMatrix::zeros(p, 0),
            sigma: Vec::new(),
            vt: DenseMatrix::zeros(0, q),
            sorted: true,
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn n_rows(&self) -> usize {
        self.u.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.vt.n_cols()
    }

    /// Dense `U · diag(sigma) · Vt`.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        check_capacity("reconstruction", self.n_rows(), self.n_cols(), DENSE_CAPACITY)?;
        self.u.scale_columns(&self.sigma).matmul(&self.vt)
    }

    /// Frobenius norm of `a - U · diag(sigma) · Vt`.
    pub fn residual(&self, a: &SparseMatrix) -> Result<f64> {
        if a.shape() != (self.n_rows(), self.n_cols()) {
            return Err(Error::domain("residual: shape mismatch"));
        }
        let mut approx = self.reconstruct()?;
        for (i, j, v) in a.iter() {
            approx.set(i, j, approx.get(i, j) - v);
        }
        Ok(approx.frobenius_norm())
    }

    /// Worst deviation from orthonormality over `UᵀU` and `Vt Vtᵀ`.
    pub fn orthonormality_error(&self) -> f64 {
        column_orthonormality_error(&self.u).max(row_orthonormality_error(&self.vt))
    }

    /// Factors of the transposed matrix.
    pub fn transpose(&self) -> SvdFactors {
        SvdFactors {
            u: self.vt.transpose(),
            sigma: self.sigma.clone(),
            vt: self.u.transpose(),
            sorted: self.sorted,
        }
    }

    /// Writes the binary layout: `p q r` as u64 LE, the sorted flag as one
    /// byte, then `U` row-major, `sigma`, `Vt` row-major as f64 LE.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        for n in [self.n_rows(), self.n_cols(), self.rank()] {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        w.write_all(&[self.sorted as u8])?;
        for v in self
            .u
            .data()
            .iter()
            .chain(&self.sigma)
            .chain(self.vt.data())
        {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            r.read_exact(&mut word)?;
            *d = usize::try_from(u64::from_le_bytes(word))
                .map_err(|_| Error::domain("dimension does not fit in usize"))?;
        }
        let [p, q, rank] = dims;
        check_capacity("factor U", p, rank, DENSE_CAPACITY)?;
        check_capacity("factor Vt", rank, q, DENSE_CAPACITY)?;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let mut read_vec = |len: usize| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                r.read_exact(&mut word)?;
                out.push(f64::from_le_bytes(word));
            }
            Ok(out)
        };
        let u = DenseMatrix::from_row_major(p, rank, read_vec(p * rank)?)?;
        let sigma = read_vec(rank)?;
        let vt = DenseMatrix::from_row_major(rank, q, read_vec(rank * q)?)?;
        SvdFactors::new(u, sigma, vt, flag[0] != 0)
    }
}

/// Thin SVD of a dense matrix with all `min(p, q)` triplets, sorted.
pub fn dense_svd(a: &DenseMatrix) -> Result<SvdFactors> {
    check_capacity("dense SVD input", a.n_rows(), a.n_cols(), DENSE_CAPACITY)?;
    if !a.is_finite() {
        return Err(Error::domain("dense SVD input has non-finite entries"));
    }
    let (p, q) = a.shape();
    if p == 0 || q == 0 {
        return Ok(SvdFactors::empty(p, q));
    }
    let svd = a
        .as_faer()
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let u = DenseMatrix::from_faer(svd.U());
    let vt = DenseMatrix::from_faer(svd.V().transpose());
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|s| s.max(0.0)).collect();
    Ok(SvdFactors {
        u,
        sigma,
        vt,
        sorted: true,
    })
}

/// Keeps the leading `r` singular triplets of sorted factors.
pub fn truncate(f: &SvdFactors, r: usize) -> Result<SvdFactors> {
    if !f.sorted {
        return Err(Error::domain("truncate needs sorted factors"));
    }
    if r == 0 || r > f.rank() {
        return Err(Error::domain(format!(
            "truncation rank {r} outside 1..={}",
            f.rank()
        )));
    }
    Ok(truncate_unchecked(f, r))
}

pub(crate) fn truncate_unchecked(f: &SvdFactors, r: usize) -> SvdFactors {
    let r = r.min(f.rank());
    SvdFactors {
        u: f.u.cols_range(0..r),
        sigma: f.sigma[..r].to_vec(),
        vt: f.vt.rows_range(0..r),
        sorted: f.sorted,
    }
}

/// Randomized rank-`r` SVD of a sparse matrix.
///
/// Draws a Gaussian `n x 2r` test matrix, orthonormalizes the sample
/// `A·X`, takes the SVD of the projection `QᵀA` truncated to `r`, and lifts
/// the left factor back with `Q`. No power iterations.
pub fn randomized_svd(a: &SparseMatrix, r: usize, seed: u64) -> Result<SvdFactors> {
    randomized_svd_op(a, r, seed)
}

/// [`randomized_svd`] for any matrix-free operator.
pub fn randomized_svd_op<O: LinearOperator + ?Sized>(
    op: &O,
    r: usize,
    seed: u64,
) -> Result<SvdFactors> {
    let (m, n) = (op.n_rows(), op.n_cols());
    if r == 0 || r > m.min(n) {
        return Err(Error::domain(format!(
            "target rank {r} outside 1..={}",
            m.min(n)
        )));
    }
    let oversampled = 2 * r;
    check_capacity("random test matrix", n, oversampled, DENSE_CAPACITY)?;
    check_capacity("range sample", m, oversampled, DENSE_CAPACITY)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DenseMatrix::from_fn(n, oversampled, |_, _| StandardNormal.sample(&mut rng));
    let sample = op.apply(&x)?;
    let q = DenseMatrix::from_faer(sample.as_faer().qr().compute_thin_Q().as_ref());
    let projected = op.apply_transpose(&q)?.transpose();
    let small = dense_svd(&projected)?;
    let small = truncate_unchecked(&small, r);
    let u = q.matmul(&small.u)?;
    Ok(SvdFactors {
        u,
        sigma: small.sigma,
        vt: small.vt,
        sorted: true,
    })
}

/// Optimal rank-`r` residual `sqrt(sum_{i > r} sigma_i^2)` from a full spectrum.
pub fn tail_energy(sigma: &[f64], r: usize) -> f64 {
    sigma.iter().skip(r).map(|s| s * s).sum::<f64>().sqrt()
}
