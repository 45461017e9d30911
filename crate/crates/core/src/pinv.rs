//! Moore–Penrose pseudoinverse in factored form `V · diag(σ⁺) · Uᵀ`.

use crate::dense::{check_capacity, DenseMatrix, DENSE_CAPACITY};
use crate::error::{Error, Result};
use crate::svd::SvdFactors;

/// Default relative cutoff: singular values at or below
/// `10·eps · σ_max · max(p, q)` are treated as zero. The extra factor
/// covers rounding accumulated over the three SVD stages of the pipeline.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 10.0 * f64::EPSILON;

/// Factored pseudoinverse of a `p x q` matrix (so itself `q x p`).
#[derive(Clone, Debug, PartialEq)]
pub struct Pseudoinverse {
    /// `q x r`
    pub v: DenseMatrix,
    /// Reciprocals of the retained singular values, 0 where filtered.
    pub sigma_dagger: Vec<f64>,
    /// `r x p`
    pub ut: DenseMatrix,
    /// Absolute threshold a singular value had to exceed to be inverted.
    pub tolerance_used: f64,
    /// Set when every singular value was filtered (the result is the zero matrix).
    pub all_filtered: bool,
}

impl Pseudoinverse {
    pub fn n_rows(&self) -> usize {
        self.v.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.ut.n_cols()
    }

    /// Number of inverted singular values.
    pub fn rank(&self) -> usize {
        self.sigma_dagger.iter().filter(|s| **s != 0.0).count()
    }

    /// `A⁺ · x` evaluated right to left.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.ut.matvec(x)?;
        for (v, s) in y.iter_mut().zip(&self.sigma_dagger) {
            *v *= s;
        }
        self.v.matvec(&y)
    }

    /// `A⁺ · B` for dense `B`, evaluated right to left.
    pub fn apply_dense(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let inner = self.ut.matmul(b)?.scale_rows(&self.sigma_dagger);
        self.v.matmul(&inner)
    }

    /// Dense `q x p` matrix `V · diag(σ⁺) · Uᵀ`.
    pub fn materialize(&self) -> Result<DenseMatrix> {
        check_capacity("materialized pseudoinverse", self.n_rows(), self.n_cols(), DENSE_CAPACITY)?;
        self.v.scale_columns(&self.sigma_dagger).matmul(&self.ut)
    }

    /// The factors `(V, σ⁺, Uᵀ)` as an unsorted triplet, for binary export.
    pub fn to_factors(&self) -> SvdFactors {
        SvdFactors {
            u: self.v.clone(),
            sigma: self.sigma_dagger.clone(),
            vt: self.ut.clone(),
            sorted: false,
        }
    }
}

/// Builds the pseudoinverse from sorted SVD factors, inverting each
/// `σ_i > cutoff_factor · σ_max · max(p, q)`.
pub fn pinv_from_svd(f: &SvdFactors, cutoff_factor: f64) -> Result<Pseudoinverse> {
    if !f.sorted {
        return Err(Error::domain("pseudoinverse needs sorted factors"));
    }
    if !(cutoff_factor >= 0.0) {
        return Err(Error::domain("cutoff factor must be non-negative"));
    }
    let sigma_max = f.sigma.first().copied().unwrap_or(0.0);
    let tolerance = cutoff_factor * sigma_max * f.n_rows().max(f.n_cols()) as f64;
    let sigma_dagger: Vec<f64> = f
        .sigma
        .iter()
        .map(|&s| if s > tolerance { 1.0 / s } else { 0.0 })
        .collect();
    let all_filtered = sigma_dagger.iter().all(|s| *s == 0.0);
    Ok(Pseudoinverse {
        v: f.vt.transpose(),
        sigma_dagger,
        ut: f.u.transpose(),
        tolerance_used: tolerance,
        all_filtered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svd::dense_svd;

    #[test]
    fn identity_inverts_to_identity() {
        let p = pinv_from_svd(&dense_svd(&DenseMatrix::identity(5)).unwrap(), DEFAULT_CUTOFF_FACTOR)
            .unwrap();
        let m = p.materialize().unwrap();
        assert!(m.sub(&DenseMatrix::identity(5)).unwrap().max_abs() < 1e-14);
        assert!(!p.all_filtered);
    }

    #[test]
    fn singular_direction_dropped() {
        let f = dense_svd(&DenseMatrix::from_diagonal(2, 2, &[2.0, 0.0])).unwrap();
        let p = pinv_from_svd(&f, DEFAULT_CUTOFF_FACTOR).unwrap();
        assert_eq!(p.sigma_dagger, vec![0.5, 0.0]);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn zero_matrix_gives_zero_pinv_with_flag() {
        let f = dense_svd(&DenseMatrix::zeros(3, 2)).unwrap();
        let p = pinv_from_svd(&f, DEFAULT_CUTOFF_FACTOR).unwrap();
        assert!(p.all_filtered);
        assert_eq!(p.materialize().unwrap(), DenseMatrix::zeros(2, 3));
        let empty = pinv_from_svd(&SvdFactors::empty(3, 2), DEFAULT_CUTOFF_FACTOR).unwrap();
        assert!(empty.all_filtered);
        assert_eq!(empty.materialize().unwrap(), DenseMatrix::zeros(2, 3));
    }

    #[test]
    fn unsorted_rejected() {
        let mut f = dense_svd(&DenseMatrix::identity(2)).unwrap();
        f.sorted = false;
        assert!(pinv_from_svd(&f, DEFAULT_CUTOFF_FACTOR).is_err());
    }

    #[test]
    fn factored_and_materialized_agree() {
        let a = DenseMatrix::from_fn(7, 4, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let p = pinv_from_svd(&dense_svd(&a).unwrap(), DEFAULT_CUTOFF_FACTOR).unwrap();
        let x: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
        let direct = p.materialize().unwrap().matvec(&x).unwrap();
        for (u, v) in p.apply(&x).unwrap().iter().zip(direct) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
