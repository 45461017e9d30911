#![allow(dead_code)]

use fastpi::{DenseMatrix, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random sparse matrix with values in [-1, 1].
pub fn random_sparse(m: usize, n: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut r = rng(seed);
    let mut trip = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if r.random::<f64>() < density {
                let v: f64 = r.random_range(-1.0..1.0);
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(m, n, &trip).unwrap()
}

pub fn random_dense(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    DenseMatrix::from_fn(m, n, |_, _| r.random_range(-1.0..1.0))
}

/// Sparse matrix with rank at most `rank`: a sum of `rank` sparse outer products.
pub fn low_rank_sparse(m: usize, n: usize, rank: usize, seed: u64) -> SparseMatrix {
    let mut r = rng(seed);
    let mut d = DenseMatrix::zeros(m, n);
    for _ in 0..rank {
        let u: Vec<f64> = (0..m)
            .map(|_| if r.random::<f64>() < 0.3 { r.random_range(-1.0..1.0) } else { 0.0 })
            .collect();
        let v: Vec<f64> = (0..n)
            .map(|_| if r.random::<f64>() < 0.3 { r.random_range(-1.0..1.0) } else { 0.0 })
            .collect();
        for i in 0..m {
            for j in 0..n {
                let cur = d.get(i, j);
                d.set(i, j, cur + u[i] * v[j]);
            }
        }
    }
    SparseMatrix::from_dense(&d)
}

pub fn to_nalgebra(d: &DenseMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(d.n_rows(), d.n_cols(), d.data())
}

pub fn max_asymmetry(d: &DenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..d.n_rows() {
        for j in 0..d.n_cols() {
            worst = worst.max((d.get(i, j) - d.get(j, i)).abs());
        }
    }
    worst
}

/// Relative errors of the four Moore–Penrose conditions:
/// `‖AXA − A‖/‖A‖`, `‖XAX − X‖/‖X‖`, and the max asymmetry of `AX` and `XA`.
pub fn moore_penrose_errors(a: &DenseMatrix, x: &DenseMatrix) -> [f64; 4] {
    let ax = a.matmul(x).unwrap();
    let xa = x.matmul(a).unwrap();
    let axa = ax.matmul(a).unwrap();
    let xax = xa.matmul(x).unwrap();
    let rel = |p: &DenseMatrix, q: &DenseMatrix| {
        let denom = q.frobenius_norm();
        let diff = p.sub(q).unwrap().frobenius_norm();
        if denom == 0.0 {
            diff
        } else {
            diff / denom
        }
    };
    [rel(&axa, a), rel(&xax, x), max_asymmetry(&ax), max_asymmetry(&xa)]
}
