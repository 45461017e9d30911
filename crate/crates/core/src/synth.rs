//! Synthetic sparse matrices with skewed degree distributions, and planted
//! multi-label regression corpora built on top of them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::MultiLabelDataset;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::regression::top_k;
use crate::sparse::SparseMatrix;
use crate::svd::dense_svd;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub m: usize,
    pub n: usize,
    pub target_density: f64,
    /// Power-law exponent of both degree distributions, > 1.
    pub skew_exponent: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(m: usize, n: usize, target_density: f64, skew_exponent: f64, seed: u64) -> Self {
        SynthSpec {
            m,
            n,
            target_density,
            skew_exponent,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::domain("synthetic matrix needs nonzero dimensions"));
        }
        if !(self.target_density > 0.0 && self.target_density < 1.0) {
            return Err(Error::domain(format!(
                "density {} outside (0, 1)",
                self.target_density
            )));
        }
        if !(self.skew_exponent > 1.0) {
            return Err(Error::domain(format!(
                "exponent {} must exceed 1",
                self.skew_exponent
            )));
        }
        Ok(())
    }
}

/// Rank-based power-law weights `(i + 1)^(-1/(γ - 1))`, non-increasing.
fn power_weights(len: usize, exponent: f64) -> Vec<f64> {
    let e = -1.0 / (exponent - 1.0);
    (0..len).map(|i| ((i + 1) as f64).powf(e)).collect()
}

/// Expected edge count of the model `p_ij = min(1, c · wr_i · wc_j)`.
/// `wc` must be non-increasing; `prefix` holds its prefix sums.
fn expected_edges(c: f64, wr: &[f64], wc: &[f64], prefix: &[f64]) -> f64 {
    let total = prefix[wc.len()];
    wr.iter()
        .map(|&w| {
            // columns j < saturated have c·w·wc_j >= 1
            let saturated = wc.partition_point(|&x| c * w * x >= 1.0);
            saturated as f64 + c * w * (total - prefix[saturated])
        })
        .sum()
}

/// Bipartite Chung–Lu matrix with truncated power-law row and column degrees.
///
/// Edges are sampled with the skipping scheme of Miller and Hagberg, so the
/// cost is proportional to the number of edges rather than `m·n`. Rows and
/// columns left empty get one uniformly random edge. Rows and columns are
/// relabeled by random permutations and values drawn from U(0.5, 1.5).
pub fn synth_generate(spec: &SynthSpec) -> Result<SparseMatrix> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let target = spec.target_density * m as f64 * n as f64;
    if target < m.max(n) as f64 * 0.8 {
        return Err(Error::domain(format!(
            "density {} cannot give every row and column a nonzero",
            spec.target_density
        )));
    }
    let wr = power_weights(m, spec.skew_exponent);
    let wc = power_weights(n, spec.skew_exponent);
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &w in &wc {
        prefix.push(prefix.last().unwrap() + w);
    }

    // calibrate c so the truncated model hits the target edge count
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while expected_edges(hi, &wr, &wc, &prefix) < target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain("density target unreachable"));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if expected_edges(mid, &wr, &wc, &prefix) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = hi;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(target as usize + m + n);
    for (i, &w) in wr.iter().enumerate() {
        let mut j = 0usize;
        let mut p = (c * w * wc[0]).min(1.0);
        while j < n && p > 0.0 {
            if p < 1.0 {
                let u: f64 = rng.random();
                let skip = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
                if !skip.is_finite() || skip >= (n - j) as f64 {
                    break;
                }
                j += skip as usize;
            }
            if j >= n {
                break;
            }
            let q = (c * w * wc[j]).min(1.0);
            let u: f64 = rng.random();
            if u < q / p {
                edges.push((i, j));
            }
            p = q;
            j += 1;
        }
    }

    let mut row_seen = vec![false; m];
    let mut col_seen = vec![false; n];
    for &(i, j) in &edges {
        row_seen[i] = true;
        col_seen[j] = true;
    }
    let mut present: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();
    for i in 0..m {
        if !row_seen[i] {
            let j = rng.random_range(0..n);
            if present.insert((i, j)) {
                edges.push((i, j));
                col_seen[j] = true;
            }
        }
    }
    for j in 0..n {
        if !col_seen[j] {
            let i = rng.random_range(0..m);
            if present.insert((i, j)) {
                edges.push((i, j));
            }
        }
    }

    let achieved = edges.len() as f64 / (m as f64 * n as f64);
    if (achieved - spec.target_density).abs() > 0.2 * spec.target_density {
        return Err(Error::domain(format!(
            "achieved density {achieved:.4} is not within 20% of {}",
            spec.target_density
        )));
    }

    let mut row_label: Vec<usize> = (0..m).collect();
    let mut col_label: Vec<usize> = (0..n).collect();
    row_label.shuffle(&mut rng);
    col_label.shuffle(&mut rng);
    let triplets: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(i, j)| (row_label[i], col_label[j], rng.random_range(0.5..1.5)))
        .collect();
    SparseMatrix::from_triplets(m, n, &triplets)
}

/// Parameters of a planted multi-label regression corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionCorpusSpec {
    pub features: SynthSpec,
    pub n_labels: usize,
    /// Fraction of the feature dimension that carries label signal.
    pub rank_ratio: f64,
    /// Positive labels per instance.
    pub labels_per_row: usize,
}

/// Feature matrix from [`synth_generate`] plus one random matching entry per
/// column (so the matrix has full column rank almost surely), and labels
/// given by the top scores of `A · V_p · W`, where `V_p` spans the leading
/// `ceil(rank_ratio · n)` right singular vectors of `A` and `W` is Gaussian.
pub fn regression_corpus(spec: &RegressionCorpusSpec) -> Result<MultiLabelDataset> {
    let f = &spec.features;
    if f.m < f.n {
        return Err(Error::domain("regression corpus needs at least as many rows as columns"));
    }
    if !(spec.rank_ratio > 0.0 && spec.rank_ratio <= 1.0) {
        return Err(Error::domain("rank ratio outside (0, 1]"));
    }
    if spec.labels_per_row == 0 || spec.labels_per_row > spec.n_labels {
        return Err(Error::domain("labels per row outside 1..=L"));
    }
    let base = synth_generate(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(f.seed ^ 0x5eed_1abe1);
    let mut rows: Vec<usize> = (0..f.m).collect();
    rows.shuffle(&mut rng);
    let mut trip: Vec<(usize, usize, f64)> = base.iter().collect();
    let present: std::collections::HashSet<(usize, usize)> =
        trip.iter().map(|&(i, j, _)| (i, j)).collect();
    for j in 0..f.n {
        if !present.contains(&(rows[j], j)) {
            trip.push((rows[j], j, rng.random_range(0.5..1.5)));
        }
    }
    let a = SparseMatrix::from_triplets(f.m, f.n, &trip)?;

    let dense = a.to_dense()?;
    let svd = dense_svd(&dense)?;
    let p = crate::block_svd::target_rank(spec.rank_ratio, f.n).max(1);
    let vp = svd.vt.rows_range(0..p).transpose();
    let w = DenseMatrix::from_fn(p, spec.n_labels, |_, _| StandardNormal.sample(&mut rng));
    let scores = dense.matmul(&vp)?.matmul(&w)?;
    let mut labels = Vec::with_capacity(f.m * spec.labels_per_row);
    for i in 0..f.m {
        for l in top_k(scores.row(i), spec.labels_per_row) {
            labels.push((i, l, 1.0));
        }
    }
    MultiLabelDataset::new(a, SparseMatrix::from_triplets(f.m, spec.n_labels, &labels)?)
}
