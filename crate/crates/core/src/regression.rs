//! Multi-label least-squares regression on a factored pseudoinverse, and
//! top-k precision evaluation.

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::MultiLabelDataset;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::method::{run_method, Method};
use crate::pinv::Pseudoinverse;
use crate::sparse::SparseVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.9,
            seed: 0,
        }
    }
}

/// Random row split into `ceil(f·m)` training and `m - ceil(f·m)` test rows.
///
/// The training size is clamped to `[1, m - 1]` so neither side is empty.
/// Each side keeps its rows in ascending original order.
pub fn split(
    ds: &MultiLabelDataset,
    spec: &SplitSpec,
) -> Result<(MultiLabelDataset, MultiLabelDataset)> {
    let m = ds.n_instances();
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::domain(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    if m < 2 {
        return Err(Error::domain("need at least two instances to split"));
    }
    let n_train = ((spec.train_fraction * m as f64).ceil() as usize).clamp(1, m - 1);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(train), ds.select_rows(test)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionModel {
    /// `n x L` weights.
    pub z: DenseMatrix,
    pub method_tag: String,
    pub alpha: f64,
    pub train_seconds: f64,
}

/// `Z = V · diag(σ⁺) · (Uᵀ · Y)`, evaluated right to left.
pub fn fit(
    train: &MultiLabelDataset,
    pinv: &Pseudoinverse,
    method_tag: &str,
    alpha: f64,
) -> Result<RegressionModel> {
    if pinv.n_cols() != train.n_instances() || pinv.n_rows() != train.n_features() {
        return Err(Error::domain(format!(
            "pseudoinverse is {}x{}, training features are {}x{}",
            pinv.n_rows(),
            pinv.n_cols(),
            train.n_instances(),
            train.n_features()
        )));
    }
    let start = Instant::now();
    let r = pinv.ut.n_rows();
    let n_labels = train.n_labels();
    // Uᵀ·Y accumulated over the nonzeros of Y.
    let mut uty = DenseMatrix::zeros(r, n_labels);
    for (i, l, y) in train.labels().iter() {
        for k in 0..r {
            let cur = uty.get(k, l);
            uty.set(k, l, cur + pinv.ut.get(k, i) * y);
        }
    }
    let z = pinv.v.matmul(&uty.scale_rows(&pinv.sigma_dagger))?;
    Ok(RegressionModel {
        z,
        method_tag: method_tag.to_string(),
        alpha,
        train_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Computes the pseudoinverse of the training features with `method` and fits.
/// `train_seconds` covers both steps.
pub fn train(
    train: &MultiLabelDataset,
    method: Method,
    alpha: f64,
    k: f64,
    seed: u64,
) -> Result<RegressionModel> {
    let start = Instant::now();
    let run = run_method(method, train.features(), alpha, k, seed)?;
    let mut model = fit(train, &run.pinv, method.name(), alpha)?;
    model.train_seconds = start.elapsed().as_secs_f64();
    Ok(model)
}

/// Scores `Zᵀ·a`.
pub fn predict(model: &RegressionModel, a: &SparseVector) -> Result<Vec<f64>> {
    if a.len != model.z.n_rows() {
        return Err(Error::domain(format!(
            "feature vector has length {}, model expects {}",
            a.len,
            model.z.n_rows()
        )));
    }
    let mut out = vec![0.0; model.z.n_cols()];
    for (&j, &v) in a.indices.iter().zip(&a.values) {
        for (o, z) in out.iter_mut().zip(model.z.row(j)) {
            *o += v * z;
        }
    }
    Ok(out)
}

/// Indices of the `k` largest scores; ties go to the smaller index.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let by_rank = |&a: &usize, &b: &usize| -> Ordering {
        scores[b].total_cmp(&scores[a]).then(a.cmp(&b))
    };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, by_rank);
        idx.truncate(k);
    }
    idx.sort_unstable_by(by_rank);
    idx.truncate(k);
    idx
}

/// Fraction of the `k` top-scored labels that are positive in `y`.
pub fn precision_at_k(y_hat: &[f64], y: &[f64], k: usize) -> Result<f64> {
    if y_hat.len() != y.len() {
        return Err(Error::domain("score and label vectors differ in length"));
    }
    if k == 0 || k > y.len() {
        return Err(Error::domain(format!("k = {k} outside 1..={}", y.len())));
    }
    let hits: f64 = top_k(y_hat, k).iter().map(|&l| y[l]).sum();
    Ok(hits / k as f64)
}

/// Mean P@k over the test rows, one value per entry of `ks`.
pub fn evaluate(
    model: &RegressionModel,
    test: &MultiLabelDataset,
    ks: &[usize],
) -> Result<Vec<f64>> {
    if test.n_labels() != model.z.n_cols() {
        return Err(Error::domain("test labels do not match the model"));
    }
    if test.n_instances() == 0 {
        return Err(Error::domain("empty test set"));
    }
    let mut sums = vec![0.0; ks.len()];
    for i in 0..test.n_instances() {
        let scores = predict(model, &test.features().row_vector(i))?;
        let y = test.labels().row_vector(i).to_dense();
        for (s, &k) in sums.iter_mut().zip(ks) {
            *s += precision_at_k(&scores, &y, k)?;
        }
    }
    let m = test.n_instances() as f64;
    Ok(sums.into_iter().map(|s| s / m).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub method: String,
    pub alpha: f64,
    pub k: usize,
    pub precision: f64,
    pub train_seconds: f64,
    pub seed: u64,
}

/// CSV with columns `method,alpha,k,precision,train_seconds,seed`.
pub fn write_eval_csv(w: &mut impl Write, rows: &[EvalRow]) -> Result<()> {
    writeln!(w, "method,alpha,k,precision,train_seconds,seed")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.16e},{:.9},{}",
            r.method, r.alpha, r.k, r.precision, r.train_seconds, r.seed
        )?;
    }
    Ok(())
}
