mod common;

use common::{random_dense, random_sparse, rng, to_nalgebra};
use fastpi::pinv::DEFAULT_CUTOFF_FACTOR;
use fastpi::regression::{top_k, train};
use fastpi::{
    dense_svd, evaluate, fastpi, fit, pinv_from_svd, precision_at_k, predict, regression_corpus,
    split, synth_generate, to_bipartite, DenseMatrix, FastPiConfig, Method, MultiLabelDataset,
    RegressionCorpusSpec, RegressionModel, SparseMatrix, SparseVector, SplitSpec, SynthSpec,
};
use rand::Rng;

fn random_labels(m: usize, l: usize, p: f64, seed: u64) -> SparseMatrix {
    let mut r = rng(seed);
    let trip: Vec<_> = (0..m)
        .flat_map(|i| (0..l).map(move |j| (i, j)))
        .filter(|_| r.random::<f64>() < p)
        .map(|(i, j)| (i, j, 1.0))
        .collect();
    SparseMatrix::from_triplets(m, l, &trip).unwrap()
}

/// Full column rank features: a random sparse part plus a diagonal.
fn full_rank_features(m: usize, n: usize, seed: u64) -> SparseMatrix {
    let base = random_sparse(m, n, 0.1, seed).to_dense().unwrap();
    let mut d = base;
    for j in 0..n {
        let cur = d.get(j, j);
        d.set(j, j, cur + 2.0);
    }
    SparseMatrix::from_dense(&d)
}

#[test]
fn split_union_reconstructs_rows() {
    let ds = MultiLabelDataset::new(random_sparse(37, 10, 0.3, 40), random_labels(37, 5, 0.3, 41)).unwrap();
    let spec = SplitSpec { train_fraction: 0.7, seed: 3 };
    let (tr, te) = split(&ds, &spec).unwrap();
    assert_eq!(tr.n_instances(), 26);
    assert_eq!(te.n_instances(), 11);
    let row_key = |d: &MultiLabelDataset, i: usize| {
        let (c, v) = d.features().row(i);
        let (l, _) = d.labels().row(i);
        format!("{c:?}{v:?}{l:?}")
    };
    let mut all: Vec<String> = (0..37).map(|i| row_key(&ds, i)).collect();
    let mut parts: Vec<String> = (0..26).map(|i| row_key(&tr, i)).chain((0..11).map(|i| row_key(&te, i))).collect();
    all.sort();
    parts.sort();
    assert_eq!(all, parts);

    let (tr2, _) = split(&ds, &spec).unwrap();
    assert_eq!(tr, tr2);
    let (tr3, te3) = split(&ds, &SplitSpec { seed: 4, ..spec }).unwrap();
    assert_eq!(tr3.n_instances(), 26);
    assert_eq!(te3.n_instances(), 11);
    assert_ne!(tr, tr3);
}

#[test]
fn fit_matches_normal_equations() {
    let a = full_rank_features(60, 20, 42);
    let y = random_labels(60, 8, 0.3, 43);
    let ds = MultiLabelDataset::new(a.clone(), y.clone()).unwrap();
    let out = fastpi(&a, &FastPiConfig::new(1.0)).unwrap();
    let model = fit(&ds, &out.pinv, "fastpi", 1.0).unwrap();

    let na = to_nalgebra(&a.to_dense().unwrap());
    let ny = to_nalgebra(&y.to_dense().unwrap());
    let z_oracle = (na.transpose() * &na).lu().solve(&(na.transpose() * &ny)).unwrap();
    let res_oracle = (&na * &z_oracle - &ny).norm();
    let z = to_nalgebra(&model.z);
    let res = (&na * &z - &ny).norm();
    assert!((res - res_oracle).abs() <= 1e-7 * res_oracle, "{res} vs {res_oracle}");

    // fit∘predict reproduces least-squares scores
    let mut r = rng(44);
    let x: Vec<f64> = (0..20).map(|_| if r.random::<f64>() < 0.4 { r.random_range(0.0..1.0) } else { 0.0 }).collect();
    let scores = predict(&model, &SparseVector::from_dense(&x)).unwrap();
    let want = z_oracle.transpose() * nalgebra::DVector::from_vec(x);
    for (s, w) in scores.iter().zip(want.iter()) {
        assert!((s - w).abs() <= 1e-7 * want.norm().max(1.0));
    }
}

#[test]
fn zero_labels_give_zero_weights() {
    let a = full_rank_features(30, 10, 45);
    let ds = MultiLabelDataset::new(a.clone(), SparseMatrix::zeros(30, 4)).unwrap();
    let p = pinv_from_svd(&dense_svd(&a.to_dense().unwrap()).unwrap(), DEFAULT_CUTOFF_FACTOR).unwrap();
    let model = fit(&ds, &p, "dense", 1.0).unwrap();
    assert_eq!(model.z, DenseMatrix::zeros(10, 4));
    let wrong = MultiLabelDataset::new(random_sparse(30, 9, 0.2, 1), SparseMatrix::zeros(30, 4)).unwrap();
    assert!(fit(&wrong, &p, "dense", 1.0).is_err());
}

#[test]
fn predict_matches_dense_product() {
    let model = RegressionModel {
        z: random_dense(25, 9, 46),
        method_tag: "dense".into(),
        alpha: 1.0,
        train_seconds: 0.0,
    };
    let mut r = rng(47);
    let x: Vec<f64> = (0..25).map(|_| if r.random::<f64>() < 0.3 { r.random_range(-1.0..1.0) } else { 0.0 }).collect();
    let got = predict(&model, &SparseVector::from_dense(&x)).unwrap();
    for l in 0..9 {
        let want: f64 = (0..25).map(|j| model.z.get(j, l) * x[j]).sum();
        assert!((got[l] - want).abs() < 1e-12);
    }
    let ident = RegressionModel { z: DenseMatrix::identity(4), ..model };
    assert_eq!(predict(&ident, &SparseVector::from_dense(&[1.0, 0.0, -2.0, 3.0])).unwrap(), vec![1.0, 0.0, -2.0, 3.0]);
}

/// Sorts all indices by (score descending, index ascending) and counts hits.
fn full_sort_precision(y_hat: &[f64], y: &[f64], k: usize) -> f64 {
    let mut idx: Vec<usize> = (0..y_hat.len()).collect();
    idx.sort_by(|&a, &b| y_hat[b].partial_cmp(&y_hat[a]).unwrap().then(a.cmp(&b)));
    idx[..k].iter().map(|&l| y[l]).sum::<f64>() / k as f64
}

#[test]
fn precision_matches_full_sort_oracle() {
    let mut r = rng(48);
    for _ in 0..200 {
        let len = r.random_range(1..40);
        // coarse scores so ties are common
        let y_hat: Vec<f64> = (0..len).map(|_| (r.random_range(0..5)) as f64).collect();
        let y: Vec<f64> = (0..len).map(|_| if r.random::<f64>() < 0.3 { 1.0 } else { 0.0 }).collect();
        let k = r.random_range(1..=len);
        assert_eq!(precision_at_k(&y_hat, &y, k).unwrap(), full_sort_precision(&y_hat, &y, k));
    }
}

#[test]
fn evaluate_single_perfect_row() {
    let y = SparseMatrix::from_triplets(1, 5, &[(0, 1, 1.0), (0, 3, 1.0)]).unwrap();
    let ds = MultiLabelDataset::new(SparseMatrix::identity(1), y.clone()).unwrap();
    let model = RegressionModel {
        z: y.to_dense().unwrap(),
        method_tag: "dense".into(),
        alpha: 1.0,
        train_seconds: 0.0,
    };
    let p = evaluate(&model, &ds, &[1, 2, 3, 5]).unwrap();
    assert_eq!(p, vec![1.0, 1.0, 2.0 / 3.0, 2.0 / 5.0]);
}

#[test]
fn zero_model_uses_index_tie_break() {
    let features = random_sparse(20, 6, 0.4, 49);
    let labels = random_labels(20, 7, 0.3, 50);
    let ds = MultiLabelDataset::new(features, labels.clone()).unwrap();
    let model = RegressionModel {
        z: DenseMatrix::zeros(6, 7),
        method_tag: "zero".into(),
        alpha: 1.0,
        train_seconds: 0.0,
    };
    let ld = labels.to_dense().unwrap();
    for k in 1..=7 {
        let oracle: f64 = (0..20)
            .map(|i| full_sort_precision(&[0.0; 7], ld.row(i), k))
            .sum::<f64>()
            / 20.0;
        assert_eq!(evaluate(&model, &ds, &[k]).unwrap()[0], oracle);
    }
}

#[test]
fn identity_features_memorize_one_hot_labels() {
    let n = 12;
    let labels: Vec<_> = (0..n).map(|i| (i, (i * 5) % n, 1.0)).collect();
    let ds = MultiLabelDataset::new(
        SparseMatrix::identity(n),
        SparseMatrix::from_triplets(n, n, &labels).unwrap(),
    )
    .unwrap();
    let model = train(&ds, Method::FastPi, 1.0, 0.1, 0).unwrap();
    assert_eq!(evaluate(&model, &ds, &[1]).unwrap(), vec![1.0]);
}

#[test]
fn precision_invariant_under_monotone_transform() {
    let mut r = rng(51);
    let y_hat: Vec<f64> = (0..30).map(|_| r.random_range(-3.0..3.0)).collect();
    let y: Vec<f64> = (0..30).map(|_| if r.random::<f64>() < 0.2 { 1.0 } else { 0.0 }).collect();
    let warped: Vec<f64> = y_hat.iter().map(|v| v.exp() * 7.0 + 1.0).collect();
    for k in 1..=30 {
        assert_eq!(precision_at_k(&y_hat, &y, k).unwrap(), precision_at_k(&warped, &y, k).unwrap());
    }
    assert_eq!(top_k(&y_hat, 5), top_k(&warped, 5));
}

#[test]
fn planted_rank_beats_underfitting() {
    let spec = RegressionCorpusSpec {
        features: SynthSpec::new(600, 120, 0.05, 2.0, 52),
        n_labels: 30,
        rank_ratio: 0.3,
        labels_per_row: 3,
    };
    let ds = regression_corpus(&spec).unwrap();
    let (tr, te) = split(&ds, &SplitSpec { train_fraction: 0.9, seed: 52 }).unwrap();
    let low = evaluate(&train(&tr, Method::FastPi, 0.05, 0.01, 0).unwrap(), &te, &[3]).unwrap()[0];
    let planted = evaluate(&train(&tr, Method::FastPi, 0.3, 0.01, 0).unwrap(), &te, &[3]).unwrap()[0];
    assert!(low < planted, "P@3 {low} at 0.05 vs {planted} at the planted ratio");
}

#[test]
fn synth_density_and_skew() {
    let spec = SynthSpec::new(100, 40, 0.05, 2.0, 7);
    let a = synth_generate(&spec).unwrap();
    assert_eq!(a, synth_generate(&spec).unwrap());
    let density = a.nnz() as f64 / 4000.0;
    assert!((0.04..=0.06).contains(&density));

    let big = synth_generate(&SynthSpec::new(2000, 400, 0.02, 2.0, 8)).unwrap();
    let g = to_bipartite(&big);
    for degrees in [
        (0..2000).map(|i| g.instance_degree(i)).collect::<Vec<_>>(),
        (0..400).map(|j| g.feature_degree(j)).collect::<Vec<_>>(),
    ] {
        let mut d = degrees;
        d.sort_unstable_by(|a, b| b.cmp(a));
        let top = (d.len() as f64 * 0.01).ceil() as usize;
        let share = d[..top].iter().sum::<usize>() as f64 / big.nnz() as f64;
        assert!(share > 0.10, "top 1% carry {share}");
    }
}
