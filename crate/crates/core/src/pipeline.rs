//! The end-to-end driver: reorder, block SVD, row update, column update, pseudoinverse.

use std::io::Write;
use std::time::Instant;

use crate::block_svd::{block_diagonal_svd, check_alpha, target_rank, BlockSvd};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::to_bipartite;
use crate::incremental::{column_update, row_update, InnerSvdEngine};
use crate::pinv::{pinv_from_svd, Pseudoinverse, DEFAULT_CUTOFF_FACTOR};
use crate::reorder::{apply_permutation, partition, reorder_with_limit, Permutation, ReorderResult};
use crate::sparse::SparseMatrix;
use crate::svd::SvdFactors;

#[derive(Clone, Debug, PartialEq)]
pub struct FastPiConfig {
    /// Target rank ratio in (0, 1].
    pub alpha: f64,
    /// Hub selection ratio in (0, 1).
    pub k: f64,
    pub seed: u64,
    pub low_rank_threshold: f64,
    pub pinv_cutoff_factor: f64,
    /// Optional cap on reordering iterations.
    pub max_reorder_iterations: Option<usize>,
    /// Keep the block SVD and the row-update factors in the output.
    pub keep_intermediates: bool,
}

impl FastPiConfig {
    pub fn new(alpha: f64) -> Self {
        FastPiConfig {
            alpha,
            k: 0.01,
            seed: 0,
            low_rank_threshold: 0.3,
            pinv_cutoff_factor: DEFAULT_CUTOFF_FACTOR,
            max_reorder_iterations: None,
            keep_intermediates: false,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.k > 0.0 && self.k < 1.0) {
            return Err(Error::domain(format!("hub ratio k = {} outside (0, 1)", self.k)));
        }
        if !(self.low_rank_threshold >= 0.0) {
            return Err(Error::domain("low-rank threshold must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Reorder,
    BlockSvd,
    RowUpdate,
    ColumnUpdate,
    /// Whole-matrix SVD, used by the baseline methods.
    Svd,
    PinvAssembly,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Reorder => "reorder",
            Stage::BlockSvd => "block_svd",
            Stage::RowUpdate => "row_update",
            Stage::ColumnUpdate => "column_update",
            Stage::Svd => "svd",
            Stage::PinvAssembly => "pinv_assembly",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
    /// Rank of the factorization the stage produced (0 where not applicable).
    pub rank: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StageTimings(pub Vec<StageTiming>);

impl StageTimings {
    pub fn push(&mut self, stage: Stage, since: Instant, rank: usize) {
        self.0.push(StageTiming {
            stage,
            seconds: since.elapsed().as_secs_f64(),
            rank,
        });
    }

    pub fn total_seconds(&self) -> f64 {
        self.0.iter().map(|t| t.seconds).sum()
    }

    pub fn get(&self, stage: Stage) -> Option<&StageTiming> {
        self.0.iter().find(|t| t.stage == stage)
    }

    /// CSV with columns `stage,seconds,rank`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "stage,seconds,rank")?;
        for t in &self.0 {
            writeln!(w, "{},{:.9},{}", t.stage.name(), t.seconds, t.rank)?;
        }
        Ok(())
    }
}

/// Factorizations before the final column update, in reordered coordinates.
#[derive(Clone, Debug)]
pub struct Intermediates {
    pub block: BlockSvd,
    pub row: SvdFactors,
}

#[derive(Clone, Debug)]
pub struct FastPiOutput {
    /// Pseudoinverse of the input, in its original coordinates.
    pub pinv: Pseudoinverse,
    /// Truncated SVD of the input, in its original coordinates.
    pub svd: SvdFactors,
    /// SVD of the reordered working matrix (of `Aᵀ` when `transposed`).
    pub reordered_svd: SvdFactors,
    pub reorder: ReorderResult,
    pub timings: StageTimings,
    /// Set when the input was wide and the pipeline ran on its transpose.
    pub transposed: bool,
    pub diagnostics: Vec<String>,
    pub intermediates: Option<Intermediates>,
}

/// Maps factors of `P_t A P_fᵀ` back to factors of `A`.
pub fn unpermute_factors(f: &SvdFactors, pi_t: &Permutation, pi_f: &Permutation) -> SvdFactors {
    let r = f.rank();
    let u = DenseMatrix::from_fn(pi_t.len(), r, |i, k| f.u.get(pi_t.forward()[i], k));
    let vt = DenseMatrix::from_fn(r, pi_f.len(), |k, j| f.vt.get(k, pi_f.forward()[j]));
    SvdFactors {
        u,
        sigma: f.sigma.clone(),
        vt,
        sorted: f.sorted,
    }
}

pub fn fastpi(a: &SparseMatrix, cfg: &FastPiConfig) -> Result<FastPiOutput> {
    cfg.validate()?;
    if a.n_rows() == 0 || a.n_cols() == 0 {
        return Err(Error::domain(format!("cannot factor an empty {}x{} matrix", a.n_rows(), a.n_cols())));
    }
    let transposed = a.n_rows() < a.n_cols();
    let owned;
    let work = if transposed {
        owned = a.transpose();
        &owned
    } else {
        a
    };
    let n = work.n_cols();
    let mut timings = StageTimings::default();
    let mut diagnostics = Vec::new();

    let start = Instant::now();
    let graph = to_bipartite(work);
    let reorder = reorder_with_limit(&graph, cfg.k, cfg.max_reorder_iterations)?;
    let reordered = apply_permutation(work, &reorder.pi_t, &reorder.pi_f)?;
    let parts = partition(&reordered, &reorder)?;
    drop(reordered);
    timings.push(Stage::Reorder, start, 0);

    let start = Instant::now();
    let block = block_diagonal_svd(&parts.a11_blocks, parts.m1, parts.n1, cfg.alpha)?;
    timings.push(Stage::BlockSvd, start, crate::block_svd::RowFactorization::rank(&block));

    let engine = InnerSvdEngine {
        low_rank_threshold: cfg.low_rank_threshold,
        seed: cfg.seed,
    };
    let start = Instant::now();
    let row = row_update(&block, &parts.a21, target_rank(cfg.alpha, parts.n1), &engine)?;
    timings.push(Stage::RowUpdate, start, row.rank);
    if row.was_clamped() {
        diagnostics.push(format!(
            "row update rank clamped from {} to {}",
            row.requested_rank, row.rank
        ));
    }

    let start = Instant::now();
    let right = parts.right_columns()?;
    let col = column_update(&row.factors, &right, target_rank(cfg.alpha, n), &engine)?;
    timings.push(Stage::ColumnUpdate, start, col.rank);
    if col.was_clamped() {
        diagnostics.push(format!(
            "column update rank clamped from {} to {}",
            col.requested_rank, col.rank
        ));
    }

    let start = Instant::now();
    let folded = unpermute_factors(&col.factors, &reorder.pi_t, &reorder.pi_f);
    let svd = if transposed { folded.transpose() } else { folded };
    let pinv = pinv_from_svd(&svd, cfg.pinv_cutoff_factor)?;
    timings.push(Stage::PinvAssembly, start, pinv.rank());
    if pinv.all_filtered {
        diagnostics.push("every singular value fell below the cutoff".to_string());
    }

    let intermediates = cfg.keep_intermediates.then_some(Intermediates {
        block,
        row: row.factors,
    });
    Ok(FastPiOutput {
        pinv,
        svd,
        reordered_svd: col.factors,
        reorder,
        timings,
        transposed,
        diagnostics,
        intermediates,
    })
}
