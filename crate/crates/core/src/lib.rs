//! Fast low-rank Moore–Penrose pseudoinverses of sparse feature matrices.
//!
//! The matrix is reordered by repeatedly removing hub nodes from its
//! bipartite instance/feature graph, which leaves a block-diagonal spoke
//! part plus thin hub rows and columns. The block-diagonal part is
//! decomposed block by block, then the hub rows and hub columns are folded
//! in with two incremental SVD updates. A randomized SVD baseline and a
//! dense oracle share the same interfaces.
//!
//! ```
//! use fastpi::{fastpi, FastPiConfig, SparseMatrix};
//!
//! let a = SparseMatrix::from_triplets(3, 2, &[(0, 0, 2.0), (1, 1, 1.0), (2, 0, 1.0)]).unwrap();
//! let out = fastpi(&a, &FastPiConfig::new(1.0)).unwrap();
//! let x = out.pinv.apply(&[1.0, 1.0, 1.0]).unwrap();
//! assert_eq!(x.len(), 2);
//! ```

pub mod block_svd;
pub mod dataset;
pub mod dense;
pub mod error;
pub mod graph;
pub mod incremental;
pub mod method;
pub mod operator;
pub mod pinv;
pub mod pipeline;
pub mod regression;
pub mod reorder;
pub mod sparse;
pub mod svd;
pub mod synth;

pub use block_svd::{block_diagonal_svd, target_rank, BlockSvd, RowFactorization};
pub use dataset::MultiLabelDataset;
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use graph::{to_bipartite, BipartiteGraph, DegreeHistogram};
pub use incremental::{column_update, row_update, InnerSvdEngine};
pub use method::{run_method, Method, MethodRun};
pub use pinv::{pinv_from_svd, Pseudoinverse};
pub use pipeline::{fastpi, FastPiConfig, FastPiOutput, Stage, StageTimings};
pub use regression::{evaluate, fit, precision_at_k, predict, split, RegressionModel, SplitSpec};
pub use reorder::{apply_permutation, partition, reorder, Partition, Permutation, ReorderResult};
pub use sparse::{SparseMatrix, SparseVector};
pub use svd::{dense_svd, randomized_svd, truncate, SvdFactors};
pub use synth::{regression_corpus, synth_generate, RegressionCorpusSpec, SynthSpec};
