//! Bipartite instance/feature network derived from a sparse feature matrix.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;
use crate::sparse::SparseMatrix;

/// Bipartite graph with one instance node per row, one feature node per
/// column, and one edge per stored nonzero.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    /// instance -> features, CSR pattern of `A`.
    inst_offsets: Vec<usize>,
    inst_adj: Vec<usize>,
    /// feature -> instances, CSR pattern of `Aᵀ`.
    feat_offsets: Vec<usize>,
    feat_adj: Vec<usize>,
}

impl BipartiteGraph {
    pub fn from_matrix(a: &SparseMatrix) -> Self {
        let t = a.transpose();
        BipartiteGraph {
            inst_offsets: a.row_offsets().to_vec(),
            inst_adj: a.col_indices().to_vec(),
            feat_offsets: t.row_offsets().to_vec(),
            feat_adj: t.col_indices().to_vec(),
        }
    }

    pub fn n_instances(&self) -> usize {
        self.inst_offsets.len() - 1
    }

    pub fn n_features(&self) -> usize {
        self.feat_offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.inst_adj.len()
    }

    /// Feature neighbors of instance `i`.
    #[inline]
    pub fn features_of(&self, i: usize) -> &[usize] {
        &self.inst_adj[self.inst_offsets[i]..self.inst_offsets[i + 1]]
    }

    /// Instance neighbors of feature `j`.
    #[inline]
    pub fn instances_of(&self, j: usize) -> &[usize] {
        &self.feat_adj[self.feat_offsets[j]..self.feat_offsets[j + 1]]
    }

    pub fn instance_degree(&self, i: usize) -> usize {
        self.inst_offsets[i + 1] - self.inst_offsets[i]
    }

    pub fn feature_degree(&self, j: usize) -> usize {
        self.feat_offsets[j + 1] - self.feat_offsets[j]
    }

    /// Degree -> node count maps for the instance and feature sides.
    pub fn degree_histograms(&self) -> (DegreeHistogram, DegreeHistogram) {
        let mut inst = BTreeMap::new();
        for i in 0..self.n_instances() {
            *inst.entry(self.instance_degree(i)).or_insert(0) += 1;
        }
        let mut feat = BTreeMap::new();
        for j in 0..self.n_features() {
            *feat.entry(self.feature_degree(j)).or_insert(0) += 1;
        }
        (DegreeHistogram(inst), DegreeHistogram(feat))
    }
}

/// Free-function form of [`BipartiteGraph::from_matrix`].
pub fn to_bipartite(a: &SparseMatrix) -> BipartiteGraph {
    BipartiteGraph::from_matrix(a)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHistogram(pub BTreeMap<usize, usize>);

impl DegreeHistogram {
    pub fn total_nodes(&self) -> usize {
        self.0.values().sum()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|(d, c)| d * c).sum()
    }
}

/// Writes both histograms as CSV with columns `degree,count,side`.
pub fn write_degree_csv(
    w: &mut impl Write,
    instances: &DegreeHistogram,
    features: &DegreeHistogram,
) -> Result<()> {
    writeln!(w, "degree,count,side")?;
    for (side, hist) in [("instance", instances), ("feature", features)] {
        for (d, c) in &hist.0 {
            writeln!(w, "{d},{c},{side}")?;
        }
    }
    Ok(())
}
