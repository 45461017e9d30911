//! Hub-removal reordering of a bipartite feature network.
//!
//! Each iteration removes the top `ceil(k·|V_T|)` instance hubs and
//! `ceil(k·|V_F|)` feature hubs of the current giant connected component,
//! gives them the highest free ids, gives every non-giant component of the
//! residual the lowest free ids (one diagonal block per component), and
//! recurses on the new giant component. The reordered matrix then splits as
//!
//! ```text
//! [ A11  A12 ]   A11: m1 x n1, block diagonal
//! [ A21  A22 ]   A22: m2 x n2, hubs plus the final giant component
//! ```

use std::cmp::Reverse;
use std::collections::VecDeque;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::sparse::SparseMatrix;

/// A bijection on `0..len` stored in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    backward: Vec<usize>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation {
            forward: (0..len).collect(),
            backward: (0..len).collect(),
        }
    }

    /// Builds a permutation from its old-id -> new-id map.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let mut backward = vec![usize::MAX; forward.len()];
        for (old, &new) in forward.iter().enumerate() {
            if new >= forward.len() || backward[new] != usize::MAX {
                return Err(Error::domain("forward map is not a bijection"));
            }
            backward[new] = old;
        }
        Ok(Permutation { forward, backward })
    }

    pub fn reversal(len: usize) -> Self {
        Self::from_forward((0..len).rev().collect()).expect("reversal is a bijection")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Old id -> new id.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// New id -> old id.
    pub fn backward(&self) -> &[usize] {
        &self.backward
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// True when `forward ∘ backward` and `backward ∘ forward` are both the identity.
    pub fn is_valid(&self) -> bool {
        self.forward.len() == self.backward.len()
            && self
                .backward
                .iter()
                .enumerate()
                .all(|(new, &old)| old < self.forward.len() && self.forward[old] == new)
            && self
                .forward
                .iter()
                .enumerate()
                .all(|(old, &new)| new < self.backward.len() && self.backward[new] == old)
    }
}

/// One diagonal block of `A11` in reordered coordinates. Either span may be empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub row_start: usize,
    pub row_len: usize,
    pub col_start: usize,
    pub col_len: usize,
}

impl Block {
    pub fn rows(&self) -> std::ops::Range<usize> {
        self.row_start..self.row_start + self.row_len
    }

    pub fn cols(&self) -> std::ops::Range<usize> {
        self.col_start..self.col_start + self.col_len
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReorderResult {
    pub pi_t: Permutation,
    pub pi_f: Permutation,
    /// Spoke instances (rows of `A11`).
    pub m1: usize,
    /// Spoke features (columns of `A11`).
    pub n1: usize,
    /// Hub instances, including the final giant component.
    pub m2: usize,
    /// Hub features, including the final giant component.
    pub n2: usize,
    pub blocks: Vec<Block>,
    pub iterations: usize,
    /// Node count of the giant component left after each iteration.
    /// Not part of the text format.
    pub gcc_sizes: Vec<usize>,
}

impl ReorderResult {
    /// Identity ordering with everything in the hub region.
    pub fn trivial(m: usize, n: usize) -> Self {
        ReorderResult {
            pi_t: Permutation::identity(m),
            pi_f: Permutation::identity(n),
            m1: 0,
            n1: 0,
            m2: m,
            n2: n,
            blocks: Vec::new(),
            iterations: 0,
            gcc_sizes: Vec::new(),
        }
    }

    /// Checks region sizes, permutation bijectivity and block tiling.
    pub fn validate(&self) -> Result<()> {
        if !self.pi_t.is_valid() || !self.pi_f.is_valid() {
            return Err(Error::StructuralViolation("permutation is not a bijection".into()));
        }
        if self.m1 + self.m2 != self.pi_t.len() || self.n1 + self.n2 != self.pi_f.len() {
            return Err(Error::StructuralViolation("region sizes do not cover the matrix".into()));
        }
        let (mut row, mut col) = (0, 0);
        for b in &self.blocks {
            if b.row_start != row || b.col_start != col {
                return Err(Error::StructuralViolation(format!(
                    "block {b:?} does not start where the previous one ended"
                )));
            }
            row += b.row_len;
            col += b.col_len;
        }
        if row != self.m1 || col != self.n1 {
            return Err(Error::StructuralViolation(
                "blocks do not tile the spoke region".into(),
            ));
        }
        Ok(())
    }

    /// Text format: a `m1 n1 m2 n2 T B` header, the forward maps of `pi_T`
    /// and `pi_F` on one line each, then `row_start row_len col_start col_len`
    /// per block.
    pub fn write_text(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "{} {} {} {} {} {}",
            self.m1,
            self.n1,
            self.m2,
            self.n2,
            self.iterations,
            self.blocks.len()
        )?;
        for perm in [&self.pi_t, &self.pi_f] {
            let line: Vec<String> = perm.forward().iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        for b in &self.blocks {
            writeln!(w, "{} {} {} {}", b.row_start, b.row_len, b.col_start, b.col_len)?;
        }
        Ok(())
    }

    pub fn read_text(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let mut next_line = |line_no: usize| -> Result<Vec<usize>> {
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(line_no, "unexpected end of file"))??;
            line.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(line_no, format!("bad integer `{t}`")))
                })
                .collect()
        };
        let header = next_line(1)?;
        let [m1, n1, m2, n2, iterations, n_blocks] = header[..] else {
            return Err(Error::parse(1, "header must be `m1 n1 m2 n2 T B`"));
        };
        let pi_t = Permutation::from_forward(next_line(2)?)
            .map_err(|_| Error::parse(2, "pi_T is not a permutation"))?;
        let pi_f = Permutation::from_forward(next_line(3)?)
            .map_err(|_| Error::parse(3, "pi_F is not a permutation"))?;
        let mut blocks = Vec::with_capacity(n_blocks);
        for b in 0..n_blocks {
            let line_no = 4 + b;
            let [row_start, row_len, col_start, col_len] = next_line(line_no)?[..] else {
                return Err(Error::parse(line_no, "block line needs four integers"));
            };
            blocks.push(Block {
                row_start,
                row_len,
                col_start,
                col_len,
            });
        }
        let result = ReorderResult {
            pi_t,
            pi_f,
            m1,
            n1,
            m2,
            n2,
            blocks,
            iterations,
            gcc_sizes: Vec::new(),
        };
        result
            .validate()
            .map_err(|e| Error::parse(1, format!("inconsistent reordering: {e}")))?;
        Ok(result)
    }
}

/// Connected piece of the residual graph.
struct Component {
    instances: Vec<usize>,
    features: Vec<usize>,
}

impl Component {
    fn size(&self) -> usize {
        self.instances.len() + self.features.len()
    }

    /// Descending size, then smallest instance id, then smallest feature id.
    fn order_key(&self) -> (Reverse<usize>, usize, usize) {
        (
            Reverse(self.size()),
            self.instances.first().copied().unwrap_or(usize::MAX),
            self.features.first().copied().unwrap_or(usize::MAX),
        )
    }
}

/// Reorders with hub ratio `k` until the giant component is smaller than the hub quota.
pub fn reorder(g: &BipartiteGraph, k: f64) -> Result<ReorderResult> {
    reorder_with_limit(g, k, None)
}

/// [`reorder`] with an optional cap on the number of iterations.
pub fn reorder_with_limit(
    g: &BipartiteGraph,
    k: f64,
    max_iterations: Option<usize>,
) -> Result<ReorderResult> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("hub ratio k = {k} outside (0, 1)")));
    }
    let (m, n) = (g.n_instances(), g.n_features());
    if m + n == 0 {
        return Err(Error::domain("cannot reorder an empty graph"));
    }

    let mut inst_new = vec![usize::MAX; m];
    let mut feat_new = vec![usize::MAX; n];
    let (mut row_lo, mut row_hi) = (0, m);
    let (mut col_lo, mut col_hi) = (0, n);
    let mut inst_alive = vec![true; m];
    let mut feat_alive = vec![true; n];
    let mut inst_seen = vec![0usize; m];
    let mut feat_seen = vec![0usize; n];

    let mut cur_inst: Vec<usize> = (0..m).collect();
    let mut cur_feat: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();
    let mut gcc_sizes = Vec::new();
    let mut iterations = 0;

    loop {
        iterations += 1;
        let m_hub = (k * cur_inst.len() as f64).ceil() as usize;
        let n_hub = (k * cur_feat.len() as f64).ceil() as usize;

        // Degrees inside the current giant component, ties by ascending id.
        let mut inst_rank: Vec<(usize, usize)> = cur_inst
            .iter()
            .map(|&i| (g.features_of(i).iter().filter(|&&j| feat_alive[j]).count(), i))
            .collect();
        let mut feat_rank: Vec<(usize, usize)> = cur_feat
            .iter()
            .map(|&j| (g.instances_of(j).iter().filter(|&&i| inst_alive[i]).count(), j))
            .collect();
        inst_rank.sort_unstable_by_key(|&(d, i)| (Reverse(d), i));
        feat_rank.sort_unstable_by_key(|&(d, j)| (Reverse(d), j));
        for &(_, i) in inst_rank.iter().take(m_hub) {
            row_hi -= 1;
            inst_new[i] = row_hi;
            inst_alive[i] = false;
        }
        for &(_, j) in feat_rank.iter().take(n_hub) {
            col_hi -= 1;
            feat_new[j] = col_hi;
            feat_alive[j] = false;
        }

        let mut comps = residual_components(
            g,
            &cur_inst,
            &cur_feat,
            &inst_alive,
            &feat_alive,
            &mut inst_seen,
            &mut feat_seen,
            iterations,
        );
        comps.sort_by_key(Component::order_key);
        let mut comps = comps.into_iter();
        let giant = comps.next().unwrap_or(Component {
            instances: Vec::new(),
            features: Vec::new(),
        });
        for comp in comps {
            let block = Block {
                row_start: row_lo,
                row_len: comp.instances.len(),
                col_start: col_lo,
                col_len: comp.features.len(),
            };
            for &i in &comp.instances {
                inst_new[i] = row_lo;
                inst_alive[i] = false;
                row_lo += 1;
            }
            for &j in &comp.features {
                feat_new[j] = col_lo;
                feat_alive[j] = false;
                col_lo += 1;
            }
            blocks.push(block);
        }

        gcc_sizes.push(giant.size());
        cur_inst = giant.instances;
        cur_feat = giant.features;

        let done = cur_inst.len() + cur_feat.len() == 0
            || cur_inst.len() < m_hub
            || cur_feat.len() < n_hub
            || max_iterations.is_some_and(|cap| iterations >= cap);
        if done {
            break;
        }
    }

    // Whatever is left of the giant component joins the hub region.
    let (m1, n1) = (row_lo, col_lo);
    for &i in &cur_inst {
        inst_new[i] = row_lo;
        row_lo += 1;
    }
    for &j in &cur_feat {
        feat_new[j] = col_lo;
        col_lo += 1;
    }
    debug_assert_eq!(row_lo, row_hi);
    debug_assert_eq!(col_lo, col_hi);

    let result = ReorderResult {
        pi_t: Permutation::from_forward(inst_new)?,
        pi_f: Permutation::from_forward(feat_new)?,
        m1,
        n1,
        m2: m - m1,
        n2: n - n1,
        blocks,
        iterations,
        gcc_sizes,
    };
    result.validate()?;
    Ok(result)
}

/// Breadth-first search over the alive nodes of the current giant component.
#[allow(clippy::too_many_arguments)]
fn residual_components(
    g: &BipartiteGraph,
    cur_inst: &[usize],
    cur_feat: &[usize],
    inst_alive: &[bool],
    feat_alive: &[bool],
    inst_seen: &mut [usize],
    feat_seen: &mut [usize],
    stamp: usize,
) -> Vec<Component> {
    #[derive(Clone, Copy)]
    enum Node {
        Inst(usize),
        Feat(usize),
    }
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    let seeds = cur_inst
        .iter()
        .map(|&i| Node::Inst(i))
        .chain(cur_feat.iter().map(|&j| Node::Feat(j)));
    for seed in seeds {
        match seed {
            Node::Inst(i) if !inst_alive[i] || inst_seen[i] == stamp => continue,
            Node::Feat(j) if !feat_alive[j] || feat_seen[j] == stamp => continue,
            Node::Inst(i) => inst_seen[i] = stamp,
            Node::Feat(j) => feat_seen[j] = stamp,
        }
        let mut comp = Component {
            instances: Vec::new(),
            features: Vec::new(),
        };
        queue.push_back(seed);
        while let Some(node) = queue.pop_front() {
            match node {
                Node::Inst(i) => {
                    comp.instances.push(i);
                    for &j in g.features_of(i) {
                        if feat_alive[j] && feat_seen[j] != stamp {
                            feat_seen[j] = stamp;
                            queue.push_back(Node::Feat(j));
                        }
                    }
                }
                Node::Feat(j) => {
                    comp.features.push(j);
                    for &i in g.instances_of(j) {
                        if inst_alive[i] && inst_seen[i] != stamp {
                            inst_seen[i] = stamp;
                            queue.push_back(Node::Inst(i));
                        }
                    }
                }
            }
        }
        comp.instances.sort_unstable();
        comp.features.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Moves entry `(i, j)` of `a` to `(pi_t.forward[i], pi_f.forward[j])`.
pub fn apply_permutation(
    a: &SparseMatrix,
    pi_t: &Permutation,
    pi_f: &Permutation,
) -> Result<SparseMatrix> {
    if pi_t.len() != a.n_rows() || pi_f.len() != a.n_cols() {
        return Err(Error::domain(format!(
            "permutation lengths ({}, {}) do not match a {}x{} matrix",
            pi_t.len(),
            pi_f.len(),
            a.n_rows(),
            a.n_cols()
        )));
    }
    let mut row_offsets = Vec::with_capacity(a.n_rows() + 1);
    let mut col_indices = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    row_offsets.push(0);
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for new_row in 0..a.n_rows() {
        let (cols, vals) = a.row(pi_t.backward()[new_row]);
        scratch.clear();
        scratch.extend(cols.iter().zip(vals).map(|(&j, &v)| (pi_f.forward()[j], v)));
        scratch.sort_unstable_by_key(|e| e.0);
        for &(j, v) in &scratch {
            col_indices.push(j);
            values.push(v);
        }
        row_offsets.push(values.len());
    }
    SparseMatrix::from_csr(a.n_rows(), a.n_cols(), row_offsets, col_indices, values)
}

/// Diagonal block of `A11` with its position in reordered coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct A11Block {
    pub row_start: usize,
    pub col_start: usize,
    pub matrix: SparseMatrix,
}

/// The 2x2 split of a reordered matrix.
#[derive(Clone, Debug)]
pub struct Partition {
    /// `A11` as its diagonal blocks only.
    pub a11_blocks: Vec<A11Block>,
    pub m1: usize,
    pub n1: usize,
    pub a12: SparseMatrix,
    pub a21: SparseMatrix,
    pub a22: SparseMatrix,
}

impl Partition {
    /// `[A12; A22]`, the column block appended by the column update.
    pub fn right_columns(&self) -> Result<SparseMatrix> {
        self.a12.vstack(&self.a22)
    }

    pub fn total_nnz(&self) -> usize {
        self.a11_blocks.iter().map(|b| b.matrix.nnz()).sum::<usize>()
            + self.a12.nnz()
            + self.a21.nnz()
            + self.a22.nnz()
    }
}

/// Splits a reordered matrix into its block-diagonal `A11` and the three hub blocks.
pub fn partition(a: &SparseMatrix, r: &ReorderResult) -> Result<Partition> {
    let (m, n) = (r.m1 + r.m2, r.n1 + r.n2);
    if a.shape() != (m, n) {
        return Err(Error::domain(format!(
            "matrix is {:?}, reordering expects {m}x{n}",
            a.shape()
        )));
    }
    let (m1, n1) = (r.m1, r.n1);
    let mut a11_blocks = Vec::with_capacity(r.blocks.len());
    for b in &r.blocks {
        for i in b.rows() {
            let (cols, _) = a.row(i);
            if let Some(&j) = cols
                .iter()
                .take_while(|&&j| j < n1)
                .find(|&&j| !b.cols().contains(&j))
            {
                return Err(Error::StructuralViolation(format!(
                    "A11 nonzero at ({i}, {j}) lies outside block rows {:?} cols {:?}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        a11_blocks.push(A11Block {
            row_start: b.row_start,
            col_start: b.col_start,
            matrix: a.submatrix(b.rows(), b.cols()),
        });
    }
    Ok(Partition {
        a11_blocks,
        m1,
        n1,
        a12: a.submatrix(0..m1, n1..n),
        a21: a.submatrix(m1..m, 0..n1),
        a22: a.submatrix(m1..m, n1..n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::to_bipartite;

    #[test]
    fn permutation_basics() {
        let p = Permutation::from_forward(vec![2, 0, 1]).unwrap();
        assert_eq!(p.backward(), &[1, 2, 0]);
        assert!(p.is_valid());
        assert!(Permutation::from_forward(vec![0, 0]).is_err());
        assert!(Permutation::from_forward(vec![0, 2]).is_err());
        assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn k_out_of_range() {
        let g = to_bipartite(&SparseMatrix::identity(3));
        for k in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(reorder(&g, k), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn identity_permutations_leave_matrix() {
        let a = SparseMatrix::from_triplets(3, 2, &[(0, 1, 1.0), (2, 0, 2.0)]).unwrap();
        let out = apply_permutation(&a, &Permutation::identity(3), &Permutation::identity(2))
            .unwrap();
        assert_eq!(out, a);
        let rev = apply_permutation(&a, &Permutation::reversal(3), &Permutation::reversal(2))
            .unwrap();
        assert_eq!(rev.get(2, 0), 1.0);
        let back =
            apply_permutation(&rev, &Permutation::reversal(3), &Permutation::reversal(2)).unwrap();
        assert_eq!(back, a);
        assert!(apply_permutation(&a, &Permutation::identity(2), &Permutation::identity(2))
            .is_err());
    }

    #[test]
    fn hubless_partition() {
        // Two disconnected 1x1 blocks plus an all-zero pair: no hubs survive.
        let a = SparseMatrix::identity(2);
        let r = ReorderResult {
            pi_t: Permutation::identity(2),
            pi_f: Permutation::identity(2),
            m1: 2,
            n1: 2,
            m2: 0,
            n2: 0,
            blocks: vec![
                Block { row_start: 0, row_len: 1, col_start: 0, col_len: 1 },
                Block { row_start: 1, row_len: 1, col_start: 1, col_len: 1 },
            ],
            iterations: 1,
            gcc_sizes: vec![0],
        };
        let p = partition(&a, &r).unwrap();
        assert_eq!(p.a12.shape(), (2, 0));
        assert_eq!(p.a21.shape(), (0, 2));
        assert_eq!(p.a22.shape(), (0, 0));
        assert_eq!(p.a11_blocks.len(), 2);
        assert_eq!(p.total_nnz(), 2);
    }

    #[test]
    fn structural_violation_detected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let r = ReorderResult {
            pi_t: Permutation::identity(2),
            pi_f: Permutation::identity(2),
            m1: 2,
            n1: 2,
            m2: 0,
            n2: 0,
            blocks: vec![
                Block { row_start: 0, row_len: 1, col_start: 0, col_len: 1 },
                Block { row_start: 1, row_len: 1, col_start: 1, col_len: 1 },
            ],
            iterations: 1,
            gcc_sizes: vec![],
        };
        assert!(matches!(partition(&a, &r), Err(Error::StructuralViolation(_))));
    }

    #[test]
    fn text_round_trip() {
        let a = SparseMatrix::from_triplets(
            4,
            3,
            &[(0, 0, 1.0), (1, 0, 1.0), (2, 1, 1.0), (3, 2, 1.0), (3, 1, 1.0)],
        )
        .unwrap();
        let r = reorder(&to_bipartite(&a), 0.3).unwrap();
        let mut buf = Vec::new();
        r.write_text(&mut buf).unwrap();
        let back = ReorderResult::read_text(buf.as_slice()).unwrap();
        assert_eq!(back.pi_t, r.pi_t);
        assert_eq!(back.blocks, r.blocks);
        assert_eq!((back.m1, back.n1, back.m2, back.n2), (r.m1, r.n1, r.m2, r.n2));
        assert!(ReorderResult::read_text("1 1 0 0 1 1\n0\n0\n0 2 0 1\n".as_bytes()).is_err());
    }
}
