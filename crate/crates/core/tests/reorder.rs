mod common;

use common::{random_sparse, rng};
use fastpi::reorder::{reorder_with_limit, Block};
use fastpi::{
    apply_permutation, partition, reorder, synth_generate, to_bipartite, Permutation,
    ReorderResult, SparseMatrix, SynthSpec,
};
use rand::seq::SliceRandom;

/// The shattering example: instance 0 and feature 0 are the hubs; removing
/// them leaves a giant component, the spoke `{feature 3; instances 4, 5, 6}`
/// and the pair `{instance 8, feature 6}`.
fn toy() -> SparseMatrix {
    let adj: [&[usize]; 9] = [
        &[0, 1, 2, 4, 5],
        &[0, 1, 2],
        &[0, 1],
        &[0, 2, 4],
        &[0, 3],
        &[3],
        &[3],
        &[0, 4, 5],
        &[0, 6],
    ];
    let trip: Vec<_> = adj
        .iter()
        .enumerate()
        .flat_map(|(i, fs)| fs.iter().map(move |&j| (i, j, 1.0)))
        .collect();
    SparseMatrix::from_triplets(9, 7, &trip).unwrap()
}

fn assert_a11_inside_blocks(a: &SparseMatrix, r: &ReorderResult) {
    r.validate().unwrap();
    let reordered = apply_permutation(a, &r.pi_t, &r.pi_f).unwrap();
    let owner = |i: usize| r.blocks.iter().find(|b| b.rows().contains(&i));
    for (i, j, _) in reordered.iter() {
        if i < r.m1 && j < r.n1 {
            let b = owner(i).expect("spoke row outside every block");
            assert!(b.cols().contains(&j), "A11 entry ({i}, {j}) outside its block");
        }
    }
    let parts = partition(&reordered, r).unwrap();
    assert_eq!(parts.total_nnz(), a.nnz());
}

fn assert_spans_tile(r: &ReorderResult) {
    let (mut row, mut col) = (0, 0);
    for b in &r.blocks {
        assert_eq!(b.row_start, row);
        assert_eq!(b.col_start, col);
        row += b.row_len;
        col += b.col_len;
    }
    assert_eq!((row, col), (r.m1, r.n1));
}

#[test]
fn toy_graph_edges() {
    let g = to_bipartite(&toy());
    assert_eq!(g.n_edges(), toy().nnz());
    assert_eq!((g.n_instances(), g.n_features()), (9, 7));
}

#[test]
fn toy_graph_one_iteration() {
    let a = toy();
    let r = reorder_with_limit(&to_bipartite(&a), 0.1, Some(1)).unwrap();
    assert_eq!(r.iterations, 1);
    // hubs take the highest ids: feature 7 and instance 9 counting from one
    assert_eq!(r.pi_f.forward()[0], 6);
    assert_eq!(r.pi_t.forward()[0], 8);
    // the spoke component gets the lowest ids and the first block
    assert_eq!(r.pi_f.forward()[3], 0);
    let mut spoke: Vec<usize> = [4, 5, 6].iter().map(|&i| r.pi_t.forward()[i]).collect();
    spoke.sort();
    assert_eq!(spoke, vec![0, 1, 2]);
    assert_eq!(r.blocks[0], Block { row_start: 0, row_len: 3, col_start: 0, col_len: 1 });
    assert_eq!(r.blocks[1], Block { row_start: 3, row_len: 1, col_start: 1, col_len: 1 });
    assert_eq!((r.m1, r.n1, r.m2, r.n2), (4, 2, 5, 5));
    assert_a11_inside_blocks(&a, &r);
}

#[test]
fn toy_graph_runs_to_termination() {
    let a = toy();
    let r = reorder(&to_bipartite(&a), 0.1).unwrap();
    assert!(r.iterations >= 1);
    assert_a11_inside_blocks(&a, &r);
    assert_spans_tile(&r);
}

#[test]
fn pre_shattered_graph() {
    // four disjoint complete 2x2 components
    let trip: Vec<_> = (0..4)
        .flat_map(|c| {
            (0..2).flat_map(move |i| (0..2).map(move |j| (2 * c + i, 2 * c + j, 1.0)))
        })
        .collect();
    let a = SparseMatrix::from_triplets(8, 8, &trip).unwrap();
    let r = reorder(&to_bipartite(&a), 0.3).unwrap();
    assert_eq!(r.iterations, 1);
    // three hubs per side break up the first two components; the largest
    // survivor is kept as the giant, the others become blocks
    assert_eq!(r.blocks.len(), 2);
    assert_eq!(r.blocks[0].row_len, 2);
    assert_eq!(r.blocks[0].col_len, 2);
    assert_eq!(r.blocks[1].row_len, 1);
    assert_eq!(r.blocks[1].col_len, 1);
    assert_eq!((r.m1, r.n1), (3, 3));
    assert_a11_inside_blocks(&a, &r);
}

#[test]
fn power_law_instance_invariants() {
    let a = synth_generate(&SynthSpec::new(500, 200, 0.02, 2.0, 17)).unwrap();
    let r = reorder(&to_bipartite(&a), 0.01).unwrap();
    assert_eq!(r.m1 + r.m2, 500);
    assert_eq!(r.n1 + r.n2, 200);
    assert!(r.pi_t.is_valid() && r.pi_f.is_valid());
    assert_spans_tile(&r);
    assert_a11_inside_blocks(&a, &r);
    assert!(r.gcc_sizes.windows(2).all(|w| w[1] < w[0]));
    assert!(r.m1 > 0 && !r.blocks.is_empty());
    // deterministic
    assert_eq!(r, reorder(&to_bipartite(&a), 0.01).unwrap());
}

#[test]
fn isolated_nodes_become_degenerate_blocks() {
    let a = SparseMatrix::from_triplets(4, 3, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]).unwrap();
    let r = reorder(&to_bipartite(&a), 0.2).unwrap();
    assert_spans_tile(&r);
    assert_a11_inside_blocks(&a, &r);
}

#[test]
fn random_permutation_matches_coordinate_oracle() {
    let a = random_sparse(100, 60, 0.1, 18);
    let mut r = rng(19);
    let mut ft: Vec<usize> = (0..100).collect();
    let mut ff: Vec<usize> = (0..60).collect();
    ft.shuffle(&mut r);
    ff.shuffle(&mut r);
    let (pt, pf) = (Permutation::from_forward(ft).unwrap(), Permutation::from_forward(ff).unwrap());
    let b = apply_permutation(&a, &pt, &pf).unwrap();
    assert_eq!(b.nnz(), a.nnz());
    for (i, j, v) in a.iter() {
        assert_eq!(b.get(pt.forward()[i], pf.forward()[j]), v);
    }
    let back = apply_permutation(&b, &pt.inverse(), &pf.inverse()).unwrap();
    assert_eq!(back, a);
    assert_eq!(b.sparsity().unwrap(), a.sparsity().unwrap());
}

#[test]
fn reversal_is_an_involution() {
    let a = random_sparse(30, 20, 0.2, 20);
    let (rt, rf) = (Permutation::reversal(30), Permutation::reversal(20));
    let twice = apply_permutation(&apply_permutation(&a, &rt, &rf).unwrap(), &rt, &rf).unwrap();
    assert_eq!(twice, a);
    assert!(apply_permutation(&a, &Permutation::identity(29), &rf).is_err());
}

#[test]
fn random_graph_histograms_count_nodes() {
    let a = random_sparse(200, 100, 0.05, 21);
    let g = to_bipartite(&a);
    let (inst, feat) = g.degree_histograms();
    assert_eq!(inst.total_nodes(), 200);
    assert_eq!(feat.total_nodes(), 100);
    assert_eq!(inst.total_degree(), a.nnz());
    assert_eq!(feat.total_degree(), a.nnz());
    for i in 0..200 {
        assert_eq!(g.instance_degree(i), a.row(i).0.len());
    }
}
