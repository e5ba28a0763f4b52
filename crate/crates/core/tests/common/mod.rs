#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tqmine_core::{DataGraph, Kind, Tree, TreePattern};

pub const G7: &str = "0 1\n0 2\n0 3\n1 4\n2 4\n2 5\n3 6\n";

pub fn g7() -> DataGraph {
    DataGraph::parse(G7).unwrap()
}

pub fn tree(levels: &[u32]) -> Tree {
    Tree::from_levels(levels.to_vec()).unwrap()
}

pub fn pat(levels: &[u32], pi: &[usize], sigma: &[usize]) -> TreePattern {
    TreePattern::new(tree(levels), pi, sigma).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directed graph on `n` nodes, each ordered pair `u != v` an edge with
/// probability `p`. Nodes are named `v0..`; isolated nodes do not appear.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> DataGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                edges.push((names[u].as_str(), names[v].as_str()));
            }
        }
    }
    DataGraph::from_edges(edges)
}

/// `count` graphs with 2..=8 nodes and edge probability 0.3, each with at
/// least one edge.
pub fn graph_suite(seed: u64, count: usize) -> Vec<DataGraph> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.random_range(2..=8);
        let g = random_graph(&mut r, n, 0.3);
        if g.edge_count() > 0 {
            out.push(g);
        }
    }
    out
}

pub fn random_tree(rng: &mut impl Rng, n: usize) -> Tree {
    let mut parent = vec![None];
    for i in 1..n {
        parent.push(Some(rng.random_range(0..i)));
    }
    Tree::from_parent_array(&parent).unwrap().0
}

/// Random kinds with weights for distinguished, existential and parameter.
pub fn random_kinds(rng: &mut impl Rng, n: usize, w: [u32; 3]) -> Vec<Kind> {
    let total: u32 = w.iter().sum();
    (0..n)
        .map(|_| {
            let x = rng.random_range(0..total);
            if x < w[0] {
                Kind::Distinguished
            } else if x < w[0] + w[1] {
                Kind::Existential
            } else {
                Kind::Parameter
            }
        })
        .collect()
}

pub fn random_pattern(rng: &mut impl Rng, max_nodes: usize, w: [u32; 3]) -> TreePattern {
    let n = rng.random_range(1..=max_nodes);
    let t = random_tree(rng, n);
    let kinds = random_kinds(rng, n, w);
    TreePattern::from_kinds(t, kinds).unwrap()
}

/// A pattern that `p` specializes: some non-root subtrees removed and some
/// nodes made more general (parameter to distinguished or existential,
/// distinguished to existential). Always has a containment mapping into `p`.
pub fn generalize(rng: &mut impl Rng, p: &TreePattern) -> TreePattern {
    let mut q = p.clone();
    while q.len() > 1 && rng.random_bool(0.4) {
        let v = rng.random_range(1..q.len());
        q = q.without_subtree(v).0;
    }
    let kinds: Vec<Kind> = q
        .kinds()
        .iter()
        .map(|&k| match k {
            Kind::Parameter if rng.random_bool(0.5) => {
                if rng.random_bool(0.5) {
                    Kind::Distinguished
                } else {
                    Kind::Existential
                }
            }
            Kind::Distinguished if rng.random_bool(0.3) => Kind::Existential,
            k => k,
        })
        .collect();
    TreePattern::from_kinds(q.tree().clone(), kinds).unwrap()
}

/// Every (Π, Σ) labeling of `t`, Π before Σ in mask order.
pub fn labelings(t: &Tree) -> Vec<TreePattern> {
    let n = t.len();
    let mut out = Vec::new();
    for pi in 0u32..(1 << n) {
        for sigma in 0u32..(1 << n) {
            if pi & sigma == 0 {
                out.push(TreePattern::from_masks(t.clone(), pi, sigma));
            }
        }
    }
    out
}

/// Every labeled pattern over every tree with at most `max_nodes` nodes.
pub fn all_patterns(max_nodes: usize) -> Vec<TreePattern> {
    tqmine_core::enumerate_trees(max_nodes)
        .iter()
        .flat_map(labelings)
        .collect()
}
