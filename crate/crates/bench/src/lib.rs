//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tqmine_core::{mine_patterns, DataGraph, MineOptions, PatternStore, Tree};

pub const G7: &str = "0 1\n0 2\n0 3\n1 4\n2 4\n2 5\n3 6\n";

pub fn g7() -> DataGraph {
    DataGraph::parse(G7).unwrap()
}

/// Erdős–Rényi digraph: every ordered pair `u != v` is an edge with
/// probability `p`.
pub fn er_graph(n: usize, p: f64, seed: u64) -> DataGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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

/// G7 mined on the two star shapes used for rule generation.
pub fn rules_store() -> (DataGraph, PatternStore) {
    let g = g7();
    let mut opts = MineOptions::new(3, 4);
    opts.trees = Some(vec![
        Tree::from_levels(vec![0, 1, 1]).unwrap(),
        Tree::from_levels(vec![0, 1, 1, 1]).unwrap(),
    ]);
    let store = mine_patterns(&g, &opts).unwrap().0;
    (g, store)
}
