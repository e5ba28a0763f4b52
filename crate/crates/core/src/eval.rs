//! Pattern evaluation over the data graph.
//!
//! The answer relation of a pattern has one column per distinguished or
//! parameter node and one row per distinct restriction of a matching to
//! those nodes. It is built bottom-up: for every pattern node `u` and graph
//! node `v`, the set of partial rows for the subtree of `u` when `u` is
//! mapped to `v`. Existential nodes are projected away as soon as their
//! subtree is complete, which is the only place duplicates can arise.

use std::collections::BTreeMap;

use crate::graph::{DataGraph, NodeId};
use crate::pattern::{Kind, TreePattern};
use crate::relation::{FrequencyTable, Relation, Tuple};

/// Allowed images per pattern node; nodes without an entry are free.
pub type Domains = BTreeMap<usize, Vec<NodeId>>;

/// All distinct restrictions of matchings of `p` to Δ ∪ Σ. Columns are the
/// non-existential nodes in id order.
pub fn evaluate_pattern(g: &DataGraph, p: &TreePattern) -> Relation {
    evaluate_restricted(g, p, &Domains::new())
}

/// Like [`evaluate_pattern`] with node images limited by `domains`.
pub fn evaluate_restricted(g: &DataGraph, p: &TreePattern, domains: &Domains) -> Relation {
    let columns: Vec<usize> = (0..p.len())
        .filter(|&u| p.kind(u) != Kind::Existential)
        .collect();
    let nv = g.node_count();
    if nv == 0 {
        return Relation::new(columns, Vec::new());
    }
    let allowed: Vec<Option<Vec<bool>>> = (0..p.len())
        .map(|u| {
            domains.get(&u).map(|vals| {
                let mut mask = vec![false; nv];
                for v in vals {
                    if g.contains(*v) {
                        mask[v.index()] = true;
                    }
                }
                mask
            })
        })
        .collect();
    let ok = |u: usize, v: NodeId| allowed[u].as_ref().is_none_or(|m| m[v.index()]);

    let tree = p.tree();
    // partial[u][v]: rows over the kept nodes strictly below u, u ↦ v.
    let mut partial: Vec<Option<Vec<Vec<Tuple>>>> = vec![None; p.len()];
    for u in (0..p.len()).rev() {
        let mut table: Vec<Vec<Tuple>> = vec![Vec::new(); nv];
        for v in g.nodes() {
            if !ok(u, v) {
                continue;
            }
            let mut acc: Vec<Tuple> = vec![Vec::new()];
            for &c in tree.children(u) {
                let sub = partial[c].as_ref().expect("children are processed first");
                let kept = p.kind(c) != Kind::Existential;
                let mut ext: Vec<Tuple> = Vec::new();
                for &w in g.succ(v) {
                    for row in &sub[w.index()] {
                        let mut t = Vec::with_capacity(row.len() + 1);
                        if kept {
                            t.push(w);
                        }
                        t.extend_from_slice(row);
                        ext.push(t);
                    }
                }
                if !kept {
                    ext.sort_unstable();
                    ext.dedup();
                }
                if ext.is_empty() {
                    acc.clear();
                    break;
                }
                let mut next = Vec::with_capacity(acc.len() * ext.len());
                for a in &acc {
                    for e in &ext {
                        let mut t = a.clone();
                        t.extend_from_slice(e);
                        next.push(t);
                    }
                }
                acc = next;
            }
            table[v.index()] = acc;
        }
        for &c in tree.children(u) {
            partial[c] = None;
        }
        partial[u] = Some(table);
    }

    let root = partial[0].take().unwrap();
    let kept = p.kind(0) != Kind::Existential;
    let mut rows = Vec::new();
    for (v, sub) in root.into_iter().enumerate() {
        for row in sub {
            if kept {
                let mut t = Vec::with_capacity(row.len() + 1);
                t.push(NodeId(v as u32));
                t.extend(row);
                rows.push(t);
            } else {
                rows.push(row);
            }
        }
    }
    Relation::new(columns, rows)
}

/// Counts, per parameter assignment, the distinct distinguished projections
/// of the matchings. With `candidates`, only assignments in that relation
/// (over exactly the parameter columns) are counted. Counts below `minsup`
/// are dropped.
pub fn frequency_table(
    g: &DataGraph,
    p: &TreePattern,
    candidates: Option<&Relation>,
    minsup: u64,
) -> FrequencyTable {
    let sigma = p.sigma();
    let mut table = FrequencyTable::new(sigma.clone());
    let candidates = candidates.map(|c| c.reorder(&sigma));
    let mut domains = Domains::new();
    if let Some(c) = &candidates {
        if c.is_empty() {
            return table;
        }
        for (i, &s) in sigma.iter().enumerate() {
            let mut vals: Vec<NodeId> = c.rows().iter().map(|r| r[i]).collect();
            vals.sort_unstable();
            vals.dedup();
            domains.insert(s, vals);
        }
    }
    let answers = evaluate_restricted(g, p, &domains);
    let idx: Vec<usize> = sigma
        .iter()
        .map(|&s| answers.column_index(s).unwrap())
        .collect();
    let mut counts: BTreeMap<Tuple, u64> = BTreeMap::new();
    for row in answers.rows() {
        let alpha: Tuple = idx.iter().map(|&i| row[i]).collect();
        *counts.entry(alpha).or_insert(0) += 1;
    }
    table.entries = counts
        .into_iter()
        .filter(|(alpha, n)| *n >= minsup && candidates.as_ref().is_none_or(|c| c.contains(alpha)))
        .collect();
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Tree;

    const G7: &str = "0 1\n0 2\n0 3\n1 4\n2 4\n2 5\n3 6\n";

    fn g7() -> DataGraph {
        DataGraph::parse(G7).unwrap()
    }

    fn pat(levels: &[u32], pi: &[usize], sigma: &[usize]) -> TreePattern {
        TreePattern::new(Tree::from_levels(levels.to_vec()).unwrap(), pi, sigma).unwrap()
    }

    fn named(g: &DataGraph, t: &FrequencyTable) -> Vec<(Vec<String>, u64)> {
        t.entries
            .iter()
            .map(|(k, &c)| (k.iter().map(|&v| g.name(v).to_string()).collect(), c))
            .collect()
    }

    fn row(names: &[&str], c: u64) -> (Vec<String>, u64) {
        (names.iter().map(|s| s.to_string()).collect(), c)
    }

    #[test]
    fn evaluation_row_counts() {
        let g = g7();
        assert_eq!(evaluate_pattern(&g, &pat(&[0, 1, 1], &[], &[])).len(), 15);
        assert_eq!(evaluate_pattern(&g, &pat(&[0, 1, 1], &[1], &[])).len(), 7);
        assert_eq!(evaluate_pattern(&g, &pat(&[0, 1, 1], &[0], &[])).len(), 14);
        assert_eq!(evaluate_pattern(&g, &pat(&[0], &[], &[])).len(), 7);
        let empty = DataGraph::default();
        assert!(evaluate_pattern(&empty, &pat(&[0, 1], &[], &[])).is_empty());
    }

    #[test]
    fn tables_without_candidates() {
        let g = g7();
        let t = frequency_table(&g, &pat(&[0, 1, 1], &[], &[0]), None, 3);
        assert_eq!(named(&g, &t), vec![row(&["0"], 9), row(&["2"], 4)]);
        let t = frequency_table(&g, &pat(&[0, 1, 1], &[], &[1]), None, 3);
        assert_eq!(
            named(&g, &t),
            vec![
                row(&["1"], 3),
                row(&["2"], 3),
                row(&["3"], 3),
                row(&["4"], 3)
            ]
        );
        let t = frequency_table(&g, &pat(&[0, 1, 1], &[0], &[1]), None, 3);
        assert_eq!(
            named(&g, &t),
            vec![row(&["1"], 3), row(&["2"], 3), row(&["3"], 3)]
        );
        assert!(frequency_table(&g, &pat(&[0, 1, 1], &[], &[1, 2]), None, 3).is_empty());
        let t = frequency_table(&g, &pat(&[0, 1, 1], &[], &[]), None, 3);
        assert_eq!(t.entries.get(&vec![]), Some(&15));
        assert!(frequency_table(&g, &pat(&[0, 1, 1], &[], &[]), None, 16).is_empty());
    }

    #[test]
    fn candidates_restrict_counting() {
        let g = g7();
        let p = pat(&[0, 1, 1], &[], &[0]);
        let only_two = Relation::new(vec![0], vec![vec![g.node_id("2").unwrap()]]);
        let t = frequency_table(&g, &p, Some(&only_two), 3);
        assert_eq!(named(&g, &t), vec![row(&["2"], 4)]);
        let none = Relation::new(vec![0], vec![]);
        assert!(frequency_table(&g, &p, Some(&none), 1).is_empty());
    }

    #[test]
    fn existential_root_projects_away() {
        let g = g7();
        // ∃(x2): every node with a predecessor.
        let r = evaluate_pattern(&g, &pat(&[0, 1], &[0], &[]));
        assert_eq!(r.columns(), &[1]);
        assert_eq!(r.len(), 6);
    }
}
