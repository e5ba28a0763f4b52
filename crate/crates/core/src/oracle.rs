//! Brute-force reference implementations.
//!
//! Everything here enumerates all node maps and filters them by the
//! definitions. Nothing is shared with the engine beyond the data types, so
//! the two can be checked against each other. Cost is exponential; use on
//! tiny inputs only.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::graph::{DataGraph, NodeId};
use crate::pattern::{Kind, TreePattern, TreeQuery};

/// Calls `visit` with every map from `0..k` into `0..n`.
fn for_each_map(k: usize, n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        if k == 0 {
            visit(&[]);
        }
        return;
    }
    let mut m = vec![0usize; k];
    loop {
        visit(&m);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            m[i] += 1;
            if m[i] < n {
                break;
            }
            m[i] = 0;
        }
    }
}

fn is_matching(g: &DataGraph, p: &TreePattern, m: &[usize]) -> bool {
    (1..p.len()).all(|v| {
        let u = p.tree().parent(v).unwrap();
        g.has_edge(NodeId(m[u] as u32), NodeId(m[v] as u32))
    })
}

fn nodes_of(p: &TreePattern, k: Kind) -> Vec<usize> {
    (0..p.len()).filter(|&v| p.kind(v) == k).collect()
}

/// Number of distinct distinguished projections of the matchings of `p`
/// that agree with `alpha` on every parameter.
pub fn brute_force_frequency(
    g: &DataGraph,
    p: &TreePattern,
    alpha: &BTreeMap<usize, NodeId>,
) -> u64 {
    let delta = nodes_of(p, Kind::Distinguished);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for_each_map(p.len(), g.node_count(), |m| {
        if alpha.iter().all(|(&s, v)| m[s] == v.index()) && is_matching(g, p, m) {
            seen.insert(delta.iter().map(|&d| m[d]).collect());
        }
    });
    seen.len() as u64
}

/// Frequency of every parameter assignment with at least one matching.
/// Keys list parameter values in node order.
pub fn brute_force_table(g: &DataGraph, p: &TreePattern) -> BTreeMap<Vec<NodeId>, u64> {
    let delta = nodes_of(p, Kind::Distinguished);
    let sigma = nodes_of(p, Kind::Parameter);
    let mut groups: BTreeMap<Vec<NodeId>, HashSet<Vec<usize>>> = BTreeMap::new();
    for_each_map(p.len(), g.node_count(), |m| {
        if is_matching(g, p, m) {
            let alpha = sigma.iter().map(|&s| NodeId(m[s] as u32)).collect();
            groups
                .entry(alpha)
                .or_default()
                .insert(delta.iter().map(|&d| m[d]).collect());
        }
    });
    groups
        .into_iter()
        .map(|(k, v)| (k, v.len() as u64))
        .collect()
}

/// Answer set of query `q` under `alpha`: the head tuples of all matchings
/// agreeing with `alpha`.
pub fn brute_force_answers(
    g: &DataGraph,
    q: &TreeQuery,
    alpha: &BTreeMap<usize, NodeId>,
) -> BTreeSet<Vec<NodeId>> {
    let mut out = BTreeSet::new();
    for_each_map(q.body.len(), g.node_count(), |m| {
        if alpha.iter().all(|(&s, v)| m[s] == v.index()) && is_matching(g, &q.body, m) {
            out.insert(q.head.iter().map(|&h| NodeId(m[h] as u32)).collect());
        }
    });
    out
}

fn kind_ok(from: Kind, to: Kind) -> bool {
    match from {
        Kind::Existential => true,
        Kind::Distinguished => matches!(to, Kind::Distinguished | Kind::Parameter),
        Kind::Parameter => to == Kind::Parameter,
    }
}

fn is_containment(pl: &TreePattern, p: &TreePattern, m: &[usize]) -> bool {
    (0..pl.len()).all(|x| kind_ok(pl.kind(x), p.kind(m[x])))
        && (1..pl.len()).all(|x| {
            let px = pl.tree().parent(x).unwrap();
            p.tree().parent(m[x]) == Some(m[px])
        })
}

/// All kind-legal tree homomorphisms from `pl` into `p`.
pub fn brute_force_containment_mappings(pl: &TreePattern, p: &TreePattern) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for_each_map(pl.len(), p.len(), |m| {
        if is_containment(pl, p, m) {
            out.insert(m.to_vec());
        }
    });
    out
}

/// All permutations of `0..n` keeping parent links and kinds of `p`.
pub fn brute_force_automorphisms(p: &TreePattern) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_map(p.len(), p.len(), |m| {
        let mut hit = vec![false; p.len()];
        for &y in m {
            if hit[y] {
                return;
            }
            hit[y] = true;
        }
        let ok = (0..p.len()).all(|x| p.kind(x) == p.kind(m[x]))
            && (0..p.len()).all(|x| p.tree().parent(x).map(|u| m[u]) == p.tree().parent(m[x]));
        if ok {
            out.push(m.to_vec());
        }
    });
    out
}

/// Whether some kind-preserving bijection maps `p1`'s tree onto `p2`'s.
pub fn brute_force_isomorphic(p1: &TreePattern, p2: &TreePattern) -> bool {
    if p1.len() != p2.len() {
        return false;
    }
    let mut found = false;
    for_each_map(p1.len(), p2.len(), |m| {
        if found {
            return;
        }
        let mut hit = vec![false; p2.len()];
        for &y in m {
            if hit[y] {
                return;
            }
            hit[y] = true;
        }
        found = (0..p1.len()).all(|x| p1.kind(x) == p2.kind(m[x]))
            && (0..p1.len()).all(|x| p1.tree().parent(x).map(|u| m[u]) == p2.tree().parent(m[x]));
    });
    found
}

/// Containment mappings from `a` to `b` that are bijective from Δa onto Δb
/// and from Σa onto Σb.
fn bijective_containments(a: &TreePattern, b: &TreePattern) -> Vec<Vec<usize>> {
    let da = nodes_of(a, Kind::Distinguished);
    let sa = nodes_of(a, Kind::Parameter);
    let db: BTreeSet<usize> = nodes_of(b, Kind::Distinguished).into_iter().collect();
    let sb: BTreeSet<usize> = nodes_of(b, Kind::Parameter).into_iter().collect();
    if da.len() != db.len() || sa.len() != sb.len() {
        return Vec::new();
    }
    brute_force_containment_mappings(a, b)
        .into_iter()
        .filter(|m| {
            let img_d: BTreeSet<usize> = da.iter().map(|&x| m[x]).collect();
            let img_s: BTreeSet<usize> = sa.iter().map(|&x| m[x]).collect();
            img_d == db && img_s == sb
        })
        .collect()
}

/// Equivalence of two patterns: a containment mapping each way whose
/// restrictions to Δ and Σ are mutually inverse bijections.
pub fn brute_force_equivalent(p1: &TreePattern, p2: &TreePattern) -> bool {
    let forward = bijective_containments(p1, p2);
    if forward.is_empty() {
        return false;
    }
    let backward = bijective_containments(p2, p1);
    let keep: Vec<usize> = (0..p1.len())
        .filter(|&x| p1.kind(x) != Kind::Existential)
        .collect();
    forward
        .iter()
        .any(|f| backward.iter().any(|h| keep.iter().all(|&x| h[f[x]] == x)))
}

/// Some automorphisms `g` of `pl` and `h` of `p` satisfy `f2 ∘ g = h ∘ f1`.
pub fn brute_force_equivalent_mappings(
    pl: &TreePattern,
    p: &TreePattern,
    f1: &[usize],
    f2: &[usize],
) -> bool {
    let gs = brute_force_automorphisms(pl);
    let hs = brute_force_automorphisms(p);
    gs.iter().any(|g| {
        hs.iter()
            .any(|h| (0..pl.len()).all(|x| f2[g[x]] == h[f1[x]]))
    })
}

/// One parent array per isomorphism class of rooted trees with `n` nodes,
/// found by comparing every parent array (parent[i] < i) against the class
/// representatives with all bijections.
pub fn brute_force_tree_classes(n: usize) -> Vec<Vec<Option<usize>>> {
    fn iso(a: &[Option<usize>], b: &[Option<usize>]) -> bool {
        let n = a.len();
        let mut found = false;
        for_each_map(n, n, |m| {
            if found {
                return;
            }
            let mut hit = vec![false; n];
            for &y in m {
                if hit[y] {
                    return;
                }
                hit[y] = true;
            }
            found = (0..n).all(|x| a[x].map(|u| m[u]) == b[m[x]]);
        });
        found
    }
    let mut reps: Vec<Vec<Option<usize>>> = Vec::new();
    if n == 0 {
        return reps;
    }
    for_each_map(n - 1, n, |choice| {
        if choice.iter().enumerate().any(|(i, &c)| c > i) {
            return;
        }
        let mut arr = vec![None];
        arr.extend(choice.iter().map(|&c| Some(c)));
        if !reps.iter().any(|r| iso(r, &arr)) {
            reps.push(arr);
        }
    });
    reps
}
