//! Containment mappings between patterns and their equivalence.
//!
//! A containment mapping from `pl` to `p` is a tree homomorphism that sends
//! distinguished nodes to distinguished nodes or parameters, parameters to
//! parameters, and existential nodes anywhere. Its restriction to the
//! parameters of `pl` is the parameter correspondence ρ.

use std::fmt::Write as _;

use crate::pattern::{automorphisms, Kind, TreePattern};
use crate::tree::canonical_order;

/// `map[x]` is the image in `p` of node `x` of `pl`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContainmentMapping {
    pub map: Vec<usize>,
}

impl ContainmentMapping {
    /// Pairs `(σ_left, ρ(σ_left))` in node order of `pl`.
    pub fn rho(&self, pl: &TreePattern) -> Vec<(usize, usize)> {
        pl.sigma().into_iter().map(|s| (s, self.map[s])).collect()
    }

    pub fn compose(&self, after: &ContainmentMapping) -> ContainmentMapping {
        ContainmentMapping {
            map: self.map.iter().map(|&y| after.map[y]).collect(),
        }
    }
}

/// Whether a node of kind `from` may map to a node of kind `to`.
pub fn legal(from: Kind, to: Kind) -> bool {
    match from {
        Kind::Existential => true,
        Kind::Distinguished => to != Kind::Existential,
        Kind::Parameter => to == Kind::Parameter,
    }
}

/// `get(x1, x2)`: some containment mapping of the subtree at `x1` sends
/// `x1` to `x2`. Only pairs reachable from a root pairing are computed;
/// the others read as false.
#[derive(Clone, Debug)]
pub struct MatchMatrix {
    cols: usize,
    cells: Vec<Option<bool>>,
}

impl MatchMatrix {
    pub fn get(&self, x1: usize, x2: usize) -> bool {
        self.cells[x1 * self.cols + x2] == Some(true)
    }

    pub fn computed(&self, x1: usize, x2: usize) -> bool {
        self.cells[x1 * self.cols + x2].is_some()
    }
}

/// Fills the match matrix for every root target, computing each pair at
/// most once.
pub fn fill_map(pl: &TreePattern, p: &TreePattern) -> MatchMatrix {
    let mut m = MatchMatrix {
        cols: p.len(),
        cells: vec![None; pl.len() * p.len()],
    };
    for y in 0..p.len() {
        fill_in(pl, p, 0, y, &mut m);
    }
    m
}

fn fill_in(pl: &TreePattern, p: &TreePattern, x1: usize, x2: usize, m: &mut MatchMatrix) -> bool {
    let idx = x1 * m.cols + x2;
    if let Some(b) = m.cells[idx] {
        return b;
    }
    let mut ok = legal(pl.kind(x1), p.kind(x2));
    if ok {
        for &c1 in pl.tree().children(x1) {
            let mut any = false;
            for &c2 in p.tree().children(x2) {
                // No short circuit: enumeration later reads every child pair
                // below a matching pair.
                any |= fill_in(pl, p, c1, c2, m);
            }
            if !any {
                ok = false;
            }
        }
    }
    m.cells[idx] = Some(ok);
    ok
}

/// Every containment mapping from `pl` to `p`, each once. Nodes of `pl` are
/// assigned in preorder; the root tries targets in preorder of `p`, every
/// other node tries the matching children of its parent's image from left
/// to right, and the last node varies fastest.
pub fn enumerate_containment_mappings(
    pl: &TreePattern,
    p: &TreePattern,
) -> Vec<ContainmentMapping> {
    let m = fill_map(pl, p);
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; pl.len()];
    for y in 0..p.len() {
        if m.get(0, y) {
            map[0] = y;
            step(pl, p, &m, 1, &mut map, &mut out);
        }
    }
    out
}

fn step(
    pl: &TreePattern,
    p: &TreePattern,
    m: &MatchMatrix,
    x: usize,
    map: &mut Vec<usize>,
    out: &mut Vec<ContainmentMapping>,
) {
    if x == pl.len() {
        out.push(ContainmentMapping { map: map.clone() });
        return;
    }
    let parent_image = map[pl.tree().parent(x).unwrap()];
    for &y in p.tree().children(parent_image) {
        if m.get(x, y) {
            map[x] = y;
            step(pl, p, m, x + 1, map, out);
        }
    }
    map[x] = usize::MAX;
}

/// Every distinguished node of `p` is the image of a distinguished node of
/// `pl`, so the mapped head is a pure head of `p`.
pub fn admissible(f: &ContainmentMapping, pl: &TreePattern, p: &TreePattern) -> bool {
    let covered: Vec<usize> = pl.delta().iter().map(|&x| f.map[x]).collect();
    p.delta().iter().all(|d| covered.contains(d))
}

/// Canonical string of `p`'s tree with every node labeled by its kind and
/// the sorted set of `pl` nodes mapped onto it. Equal signatures mean the
/// mappings differ by an automorphism of `p`.
pub fn labeled_signature(p: &TreePattern, f: &ContainmentMapping) -> String {
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); p.len()];
    for (x, &y) in f.map.iter().enumerate() {
        pre[y].push(x);
    }
    let labels: Vec<(u8, &Vec<usize>)> =
        (0..p.len()).map(|y| (p.kind(y).rank(), &pre[y])).collect();
    let order = canonical_order(p.tree(), &labels);
    let mut s = String::new();
    for y in order {
        let _ = write!(s, "{}{}", p.tree().depth(y), p.kind(y).letter());
        s.push('{');
        for (i, x) in pre[y].iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{x}");
        }
        s.push('}');
    }
    s
}

/// `f` precomposed with each automorphism of `pl`.
pub fn orbit_signatures(
    pl_autos: &[Vec<usize>],
    p: &TreePattern,
    f: &ContainmentMapping,
) -> Vec<String> {
    pl_autos
        .iter()
        .map(|g| {
            let fg = ContainmentMapping {
                map: g.iter().map(|&x| f.map[x]).collect(),
            };
            labeled_signature(p, &fg)
        })
        .collect()
}

/// Some automorphism `g` of `pl` and `h` of `p` satisfy `f2 ∘ g = h ∘ f1`.
pub fn equivalent_mappings(
    pl: &TreePattern,
    p: &TreePattern,
    f1: &ContainmentMapping,
    f2: &ContainmentMapping,
) -> bool {
    let target = labeled_signature(p, f1);
    orbit_signatures(&automorphisms(pl), p, f2).contains(&target)
}
