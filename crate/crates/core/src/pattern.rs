//! Parameterized tree patterns: a tree whose nodes are distinguished,
//! existential or parameter nodes.
//!
//! Node ids are preorder positions in the pattern's tree and are printed as
//! `x1`, `x2`, ... (one-based). Patterns over the same tree are fully
//! described by their existential set Π and parameter set Σ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{canonical_order, Tree};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Distinguished,
    Existential,
    Parameter,
}

impl Kind {
    /// Ordering used by canonical forms: d < e < p.
    pub fn rank(self) -> u8 {
        match self {
            Kind::Distinguished => 0,
            Kind::Existential => 1,
            Kind::Parameter => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Kind::Distinguished => 'd',
            Kind::Existential => 'e',
            Kind::Parameter => 'p',
        }
    }
}

pub fn node_name(id: usize) -> String {
    format!("x{}", id + 1)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreePattern {
    tree: Tree,
    kinds: Vec<Kind>,
}

/// Bijection between the nodes of two isomorphic patterns.
/// `map[i]` is the image of node `i` of the source pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternIso {
    pub map: Vec<usize>,
}

impl PatternIso {
    pub fn identity(n: usize) -> Self {
        PatternIso {
            map: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> PatternIso {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        PatternIso { map: inv }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }
}

impl TreePattern {
    pub fn new(tree: Tree, pi: &[usize], sigma: &[usize]) -> Result<Self> {
        let n = tree.len();
        let mut kinds = vec![Kind::Distinguished; n];
        for &v in pi {
            if v >= n {
                return Err(Error::InvalidPattern(format!(
                    "node {} out of range",
                    node_name(v)
                )));
            }
            kinds[v] = Kind::Existential;
        }
        for &v in sigma {
            if v >= n {
                return Err(Error::InvalidPattern(format!(
                    "node {} out of range",
                    node_name(v)
                )));
            }
            if kinds[v] == Kind::Existential {
                return Err(Error::InvalidPattern(format!(
                    "node {} is both existential and a parameter",
                    node_name(v)
                )));
            }
            kinds[v] = Kind::Parameter;
        }
        Ok(TreePattern { tree, kinds })
    }

    pub fn from_kinds(tree: Tree, kinds: Vec<Kind>) -> Result<Self> {
        if kinds.len() != tree.len() {
            return Err(Error::InvalidPattern(format!(
                "{} kinds for a tree of {} nodes",
                kinds.len(),
                tree.len()
            )));
        }
        Ok(TreePattern { tree, kinds })
    }

    /// Pattern from bit masks over node ids (bit i = node i).
    pub fn from_masks(tree: Tree, pi: u32, sigma: u32) -> Self {
        assert_eq!(pi & sigma, 0);
        let kinds = (0..tree.len())
            .map(|i| {
                if pi >> i & 1 == 1 {
                    Kind::Existential
                } else if sigma >> i & 1 == 1 {
                    Kind::Parameter
                } else {
                    Kind::Distinguished
                }
            })
            .collect();
        TreePattern { tree, kinds }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn kind(&self, v: usize) -> Kind {
        self.kinds[v]
    }

    pub fn kinds(&self) -> &[Kind] {
        &self.kinds
    }

    fn nodes_of(&self, k: Kind) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.kinds[v] == k).collect()
    }

    pub fn pi(&self) -> Vec<usize> {
        self.nodes_of(Kind::Existential)
    }

    pub fn sigma(&self) -> Vec<usize> {
        self.nodes_of(Kind::Parameter)
    }

    pub fn delta(&self) -> Vec<usize> {
        self.nodes_of(Kind::Distinguished)
    }

    fn mask_of(&self, k: Kind) -> u32 {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == k)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn pi_mask(&self) -> u32 {
        self.mask_of(Kind::Existential)
    }

    pub fn sigma_mask(&self) -> u32 {
        self.mask_of(Kind::Parameter)
    }

    /// |Π| + |Σ|, the pattern's level in the levelwise search.
    pub fn level(&self) -> usize {
        self.kinds
            .iter()
            .filter(|&&k| k != Kind::Distinguished)
            .count()
    }

    pub fn height(&self) -> u32 {
        self.tree.height()
    }

    fn with_kind(&self, v: usize, k: Kind) -> TreePattern {
        let mut p = self.clone();
        p.kinds[v] = k;
        p
    }

    fn ranks(&self) -> Vec<u8> {
        self.kinds.iter().map(|k| k.rank()).collect()
    }

    /// Key of the pattern in the order given by `order` (old ids).
    fn key_in_order(&self, order: &[usize]) -> String {
        let mut s = String::new();
        for &v in order {
            s.push_str(&self.tree.depth(v).to_string());
            s.push(self.kinds[v].letter());
        }
        s
    }

    /// The `(depth, kind)` sequence of the canonical ordering, rendered like
    /// `0p1e2p2d1d2p2d`: the tree's maximal level sequence, ties between
    /// orderings broken by the maximal kind sequence. Equal keys mean
    /// isomorphic patterns.
    pub fn refined_level_sequence(&self) -> String {
        self.key_in_order(&canonical_order(&self.tree, &self.ranks()))
    }

    /// Key of this pattern as currently ordered.
    pub fn ordered_sequence(&self) -> String {
        self.key_in_order(&(0..self.len()).collect::<Vec<_>>())
    }

    /// Canonical isomorphic copy plus the iso from the canonical copy back
    /// to `self`.
    pub fn canonize(&self) -> (TreePattern, PatternIso) {
        let order = canonical_order(&self.tree, &self.ranks());
        let levels = order.iter().map(|&v| self.tree.depth(v)).collect();
        let kinds = order.iter().map(|&v| self.kinds[v]).collect();
        let canonical = TreePattern {
            tree: Tree::from_levels(levels).expect("reordered sequence is valid"),
            kinds,
        };
        (canonical, PatternIso { map: order })
    }

    pub fn is_canonical(&self) -> bool {
        canonical_order(&self.tree, &self.ranks())
            .iter()
            .enumerate()
            .all(|(i, &v)| i == v)
    }

    /// Whether the subtree at `v` is a path of existential nodes.
    fn is_existential_chain(&self, v: usize) -> bool {
        self.tree
            .subtree(v)
            .all(|u| self.kinds[u] == Kind::Existential && self.tree.children(u).len() <= 1)
    }

    /// A non-root node whose subtree is an existential chain and whose
    /// parent has another child subtree at least as high. Removing that
    /// subtree yields an equivalent pattern.
    pub fn redundant_subtree(&self) -> Option<usize> {
        (1..self.len()).find(|&c| {
            if !self.is_existential_chain(c) {
                return false;
            }
            let h = self.tree.subtree_height(c);
            let p = self.tree.parent(c).unwrap();
            self.tree
                .children(p)
                .iter()
                .any(|&s| s != c && self.tree.subtree_height(s) >= h)
        })
    }

    pub fn has_redundancy(&self) -> bool {
        self.redundant_subtree().is_some()
    }

    /// Pattern with the subtree rooted at `v` removed, plus the old-to-new
    /// id map.
    pub fn without_subtree(&self, v: usize) -> (TreePattern, Vec<Option<usize>>) {
        let (tree, map) = self.tree.without_subtree(v);
        let mut kinds = vec![Kind::Distinguished; tree.len()];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = *new {
                kinds[new] = self.kinds[old];
            }
        }
        (TreePattern { tree, kinds }, map)
    }

    /// Removes redundant subtrees until none is left. The result is
    /// equivalent to `self`; the map sends each surviving old id to its new
    /// id. Distinguished and parameter nodes always survive.
    pub fn reduce(&self) -> (TreePattern, Vec<Option<usize>>) {
        let mut p = self.clone();
        let mut map: Vec<Option<usize>> = (0..self.len()).map(Some).collect();
        while let Some(c) = p.redundant_subtree() {
            let (next, step) = p.without_subtree(c);
            for m in map.iter_mut() {
                *m = m.and_then(|v| step[v]);
            }
            p = next;
        }
        (p, map)
    }

    /// One parent per existential and per parameter node, obtained by making
    /// that node distinguished. Existential removals come first, then
    /// parameter removals, each in id order.
    pub fn parents(&self) -> Vec<(TreePattern, usize)> {
        let mut out = Vec::new();
        for v in self.pi() {
            out.push((self.with_kind(v, Kind::Distinguished), v));
        }
        for v in self.sigma() {
            out.push((self.with_kind(v, Kind::Distinguished), v));
        }
        out
    }

    /// Π1 ⊇ Π2 and Σ1 ⊇ Σ2 over the same tree.
    pub fn specializes(&self, other: &TreePattern) -> Result<bool> {
        if self.tree != other.tree {
            return Err(Error::TreeMismatch);
        }
        let (p1, s1) = (self.pi_mask(), self.sigma_mask());
        let (p2, s2) = (other.pi_mask(), other.sigma_mask());
        Ok(p1 & p2 == p2 && s1 & s2 == s2)
    }

    /// `(Π,Σ)` notation, e.g. `({x1},{x2,x3})`.
    pub fn pi_sigma_string(&self) -> String {
        fn set(ids: &[usize]) -> String {
            if ids.is_empty() {
                "∅".to_string()
            } else {
                let names: Vec<String> = ids.iter().map(|&v| node_name(v)).collect();
                format!("{{{}}}", names.join(","))
            }
        }
        format!("({},{})", set(&self.pi()), set(&self.sigma()))
    }

    /// Body in query syntax, e.g. `(x1:d (x2:p) (x3:d))`.
    pub fn body_string(&self) -> String {
        let mut s = String::new();
        self.write_body(0, &mut s);
        s
    }

    fn write_body(&self, v: usize, s: &mut String) {
        s.push('(');
        s.push_str(&node_name(v));
        s.push(':');
        s.push(self.kinds[v].letter());
        for &c in self.tree.children(v) {
            s.push(' ');
            self.write_body(c, s);
        }
        s.push(')');
    }
}

impl fmt::Debug for TreePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreePattern[{} {}]", self.tree, self.pi_sigma_string())
    }
}

impl fmt::Display for TreePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.body_string())
    }
}

/// Enumerates the automorphisms of a pattern: tree automorphisms that keep
/// every node's kind. The identity comes first.
pub fn automorphisms(p: &TreePattern) -> Vec<Vec<usize>> {
    automorphisms_labeled(p.tree(), &p.ranks())
}

/// Automorphisms of a tree preserving the given node labels.
pub fn automorphisms_labeled<L: Ord + Clone>(tree: &Tree, labels: &[L]) -> Vec<Vec<usize>> {
    // Class id per node: equal ids iff labeled subtrees are isomorphic.
    let n = tree.len();
    let mut class = vec![0usize; n];
    let mut seen: std::collections::BTreeMap<(L, Vec<usize>), usize> = Default::default();
    for v in (0..n).rev() {
        let mut kids: Vec<usize> = tree.children(v).iter().map(|&c| class[c]).collect();
        kids.sort_unstable();
        let next = seen.len();
        class[v] = *seen.entry((labels[v].clone(), kids)).or_insert(next);
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    auto_rec(tree, &class, 0, &mut map, &mut out);
    out
}

fn auto_rec(
    tree: &Tree,
    class: &[usize],
    v: usize,
    map: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    // Nodes are assigned in preorder; `v` is the next node to process whose
    // image is already fixed. Its children are matched to the children of
    // its image with equal class, then we continue with the next node.
    if v == tree.len() {
        out.push(map.clone());
        return;
    }
    let target = map[v];
    let kids = tree.children(v);
    let images = tree.children(target);
    let mut used = vec![false; images.len()];
    assign_children(tree, class, v, kids, images, 0, &mut used, map, out);
}

#[allow(clippy::too_many_arguments)]
fn assign_children(
    tree: &Tree,
    class: &[usize],
    v: usize,
    kids: &[usize],
    images: &[usize],
    i: usize,
    used: &mut Vec<bool>,
    map: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == kids.len() {
        auto_rec(tree, class, v + 1, map, out);
        return;
    }
    for j in 0..images.len() {
        if !used[j] && class[images[j]] == class[kids[i]] {
            used[j] = true;
            map[kids[i]] = images[j];
            assign_children(tree, class, v, kids, images, i + 1, used, map, out);
            map[kids[i]] = usize::MAX;
            used[j] = false;
        }
    }
}

/// Where an entry of an original query head comes from after purification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadSource {
    /// Position in the pure head.
    Distinguished(usize),
    /// Value of this parameter node.
    Parameter(usize),
}

/// A tree query: a head listing distinguished or parameter nodes (with
/// repetitions), and a body pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeQuery {
    pub head: Vec<usize>,
    pub body: TreePattern,
}

impl TreeQuery {
    pub fn new(head: Vec<usize>, body: TreePattern) -> Result<Self> {
        for &h in &head {
            if h >= body.len() {
                return Err(Error::InvalidPattern(format!(
                    "head node {} out of range",
                    node_name(h)
                )));
            }
            if body.kind(h) == Kind::Existential {
                return Err(Error::InvalidPattern(format!(
                    "head names existential node {}",
                    node_name(h)
                )));
            }
        }
        for d in body.delta() {
            if !head.contains(&d) {
                return Err(Error::InvalidPattern(format!(
                    "distinguished node {} missing from head",
                    node_name(d)
                )));
            }
        }
        Ok(TreeQuery { head, body })
    }

    /// Distinguished nodes, each once, in canonical preorder position.
    pub fn pure_head(body: &TreePattern) -> Vec<usize> {
        let (_, iso) = body.canonize();
        iso.map
            .iter()
            .copied()
            .filter(|&v| body.kind(v) == Kind::Distinguished)
            .collect()
    }

    pub fn is_pure(&self) -> bool {
        self.head == TreeQuery::pure_head(&self.body)
    }

    /// Drops parameters and repeated entries from the head. The returned map
    /// rebuilds the original head from the pure head and parameter values.
    pub fn purify(&self) -> (TreeQuery, Vec<HeadSource>) {
        let head = TreeQuery::pure_head(&self.body);
        let map = self
            .head
            .iter()
            .map(|&h| match self.body.kind(h) {
                Kind::Parameter => HeadSource::Parameter(h),
                _ => HeadSource::Distinguished(head.iter().position(|&x| x == h).unwrap()),
            })
            .collect();
        (
            TreeQuery {
                head,
                body: self.body.clone(),
            },
            map,
        )
    }

    pub fn head_string(&self) -> String {
        let names: Vec<String> = self.head.iter().map(|&v| node_name(v)).collect();
        format!("({})", names.join(","))
    }
}

impl fmt::Display for TreeQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.head_string(), self.body)
    }
}
