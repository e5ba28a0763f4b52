//! Rooted unordered trees as level sequences, and their enumeration.
//!
//! A tree with `n` nodes is stored as the depths of its nodes in preorder.
//! Node ids are preorder positions. The canonical representative of an
//! unordered tree is its lexicographically maximal level sequence, obtained
//! by ordering every node's children by their subtree sequences, largest
//! first.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Tree {
    levels: Vec<u32>,
    #[serde(skip)]
    parent: Vec<Option<usize>>,
    #[serde(skip)]
    children: Vec<Vec<usize>>,
    #[serde(skip)]
    end: Vec<usize>,
}

impl Tree {
    pub fn from_levels(levels: Vec<u32>) -> Result<Self> {
        validate(&levels)?;
        let n = levels.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut stack: Vec<usize> = Vec::new();
        for (i, &d) in levels.iter().enumerate() {
            stack.truncate(d as usize);
            if let Some(&p) = stack.last() {
                parent[i] = Some(p);
                children[p].push(i);
            }
            stack.push(i);
        }
        let mut end = vec![0; n];
        for i in (0..n).rev() {
            end[i] = children[i].last().map_or(i + 1, |&c| end[c]);
        }
        Ok(Tree {
            levels,
            parent,
            children,
            end,
        })
    }

    /// Builds a tree from a parent array. Children keep their relative id
    /// order; node ids are renumbered to preorder. Returns the tree and, for
    /// each input index, its new preorder id.
    pub fn from_parent_array(parent: &[Option<usize>]) -> Result<(Self, Vec<usize>)> {
        let n = parent.len();
        let mut kids = vec![Vec::new(); n];
        let mut root = None;
        for (i, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_none() => root = Some(i),
                None => return Err(Error::InvalidTree("more than one root".into())),
                Some(p) if p >= n => {
                    return Err(Error::InvalidTree(format!("parent {p} out of range")))
                }
                Some(p) => kids[p].push(i),
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".into()))?;
        let mut levels = Vec::with_capacity(n);
        let mut new_id = vec![usize::MAX; n];
        let mut stack = vec![(root, 0u32)];
        while let Some((v, d)) = stack.pop() {
            if new_id[v] != usize::MAX {
                return Err(Error::InvalidTree("cycle in parent array".into()));
            }
            new_id[v] = levels.len();
            levels.push(d);
            for &c in kids[v].iter().rev() {
                stack.push((c, d + 1));
            }
        }
        if levels.len() != n {
            return Err(Error::InvalidTree("parent array is not connected".into()));
        }
        Ok((Tree::from_levels(levels)?, new_id))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.levels[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Preorder ids of the subtree rooted at `v`, `v` included.
    pub fn subtree(&self, v: usize) -> std::ops::Range<usize> {
        v..self.end[v]
    }

    /// Maximum depth of any node.
    pub fn height(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Height of the subtree rooted at `v`, measured from `v`.
    pub fn subtree_height(&self, v: usize) -> u32 {
        self.subtree(v).map(|u| self.levels[u]).max().unwrap() - self.levels[v]
    }

    pub fn is_canonical(&self) -> bool {
        canonical_order(self, &vec![(); self.len()]) == (0..self.len()).collect::<Vec<_>>()
    }

    pub fn canonical(&self) -> Tree {
        let order = canonical_order(self, &vec![(); self.len()]);
        let levels = order.iter().map(|&v| self.levels[v]).collect();
        Tree::from_levels(levels).expect("reordering keeps a valid sequence")
    }

    /// Tree obtained by deleting the subtree rooted at `v` (not the root).
    /// Also returns, for every old id, its new id if it survived.
    pub fn without_subtree(&self, v: usize) -> (Tree, Vec<Option<usize>>) {
        assert!(v != 0, "cannot remove the root");
        let range = self.subtree(v);
        let mut map = vec![None; self.len()];
        let mut levels = Vec::with_capacity(self.len() - range.len());
        for (u, slot) in map.iter_mut().enumerate() {
            if !range.contains(&u) {
                *slot = Some(levels.len());
                levels.push(self.levels[u]);
            }
        }
        (Tree::from_levels(levels).expect("valid"), map)
    }
}

impl TryFrom<Vec<u32>> for Tree {
    type Error = Error;

    fn try_from(levels: Vec<u32>) -> Result<Self> {
        Tree::from_levels(levels)
    }
}

impl From<Tree> for Vec<u32> {
    fn from(t: Tree) -> Self {
        t.levels
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree[{self}]")
    }
}

impl std::str::FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidTree(format!("bad depth {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Tree::from_levels(levels)
    }
}

fn validate(levels: &[u32]) -> Result<()> {
    match levels.first() {
        None => return Err(Error::InvalidTree("empty sequence".into())),
        Some(&d) if d != 0 => return Err(Error::InvalidTree("first depth must be 0".into())),
        _ => {}
    }
    for (i, w) in levels.windows(2).enumerate() {
        if w[1] == 0 {
            return Err(Error::InvalidTree(format!(
                "second root at position {}",
                i + 1
            )));
        }
        if w[1] > w[0] + 1 {
            return Err(Error::InvalidTree(format!(
                "depth jumps from {} to {} at position {}",
                w[0],
                w[1],
                i + 1
            )));
        }
    }
    Ok(())
}

/// Whether `levels` is the maximal sequence of its unordered tree.
pub fn is_canonical(levels: &[u32]) -> Result<bool> {
    Ok(Tree::from_levels(levels.to_vec())?.is_canonical())
}

/// Preorder of `tree` that maximizes the unlabeled level sequence and,
/// among those, the sequence of `(depth, label)` pairs.
///
/// Children are sorted by their own maximal sequences in descending order,
/// shape first; a sequence that is a proper prefix of another sorts lower.
/// The unlabeled part is the canonical sequence of the tree, so a labeling
/// of a canonical tree is canonical exactly when it is maximal under the
/// tree's automorphisms. Returns the old ids in new preorder.
pub fn canonical_order<L: Ord>(tree: &Tree, labels: &[L]) -> Vec<usize> {
    assert_eq!(labels.len(), tree.len());
    let n = tree.len();
    // Per node: its subtree's canonical old-id order.
    let mut orders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).rev() {
        let mut kids: Vec<Vec<usize>> = tree
            .children(v)
            .iter()
            .map(|&c| std::mem::take(&mut orders[c]))
            .collect();
        kids.sort_by(|a, b| compare_seq(tree, labels, b, a));
        let mut order = Vec::with_capacity(tree.subtree(v).len());
        order.push(v);
        for k in kids {
            order.extend(k);
        }
        orders[v] = order;
    }
    std::mem::take(&mut orders[0])
}

fn compare_seq<L: Ord>(tree: &Tree, labels: &[L], a: &[usize], b: &[usize]) -> Ordering {
    let shape = a
        .iter()
        .map(|&x| tree.depth(x))
        .cmp(b.iter().map(|&y| tree.depth(y)));
    shape.then_with(|| {
        a.iter()
            .map(|&x| &labels[x])
            .cmp(b.iter().map(|&y| &labels[y]))
    })
}

/// Every unordered rooted tree with 1..=max_nodes nodes, once each, in
/// canonical form. Grouped by size ascending; within a size, sequences are
/// in descending lexicographic order.
pub fn enumerate_trees(max_nodes: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if max_nodes == 0 {
        return out;
    }
    let mut layer: Vec<Vec<u32>> = vec![vec![0]];
    for n in 1..=max_nodes {
        if n > 1 {
            // Appending a node to the end of a preorder sequence at any depth
            // up to one below the last node reaches every tree of size n.
            let mut next = BTreeSet::new();
            for seq in &layer {
                let last = *seq.last().unwrap();
                for d in 1..=last + 1 {
                    let mut s = seq.clone();
                    s.push(d);
                    let t = Tree::from_levels(s).expect("valid extension");
                    next.insert(t.canonical().levels);
                }
            }
            layer = next.into_iter().rev().collect();
        }
        out.extend(layer.iter().map(|s| Tree::from_levels(s.clone()).unwrap()));
    }
    out
}
