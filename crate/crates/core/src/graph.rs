//! The immutable directed data graph being mined.
//!
//! Node constants are arbitrary non-whitespace strings. They are interned to
//! dense [`NodeId`]s in first-appearance order; everything inside the engine
//! works on ids and only I/O touches the original strings.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index into the constant dictionary of a [`DataGraph`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DataGraph {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    out: Vec<Vec<NodeId>>,
    inc: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DataGraph {
    /// Parses an edge-list document: one `SRC DST` pair per line, `#` comments
    /// and blank lines ignored. Duplicate edges collapse, self-loops are kept.
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = GraphBuilder::default();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::GraphParse {
                    line: lineno + 1,
                    message: format!("expected 2 tokens, found {}", tokens.len()),
                });
            }
            builder.add_edge(tokens[0], tokens[1]);
        }
        Ok(builder.build())
    }

    /// Reads and parses an edge-list file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_edges<'a, I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut builder = GraphBuilder::default();
        for (s, d) in edges {
            builder.add_edge(s, d);
        }
        builder.build()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.names.len()
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.index()]
    }

    /// Sorted distinct successors of `v`.
    pub fn out_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.out
            .get(v.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(v.0))
    }

    /// Sorted distinct predecessors of `v`.
    pub fn in_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.inc
            .get(v.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(v.0))
    }

    /// Unchecked successor access for the evaluation hot loops.
    pub(crate) fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.out[v.index()]
    }

    pub fn has_edge(&self, s: NodeId, d: NodeId) -> bool {
        self.out
            .get(s.index())
            .is_some_and(|succ| succ.binary_search(&d).is_ok())
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, succ)| succ.iter().map(move |&d| (NodeId(s as u32), d)))
    }

    /// Edge-list text with edges in id order. Nodes without edges cannot be
    /// expressed in the format and are dropped.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (s, d) in self.edges() {
            out.push_str(self.name(s));
            out.push(' ');
            out.push_str(self.name(d));
            out.push('\n');
        }
        out
    }

    /// 64-bit FNV-1a over the edge list rendered as `SRC\tDST\n` lines,
    /// sorted by constant strings. Independent of interning order.
    pub fn fingerprint(&self) -> u64 {
        let mut lines: Vec<(&str, &str)> = self
            .edges()
            .map(|(s, d)| (self.name(s), self.name(d)))
            .collect();
        lines.sort_unstable();
        let mut hasher = FnvHasher::default();
        for (s, d) in lines {
            hasher.write(s.as_bytes());
            hasher.write(b"\t");
            hasher.write(d.as_bytes());
            hasher.write(b"\n");
        }
        hasher.finish()
    }
}

#[derive(Default)]
struct GraphBuilder {
    names: Vec<String>,
    lookup: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = NodeId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        id
    }

    fn add_edge(&mut self, s: &str, d: &str) {
        let s = self.intern(s);
        let d = self.intern(d);
        self.edges.push((s, d));
    }

    fn build(mut self) -> DataGraph {
        self.edges.sort_unstable();
        self.edges.dedup();
        let n = self.names.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for &(s, d) in &self.edges {
            out[s.index()].push(d);
            inc[d.index()].push(s);
        }
        for list in inc.iter_mut() {
            list.sort_unstable();
        }
        DataGraph {
            names: self.names,
            lookup: self.lookup,
            out,
            inc,
            edge_count: self.edges.len(),
        }
    }
}
