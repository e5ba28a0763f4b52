//! The pattern database: every mined frequency table keyed by the canonical
//! key of its pattern, persisted as a JSON manifest plus one TSV per table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DataGraph;
use crate::pattern::{node_name, TreePattern};
use crate::relation::{FrequencyTable, Relation};
use crate::tree::Tree;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreEntry {
    /// Canonical pattern; its key is the map key in [`PatternStore`].
    pub pattern: TreePattern,
    pub table: FrequencyTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternStore {
    pub graph_fp: u64,
    pub minsup: u64,
    pub max_nodes: usize,
    entries: BTreeMap<String, StoreEntry>,
}

/// A stored table seen through the node ids of the pattern that was looked
/// up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lookup<'a> {
    pub key: &'a str,
    pub entry: &'a StoreEntry,
    /// `columns[i]` is the caller's node for the table's i-th parameter.
    pub columns: Vec<usize>,
}

impl Lookup<'_> {
    pub fn table(&self) -> FrequencyTable {
        let map: BTreeMap<usize, usize> = self
            .entry
            .table
            .sigma
            .iter()
            .copied()
            .zip(self.columns.iter().copied())
            .collect();
        self.entry.table.rename(|c| map[&c])
    }

    pub fn relation(&self) -> Relation {
        Relation::new(
            self.columns.clone(),
            self.entry.table.entries.keys().cloned(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    graph_fp: String,
    minsup: u64,
    max_nodes: usize,
    entries: Vec<ManifestEntry>,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    key: String,
    file: String,
    tree: String,
    pi: Vec<usize>,
    sigma: Vec<usize>,
}

pub fn format_fingerprint(fp: u64) -> String {
    format!("{fp:016x}")
}

impl PatternStore {
    pub fn new(graph_fp: u64, minsup: u64, max_nodes: usize) -> Self {
        PatternStore {
            graph_fp,
            minsup,
            max_nodes,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a table for a canonical pattern. Empty tables are not stored.
    pub fn insert(&mut self, pattern: TreePattern, table: FrequencyTable) {
        debug_assert!(pattern.is_canonical());
        if table.is_empty() {
            return;
        }
        self.entries.insert(
            pattern.refined_level_sequence(),
            StoreEntry { pattern, table },
        );
    }

    pub fn get(&self, key: &str) -> Option<&StoreEntry> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &StoreEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Canonizes `p` and fetches its table, with columns renamed to `p`'s
    /// own node ids.
    pub fn lookup(&self, p: &TreePattern) -> Option<Lookup<'_>> {
        let (canonical, iso) = p.canonize();
        let (key, entry) = self
            .entries
            .get_key_value(&canonical.refined_level_sequence())?;
        let columns = entry.table.sigma.iter().map(|&c| iso.apply(c)).collect();
        Some(Lookup {
            key: key.as_str(),
            entry,
            columns,
        })
    }

    /// Like [`lookup`](Self::lookup) but removes redundant subtrees first,
    /// so any pattern equivalent to a stored one is found. The table's
    /// columns are `p`'s own parameter ids.
    pub fn lookup_equivalent(&self, p: &TreePattern) -> Option<FrequencyTable> {
        let (reduced, map) = p.reduce();
        let mut back = vec![usize::MAX; reduced.len()];
        for (old, new) in map.iter().enumerate() {
            if let Some(n) = new {
                back[*n] = old;
            }
        }
        let found = self.lookup(&reduced)?;
        Some(found.table().rename(|c| back[c]))
    }

    fn file_name(i: usize) -> String {
        format!("{i:03}.tsv")
    }

    fn render_table(entry: &StoreEntry, g: &DataGraph) -> String {
        let mut out = String::new();
        for &s in &entry.table.sigma {
            out.push_str(&node_name(s));
            out.push('\t');
        }
        out.push_str("freq\n");
        let mut rows: Vec<(Vec<&str>, u64)> = entry
            .table
            .entries
            .iter()
            .map(|(k, &c)| (k.iter().map(|&v| g.name(v)).collect(), c))
            .collect();
        rows.sort();
        for (vals, c) in rows {
            for v in vals {
                out.push_str(v);
                out.push('\t');
            }
            let _ = writeln!(out, "{c}");
        }
        out
    }

    /// Writes the manifest and tables into `dir`, replacing a previous store
    /// there. Output is byte-identical for equal stores.
    pub fn save(&self, dir: &Path, g: &DataGraph) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for item in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let item = item.map_err(|e| Error::io(dir, e))?;
            let name = item.file_name();
            let name = name.to_string_lossy();
            let is_table = name
                .strip_suffix(".tsv")
                .is_some_and(|stem| !stem.is_empty() && stem.bytes().all(|b| b.is_ascii_digit()));
            if is_table {
                fs::remove_file(item.path()).map_err(|e| Error::io(item.path(), e))?;
            }
        }
        let mut manifest = Manifest {
            graph_fp: format_fingerprint(self.graph_fp),
            minsup: self.minsup,
            max_nodes: self.max_nodes,
            entries: Vec::new(),
        };
        for (i, (key, entry)) in self.entries.iter().enumerate() {
            let file = Self::file_name(i);
            let path = dir.join(&file);
            fs::write(&path, Self::render_table(entry, g)).map_err(|e| Error::io(&path, e))?;
            manifest.entries.push(ManifestEntry {
                key: key.clone(),
                file,
                tree: entry.pattern.tree().to_string(),
                pi: entry.pattern.pi(),
                sigma: entry.pattern.sigma(),
            });
        }
        let path = dir.join(MANIFEST);
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        fs::write(&path, json).map_err(|e| Error::io(&path, e))
    }

    /// Reads a store written by [`PatternStore::save`] for graph `g`.
    pub fn load(dir: &Path, g: &DataGraph) -> Result<PatternStore> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| Error::store_file(&path, e.to_string()))?;
        let stored_fp = u64::from_str_radix(&manifest.graph_fp, 16).map_err(|_| {
            Error::store_file(&path, format!("bad graph_fp {:?}", manifest.graph_fp))
        })?;
        let actual = g.fingerprint();
        if stored_fp != actual {
            return Err(Error::StaleStore {
                stored: manifest.graph_fp,
                actual: format_fingerprint(actual),
            });
        }
        if manifest.minsup == 0 {
            return Err(Error::Consistency(
                "manifest minsup must be at least 1".into(),
            ));
        }
        let mut store = PatternStore::new(stored_fp, manifest.minsup, manifest.max_nodes);
        for me in manifest.entries {
            let file = dir.join(&me.file);
            let tree: Tree = me
                .tree
                .parse()
                .map_err(|e: Error| Error::store_file(&path, format!("entry {}: {e}", me.key)))?;
            let pattern = TreePattern::new(tree, &me.pi, &me.sigma)
                .map_err(|e| Error::store_file(&path, format!("entry {}: {e}", me.key)))?;
            if !pattern.is_canonical() || pattern.refined_level_sequence() != me.key {
                return Err(Error::Consistency(format!(
                    "manifest key {} does not match its pattern {}",
                    me.key,
                    pattern.refined_level_sequence()
                )));
            }
            let table = read_table(&file, &pattern, g, manifest.minsup)?;
            if store.entries.contains_key(&me.key) {
                return Err(Error::Consistency(format!(
                    "duplicate manifest key {}",
                    me.key
                )));
            }
            store.entries.insert(me.key, StoreEntry { pattern, table });
        }
        Ok(store)
    }
}

fn read_table(file: &Path, p: &TreePattern, g: &DataGraph, minsup: u64) -> Result<FrequencyTable> {
    let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
    let sigma = p.sigma();
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::store_file(file, "missing header"))?;
    let mut expected: Vec<String> = sigma.iter().map(|&s| node_name(s)).collect();
    expected.push("freq".into());
    if header.split('\t').collect::<Vec<_>>() != expected {
        return Err(Error::store_file(
            file,
            format!(
                "header {header:?} does not match expected {:?}",
                expected.join("\t")
            ),
        ));
    }
    let mut table = FrequencyTable::new(sigma.clone());
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != sigma.len() + 1 {
            return Err(Error::store_file(
                file,
                format!(
                    "line {lineno}: expected {} fields, found {}",
                    sigma.len() + 1,
                    fields.len()
                ),
            ));
        }
        let mut key = Vec::with_capacity(sigma.len());
        for f in &fields[..sigma.len()] {
            let v = g.node_id(f).ok_or_else(|| {
                Error::store_file(file, format!("line {lineno}: unknown constant {f:?}"))
            })?;
            key.push(v);
        }
        let count: u64 = fields[sigma.len()].parse().map_err(|_| {
            Error::store_file(
                file,
                format!("line {lineno}: bad count {:?}", fields[sigma.len()]),
            )
        })?;
        if count < minsup {
            return Err(Error::Consistency(format!(
                "{}: line {lineno}: count {count} is below the manifest minsup {minsup}",
                file.display()
            )));
        }
        if table.entries.insert(key, count).is_some() {
            return Err(Error::store_file(
                file,
                format!("line {lineno}: duplicate row"),
            ));
        }
    }
    if sigma.is_empty() && table.len() > 1 {
        return Err(Error::store_file(
            file,
            "parameterless table has more than one row",
        ));
    }
    Ok(table)
}
