//! Levelwise search for frequent patterns.
//!
//! For every tree, all labelings (Π, Σ) are visited by increasing level
//! |Π| + |Σ|. Generation is Apriori in two dimensions: a candidate with
//! parameters is pruned when a parent with one parameter fewer is not
//! frequent, one without parameters when a parent with one existential node
//! fewer is not frequent. Survivors are dismissed when they have a
//! redundant subtree or are not in canonical form, and otherwise evaluated
//! against their candidacy table: the natural join of all their parents'
//! frequency tables, empty as soon as one parent is infrequent.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::frequency_table;
use crate::graph::DataGraph;
use crate::pattern::{Kind, TreePattern};
use crate::relation::{FrequencyTable, Relation};
use crate::store::PatternStore;
use crate::tree::{enumerate_trees, Tree};

/// Trees larger than this make the 3^n labelings per tree impractical.
pub const MAX_TREE_NODES: usize = 16;

/// Candidate parameter assignments for `p`: all graph nodes for a single
/// parameter and no existential node, otherwise the join of the canonized
/// parent tables renamed to `p`'s node ids. Every parent must be in the
/// store.
pub fn candidacy_table(p: &TreePattern, store: &PatternStore, g: &DataGraph) -> Result<Relation> {
    let sigma = p.sigma();
    if p.pi().is_empty() && sigma.len() == 1 {
        return Ok(Relation::new(sigma, g.nodes().map(|v| vec![v])));
    }
    let mut acc = Relation::unit();
    for (parent, _) in p.parents() {
        let found = store.lookup(&parent).ok_or_else(|| Error::Sequencing {
            key: parent.refined_level_sequence(),
        })?;
        acc = acc.natural_join(&found.relation());
    }
    Ok(acc.reorder(&sigma))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    /// Evaluated; the number of frequent assignments (0 = infrequent). A
    /// candidate with an infrequent parent lands here with 0 rows without
    /// touching the graph.
    Evaluated {
        rows: usize,
    },
    PrunedInfrequentParent,
    DismissedRedundant,
    DismissedNoncanonical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub tree: String,
    pub pi: Vec<usize>,
    pub sigma: Vec<usize>,
    pub level: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MiningReport {
    pub entries: Vec<ReportEntry>,
    /// False when a stop signal ended the run early.
    pub completed: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub candidates: usize,
    pub evaluated: usize,
    pub frequent: usize,
    pub pruned: usize,
    pub redundant: usize,
    pub noncanonical: usize,
}

impl MiningReport {
    pub fn counts(&self) -> OutcomeCounts {
        let mut c = OutcomeCounts {
            candidates: self.entries.len(),
            ..Default::default()
        };
        for e in &self.entries {
            match e.outcome {
                Outcome::Evaluated { rows } => {
                    c.evaluated += 1;
                    if rows > 0 {
                        c.frequent += 1;
                    }
                }
                Outcome::PrunedInfrequentParent => c.pruned += 1,
                Outcome::DismissedRedundant => c.redundant += 1,
                Outcome::DismissedNoncanonical => c.noncanonical += 1,
            }
        }
        c
    }

    pub fn outcome(&self, tree: &Tree, pi: &[usize], sigma: &[usize]) -> Option<&Outcome> {
        let t = tree.to_string();
        self.entries
            .iter()
            .find(|e| e.tree == t && e.pi == pi && e.sigma == sigma)
            .map(|e| &e.outcome)
    }
}

#[derive(Clone, Debug)]
pub struct MineOptions<'a> {
    pub minsup: u64,
    pub max_nodes: usize,
    /// Only mine these trees (canonical, at most `max_nodes` nodes).
    pub trees: Option<Vec<Tree>>,
    /// Checked before every level; when set, mining stops and the store
    /// holds everything committed so far.
    pub stop: Option<&'a AtomicBool>,
    pub parallel: bool,
}

impl MineOptions<'_> {
    pub fn new(minsup: u64, max_nodes: usize) -> Self {
        MineOptions {
            minsup,
            max_nodes,
            trees: None,
            stop: None,
            parallel: true,
        }
    }
}

/// Mines every frequent, redundancy-free, canonical pattern.
pub fn mine_patterns(g: &DataGraph, opts: &MineOptions) -> Result<(PatternStore, MiningReport)> {
    if opts.minsup == 0 {
        return Err(Error::InvalidArgument("minsup must be at least 1".into()));
    }
    if opts.max_nodes == 0 || opts.max_nodes > MAX_TREE_NODES {
        return Err(Error::InvalidArgument(format!(
            "max_nodes must be between 1 and {MAX_TREE_NODES}"
        )));
    }
    let trees = match &opts.trees {
        None => enumerate_trees(opts.max_nodes),
        Some(list) => {
            for t in list {
                if !t.is_canonical() {
                    return Err(Error::InvalidArgument(format!("tree {t} is not canonical")));
                }
                if t.len() > opts.max_nodes {
                    return Err(Error::InvalidArgument(format!(
                        "tree {t} has more than {} nodes",
                        opts.max_nodes
                    )));
                }
            }
            let mut list = list.clone();
            list.sort_by(|a, b| a.len().cmp(&b.len()).then(b.levels().cmp(a.levels())));
            list.dedup();
            list
        }
    };

    let start = Instant::now();
    let mut store = PatternStore::new(g.fingerprint(), opts.minsup, opts.max_nodes);
    let mut report = MiningReport {
        completed: true,
        ..Default::default()
    };
    'trees: for tree in &trees {
        let n = tree.len();
        // Whether a labeling of this tree is known frequent. Non-canonical
        // labelings resolve through the key of their class.
        let mut frequent: HashMap<(u32, u32), bool> = HashMap::new();
        let mut frequent_keys: HashMap<String, bool> = HashMap::new();
        let known = |frequent: &HashMap<(u32, u32), bool>,
                     frequent_keys: &HashMap<String, bool>,
                     q: &TreePattern|
         -> Result<bool> {
            if let Some(&f) = frequent.get(&(q.pi_mask(), q.sigma_mask())) {
                return Ok(f);
            }
            let key = q.refined_level_sequence();
            frequent_keys
                .get(&key)
                .copied()
                .ok_or(Error::Sequencing { key })
        };
        for level in 0..=n {
            if opts.stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
                report.completed = false;
                break 'trees;
            }
            let mut to_eval: Vec<TreePattern> = Vec::new();
            let mut outcomes: Vec<(TreePattern, Option<Outcome>)> = Vec::new();
            for (pi, sigma) in labelings(n, level) {
                let p = TreePattern::from_masks(tree.clone(), pi, sigma);
                let parents = p.parents();
                // Apriori per dimension: Σ grows over a frequent (Π, Σ'),
                // Π grows over frequent (Π', ∅).
                let mut gate_ok = true;
                for (q, v) in &parents {
                    let gate = if sigma == 0 {
                        true
                    } else {
                        p.kind(*v) == Kind::Parameter
                    };
                    if gate && !known(&frequent, &frequent_keys, q)? {
                        gate_ok = false;
                        break;
                    }
                }
                let outcome = if !gate_ok {
                    Some(Outcome::PrunedInfrequentParent)
                } else if p.has_redundancy() {
                    Some(Outcome::DismissedRedundant)
                } else if !p.is_canonical() {
                    Some(Outcome::DismissedNoncanonical)
                } else {
                    // Any infrequent parent leaves an empty candidacy table.
                    let mut doomed = false;
                    for (q, _) in &parents {
                        if !known(&frequent, &frequent_keys, q)? {
                            doomed = true;
                            break;
                        }
                    }
                    if doomed {
                        Some(Outcome::Evaluated { rows: 0 })
                    } else {
                        to_eval.push(p.clone());
                        None
                    }
                };
                outcomes.push((p, outcome));
            }

            let eval = |p: &TreePattern| -> Result<FrequencyTable> {
                let candidates = candidacy_table(p, &store, g)?;
                Ok(frequency_table(g, p, Some(&candidates), opts.minsup))
            };
            let tables: Vec<FrequencyTable> = if opts.parallel {
                to_eval.par_iter().map(eval).collect::<Result<_>>()?
            } else {
                to_eval.iter().map(eval).collect::<Result<_>>()?
            };

            let mut tables = tables.into_iter();
            for (p, outcome) in outcomes {
                let masks = (p.pi_mask(), p.sigma_mask());
                let outcome = match outcome {
                    Some(Outcome::DismissedNoncanonical) => Outcome::DismissedNoncanonical,
                    Some(Outcome::DismissedRedundant) => {
                        frequent.insert(masks, false);
                        Outcome::DismissedRedundant
                    }
                    Some(o) => {
                        // Pruned or empty candidacy: the whole class is infrequent.
                        frequent.insert(masks, false);
                        frequent_keys.insert(p.refined_level_sequence(), false);
                        o
                    }
                    None => {
                        let table = tables.next().expect("one table per evaluated candidate");
                        let rows = table.len();
                        frequent.insert(masks, rows > 0);
                        frequent_keys.insert(p.refined_level_sequence(), rows > 0);
                        store.insert(p.clone(), table);
                        Outcome::Evaluated { rows }
                    }
                };
                report.entries.push(ReportEntry {
                    tree: tree.to_string(),
                    pi: p.pi(),
                    sigma: p.sigma(),
                    level,
                    outcome,
                });
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok((store, report))
}

/// All disjoint (Π, Σ) mask pairs over `n` nodes with |Π| + |Σ| = level,
/// ordered by Π then Σ.
fn labelings(n: usize, level: usize) -> Vec<(u32, u32)> {
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut out = Vec::new();
    for pi in 0..=full {
        let k = pi.count_ones() as usize;
        if k > level {
            continue;
        }
        let rest = full & !pi;
        // Subsets of `rest` with level - k bits.
        let mut sigma = rest;
        loop {
            if sigma.count_ones() as usize == level - k {
                out.push((pi, sigma));
            }
            if sigma == 0 {
                break;
            }
            sigma = (sigma - 1) & rest;
        }
    }
    out.sort_unstable();
    out
}
