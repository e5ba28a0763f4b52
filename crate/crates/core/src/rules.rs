//! Association rules for a fixed left-hand side.
//!
//! For an lhs query with body `pl`, every stored pattern `p` at least as
//! high as `pl` is a candidate rhs body. Each admissible containment mapping
//! `f: pl → p` yields a rule whose rhs head is `f(H_left)`; its instantiations
//! and confidences come from joining the two frequency tables on ρ.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::containment::{
    admissible, enumerate_containment_mappings, labeled_signature, orbit_signatures,
    ContainmentMapping,
};
use crate::error::{Error, Result};
use crate::graph::{DataGraph, NodeId};
use crate::pattern::{automorphisms_labeled, node_name, TreePattern, TreeQuery};
use crate::query::ParsedQuery;
use crate::relation::FrequencyTable;
use crate::store::PatternStore;

type RuleKey = (Vec<(usize, usize)>, Vec<usize>);

/// How aggressively equivalent rules are suppressed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceFilter {
    /// Only exact duplicates (same ρ and rhs head) are dropped.
    Off,
    /// Also drop mappings whose labeled signature was already seen, i.e.
    /// equivalent through an automorphism of the rhs alone.
    #[default]
    Signature,
    /// Also drop mappings equivalent through automorphisms of both sides.
    Full,
}

impl std::str::FromStr for EquivalenceFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(EquivalenceFilter::Off),
            "signature" => Ok(EquivalenceFilter::Signature),
            "full" => Ok(EquivalenceFilter::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown equivalence filter {other:?} (expected off, signature or full)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RuleOptions {
    pub minconf: Ratio<u64>,
    pub filter: EquivalenceFilter,
    /// Skip rhs patterns with more nodes than this.
    pub max_rhs_nodes: Option<usize>,
    /// Lhs parameters fixed to a constant, by lhs node id.
    pub lhs_fixed: BTreeMap<usize, NodeId>,
    pub parallel: bool,
}

impl RuleOptions {
    pub fn new(minconf: Ratio<u64>) -> Self {
        RuleOptions {
            minconf,
            filter: EquivalenceFilter::default(),
            max_rhs_nodes: None,
            lhs_fixed: BTreeMap::new(),
            parallel: true,
        }
    }
}

/// Parses `0.3`, `1`, or `30%` into an exact fraction in [0, 1].
pub fn parse_minconf(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("bad confidence {text:?}"));
    let t = text.trim();
    let (digits, scale) = match t.strip_suffix('%') {
        Some(pct) => (pct.trim(), 100u64),
        None => (t, 1u64),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 9
    {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac_v: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac_v))
        .ok_or_else(bad)?;
    let r = Ratio::new(num, den * scale);
    if r > Ratio::from_integer(1) {
        return Err(Error::InvalidArgument(format!(
            "confidence {text:?} exceeds 1"
        )));
    }
    Ok(r)
}

/// Whole percent, rounding halves up.
pub fn percent(num: u64, den: u64) -> u64 {
    (200 * num + den) / (2 * den)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleRow {
    /// Values of the rhs parameters, in rhs node order.
    pub alpha: Vec<NodeId>,
    pub freq: u64,
    pub lhs_freq: u64,
}

impl RuleRow {
    pub fn conf(&self) -> Ratio<u64> {
        Ratio::new(self.freq, self.lhs_freq)
    }

    /// Unreduced fraction, e.g. `3/9`.
    pub fn conf_string(&self) -> String {
        format!("{}/{}", self.freq, self.lhs_freq)
    }

    pub fn percent(&self) -> u64 {
        percent(self.freq, self.lhs_freq)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociationRule {
    /// Pure lhs query.
    pub lhs: TreeQuery,
    pub lhs_key: String,
    pub mapping: ContainmentMapping,
    /// `(σ_left, ρ(σ_left))` pairs.
    pub rho: Vec<(usize, usize)>,
    /// Head `f(H_left)` over the canonical rhs body.
    pub rhs: TreeQuery,
    pub rhs_key: String,
    pub rows: Vec<RuleRow>,
}

impl AssociationRule {
    pub fn rhs_sigma(&self) -> Vec<usize> {
        self.rhs.body.sigma()
    }

    pub fn rho_string(&self) -> String {
        if self.rho.is_empty() {
            return "-".into();
        }
        let parts: Vec<String> = self
            .rho
            .iter()
            .map(|&(a, b)| format!("{}->{}", node_name(a), node_name(b)))
            .collect();
        parts.join(",")
    }

    /// Rows ordered by their constant strings.
    pub fn sorted_rows<'a>(&'a self, g: &'a DataGraph) -> Vec<(Vec<&'a str>, &'a RuleRow)> {
        let mut rows: Vec<(Vec<&str>, &RuleRow)> = self
            .rows
            .iter()
            .map(|r| (r.alpha.iter().map(|&v| g.name(v)).collect(), r))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        rows
    }
}

fn head_text(q: &TreeQuery) -> String {
    let names: Vec<String> = q.head.iter().map(|&v| node_name(v)).collect();
    names.join(",")
}

/// Text block for one rule: lhs, ρ, rhs, then tab-separated rows of
/// `α… freq num/den pct`.
pub fn format_rule(rule: &AssociationRule, g: &DataGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "LHS {} {}", head_text(&rule.lhs), rule.lhs.body);
    let _ = writeln!(s, "RHO {}", rule.rho_string());
    let _ = writeln!(s, "RHS {} {}", head_text(&rule.rhs), rule.rhs.body);
    for &c in &rule.rhs_sigma() {
        s.push_str(&node_name(c));
        s.push('\t');
    }
    s.push_str("freq\tconf\tpct\n");
    for (vals, row) in rule.sorted_rows(g) {
        for v in vals {
            s.push_str(v);
            s.push('\t');
        }
        let _ = writeln!(s, "{}\t{}\t{}%", row.freq, row.conf_string(), row.percent());
    }
    s
}

pub fn format_rules(rules: &[AssociationRule], g: &DataGraph) -> String {
    let blocks: Vec<String> = rules.iter().map(|r| format_rule(r, g)).collect();
    blocks.join("\n")
}

/// Joins the lhs and rhs tables on `σ = ρ(σ)` for every lhs parameter and
/// keeps rhs assignments whose confidence reaches `minconf`.
pub fn rule_join(
    lhs_table: &FrequencyTable,
    rhs_table: &FrequencyTable,
    rho: &[(usize, usize)],
    minconf: Ratio<u64>,
) -> Result<Vec<RuleRow>> {
    let picks: Vec<usize> = lhs_table
        .sigma
        .iter()
        .map(|s| {
            let target = rho
                .iter()
                .find(|(a, _)| a == s)
                .map(|&(_, b)| b)
                .ok_or_else(|| {
                    Error::Consistency(format!("ρ does not cover lhs parameter {}", node_name(*s)))
                })?;
            rhs_table
                .sigma
                .iter()
                .position(|&c| c == target)
                .ok_or_else(|| {
                    Error::Consistency(format!(
                        "ρ target {} is not an rhs parameter",
                        node_name(target)
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (alpha, &freq) in &rhs_table.entries {
        let key: Vec<NodeId> = picks.iter().map(|&i| alpha[i]).collect();
        let lhs_freq = lhs_table.get(&key).ok_or_else(|| {
            Error::Consistency(format!(
                "no lhs frequency for an assignment frequent in the rhs ({} columns)",
                key.len()
            ))
        })?;
        if freq > lhs_freq {
            return Err(Error::Consistency(format!(
                "rhs frequency {freq} exceeds lhs frequency {lhs_freq}"
            )));
        }
        let row = RuleRow {
            alpha: alpha.clone(),
            freq,
            lhs_freq,
        };
        if row.conf() >= minconf {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Every admissible mapping of `pl` into `p` that survives deduplication
/// and the equivalence filter, in enumeration order.
pub fn representative_mappings(
    pl: &TreePattern,
    pl_head: &[usize],
    pl_autos: &[Vec<usize>],
    p: &TreePattern,
    filter: EquivalenceFilter,
) -> Vec<ContainmentMapping> {
    // (ρ, rhs head) pairs already emitted.
    let mut exact: HashSet<RuleKey> = HashSet::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    for f in enumerate_containment_mappings(pl, p) {
        if !admissible(&f, pl, p) {
            continue;
        }
        let head: Vec<usize> = pl_head.iter().map(|&x| f.map[x]).collect();
        if !exact.insert((f.rho(pl), head)) {
            continue;
        }
        match filter {
            EquivalenceFilter::Off => {}
            EquivalenceFilter::Signature => {
                if !seen.insert(labeled_signature(p, &f)) {
                    continue;
                }
            }
            EquivalenceFilter::Full => {
                let sig = labeled_signature(p, &f);
                if seen.contains(&sig) {
                    continue;
                }
                if orbit_signatures(pl_autos, p, &f)
                    .iter()
                    .any(|s| seen.contains(s))
                {
                    continue;
                }
                seen.insert(sig);
            }
        }
        out.push(f);
    }
    out
}

/// Mines all confident rules with lhs `lhs` from the store.
pub fn mine_rules(
    store: &PatternStore,
    lhs: &TreeQuery,
    opts: &RuleOptions,
) -> Result<Vec<AssociationRule>> {
    // A redundant lhs body is replaced by its equivalent reduced form.
    let (reduced, idmap) = lhs.body.reduce();
    let head: Vec<usize> = lhs
        .head
        .iter()
        .map(|&h| idmap[h].expect("head nodes survive"))
        .collect();
    let fixed: BTreeMap<usize, NodeId> = opts
        .lhs_fixed
        .iter()
        .filter_map(|(&v, &c)| idmap.get(v).copied().flatten().map(|nv| (nv, c)))
        .collect();
    let (pure, _) = TreeQuery::new(head, reduced)?.purify();
    let pl = &pure.body;

    let found = store.lookup(pl).ok_or_else(|| Error::LhsNotMined {
        key: pl.refined_level_sequence(),
    })?;
    let lhs_key = found.key.to_string();
    let lhs_table = found.table();

    let labels: Vec<(u8, Option<NodeId>)> = (0..pl.len())
        .map(|v| (pl.kind(v).rank(), fixed.get(&v).copied()))
        .collect();
    let autos = automorphisms_labeled(pl.tree(), &labels);

    let mut candidates: Vec<(&str, &TreePattern)> = store
        .entries()
        .filter(|(_, e)| e.pattern.height() >= pl.height())
        .filter(|(_, e)| opts.max_rhs_nodes.is_none_or(|m| e.pattern.len() <= m))
        .map(|(k, e)| (k, &e.pattern))
        .collect();
    candidates.sort_by(|a, b| (a.1.len(), a.1.level(), a.0).cmp(&(b.1.len(), b.1.level(), b.0)));

    let per_pattern = |&(key, p): &(&str, &TreePattern)| -> Result<Vec<AssociationRule>> {
        let rhs_table = &store.get(key).expect("listed entry").table;
        let mut rules = Vec::new();
        for f in representative_mappings(pl, &pure.head, &autos, p, opts.filter) {
            let rho = f.rho(pl);
            let mut rows = rule_join(&lhs_table, rhs_table, &rho, opts.minconf)?;
            if !fixed.is_empty() {
                let checks: Vec<(usize, NodeId)> = fixed
                    .iter()
                    .map(|(&v, &c)| {
                        let col = rhs_table.sigma.iter().position(|&s| s == f.map[v]).unwrap();
                        (col, c)
                    })
                    .collect();
                rows.retain(|r| checks.iter().all(|&(i, c)| r.alpha[i] == c));
            }
            if rows.is_empty() {
                continue;
            }
            let rhs_head = pure.head.iter().map(|&x| f.map[x]).collect();
            rules.push(AssociationRule {
                lhs: pure.clone(),
                lhs_key: lhs_key.clone(),
                rho,
                rhs: TreeQuery {
                    head: rhs_head,
                    body: p.clone(),
                },
                rhs_key: key.to_string(),
                mapping: f,
                rows,
            });
        }
        Ok(rules)
    };
    let groups: Vec<Vec<AssociationRule>> = if opts.parallel {
        candidates
            .par_iter()
            .map(per_pattern)
            .collect::<Result<_>>()?
    } else {
        candidates.iter().map(per_pattern).collect::<Result<_>>()?
    };
    Ok(groups.into_iter().flatten().collect())
}

/// Rules for a parsed lhs. Parameters fixed to constants restrict the lhs;
/// a constant missing from the graph yields no rules.
pub fn mine_rules_for(
    store: &PatternStore,
    g: &DataGraph,
    lhs: &ParsedQuery,
    opts: &RuleOptions,
) -> Result<Vec<AssociationRule>> {
    let mut opts = opts.clone();
    let mut unknown = false;
    for (&v, c) in &lhs.fixed {
        match g.node_id(c) {
            Some(id) => {
                opts.lhs_fixed.insert(v, id);
            }
            None => unknown = true,
        }
    }
    let rules = mine_rules(store, &lhs.query, &opts)?;
    Ok(if unknown { Vec::new() } else { rules })
}
