//! Mining frequent tree queries and tree-query association rules in a
//! single directed graph.
//!
//! The pipeline: load a [`DataGraph`], run [`mine_patterns`] to build a
//! [`PatternStore`] of frequency tables for every frequent parameterized
//! tree pattern (up to equivalence), then run [`mine_rules`] for a chosen
//! left-hand-side query to get confident [`AssociationRule`]s.

pub mod containment;
pub mod error;
pub mod eval;
pub mod graph;
pub mod mine;
pub mod oracle;
pub mod pattern;
pub mod query;
pub mod relation;
pub mod rules;
pub mod store;
pub mod tree;

pub use containment::{
    admissible, enumerate_containment_mappings, equivalent_mappings, fill_map, labeled_signature,
    ContainmentMapping, MatchMatrix,
};
pub use error::{Error, Result};
pub use eval::{evaluate_pattern, evaluate_restricted, frequency_table, Domains};
pub use graph::{DataGraph, NodeId};
pub use mine::{candidacy_table, mine_patterns, MineOptions, MiningReport, Outcome, ReportEntry};
pub use pattern::{automorphisms, node_name, HeadSource, Kind, PatternIso, TreePattern, TreeQuery};
pub use query::{parse_query, query_text, ParsedQuery};
pub use relation::{FrequencyTable, Relation, Tuple};
pub use rules::{
    format_rule, format_rules, mine_rules, mine_rules_for, parse_minconf, rule_join,
    AssociationRule, EquivalenceFilter, RuleOptions, RuleRow,
};
pub use store::{format_fingerprint, Lookup, PatternStore, StoreEntry};
pub use tree::{enumerate_trees, is_canonical, Tree};

pub use num_rational::Ratio;
