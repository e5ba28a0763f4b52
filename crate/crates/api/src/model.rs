//! JSON shapes served by the API.

use serde::{Deserialize, Serialize};
use tqmine_core::{
    node_name, parse_minconf, query_text, AssociationRule, DataGraph, FrequencyTable, Kind, Ratio,
    Tree, TreePattern, TreeQuery,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApiKind {
    D,
    E,
    P,
}

impl From<Kind> for ApiKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Distinguished => ApiKind::D,
            Kind::Existential => ApiKind::E,
            Kind::Parameter => ApiKind::P,
        }
    }
}

impl From<ApiKind> for Kind {
    fn from(k: ApiKind) -> Self {
        match k {
            ApiKind::D => Kind::Distinguished,
            ApiKind::E => Kind::Existential,
            ApiKind::P => Kind::Parameter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiNode {
    pub name: String,
    pub depth: u32,
    pub kind: ApiKind,
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
}

/// A pattern as its nodes in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiPattern {
    pub key: String,
    pub tree: String,
    pub pi: Vec<usize>,
    pub sigma: Vec<usize>,
    pub nodes: Vec<ApiNode>,
}

impl ApiPattern {
    pub fn from_pattern(p: &TreePattern) -> Self {
        ApiPattern {
            key: p.refined_level_sequence(),
            tree: p.tree().to_string(),
            pi: p.pi(),
            sigma: p.sigma(),
            nodes: (0..p.len())
                .map(|v| ApiNode {
                    name: node_name(v),
                    depth: p.tree().depth(v),
                    kind: p.kind(v).into(),
                    constant: None,
                })
                .collect(),
        }
    }

    pub fn to_pattern(&self) -> tqmine_core::Result<TreePattern> {
        let tree = Tree::from_levels(self.nodes.iter().map(|n| n.depth).collect())?;
        TreePattern::from_kinds(tree, self.nodes.iter().map(|n| n.kind.into()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiRow {
    pub values: Vec<String>,
    pub freq: u64,
}

/// Rows ordered by their constant strings, as in the store files.
pub fn table_rows(table: &FrequencyTable, g: &DataGraph) -> Vec<ApiRow> {
    let mut rows: Vec<ApiRow> = table
        .entries
        .iter()
        .map(|(k, &freq)| ApiRow {
            values: k.iter().map(|&v| g.name(v).to_string()).collect(),
            freq,
        })
        .collect();
    rows.sort_by(|a, b| a.values.cmp(&b.values));
    rows
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSummary {
    #[serde(flatten)]
    pub pattern: ApiPattern,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDetail {
    #[serde(flatten)]
    pub pattern: ApiPattern,
    pub columns: Vec<String>,
    pub rows: Vec<ApiRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub fingerprint: String,
    pub minsup: u64,
    pub max_nodes: usize,
    pub patterns: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRequest {
    /// Query text; parameters may be fixed with `p=CONST`.
    pub query: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResponse {
    pub key: String,
    /// Computed directly on the graph rather than read from the store.
    pub adhoc: bool,
    pub pattern: ApiPattern,
    /// Names of the open parameters, as written in the query.
    pub columns: Vec<String>,
    pub rows: Vec<ApiRow>,
}

/// `0.3`, `"0.3"` or `"30%"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Minconf {
    Number(f64),
    Text(String),
}

impl Minconf {
    pub fn to_ratio(&self) -> tqmine_core::Result<Ratio<u64>> {
        match self {
            Minconf::Number(x) => parse_minconf(&x.to_string()),
            Minconf::Text(s) => parse_minconf(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulesRequest {
    pub lhs: String,
    pub minconf: Minconf,
    /// `off`, `signature` (default) or `full`.
    #[serde(default)]
    pub equivalence: Option<String>,
    #[serde(default)]
    pub rhs_max_nodes: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiQuery {
    pub head: Vec<String>,
    pub body: String,
    pub text: String,
}

impl ApiQuery {
    pub fn from_query(q: &TreeQuery) -> Self {
        ApiQuery {
            head: q.head.iter().map(|&v| node_name(v)).collect(),
            body: q.body.body_string(),
            text: query_text(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiRuleRow {
    pub values: Vec<String>,
    pub freq: u64,
    pub lhs_freq: u64,
    /// Unreduced fraction `freq/lhs_freq`.
    pub conf: String,
    pub percent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiRule {
    pub lhs_key: String,
    pub lhs: ApiQuery,
    pub rho: Vec<[String; 2]>,
    pub rhs_key: String,
    pub rhs: ApiQuery,
    pub columns: Vec<String>,
    pub rows: Vec<ApiRuleRow>,
}

impl ApiRule {
    pub fn from_rule(rule: &AssociationRule, g: &DataGraph) -> Self {
        ApiRule {
            lhs_key: rule.lhs_key.clone(),
            lhs: ApiQuery::from_query(&rule.lhs),
            rho: rule
                .rho
                .iter()
                .map(|&(a, b)| [node_name(a), node_name(b)])
                .collect(),
            rhs_key: rule.rhs_key.clone(),
            rhs: ApiQuery::from_query(&rule.rhs),
            columns: rule.rhs_sigma().into_iter().map(node_name).collect(),
            rows: rule
                .sorted_rows(g)
                .into_iter()
                .map(|(values, row)| ApiRuleRow {
                    values: values.into_iter().map(String::from).collect(),
                    freq: row.freq,
                    lhs_freq: row.lhs_freq,
                    conf: row.conf_string(),
                    percent: row.percent(),
                })
                .collect(),
        }
    }
}

pub fn rules_json(rules: &[AssociationRule], g: &DataGraph) -> Vec<ApiRule> {
    rules.iter().map(|r| ApiRule::from_rule(r, g)).collect()
}
