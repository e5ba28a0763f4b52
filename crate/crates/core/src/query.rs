//! Text syntax for tree queries.
//!
//! ```text
//! x1,x3,x4
//! (x1:d (x2:p) (x3:d) (x4:d))
//! ```
//!
//! The optional first line is the head; without it the head is the pure
//! head of the body. The body is an s-expression `(name:kind child*)` with
//! kind one of `d`, `e`, `p` or `p=CONST` (a parameter fixed to a graph
//! constant). Node ids are assigned in the order nodes appear.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::pattern::{node_name, Kind, TreePattern, TreeQuery};
use crate::tree::Tree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedQuery {
    pub query: TreeQuery,
    /// User-given node names, indexed by node id.
    pub names: Vec<String>,
    /// Parameters fixed to a constant.
    pub fixed: BTreeMap<usize, String>,
}

impl ParsedQuery {
    pub fn body(&self) -> &TreePattern {
        &self.query.body
    }

    /// Renders back to query syntax using the original names.
    pub fn to_text(&self) -> String {
        let head: Vec<&str> = self
            .query
            .head
            .iter()
            .map(|&v| self.names[v].as_str())
            .collect();
        let mut s = head.join(",");
        s.push('\n');
        self.write_node(0, &mut s);
        s
    }

    fn write_node(&self, v: usize, s: &mut String) {
        let body = &self.query.body;
        s.push('(');
        s.push_str(&self.names[v]);
        s.push(':');
        s.push(body.kind(v).letter());
        if let Some(c) = self.fixed.get(&v) {
            s.push('=');
            s.push_str(c);
        }
        for &c in body.tree().children(v) {
            s.push(' ');
            self.write_node(c, s);
        }
        s.push(')');
    }
}

/// Query text with default names `x1..xn` and no fixed constants.
pub fn query_text(q: &TreeQuery) -> String {
    let parsed = ParsedQuery {
        query: q.clone(),
        names: (0..q.body.len()).map(node_name).collect(),
        fixed: BTreeMap::new(),
    };
    parsed.to_text()
}

pub fn parse_query(text: &str) -> Result<ParsedQuery> {
    let mut p = Parser { text, pos: 0 };
    p.skip_ws();
    let first_line_end = text[p.pos..].find('\n').map_or(text.len(), |i| p.pos + i);
    let head_names = if text[p.pos..first_line_end].contains(':') {
        None
    } else {
        let start = p.pos;
        let line = &text[start..first_line_end];
        p.pos = first_line_end;
        Some(parse_head(line, start, text)?)
    };

    p.skip_ws();
    let mut nodes = Vec::new();
    p.parse_node(0, &mut nodes)?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected text after the body"));
    }

    let mut index = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if index.insert(n.name.clone(), i).is_some() {
            return Err(error_at(
                text,
                n.offset,
                format!("duplicate node name {:?}", n.name),
            ));
        }
    }
    let levels = nodes.iter().map(|n| n.depth).collect();
    let tree = Tree::from_levels(levels)?;
    let kinds = nodes.iter().map(|n| n.kind).collect();
    let body = TreePattern::from_kinds(tree, kinds)?;
    let fixed = nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| n.constant.clone().map(|c| (i, c)))
        .collect();

    let head = match head_names {
        None => TreeQuery::pure_head(&body),
        Some(entries) => {
            let mut head = Vec::with_capacity(entries.len());
            for (name, offset) in entries {
                let v = *index.get(&name).ok_or_else(|| {
                    error_at(text, offset, format!("head names unknown node {name:?}"))
                })?;
                head.push(v);
            }
            head
        }
    };
    let query = TreeQuery::new(head, body).map_err(|e| match e {
        Error::InvalidPattern(m) => error_at(text, 0, m),
        other => other,
    })?;
    let names = nodes.into_iter().map(|n| n.name).collect();
    Ok(ParsedQuery {
        query,
        names,
        fixed,
    })
}

fn parse_head(line: &str, start: usize, text: &str) -> Result<Vec<(String, usize)>> {
    let trimmed = line.trim_end();
    let mut inner = trimmed;
    let mut base = start;
    if let Some(rest) = inner.strip_prefix('(') {
        inner = rest
            .strip_suffix(')')
            .ok_or_else(|| error_at(text, start + trimmed.len(), "unclosed head parenthesis"))?;
        base += 1;
    }
    let mut out = Vec::new();
    let mut offset = base;
    for part in inner.split(',') {
        let name = part.trim();
        let lead = part.len() - part.trim_start().len();
        if name.is_empty() || !name.chars().all(is_name_char) {
            return Err(error_at(
                text,
                offset + lead,
                format!("bad head entry {name:?}"),
            ));
        }
        out.push((name.to_string(), offset + lead));
        offset += part.len() + 1;
    }
    Ok(out)
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ':' | ',' | '=')
}

struct RawNode {
    name: String,
    depth: u32,
    kind: Kind,
    constant: Option<String>,
    offset: usize,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        error_at(self.text, self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(match self.peek() {
                Some(found) => format!("expected {c:?}, found {found:?}"),
                None => format!("expected {c:?}, found end of input"),
            }))
        }
    }

    fn token(&mut self, what: &str) -> Result<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !is_name_char(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error(format!("expected {what}")));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn parse_node(&mut self, depth: u32, out: &mut Vec<RawNode>) -> Result<()> {
        self.expect('(')?;
        self.skip_ws();
        let offset = self.pos;
        let name = self.token("node name")?;
        self.expect(':')?;
        let kind_pos = self.pos;
        let kind = match self.token("node kind")?.as_str() {
            "d" => Kind::Distinguished,
            "e" => Kind::Existential,
            "p" => Kind::Parameter,
            other => {
                return Err(error_at(
                    self.text,
                    kind_pos,
                    format!("unknown kind {other:?} (expected d, e, p or p=CONST)"),
                ))
            }
        };
        let mut constant = None;
        if self.peek() == Some('=') {
            if kind != Kind::Parameter {
                return Err(self.error("only parameters can be fixed to a constant"));
            }
            self.pos += 1;
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                self.pos += c.len_utf8();
            }
            if start == self.pos {
                return Err(self.error("expected a constant after '='"));
            }
            constant = Some(self.text[start..self.pos].to_string());
        }
        out.push(RawNode {
            name,
            depth,
            kind,
            constant,
            offset,
        });
        loop {
            self.skip_ws();
            match self.peek() {
                Some('(') => self.parse_node(depth + 1, out)?,
                Some(')') => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(c) => return Err(self.error(format!("unexpected {c:?}"))),
                None => return Err(self.error("unclosed '('")),
            }
        }
    }
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
    Error::QueryParse {
        line,
        column,
        message: message.into(),
    }
}
