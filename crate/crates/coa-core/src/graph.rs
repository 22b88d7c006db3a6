//! MULVAL attack-graph ingestion: typed vertices and arcs, predicate
//! splitting, validated adjacency, and Graphviz export.
//!
//! Input files follow the MULVAL CSV conventions: `VERTICES.CSV` rows are
//! `id,"label","kind",metric` and `ARCS.CSV` rows are `dst,src,-1`. Arcs are
//! reversed into attacker-progress direction at load unless
//! [`ArcDirection::AsWritten`] is requested.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::ScoreAssignment;

/// Vertex identifier as found in `VERTICES.CSV` (always >= 1).
pub type VertexId = u32;

/// Node kind emitted by the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    Leaf,
    And,
    Or,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKind::Leaf => write!(f, "LEAF"),
            VertexKind::And => write!(f, "AND"),
            VertexKind::Or => write!(f, "OR"),
        }
    }
}

/// One row of `VERTICES.CSV`.
///
/// `metric` is retained as emitted by the generator; scoring derives node
/// values from CVSS data instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub label: String,
    pub kind: VertexKind,
    pub metric: f64,
}

/// A directed arc in attacker-progress direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub src: VertexId,
    pub dst: VertexId,
}

/// How to orient arcs while parsing `ARCS.CSV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArcDirection {
    /// MULVAL rows are `(child, parent)`; reverse them so arcs point in
    /// attacker-progress direction (toward the goal node).
    #[default]
    Reversed,
    /// Keep rows as written, for pre-normalized inputs.
    AsWritten,
}

/// A vertex label split into predicate name and arguments.
///
/// Labels that do not parse as `name(a1,a2,...)` fall back to
/// `name = label, args = []`, so splitting is total over arbitrary text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected 4 comma-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: unbalanced quotes")]
    UnbalancedQuotes { line: usize },
    #[error("line {line}: invalid vertex id {text:?} (expected integer >= 1)")]
    InvalidId { line: usize, text: String },
    #[error("line {line}: empty vertex label")]
    EmptyLabel { line: usize },
    #[error("line {line}: invalid vertex kind {text:?} (expected LEAF, AND or OR)")]
    InvalidKind { line: usize, text: String },
    #[error("line {line}: invalid metric {text:?}")]
    InvalidMetric { line: usize, text: String },
    #[error("line {line}: duplicate vertex id {id}")]
    DuplicateId { line: usize, id: VertexId },
    #[error("line {line}: expected at least 2 comma-separated fields, found {found}")]
    ArcFieldCount { line: usize, found: usize },
    #[error("line {line}: invalid arc field {text:?} (expected integer)")]
    InvalidArcField { line: usize, text: String },
    #[error("line {line}: arc endpoint {value} is not a valid vertex id")]
    InvalidArcEndpoint { line: usize, value: i64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("arcs reference missing vertices: {}", format_arcs(.0))]
    DanglingArcs(Vec<Arc>),
    #[error("self-loop arc {0} -> {0}")]
    SelfLoop(VertexId),
}

#[derive(Debug, Error, PartialEq)]
pub enum DotError {
    #[error("highlight vertex {0} is not in the graph")]
    MissingVertex(VertexId),
    #[error("highlight step {src} -> {dst} is not an arc of the graph")]
    NotAnArc { src: VertexId, dst: VertexId },
}

fn format_arcs(arcs: &[Arc]) -> String {
    let items: Vec<String> = arcs
        .iter()
        .map(|a| format!("{} -> {}", a.src, a.dst))
        .collect();
    items.join(", ")
}

/// Split one CSV line on commas that sit outside double quotes.
/// Returns the raw fields (quotes preserved) or `None` on unbalanced quotes.
fn split_quoted(line: &str) -> Option<Vec<String>> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for ch in line.chars() {
        match ch {
            '"' => {
                in_quotes = !in_quotes;
                current.push(ch);
            }
            ',' if !in_quotes => {
                fields.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    if in_quotes {
        return None;
    }
    fields.push(current);
    Some(fields)
}

/// Strip one matching pair of surrounding double quotes, if present.
fn unquote(field: &str) -> &str {
    let t = field.trim();
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

/// Non-empty lines of `text` with their 1-based line numbers. Accepts LF and
/// CRLF endings.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Parse `VERTICES.CSV` content into vertices, in file order.
pub fn parse_vertices(text: &str) -> Result<Vec<Vertex>, ParseError> {
    let mut vertices = Vec::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for (line, raw) in records(text) {
        let fields = split_quoted(raw).ok_or(ParseError::UnbalancedQuotes { line })?;
        if fields.len() != 4 {
            return Err(ParseError::FieldCount {
                line,
                found: fields.len(),
            });
        }
        let id_text = fields[0].trim();
        let id: VertexId = id_text.parse().map_err(|_| ParseError::InvalidId {
            line,
            text: id_text.to_string(),
        })?;
        if id == 0 {
            return Err(ParseError::InvalidId {
                line,
                text: id_text.to_string(),
            });
        }
        if !seen.insert(id) {
            return Err(ParseError::DuplicateId { line, id });
        }
        let label = unquote(&fields[1]).to_string();
        if label.is_empty() {
            return Err(ParseError::EmptyLabel { line });
        }
        let kind_text = unquote(&fields[2]);
        let kind = match kind_text {
            "LEAF" => VertexKind::Leaf,
            "AND" => VertexKind::And,
            "OR" => VertexKind::Or,
            other => {
                return Err(ParseError::InvalidKind {
                    line,
                    text: other.to_string(),
                })
            }
        };
        let metric_text = fields[3].trim();
        let metric: f64 = metric_text.parse().map_err(|_| ParseError::InvalidMetric {
            line,
            text: metric_text.to_string(),
        })?;
        if !metric.is_finite() {
            return Err(ParseError::InvalidMetric {
                line,
                text: metric_text.to_string(),
            });
        }
        vertices.push(Vertex {
            id,
            label,
            kind,
            metric,
        });
    }
    Ok(vertices)
}

/// Parse `ARCS.CSV` content, reversing rows into attacker-progress direction.
pub fn parse_arcs(text: &str) -> Result<Vec<Arc>, ParseError> {
    parse_arcs_with(text, ArcDirection::Reversed)
}

/// Parse `ARCS.CSV` with an explicit orientation. Rows have at least two
/// integer fields; MULVAL's trailing `-1` (and anything after the second
/// field) is checked to be an integer and otherwise ignored.
pub fn parse_arcs_with(text: &str, direction: ArcDirection) -> Result<Vec<Arc>, ParseError> {
    let mut arcs = Vec::new();
    for (line, raw) in records(text) {
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(ParseError::ArcFieldCount {
                line,
                found: fields.len(),
            });
        }
        let mut values = Vec::with_capacity(fields.len());
        for field in &fields {
            let v: i64 = field.parse().map_err(|_| ParseError::InvalidArcField {
                line,
                text: field.to_string(),
            })?;
            values.push(v);
        }
        let endpoint = |v: i64| -> Result<VertexId, ParseError> {
            if v >= 1 && v <= i64::from(u32::MAX) {
                Ok(v as VertexId)
            } else {
                Err(ParseError::InvalidArcEndpoint { line, value: v })
            }
        };
        let (first, second) = (endpoint(values[0])?, endpoint(values[1])?);
        let arc = match direction {
            ArcDirection::Reversed => Arc {
                src: second,
                dst: first,
            },
            ArcDirection::AsWritten => Arc {
                src: first,
                dst: second,
            },
        };
        arcs.push(arc);
    }
    Ok(arcs)
}

/// Split a vertex label into predicate name and argument list.
///
/// A label parses as `name(a1,...,an)` when the name is a bare identifier and
/// the argument list closes the label with balanced parentheses and quotes.
/// Commas split arguments only at the top nesting level and outside single or
/// double quotes; quote characters are preserved verbatim in the arguments.
/// Anything else (rule labels like `RULE 2 (remote exploit)`, free text)
/// yields `name = label, args = []`. Never fails.
pub fn parse_predicate(label: &str) -> Predicate {
    let fallback = || Predicate {
        name: label.to_string(),
        args: Vec::new(),
    };
    let Some(open) = label.find('(') else {
        return fallback();
    };
    if open == 0 || !label.ends_with(')') {
        return fallback();
    }
    let name = &label[..open];
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return fallback();
    }
    let inner = &label[open + 1..label.len() - 1];
    let mut args = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut in_single = false;
    let mut in_double = false;
    for ch in inner.chars() {
        match ch {
            '\'' if !in_double => {
                in_single = !in_single;
                current.push(ch);
            }
            '"' if !in_single => {
                in_double = !in_double;
                current.push(ch);
            }
            '(' if !in_single && !in_double => {
                depth += 1;
                current.push(ch);
            }
            ')' if !in_single && !in_double => {
                if depth == 0 {
                    return fallback();
                }
                depth -= 1;
                current.push(ch);
            }
            ',' if depth == 0 && !in_single && !in_double => {
                args.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    if depth != 0 || in_single || in_double {
        return fallback();
    }
    if inner.is_empty() {
        return Predicate {
            name: name.to_string(),
            args: Vec::new(),
        };
    }
    args.push(current);
    Predicate {
        name: name.to_string(),
        args,
    }
}

/// A validated, immutable attack graph.
///
/// Vertices iterate in ascending id order; successor lists are sorted
/// ascending; exact duplicate arcs are collapsed at build time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackGraph {
    vertices: BTreeMap<VertexId, Vertex>,
    arcs: Vec<Arc>,
    successors: BTreeMap<VertexId, Vec<VertexId>>,
    acyclic: bool,
}

/// Build a validated graph from parsed vertices and arcs.
pub fn build_graph(vertices: Vec<Vertex>, arcs: Vec<Arc>) -> Result<AttackGraph, GraphError> {
    let mut by_id: BTreeMap<VertexId, Vertex> = BTreeMap::new();
    for v in vertices {
        if by_id.insert(v.id, v.clone()).is_some() {
            return Err(GraphError::DuplicateVertex(v.id));
        }
    }
    let mut dangling = Vec::new();
    for arc in &arcs {
        if arc.src == arc.dst {
            return Err(GraphError::SelfLoop(arc.src));
        }
        if !by_id.contains_key(&arc.src) || !by_id.contains_key(&arc.dst) {
            dangling.push(*arc);
        }
    }
    if !dangling.is_empty() {
        return Err(GraphError::DanglingArcs(dangling));
    }
    let unique: BTreeSet<Arc> = arcs.into_iter().collect();
    let arcs: Vec<Arc> = unique.into_iter().collect();
    let mut successors: BTreeMap<VertexId, Vec<VertexId>> =
        by_id.keys().map(|&id| (id, Vec::new())).collect();
    for arc in &arcs {
        successors
            .get_mut(&arc.src)
            .expect("validated")
            .push(arc.dst);
    }
    // Arcs are sorted by (src, dst), so each successor list comes out sorted.
    let mut graph = AttackGraph {
        vertices: by_id,
        arcs,
        successors,
        acyclic: true,
    };
    graph.acyclic = graph.compute_acyclic();
    Ok(graph)
}

impl AttackGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.vertices.contains_key(&id)
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    /// Vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    /// Vertex ids in ascending order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    /// Arcs sorted by (src, dst).
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn has_arc(&self, src: VertexId, dst: VertexId) -> bool {
        self.arcs.binary_search(&Arc { src, dst }).is_ok()
    }

    /// Successors of `id` in ascending order; empty for unknown vertices.
    pub fn successors(&self, id: VertexId) -> &[VertexId] {
        self.successors.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    fn compute_acyclic(&self) -> bool {
        // Iterative three-color DFS over ascending ids.
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color: BTreeMap<VertexId, u8> =
            self.vertices.keys().map(|&id| (id, WHITE)).collect();
        for &start in self.vertices.keys() {
            if color[&start] != WHITE {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            color.insert(start, GRAY);
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let succ = self.successors(v);
                if *next < succ.len() {
                    let child = succ[*next];
                    *next += 1;
                    match color[&child] {
                        WHITE => {
                            color.insert(child, GRAY);
                            stack.push((child, 0));
                        }
                        GRAY => return false,
                        _ => {}
                    }
                } else {
                    color.insert(v, BLACK);
                    stack.pop();
                }
            }
        }
        true
    }

    /// Predicate of a vertex label; `None` for unknown vertices.
    pub fn predicate(&self, id: VertexId) -> Option<Predicate> {
        self.vertex(id).map(|v| parse_predicate(&v.label))
    }

    /// Re-serialize vertices in MULVAL CSV form (labels always quoted).
    pub fn vertices_csv(&self) -> String {
        let mut out = String::new();
        for v in self.vertices.values() {
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{}\n",
                v.id, v.label, v.kind, v.metric
            ));
        }
        out
    }

    /// Re-serialize arcs in MULVAL CSV form under the given orientation.
    pub fn arcs_csv(&self, direction: ArcDirection) -> String {
        let mut out = String::new();
        for a in &self.arcs {
            match direction {
                ArcDirection::Reversed => out.push_str(&format!("{},{},-1\n", a.dst, a.src)),
                ArcDirection::AsWritten => out.push_str(&format!("{},{},-1\n", a.src, a.dst)),
            }
        }
        out
    }
}

fn dot_escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render the graph as deterministic Graphviz DOT text.
///
/// With `scores`, nodes are labeled `id: label [score]`. With `highlight`,
/// the arcs along that path are drawn red. Identical inputs produce
/// byte-identical output.
pub fn export_dot(
    graph: &AttackGraph,
    scores: Option<&ScoreAssignment>,
    highlight: Option<&[VertexId]>,
) -> Result<String, DotError> {
    let mut red: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    if let Some(path) = highlight {
        for &v in path {
            if !graph.contains(v) {
                return Err(DotError::MissingVertex(v));
            }
        }
        for pair in path.windows(2) {
            let (src, dst) = (pair[0], pair[1]);
            if !graph.has_arc(src, dst) {
                return Err(DotError::NotAnArc { src, dst });
            }
            red.insert((src, dst));
        }
    }
    let mut out = String::from("digraph attack_graph {\n");
    if graph.vertex_count() > 0 {
        out.push_str("    rankdir=LR;\n    node [shape=box];\n");
    }
    for v in graph.vertices() {
        let label = match scores.and_then(|s| s.value(v.id)) {
            Some(value) => format!("{}: {} [{}]", v.id, dot_escape(&v.label), value),
            None => format!("{}: {}", v.id, dot_escape(&v.label)),
        };
        out.push_str(&format!("    {} [label=\"{}\"];\n", v.id, label));
    }
    for a in graph.arcs() {
        if red.contains(&(a.src, a.dst)) {
            out.push_str(&format!(
                "    {} -> {} [color=red penwidth=2.0];\n",
                a.src, a.dst
            ));
        } else {
            out.push_str(&format!("    {} -> {};\n", a.src, a.dst));
        }
    }
    out.push_str("}\n");
    Ok(out)
}
