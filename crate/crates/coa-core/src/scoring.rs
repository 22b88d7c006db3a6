//! CVSS-driven node values and edge weights.
//!
//! Node rule set: the attack source is pinned to 0.01 and the target to 100;
//! a `vulExists` node gets `baseScore * exploitabilityScore / 10` for its CVE;
//! code-execution and file-access nodes get 1.5; everything else gets 0.
//! Edge weights are derived from the adjacent node values (destination by
//! default), so the accumulated value of a path is the value of the nodes it
//! conquers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AttackGraph, VertexId};

/// Value pinned to the attack source node.
pub const SOURCE_VALUE: f64 = 0.01;
/// Value pinned to the attack target node.
pub const TARGET_VALUE: f64 = 100.0;
/// Value for code-execution / file-access nodes.
pub const CRITICAL_ACTION_VALUE: f64 = 1.5;

/// One CVE record: base severity and exploitability, both on [0, 10].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VulnRecord {
    pub cve_id: String,
    pub base_score: f64,
    pub exploitability_score: f64,
}

/// CVE id -> record, keyed for deterministic iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VulnDb {
    records: BTreeMap<String, VulnRecord>,
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("{field} {value} for {cve_id} outside [0, 10]")]
    ScoreOutOfRange {
        cve_id: String,
        field: &'static str,
        value: f64,
    },
    #[error("duplicate CVE id {0}")]
    DuplicateCve(String),
    #[error("empty CVE id")]
    EmptyCveId,
    #[error("vulnerability db format: {0}")]
    Format(String),
    #[error("score_vul input {name}={value} outside [0, 10]")]
    Domain { name: &'static str, value: f64 },
    #[error("vertex {0} not in graph")]
    UnknownVertex(VertexId),
    #[error("source and target must be different vertices")]
    SourceIsTarget,
    #[error("vertex {vertex}: CVE {cve_id} not found in vulnerability db")]
    MissingCve { vertex: VertexId, cve_id: String },
    #[error("vertex {vertex}: vulExists label has no CVE argument")]
    VulExistsArity { vertex: VertexId },
}

fn check_range(cve_id: &str, field: &'static str, value: f64) -> Result<(), ScoringError> {
    if !(0.0..=10.0).contains(&value) || !value.is_finite() {
        return Err(ScoringError::ScoreOutOfRange {
            cve_id: cve_id.to_string(),
            field,
            value,
        });
    }
    Ok(())
}

impl VulnDb {
    pub fn new() -> Self {
        Self::default()
    }

    /// Load from text, sniffing JSON (leading `[`) vs CSV with header.
    pub fn parse(text: &str) -> Result<Self, ScoringError> {
        if text.trim_start().starts_with('[') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    /// JSON array of `{cveId, baseScore, exploitabilityScore}` objects.
    pub fn from_json(text: &str) -> Result<Self, ScoringError> {
        let records: Vec<VulnRecord> =
            serde_json::from_str(text).map_err(|e| ScoringError::Format(e.to_string()))?;
        Self::from_records(records)
    }

    /// CSV `cveId,baseScore,exploitabilityScore` with a mandatory header line.
    pub fn from_csv(text: &str) -> Result<Self, ScoringError> {
        let mut lines = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| ScoringError::Format("missing header line".into()))?;
        let header_fields: Vec<String> = header
            .split(',')
            .map(|f| f.trim().to_ascii_lowercase())
            .collect();
        if header_fields != ["cveid", "basescore", "exploitabilityscore"] {
            return Err(ScoringError::Format(format!(
                "expected header cveId,baseScore,exploitabilityScore, found {header:?}"
            )));
        }
        let mut records = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(ScoringError::Format(format!(
                    "expected 3 fields, found {} in {line:?}",
                    fields.len()
                )));
            }
            let base: f64 = fields[1]
                .parse()
                .map_err(|_| ScoringError::Format(format!("bad baseScore in {line:?}")))?;
            let expl: f64 = fields[2].parse().map_err(|_| {
                ScoringError::Format(format!("bad exploitabilityScore in {line:?}"))
            })?;
            records.push(VulnRecord {
                cve_id: fields[0].to_string(),
                base_score: base,
                exploitability_score: expl,
            });
        }
        Self::from_records(records)
    }

    pub fn from_records(records: Vec<VulnRecord>) -> Result<Self, ScoringError> {
        let mut db = Self::new();
        for record in records {
            db.insert(record)?;
        }
        Ok(db)
    }

    pub fn insert(&mut self, record: VulnRecord) -> Result<(), ScoringError> {
        if record.cve_id.is_empty() {
            return Err(ScoringError::EmptyCveId);
        }
        check_range(&record.cve_id, "baseScore", record.base_score)?;
        check_range(
            &record.cve_id,
            "exploitabilityScore",
            record.exploitability_score,
        )?;
        if self.records.contains_key(&record.cve_id) {
            return Err(ScoringError::DuplicateCve(record.cve_id));
        }
        self.records.insert(record.cve_id.clone(), record);
        Ok(())
    }

    pub fn get(&self, cve_id: &str) -> Option<&VulnRecord> {
        self.records.get(cve_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &VulnRecord> {
        self.records.values()
    }
}

/// Vulnerability score of one node: `baseScore * exploitabilityScore / 10`.
pub fn score_vul(base_score: f64, exploitability_score: f64) -> Result<f64, ScoringError> {
    if !(0.0..=10.0).contains(&base_score) || !base_score.is_finite() {
        return Err(ScoringError::Domain {
            name: "baseScore",
            value: base_score,
        });
    }
    if !(0.0..=10.0).contains(&exploitability_score) || !exploitability_score.is_finite() {
        return Err(ScoringError::Domain {
            name: "exploitabilityScore",
            value: exploitability_score,
        });
    }
    Ok(base_score * exploitability_score / 10.0)
}

/// What to do when a `vulExists` node names a CVE absent from the db.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CvePolicy {
    /// Fail the assignment (default, so silent zero-scores cannot skew plans).
    #[default]
    Strict,
    /// Score the node 0 and record a warning.
    Lenient,
}

/// Knobs for [`assign_node_scores`].
#[derive(Debug, Clone)]
pub struct ScoringOptions {
    pub cve_policy: CvePolicy,
    /// Predicate names that earn the critical-action value of 1.5.
    pub critical_predicates: Vec<String>,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        Self {
            cve_policy: CvePolicy::Strict,
            critical_predicates: vec!["execCode".into(), "accessFile".into()],
        }
    }
}

/// Per-vertex attack values, with source and target pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreAssignment {
    values: BTreeMap<VertexId, f64>,
    source: VertexId,
    target: VertexId,
    warnings: Vec<String>,
}

impl ScoreAssignment {
    /// Build an assignment from explicit values, bypassing the rule set.
    /// Nothing is pinned or validated; callers own the invariants.
    pub fn from_values(
        values: BTreeMap<VertexId, f64>,
        source: VertexId,
        target: VertexId,
    ) -> ScoreAssignment {
        ScoreAssignment {
            values,
            source,
            target,
            warnings: Vec::new(),
        }
    }

    pub fn value(&self, id: VertexId) -> Option<f64> {
        self.values.get(&id).copied()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    /// Warnings recorded under the lenient CVE policy.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Entries in ascending vertex-id order.
    pub fn values(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.values.iter().map(|(&id, &v)| (id, v))
    }

    /// Sum of all node values (used as the reward bound in temporal search).
    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }

    /// Multiply every stored value by `factor`, source and target included.
    /// The pinned constants are deliberately not re-forced.
    pub fn scaled(&self, factor: f64) -> ScoreAssignment {
        ScoreAssignment {
            values: self
                .values
                .iter()
                .map(|(&id, &v)| (id, v * factor))
                .collect(),
            source: self.source,
            target: self.target,
            warnings: self.warnings.clone(),
        }
    }
}

/// Strip one pair of surrounding single or double quotes.
fn strip_quotes(arg: &str) -> &str {
    let t = arg.trim();
    if t.len() >= 2
        && ((t.starts_with('\'') && t.ends_with('\'')) || (t.starts_with('"') && t.ends_with('"')))
    {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

/// Assign an attack value to every vertex of `graph`.
///
/// Source and target override every other rule. `vulExists` nodes look up the
/// CVE named by their second argument (MULVAL convention, quotes stripped).
pub fn assign_node_scores(
    graph: &AttackGraph,
    db: &VulnDb,
    source: VertexId,
    target: VertexId,
    options: &ScoringOptions,
) -> Result<ScoreAssignment, ScoringError> {
    if !graph.contains(source) {
        return Err(ScoringError::UnknownVertex(source));
    }
    if !graph.contains(target) {
        return Err(ScoringError::UnknownVertex(target));
    }
    if source == target {
        return Err(ScoringError::SourceIsTarget);
    }
    let mut values = BTreeMap::new();
    let mut warnings = Vec::new();
    for vertex in graph.vertices() {
        let id = vertex.id;
        if id == source {
            values.insert(id, SOURCE_VALUE);
            continue;
        }
        if id == target {
            values.insert(id, TARGET_VALUE);
            continue;
        }
        let predicate = crate::graph::parse_predicate(&vertex.label);
        let value = if predicate.name == "vulExists" {
            match predicate.args.get(1).map(|a| strip_quotes(a).to_string()) {
                Some(cve_id) => match db.get(&cve_id) {
                    Some(record) => score_vul(record.base_score, record.exploitability_score)?,
                    None => match options.cve_policy {
                        CvePolicy::Strict => {
                            return Err(ScoringError::MissingCve { vertex: id, cve_id })
                        }
                        CvePolicy::Lenient => {
                            warnings.push(format!(
                                "vertex {id}: CVE {cve_id} not in vulnerability db, scored 0"
                            ));
                            0.0
                        }
                    },
                },
                None => match options.cve_policy {
                    CvePolicy::Strict => return Err(ScoringError::VulExistsArity { vertex: id }),
                    CvePolicy::Lenient => {
                        warnings.push(format!(
                            "vertex {id}: vulExists label has no CVE argument, scored 0"
                        ));
                        0.0
                    }
                },
            }
        } else if options
            .critical_predicates
            .iter()
            .any(|p| p == &predicate.name)
        {
            CRITICAL_ACTION_VALUE
        } else {
            0.0
        };
        values.insert(id, value);
    }
    Ok(ScoreAssignment {
        values,
        source,
        target,
        warnings,
    })
}

/// Which adjacent node an edge weight reflects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeightMode {
    Src,
    /// Weight of `u -> v` is the value of `v`, so the accumulated value of a
    /// path is the value of the nodes conquered after the source.
    #[default]
    Dst,
    Avg,
}

impl fmt::Display for EdgeWeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeWeightMode::Src => write!(f, "src"),
            EdgeWeightMode::Dst => write!(f, "dst"),
            EdgeWeightMode::Avg => write!(f, "avg"),
        }
    }
}

impl FromStr for EdgeWeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "src" => Ok(EdgeWeightMode::Src),
            "dst" => Ok(EdgeWeightMode::Dst),
            "avg" => Ok(EdgeWeightMode::Avg),
            other => Err(format!("unknown edge-weight mode {other:?} (src|dst|avg)")),
        }
    }
}

/// An attack graph plus per-arc weights derived from node values.
///
/// Absent edges carry no weight internally; the -1 sentinel exists only in
/// the exported adjacency matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    graph: AttackGraph,
    scores: ScoreAssignment,
    mode: EdgeWeightMode,
    weights: BTreeMap<(VertexId, VertexId), f64>,
}

/// Weight of one arc under the given mode and endpoint values.
pub(crate) fn arc_weight(mode: EdgeWeightMode, src_value: f64, dst_value: f64) -> f64 {
    match mode {
        EdgeWeightMode::Src => src_value,
        EdgeWeightMode::Dst => dst_value,
        EdgeWeightMode::Avg => (src_value + dst_value) / 2.0,
    }
}

/// Derive a weight for every arc from the node values.
pub fn edge_weights(
    graph: AttackGraph,
    scores: ScoreAssignment,
    mode: EdgeWeightMode,
) -> WeightedGraph {
    let mut weights = BTreeMap::new();
    for arc in graph.arcs() {
        let src_value = scores.value(arc.src).unwrap_or(0.0);
        let dst_value = scores.value(arc.dst).unwrap_or(0.0);
        weights.insert((arc.src, arc.dst), arc_weight(mode, src_value, dst_value));
    }
    WeightedGraph {
        graph,
        scores,
        mode,
        weights,
    }
}

impl WeightedGraph {
    pub fn graph(&self) -> &AttackGraph {
        &self.graph
    }

    pub fn scores(&self) -> &ScoreAssignment {
        &self.scores
    }

    pub fn mode(&self) -> EdgeWeightMode {
        self.mode
    }

    /// Weight of the arc `src -> dst`, or `None` when no such arc exists.
    pub fn weight(&self, src: VertexId, dst: VertexId) -> Option<f64> {
        self.weights.get(&(src, dst)).copied()
    }

    /// Rebuild with the same graph and mode but different node values.
    pub fn reweighted(&self, scores: ScoreAssignment) -> WeightedGraph {
        edge_weights(self.graph.clone(), scores, self.mode)
    }

    /// Square matrix view in ascending vertex-id order: entry `[i][j]` is the
    /// weight of the arc from the i-th to the j-th vertex, and -1 where no
    /// arc exists (diagonal included).
    pub fn adjacency_matrix(&self) -> Vec<Vec<f64>> {
        let ids: Vec<VertexId> = self.graph.vertex_ids().collect();
        let mut matrix = vec![vec![-1.0; ids.len()]; ids.len()];
        for (i, &src) in ids.iter().enumerate() {
            for (j, &dst) in ids.iter().enumerate() {
                if let Some(w) = self.weight(src, dst) {
                    matrix[i][j] = w;
                }
            }
        }
        matrix
    }
}
