//! JSON report schemas for plan and temporal runs.
//!
//! Reports are deterministic: struct field order is fixed, maps are sorted,
//! and wall-clock timings are kept out of the serialized form so identical
//! inputs produce byte-identical files. `elapsed_micros` is populated only
//! when a caller explicitly asks for timing.

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;
use crate::scoring::WeightedGraph;
use crate::search::{PathStep, SearchResult};
use crate::temporal::{ActionStat, CompareOutcome, ValueEstimate, Winner};

/// Serialized form of a [`SearchResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub kind: String,
    pub source: VertexId,
    pub target: VertexId,
    pub heuristic: String,
    pub edge_weight: String,
    pub path: Vec<VertexId>,
    pub total_value: f64,
    pub expanded: u64,
    pub steps: Vec<PathStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_micros: Option<u64>,
}

impl PlanReport {
    pub fn new(result: &SearchResult, wg: &WeightedGraph, include_timing: bool) -> Self {
        PlanReport {
            kind: "plan".into(),
            source: wg.scores().source(),
            target: wg.scores().target(),
            heuristic: result.heuristic.to_string(),
            edge_weight: wg.mode().to_string(),
            path: result.path.clone(),
            total_value: result.total_value,
            expanded: result.expanded,
            steps: result.per_step.clone(),
            warnings: wg.scores().warnings().to_vec(),
            elapsed_micros: include_timing.then_some(result.elapsed.as_micros() as u64),
        }
    }
}

/// One strategy's side of a temporal comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub path: Vec<VertexId>,
    /// Static path value for the spatial strategy, mean episode reward of the
    /// recommended line for MCTS.
    pub planned_value: f64,
    pub estimate: ValueEstimate,
}

/// Serialized form of a [`CompareOutcome`], the temporal section of the
/// report family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalReport {
    pub kind: String,
    pub source: VertexId,
    pub target: VertexId,
    pub spatial: StrategyReport,
    pub mcts: StrategyReport,
    pub mcts_root_visits: u64,
    pub mcts_per_action: Vec<ActionStat>,
    pub winner: Winner,
}

impl TemporalReport {
    pub fn new(outcome: &CompareOutcome, source: VertexId, target: VertexId) -> Self {
        TemporalReport {
            kind: "temporal".into(),
            source,
            target,
            spatial: StrategyReport {
                path: outcome.spatial.path.clone(),
                planned_value: outcome.spatial.total_value,
                estimate: outcome.spatial_estimate.clone(),
            },
            mcts: StrategyReport {
                path: outcome.mcts.recommended_path.clone(),
                planned_value: outcome.mcts.expected_value,
                estimate: outcome.mcts_estimate.clone(),
            },
            mcts_root_visits: outcome.mcts.root_visits,
            mcts_per_action: outcome.mcts.per_action.clone(),
            winner: outcome.winner,
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report types serialize");
    text.push('\n');
    text
}
