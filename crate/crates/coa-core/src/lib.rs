//! Attack course-of-action (COA) planning over MULVAL attack graphs.
//!
//! The pipeline: ingest a MULVAL vertex/arc pair into an [`graph::AttackGraph`],
//! assign per-node attack values from CVSS vulnerability data
//! ([`scoring::assign_node_scores`]), derive edge weights, then either find the
//! maximum-value attack path with best-first search ([`search::plan`]) or plan
//! under time-varying network dynamics with Monte-Carlo tree search
//! ([`temporal::mcts_plan`], [`temporal::compare`]).

pub mod graph;
pub mod report;
pub mod scoring;
pub mod search;
pub mod temporal;

pub use graph::{Arc, ArcDirection, AttackGraph, Predicate, Vertex, VertexId, VertexKind};
pub use scoring::{EdgeWeightMode, ScoreAssignment, VulnDb, VulnRecord, WeightedGraph};
pub use search::{HeuristicMode, HeuristicTable, SearchResult};
pub use temporal::{CompareOutcome, MctsConfig, MctsResult, TimeVaryingModel, ValueEstimate};
