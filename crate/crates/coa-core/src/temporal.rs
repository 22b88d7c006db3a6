//! Planning under time-varying network dynamics.
//!
//! The dynamics model is per-step independent Bernoulli edge availability
//! plus multiplicative Gaussian drift on node scores (clamped to [0, 10];
//! the pinned source/target constants never drift). [`mcts_plan`] runs UCT
//! Monte-Carlo tree search over sampled snapshots; [`evaluate_path`]
//! estimates what a fixed path is worth under the dynamics; [`compare`] puts
//! the static optimum and the MCTS recommendation side by side.
//!
//! All randomness comes from one seeded ChaCha generator per run with one
//! substream per iteration (or trial) index, so results are bit-identical
//! for a fixed seed regardless of execution order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::scoring::{ScoreAssignment, WeightedGraph};
use crate::search::{plan, HeuristicMode, SearchError, SearchResult};

#[derive(Debug, Error, PartialEq)]
pub enum TemporalError {
    #[error("availability {value} for arc {src} -> {dst} outside [0, 1]")]
    AvailabilityOutOfRange {
        src: VertexId,
        dst: VertexId,
        value: f64,
    },
    #[error("no arc {src} -> {dst} in the base graph")]
    UnknownArc { src: VertexId, dst: VertexId },
    #[error("score drift must be finite and >= 0, got {0}")]
    InvalidDrift(f64),
    #[error("horizon must be >= 1")]
    InvalidHorizon,
    #[error("step {step} outside horizon {horizon}")]
    StepOutOfRange { step: u32, horizon: u32 },
    #[error("iterations must be >= 1")]
    InvalidIterations,
    #[error("trials must be >= 1")]
    InvalidTrials,
    #[error("path must have at least one vertex")]
    EmptyPath,
    #[error("path revisits vertex {0}")]
    PathNotSimple(VertexId),
    #[error("path step {src} -> {dst} is not an arc of the base graph")]
    PathNotInGraph { src: VertexId, dst: VertexId },
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Stochastic network dynamics over a weighted base graph.
#[derive(Debug, Clone)]
pub struct TimeVaryingModel {
    base: WeightedGraph,
    availability: BTreeMap<(VertexId, VertexId), f64>,
    score_drift: f64,
    horizon: u32,
    seed: u64,
}

impl TimeVaryingModel {
    /// Model with one availability for every arc.
    pub fn uniform(
        base: WeightedGraph,
        availability: f64,
        score_drift: f64,
        horizon: u32,
        seed: u64,
    ) -> Result<Self, TemporalError> {
        if horizon < 1 {
            return Err(TemporalError::InvalidHorizon);
        }
        if !score_drift.is_finite() || score_drift < 0.0 {
            return Err(TemporalError::InvalidDrift(score_drift));
        }
        let mut map = BTreeMap::new();
        for arc in base.graph().arcs() {
            if !(0.0..=1.0).contains(&availability) {
                return Err(TemporalError::AvailabilityOutOfRange {
                    src: arc.src,
                    dst: arc.dst,
                    value: availability,
                });
            }
            map.insert((arc.src, arc.dst), availability);
        }
        Ok(TimeVaryingModel {
            base,
            availability: map,
            score_drift,
            horizon,
            seed,
        })
    }

    /// Override the availability of a single arc.
    pub fn set_availability(
        &mut self,
        src: VertexId,
        dst: VertexId,
        p: f64,
    ) -> Result<(), TemporalError> {
        if !self.availability.contains_key(&(src, dst)) {
            return Err(TemporalError::UnknownArc { src, dst });
        }
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(TemporalError::AvailabilityOutOfRange { src, dst, value: p });
        }
        self.availability.insert((src, dst), p);
        Ok(())
    }

    pub fn base(&self) -> &WeightedGraph {
        &self.base
    }

    pub fn availability(&self, src: VertexId, dst: VertexId) -> Option<f64> {
        self.availability.get(&(src, dst)).copied()
    }

    pub fn score_drift(&self) -> f64 {
        self.score_drift
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Upper bound on any episode reward: the sum of all node values.
    pub fn reward_bound(&self) -> f64 {
        self.base.scores().total()
    }
}

/// One sampled time step: which arcs are up, the drifted node values, and
/// the arc weights those values imply. Arcs are drawn in (src, dst) order and
/// node drifts in ascending id order, so generator consumption is
/// reproducible.
struct StepSample {
    up: BTreeMap<(VertexId, VertexId), bool>,
    scores: ScoreAssignment,
    weights: BTreeMap<(VertexId, VertexId), f64>,
}

fn sample_step(model: &TimeVaryingModel, rng: &mut ChaCha12Rng) -> StepSample {
    let mut up = BTreeMap::new();
    for (&arc, &p) in &model.availability {
        let u: f64 = rng.random();
        up.insert(arc, u < p);
    }
    let base_scores = model.base.scores();
    let mut drifted: BTreeMap<VertexId, f64> = BTreeMap::new();
    for (id, value) in base_scores.values() {
        if model.score_drift == 0.0 || id == base_scores.source() || id == base_scores.target() {
            drifted.insert(id, value);
            continue;
        }
        let z: f64 = StandardNormal.sample(rng);
        let noisy = value * (model.score_drift * z).exp();
        drifted.insert(id, noisy.clamp(0.0, 10.0));
    }
    let mut weights = BTreeMap::new();
    for arc in model.base.graph().arcs() {
        weights.insert(
            (arc.src, arc.dst),
            crate::scoring::arc_weight(model.base.mode(), drifted[&arc.src], drifted[&arc.dst]),
        );
    }
    let scores = ScoreAssignment::from_values(drifted, base_scores.source(), base_scores.target());
    StepSample {
        up,
        scores,
        weights,
    }
}

/// Sample the network state at one time step.
///
/// Each arc is present independently with its availability; node scores are
/// multiplied by `exp(N(0, drift^2))` and clamped to [0, 10] (source/target
/// constants never drift). Deterministic given the generator state.
pub fn sample_snapshot(
    model: &TimeVaryingModel,
    step: u32,
    rng: &mut ChaCha12Rng,
) -> Result<WeightedGraph, TemporalError> {
    if step >= model.horizon {
        return Err(TemporalError::StepOutOfRange {
            step,
            horizon: model.horizon,
        });
    }
    let sample = sample_step(model, rng);
    let graph = model.base.graph();
    let vertices: Vec<_> = graph.vertices().cloned().collect();
    let arcs = graph
        .arcs()
        .iter()
        .filter(|a| sample.up[&(a.src, a.dst)])
        .copied()
        .collect();
    let snapshot_graph =
        crate::graph::build_graph(vertices, arcs).expect("subset of a valid graph");
    Ok(crate::scoring::edge_weights(
        snapshot_graph,
        sample.scores,
        model.base.mode(),
    ))
}

/// UCT selection score: `mean + c * sqrt(ln(parent) / child)`, with infinity
/// for unvisited children so they are always tried first.
pub fn uct_score(mean_reward: f64, child_visits: u64, parent_visits: u64, c: f64) -> f64 {
    if child_visits == 0 {
        return f64::INFINITY;
    }
    mean_reward + c * ((parent_visits as f64).ln() / child_visits as f64).sqrt()
}

/// Monte-Carlo tree search configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub iterations: u32,
    pub exploration_c: f64,
    pub rollout_depth_cap: u32,
    pub seed: u64,
    /// Zero the reward of episodes that never reach the target (ablation);
    /// the default keeps partial credit so the signal stays dense.
    pub strict_goal: bool,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            iterations: 10_000,
            exploration_c: 0.7,
            rollout_depth_cap: 64,
            seed: 0,
            strict_goal: false,
        }
    }
}

/// Visit statistics for one action out of the search root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionStat {
    pub src: VertexId,
    pub dst: VertexId,
    pub visits: u64,
    pub mean_reward: f64,
}

/// Outcome of an MCTS run.
#[derive(Debug, Clone, PartialEq)]
pub struct MctsResult {
    /// Max-visit line from the root (starts at the source).
    pub recommended_path: Vec<VertexId>,
    /// Mean episode reward recorded at the end of the recommended line.
    pub expected_value: f64,
    pub root_visits: u64,
    pub per_action: Vec<ActionStat>,
}

/// MCTS tree node: one (vertex, step, visited-set) state.
struct TreeNode {
    vertex: VertexId,
    step: u32,
    visited: Vec<VertexId>,
    visit_count: u64,
    total_reward: f64,
    /// Action (arc to successor) -> child node, keyed by destination id.
    children: BTreeMap<VertexId, usize>,
}

impl TreeNode {
    fn new(vertex: VertexId, step: u32, visited: Vec<VertexId>) -> Self {
        TreeNode {
            vertex,
            step,
            visited,
            visit_count: 0,
            total_reward: 0.0,
            children: BTreeMap::new(),
        }
    }

    fn mean(&self) -> f64 {
        if self.visit_count == 0 {
            0.0
        } else {
            self.total_reward / self.visit_count as f64
        }
    }
}

/// Successors of `vertex` whose arc is up in `sample` and which the episode
/// has not visited yet, in ascending id order.
fn available_moves(
    model: &TimeVaryingModel,
    sample: &StepSample,
    vertex: VertexId,
    visited: &[VertexId],
) -> Vec<VertexId> {
    model
        .base
        .graph()
        .successors(vertex)
        .iter()
        .copied()
        .filter(|&s| sample.up[&(vertex, s)] && !visited.contains(&s))
        .collect()
}

/// Plan over the time-varying model with UCT Monte-Carlo tree search.
///
/// Each iteration selects through the tree by UCT over the actions available
/// in a freshly sampled snapshot at the node's step, expands one untried
/// action, rolls out uniformly at random, and backpropagates the episode
/// reward (the sum of traversed arc weights, partial credit unless
/// `strict_goal`). Deterministic for a fixed `config.seed`.
pub fn mcts_plan(
    model: &TimeVaryingModel,
    source: VertexId,
    target: VertexId,
    config: &MctsConfig,
) -> Result<MctsResult, TemporalError> {
    if !model.base.graph().contains(source) {
        return Err(SearchError::UnknownVertex(source).into());
    }
    if !model.base.graph().contains(target) {
        return Err(SearchError::UnknownVertex(target).into());
    }
    if source == target {
        return Err(SearchError::DegenerateQuery.into());
    }
    if config.iterations < 1 {
        return Err(TemporalError::InvalidIterations);
    }

    let bound = model.reward_bound();
    let normalize = |reward: f64| if bound > 0.0 { reward / bound } else { reward };

    let mut arena: Vec<TreeNode> = vec![TreeNode::new(source, 0, vec![source])];

    for iteration in 0..config.iterations {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::from(iteration));

        let mut line = vec![0usize];
        let mut node_id = 0usize;
        let mut reward = 0.0f64;
        let mut reached_target = arena[node_id].vertex == target;

        // Selection and expansion.
        loop {
            let (vertex, step) = (arena[node_id].vertex, arena[node_id].step);
            if vertex == target || step >= model.horizon {
                break;
            }
            let sample = sample_step(model, &mut rng);
            let moves = available_moves(model, &sample, vertex, &arena[node_id].visited);
            if moves.is_empty() {
                break;
            }
            let untried: Vec<VertexId> = moves
                .iter()
                .copied()
                .filter(|m| !arena[node_id].children.contains_key(m))
                .collect();
            let chosen = if let Some(&first) = untried.first() {
                // Expansion: lowest-id untried action.
                let mut visited = arena[node_id].visited.clone();
                visited.push(first);
                let child = TreeNode::new(first, step + 1, visited);
                arena.push(child);
                let child_id = arena.len() - 1;
                arena[node_id].children.insert(first, child_id);
                reward += sample.weights[&(vertex, first)];
                line.push(child_id);
                node_id = child_id;
                if first == target {
                    reached_target = true;
                }
                // Rollout continues from the expanded node.
                let (mut pos, mut step_now) = (first, step + 1);
                let mut visited = arena[node_id].visited.clone();
                let mut depth = 0u32;
                while pos != target && step_now < model.horizon && depth < config.rollout_depth_cap
                {
                    let sample = sample_step(model, &mut rng);
                    let moves = available_moves(model, &sample, pos, &visited);
                    if moves.is_empty() {
                        break;
                    }
                    let pick = moves[rng.random_range(0..moves.len())];
                    reward += sample.weights[&(pos, pick)];
                    visited.push(pick);
                    pos = pick;
                    step_now += 1;
                    depth += 1;
                    if pos == target {
                        reached_target = true;
                    }
                }
                None
            } else {
                // All available actions tried: UCT over their children.
                let parent_visits = arena[node_id].visit_count.max(1);
                let mut best: Option<(f64, VertexId)> = None;
                for &m in &moves {
                    let child = &arena[arena[node_id].children[&m]];
                    let score = uct_score(
                        normalize(child.mean()),
                        child.visit_count,
                        parent_visits,
                        config.exploration_c,
                    );
                    let replace = match best {
                        None => true,
                        // Strict greater keeps the lowest-id action on ties.
                        Some((best_score, _)) => score > best_score,
                    };
                    if replace {
                        best = Some((score, m));
                    }
                }
                best.map(|(_, m)| m)
            };
            match chosen {
                None => break, // expansion + rollout already handled
                Some(m) => {
                    reward += sample.weights[&(vertex, m)];
                    let child_id = arena[node_id].children[&m];
                    line.push(child_id);
                    node_id = child_id;
                    if m == target {
                        reached_target = true;
                    }
                }
            }
        }

        if config.strict_goal && !reached_target {
            reward = 0.0;
        }

        for &id in &line {
            arena[id].visit_count += 1;
            arena[id].total_reward += reward;
        }
    }

    // Recommendation: follow max-visit children (lowest id on ties).
    let mut path = vec![source];
    let mut node_id = 0usize;
    loop {
        let node = &arena[node_id];
        let mut best: Option<(u64, VertexId, usize)> = None;
        for (&dst, &child_id) in &node.children {
            let visits = arena[child_id].visit_count;
            let replace = match best {
                None => true,
                Some((best_visits, _, _)) => visits > best_visits,
            };
            if replace {
                best = Some((visits, dst, child_id));
            }
        }
        match best {
            Some((_, dst, child_id)) => {
                path.push(dst);
                node_id = child_id;
                if dst == target {
                    break;
                }
            }
            None => break,
        }
    }

    let root = &arena[0];
    let per_action = root
        .children
        .iter()
        .map(|(&dst, &child_id)| ActionStat {
            src: source,
            dst,
            visits: arena[child_id].visit_count,
            mean_reward: arena[child_id].mean(),
        })
        .collect();

    debug_assert!(tree_is_sane(&arena));

    Ok(MctsResult {
        recommended_path: path,
        expected_value: arena[node_id].mean(),
        root_visits: root.visit_count,
        per_action,
    })
}

/// Every node's visit count covers its children's; used as a debug check and
/// exercised directly by the tests.
fn tree_is_sane(arena: &[TreeNode]) -> bool {
    arena.iter().all(|node| {
        let child_sum: u64 = node
            .children
            .values()
            .map(|&id| arena[id].visit_count)
            .sum();
        node.visit_count >= child_sum && node.total_reward.is_finite()
    })
}

/// Monte-Carlo estimate of following a fixed path under the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u32,
    /// Fraction of trials that walked the whole path within the horizon.
    pub success_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Simulate `trials` episodes in which the attacker follows `path`, advancing
/// one arc per step only when that arc is up in the step's snapshot, and
/// aborting with the accrued value at the horizon.
pub fn evaluate_path(
    model: &TimeVaryingModel,
    path: &[VertexId],
    trials: u32,
    seed: u64,
) -> Result<ValueEstimate, TemporalError> {
    if trials < 1 {
        return Err(TemporalError::InvalidTrials);
    }
    if path.is_empty() {
        return Err(TemporalError::EmptyPath);
    }
    let graph = model.base.graph();
    let mut seen = Vec::new();
    for &v in path {
        if !graph.contains(v) {
            return Err(SearchError::UnknownVertex(v).into());
        }
        if seen.contains(&v) {
            return Err(TemporalError::PathNotSimple(v));
        }
        seen.push(v);
    }
    for pair in path.windows(2) {
        if !graph.has_arc(pair[0], pair[1]) {
            return Err(TemporalError::PathNotInGraph {
                src: pair[0],
                dst: pair[1],
            });
        }
    }

    let mut rewards = Vec::with_capacity(trials as usize);
    let mut successes = 0u32;
    for trial in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(trial));
        let mut pos = 0usize;
        let mut accrued = 0.0f64;
        for _step in 0..model.horizon {
            if pos + 1 >= path.len() {
                break;
            }
            let sample = sample_step(model, &mut rng);
            let (u, v) = (path[pos], path[pos + 1]);
            if sample.up[&(u, v)] {
                accrued += sample.weights[&(u, v)];
                pos += 1;
            }
        }
        if pos + 1 >= path.len() {
            successes += 1;
        }
        rewards.push(accrued);
    }

    let n = trials as f64;
    // Identical episodes (degenerate dynamics) have their common value as the
    // mean; bypass the summation so no rounding noise creeps in.
    let all_equal = rewards.windows(2).all(|w| w[0] == w[1]);
    let mean = if all_equal {
        rewards[0]
    } else {
        rewards.iter().sum::<f64>() / n
    };
    let (std_error, warning) = if trials > 1 {
        let variance = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
        ((variance / n).sqrt(), None)
    } else {
        (
            0.0,
            Some("single trial: std error is degenerate".to_string()),
        )
    };
    Ok(ValueEstimate {
        mean,
        std_error,
        trials,
        success_rate: f64::from(successes) / n,
        warning,
    })
}

/// Which strategy won the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Spatial,
    Mcts,
    Tie,
}

/// Side-by-side result of the static plan and the MCTS plan under dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub spatial: SearchResult,
    pub spatial_estimate: ValueEstimate,
    pub mcts: MctsResult,
    pub mcts_estimate: ValueEstimate,
    pub winner: Winner,
}

/// Run the spatial plan on the base graph, evaluate it under the dynamics,
/// run MCTS, evaluate its recommendation, and flag the higher mean. Both
/// evaluations share the model seed (common random numbers).
pub fn compare(
    model: &TimeVaryingModel,
    source: VertexId,
    target: VertexId,
    config: &MctsConfig,
    trials: u32,
) -> Result<CompareOutcome, TemporalError> {
    let spatial = plan(&model.base, source, target, HeuristicMode::ReachableSum)?;
    let spatial_estimate = evaluate_path(model, &spatial.path, trials, model.seed)?;
    let mcts = mcts_plan(model, source, target, config)?;
    let mcts_estimate = evaluate_path(model, &mcts.recommended_path, trials, model.seed)?;
    let winner = if mcts_estimate.mean > spatial_estimate.mean {
        Winner::Mcts
    } else if spatial_estimate.mean > mcts_estimate.mean {
        Winner::Spatial
    } else {
        Winner::Tie
    };
    Ok(CompareOutcome {
        spatial,
        spatial_estimate,
        mcts,
        mcts_estimate,
        winner,
    })
}
