//! Maximum-value attack-path search.
//!
//! [`plan`] runs best-first search over path states ordered by
//! `f(n) = g(n) + h(n)`, where `g` is the value accumulated from the source
//! and `h` an overestimate of the value still attainable, so branch-and-bound
//! pruning never discards an optimum. Paths are simple: revisiting a node
//! would double-count its value. [`brute_force_optimal`] enumerates every
//! simple path on small graphs and serves as the independent oracle.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::scoring::{EdgeWeightMode, WeightedGraph};

/// Default vertex-count guard for [`brute_force_optimal`].
pub const BRUTE_FORCE_GUARD: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("vertex {0} not in graph")]
    UnknownVertex(VertexId),
    #[error("source and target must be different vertices")]
    DegenerateQuery,
    #[error("no path from {from} to {to}")]
    NoPath { from: VertexId, to: VertexId },
    #[error("graph has a cycle; the exact dp heuristic requires a dag")]
    CyclicGraph,
    #[error("graph has {vertices} vertices, exhaustive enumeration is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

/// How to estimate the remaining attack value `h(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicMode {
    /// Sum of the values of everything still reachable: cheap and always an
    /// admissible overestimate.
    #[default]
    ReachableSum,
    /// Exact maximum remaining path value by backward dynamic programming;
    /// DAGs only.
    DpExact,
}

impl fmt::Display for HeuristicMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicMode::ReachableSum => write!(f, "reachable-sum"),
            HeuristicMode::DpExact => write!(f, "dp-exact"),
        }
    }
}

impl FromStr for HeuristicMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reachable-sum" => Ok(HeuristicMode::ReachableSum),
            "dp-exact" => Ok(HeuristicMode::DpExact),
            other => Err(format!(
                "unknown heuristic {other:?} (reachable-sum|dp-exact)"
            )),
        }
    }
}

/// Per-vertex heuristic values. `None` marks vertices from which the target
/// is unreachable; the marker never mixes into arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicTable {
    values: BTreeMap<VertexId, Option<f64>>,
    mode: HeuristicMode,
}

impl HeuristicTable {
    /// `Some(h)` when the target is reachable from `v`, `None` otherwise.
    pub fn value(&self, v: VertexId) -> Option<f64> {
        self.values.get(&v).copied().flatten()
    }

    pub fn mode(&self) -> HeuristicMode {
        self.mode
    }
}

/// One step of a found path, with the accumulated and estimated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub vertex: VertexId,
    pub g: f64,
    pub f: f64,
}

/// A maximum-value simple path from source to target.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub path: Vec<VertexId>,
    pub total_value: f64,
    pub per_step: Vec<PathStep>,
    pub expanded: u64,
    pub elapsed: Duration,
    pub heuristic: HeuristicMode,
}

/// Dense vertex indexing shared by the search routines.
struct Indexed<'a> {
    wg: &'a WeightedGraph,
    ids: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    successors: Vec<Vec<usize>>,
    weights: Vec<Vec<f64>>,
}

impl<'a> Indexed<'a> {
    fn new(wg: &'a WeightedGraph) -> Self {
        let ids: Vec<VertexId> = wg.graph().vertex_ids().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut successors = vec![Vec::new(); ids.len()];
        let mut weights = vec![Vec::new(); ids.len()];
        for (i, &id) in ids.iter().enumerate() {
            for &succ in wg.graph().successors(id) {
                successors[i].push(index[&succ]);
                weights[i].push(wg.weight(id, succ).unwrap_or(0.0));
            }
        }
        Indexed {
            wg,
            ids,
            index,
            successors,
            weights,
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    fn score(&self, i: usize) -> f64 {
        self.wg.scores().value(self.ids[i]).unwrap_or(0.0)
    }
}

/// Compact visited set for simple-path states.
#[derive(Debug, Clone, PartialEq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
}

/// Reachable-sum heuristic: for every vertex with the target reachable,
/// the sum of the values of all vertices reachable from it (itself excluded,
/// target included); `h(target) = 0` by definition.
///
/// Under src/avg edge weighting the vertex's own value joins the sum, since
/// it can enter the outgoing edge weights; the estimate stays an overestimate
/// of any simple-path value in every mode.
pub fn heuristic_reachable_sum(wg: &WeightedGraph, target: VertexId) -> HeuristicTable {
    let idx = Indexed::new(wg);
    let mut values = BTreeMap::new();
    let target_idx = idx.index.get(&target).copied();
    for (i, &id) in idx.ids.iter().enumerate() {
        if Some(i) == target_idx {
            values.insert(id, Some(0.0));
            continue;
        }
        let mut seen = BitSet::new(idx.len());
        let mut stack = vec![i];
        seen.insert(i);
        while let Some(v) = stack.pop() {
            for &s in &idx.successors[v] {
                if !seen.contains(s) {
                    seen.insert(s);
                    stack.push(s);
                }
            }
        }
        let reaches_target = target_idx.is_some_and(|t| seen.contains(t));
        if !reaches_target {
            values.insert(id, None);
            continue;
        }
        let mut sum = 0.0;
        for j in 0..idx.len() {
            if j != i && seen.contains(j) {
                sum += idx.score(j);
            }
        }
        if wg.mode() != EdgeWeightMode::Dst {
            sum += idx.score(i);
        }
        values.insert(id, Some(sum));
    }
    HeuristicTable {
        values,
        mode: HeuristicMode::ReachableSum,
    }
}

/// Ascending-id Kahn topological order, or `None` when the graph is cyclic.
fn topological_order(idx: &Indexed) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; idx.len()];
    for succs in &idx.successors {
        for &s in succs {
            indegree[s] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..idx.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(idx.len());
    while let Some(&next) = ready.iter().min() {
        ready.retain(|&v| v != next);
        order.push(next);
        for &s in &idx.successors[next] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.push(s);
            }
        }
    }
    (order.len() == idx.len()).then_some(order)
}

/// Exact maximum remaining path value per vertex, by backward dynamic
/// programming in reverse topological order. Errors on cyclic graphs.
pub fn heuristic_dp_exact(
    wg: &WeightedGraph,
    target: VertexId,
) -> Result<HeuristicTable, SearchError> {
    if !wg.graph().contains(target) {
        return Err(SearchError::UnknownVertex(target));
    }
    let idx = Indexed::new(wg);
    let order = topological_order(&idx).ok_or(SearchError::CyclicGraph)?;
    let target_idx = idx.index[&target];
    let mut best: Vec<Option<f64>> = vec![None; idx.len()];
    best[target_idx] = Some(0.0);
    for &v in order.iter().rev() {
        if v == target_idx {
            continue;
        }
        let mut value: Option<f64> = None;
        for (k, &s) in idx.successors[v].iter().enumerate() {
            if let Some(rest) = best[s] {
                let candidate = idx.weights[v][k] + rest;
                if value.is_none_or(|current| candidate > current) {
                    value = Some(candidate);
                }
            }
        }
        best[v] = value;
    }
    let values = idx
        .ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, best[i]))
        .collect();
    Ok(HeuristicTable {
        values,
        mode: HeuristicMode::DpExact,
    })
}

/// Build the heuristic table for the given mode.
pub fn heuristic(
    wg: &WeightedGraph,
    target: VertexId,
    mode: HeuristicMode,
) -> Result<HeuristicTable, SearchError> {
    match mode {
        HeuristicMode::ReachableSum => Ok(heuristic_reachable_sum(wg, target)),
        HeuristicMode::DpExact => heuristic_dp_exact(wg, target),
    }
}

/// A path state on the best-first frontier. Ordered by f, then g, then lower
/// vertex id, then insertion sequence, so queue pops are fully deterministic.
struct State {
    f: f64,
    g: f64,
    vertex: usize,
    seq: u64,
    arena_id: usize,
    visited: BitSet,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then(self.g.total_cmp(&other.g))
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Reconstruct a dense-index path from the parent arena.
fn unwind(arena: &[(usize, Option<usize>)], mut at: usize) -> Vec<usize> {
    let mut path = Vec::new();
    loop {
        let (vertex, parent) = arena[at];
        path.push(vertex);
        match parent {
            Some(p) => at = p,
            None => break,
        }
    }
    path.reverse();
    path
}

fn check_endpoints(
    wg: &WeightedGraph,
    source: VertexId,
    target: VertexId,
) -> Result<(), SearchError> {
    if !wg.graph().contains(source) {
        return Err(SearchError::UnknownVertex(source));
    }
    if !wg.graph().contains(target) {
        return Err(SearchError::UnknownVertex(target));
    }
    if source == target {
        return Err(SearchError::DegenerateQuery);
    }
    Ok(())
}

fn build_result(
    idx: &Indexed,
    h: &HeuristicTable,
    dense_path: &[usize],
    expanded: u64,
    elapsed: Duration,
) -> SearchResult {
    let path: Vec<VertexId> = dense_path.iter().map(|&i| idx.ids[i]).collect();
    let mut per_step = Vec::with_capacity(path.len());
    let mut g = 0.0;
    for (pos, &v) in dense_path.iter().enumerate() {
        if pos > 0 {
            let prev = dense_path[pos - 1];
            let k = idx.successors[prev]
                .iter()
                .position(|&s| s == v)
                .expect("path follows arcs");
            g += idx.weights[prev][k];
        }
        let rest = h.value(idx.ids[v]).unwrap_or(0.0);
        per_step.push(PathStep {
            vertex: idx.ids[v],
            g,
            f: g + rest,
        });
    }
    SearchResult {
        path,
        total_value: g,
        per_step,
        expanded,
        elapsed,
        heuristic: h.mode(),
    }
}

/// Find the maximum-value simple path from `source` to `target`.
///
/// Ties on total value resolve to the lexicographically smallest vertex-id
/// sequence, the same rule [`brute_force_optimal`] applies, so the two
/// routes return identical paths. States whose `g + h` cannot reach the best
/// known complete value are pruned; ties on the bound are kept so the path
/// tie-break stays exact.
pub fn plan(
    wg: &WeightedGraph,
    source: VertexId,
    target: VertexId,
    mode: HeuristicMode,
) -> Result<SearchResult, SearchError> {
    plan_observed(wg, source, target, mode, &mut |_| {})
}

/// [`plan`] with a callback invoked with the f value of every popped state,
/// in pop order. Lets tests check frontier behavior without reimplementing
/// the search.
pub(crate) fn plan_observed(
    wg: &WeightedGraph,
    source: VertexId,
    target: VertexId,
    mode: HeuristicMode,
    observe_pop: &mut dyn FnMut(f64),
) -> Result<SearchResult, SearchError> {
    let started = Instant::now();
    check_endpoints(wg, source, target)?;
    let h = heuristic(wg, target, mode)?;
    if h.value(source).is_none() {
        return Err(SearchError::NoPath {
            from: source,
            to: target,
        });
    }
    let idx = Indexed::new(wg);
    let source_idx = idx.index[&source];
    let target_idx = idx.index[&target];

    let mut arena: Vec<(usize, Option<usize>)> = vec![(source_idx, None)];
    let mut queue: BinaryHeap<State> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut visited = BitSet::new(idx.len());
    visited.insert(source_idx);
    queue.push(State {
        f: h.value(source).expect("checked"),
        g: 0.0,
        vertex: source_idx,
        seq,
        arena_id: 0,
        visited,
    });

    let mut best_value = f64::NEG_INFINITY;
    let mut best_path: Option<Vec<usize>> = None;
    let mut expanded = 0u64;

    while let Some(state) = queue.pop() {
        observe_pop(state.f);
        if state.vertex == target_idx {
            let path = unwind(&arena, state.arena_id);
            let better = state.g > best_value
                || (state.g == best_value
                    && best_path.as_ref().is_none_or(|current| path < *current));
            if better {
                best_value = state.g;
                best_path = Some(path);
            }
            continue;
        }
        // Branch and bound: h overestimates, so anything strictly below the
        // best complete value can neither beat nor tie it.
        if state.f < best_value {
            continue;
        }
        expanded += 1;
        for (k, &succ) in idx.successors[state.vertex].iter().enumerate() {
            if state.visited.contains(succ) {
                continue;
            }
            let Some(rest) = h.value(idx.ids[succ]) else {
                continue;
            };
            let g = state.g + idx.weights[state.vertex][k];
            let f = g + rest;
            if f < best_value {
                continue;
            }
            arena.push((succ, Some(state.arena_id)));
            let mut visited = state.visited.clone();
            visited.insert(succ);
            seq += 1;
            queue.push(State {
                f,
                g,
                vertex: succ,
                seq,
                arena_id: arena.len() - 1,
                visited,
            });
        }
    }

    match best_path {
        Some(path) => Ok(build_result(&idx, &h, &path, expanded, started.elapsed())),
        None => Err(SearchError::NoPath {
            from: source,
            to: target,
        }),
    }
}

/// Enumerate every simple source-to-target path by depth-first traversal and
/// return the maximum-value one under the same tie-break as [`plan`].
/// Refuses graphs above [`BRUTE_FORCE_GUARD`] vertices.
pub fn brute_force_optimal(
    wg: &WeightedGraph,
    source: VertexId,
    target: VertexId,
) -> Result<SearchResult, SearchError> {
    brute_force_optimal_with_limit(wg, source, target, BRUTE_FORCE_GUARD)
}

/// [`brute_force_optimal`] with an explicit vertex-count guard.
pub fn brute_force_optimal_with_limit(
    wg: &WeightedGraph,
    source: VertexId,
    target: VertexId,
    limit: usize,
) -> Result<SearchResult, SearchError> {
    let started = Instant::now();
    check_endpoints(wg, source, target)?;
    let vertices = wg.graph().vertex_count();
    if vertices > limit {
        return Err(SearchError::TooLarge { vertices, limit });
    }
    let idx = Indexed::new(wg);
    let source_idx = idx.index[&source];
    let target_idx = idx.index[&target];

    let mut best_value = f64::NEG_INFINITY;
    let mut best_path: Option<Vec<usize>> = None;
    let mut expanded = 0u64;

    // Iterative DFS over (path, g); successors visited in ascending order.
    let mut path = vec![source_idx];
    let mut g_stack = vec![0.0f64];
    let mut cursor = vec![0usize];
    let mut visited = BitSet::new(idx.len());
    visited.insert(source_idx);

    while let Some(&v) = path.last() {
        if v == target_idx {
            let g = *g_stack.last().expect("aligned");
            let better = g > best_value
                || (g == best_value && best_path.as_ref().is_none_or(|current| path < *current));
            if better {
                best_value = g;
                best_path = Some(path.clone());
            }
            // Leaf of the enumeration: backtrack.
            path.pop();
            g_stack.pop();
            cursor.pop();
            let mut mask = BitSet::new(idx.len());
            for &p in &path {
                mask.insert(p);
            }
            visited = mask;
            continue;
        }
        let k = *cursor.last().expect("aligned");
        if k < idx.successors[v].len() {
            *cursor.last_mut().expect("aligned") += 1;
            let succ = idx.successors[v][k];
            if visited.contains(succ) {
                continue;
            }
            expanded += 1;
            visited.insert(succ);
            path.push(succ);
            g_stack.push(g_stack.last().expect("aligned") + idx.weights[v][k]);
            cursor.push(0);
        } else {
            path.pop();
            g_stack.pop();
            cursor.pop();
            let mut mask = BitSet::new(idx.len());
            for &p in &path {
                mask.insert(p);
            }
            visited = mask;
        }
    }

    match best_path {
        Some(path) => {
            // The f column reports against the default heuristic.
            let h = heuristic_reachable_sum(wg, target);
            Ok(build_result(&idx, &h, &path, expanded, started.elapsed()))
        }
        None => Err(SearchError::NoPath {
            from: source,
            to: target,
        }),
    }
}
