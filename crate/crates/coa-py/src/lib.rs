//! Python bindings: load MULVAL attack graphs, score them from CVSS data,
//! plan the maximum-value attack path, and run the temporal comparison.
//!
//! Build with `cargo build -p coa-py`, then import the produced cdylib as
//! `coa_py` (see python/smoke_test.py for the copy-and-import dance used
//! without maturin).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use coa_core::graph;
use coa_core::report::{self, PlanReport, TemporalReport};
use coa_core::scoring::{self, CvePolicy, EdgeWeightMode, ScoringOptions};
use coa_core::search::{self, HeuristicMode};
use coa_core::temporal::{self, MctsConfig, TimeVaryingModel, Winner};
use coa_core::VertexId;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn read_file(path: &str) -> PyResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| PyValueError::new_err(format!("cannot read {path}: {e}")))
}

/// A validated MULVAL attack graph.
#[pyclass(name = "AttackGraph", frozen)]
struct PyAttackGraph {
    inner: graph::AttackGraph,
}

#[pymethods]
impl PyAttackGraph {
    /// Parse VERTICES.CSV / ARCS.CSV files. `reverse_arcs` flips rows into
    /// attacker-progress direction (the MULVAL convention).
    #[staticmethod]
    #[pyo3(signature = (vertices_path, arcs_path, reverse_arcs = true))]
    fn from_files(vertices_path: &str, arcs_path: &str, reverse_arcs: bool) -> PyResult<Self> {
        Self::from_text(
            &read_file(vertices_path)?,
            &read_file(arcs_path)?,
            reverse_arcs,
        )
    }

    /// Parse vertex and arc records from strings.
    #[staticmethod]
    #[pyo3(signature = (vertices_text, arcs_text, reverse_arcs = true))]
    fn from_text(vertices_text: &str, arcs_text: &str, reverse_arcs: bool) -> PyResult<Self> {
        let direction = if reverse_arcs {
            graph::ArcDirection::Reversed
        } else {
            graph::ArcDirection::AsWritten
        };
        let vertices = graph::parse_vertices(vertices_text).map_err(value_err)?;
        let arcs = graph::parse_arcs_with(arcs_text, direction).map_err(value_err)?;
        let inner = graph::build_graph(vertices, arcs).map_err(value_err)?;
        Ok(PyAttackGraph { inner })
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn arc_count(&self) -> usize {
        self.inner.arc_count()
    }

    fn is_acyclic(&self) -> bool {
        self.inner.is_acyclic()
    }

    fn vertex_ids(&self) -> Vec<VertexId> {
        self.inner.vertex_ids().collect()
    }

    fn label(&self, id: VertexId) -> PyResult<String> {
        self.inner
            .vertex(id)
            .map(|v| v.label.clone())
            .ok_or_else(|| PyValueError::new_err(format!("vertex {id} not in graph")))
    }

    fn successors(&self, id: VertexId) -> Vec<VertexId> {
        self.inner.successors(id).to_vec()
    }

    /// (name, args) of the vertex label's predicate.
    fn predicate(&self, id: VertexId) -> PyResult<(String, Vec<String>)> {
        self.inner
            .predicate(id)
            .map(|p| (p.name, p.args))
            .ok_or_else(|| PyValueError::new_err(format!("vertex {id} not in graph")))
    }

    /// Graphviz DOT text (no scores annotated).
    fn to_dot(&self) -> PyResult<String> {
        graph::export_dot(&self.inner, None, None).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "AttackGraph(vertices={}, arcs={}, acyclic={})",
            self.inner.vertex_count(),
            self.inner.arc_count(),
            self.inner.is_acyclic()
        )
    }
}

/// CVE id -> (baseScore, exploitabilityScore) records.
#[pyclass(name = "VulnDb", frozen)]
struct PyVulnDb {
    inner: scoring::VulnDb,
}

#[pymethods]
impl PyVulnDb {
    /// Load a JSON array or header-led CSV file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Self::from_text(&read_file(path)?)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyVulnDb {
            inner: scoring::VulnDb::parse(text).map_err(value_err)?,
        })
    }

    fn cve_ids(&self) -> Vec<String> {
        self.inner.records().map(|r| r.cve_id.clone()).collect()
    }

    /// (baseScore, exploitabilityScore) for a CVE id.
    fn get(&self, cve_id: &str) -> Option<(f64, f64)> {
        self.inner
            .get(cve_id)
            .map(|r| (r.base_score, r.exploitability_score))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("VulnDb(records={})", self.inner.len())
    }
}

/// Vulnerability score of one node: baseScore * exploitabilityScore / 10.
#[pyfunction]
fn score_vul(base_score: f64, exploitability_score: f64) -> PyResult<f64> {
    scoring::score_vul(base_score, exploitability_score).map_err(value_err)
}

fn scoring_options(lenient_cve: bool, critical_predicates: Option<Vec<String>>) -> ScoringOptions {
    let mut options = ScoringOptions {
        cve_policy: if lenient_cve {
            CvePolicy::Lenient
        } else {
            CvePolicy::Strict
        },
        ..ScoringOptions::default()
    };
    if let Some(predicates) = critical_predicates {
        options.critical_predicates = predicates;
    }
    options
}

#[allow(clippy::too_many_arguments)]
fn weighted(
    graph: &PyAttackGraph,
    db: &PyVulnDb,
    source: VertexId,
    target: VertexId,
    edge_weight: &str,
    lenient_cve: bool,
    critical_predicates: Option<Vec<String>>,
) -> PyResult<scoring::WeightedGraph> {
    let mode: EdgeWeightMode = edge_weight.parse().map_err(value_err)?;
    let options = scoring_options(lenient_cve, critical_predicates);
    let scores = scoring::assign_node_scores(&graph.inner, &db.inner, source, target, &options)
        .map_err(value_err)?;
    Ok(scoring::edge_weights(graph.inner.clone(), scores, mode))
}

/// A maximum-value attack path.
#[pyclass(name = "PlanResult", frozen)]
struct PyPlanResult {
    result: search::SearchResult,
    report: PlanReport,
}

#[pymethods]
impl PyPlanResult {
    #[getter]
    fn path(&self) -> Vec<VertexId> {
        self.result.path.clone()
    }

    #[getter]
    fn total_value(&self) -> f64 {
        self.result.total_value
    }

    #[getter]
    fn expanded(&self) -> u64 {
        self.result.expanded
    }

    /// Per-step (vertex, g, f) rows.
    #[getter]
    fn steps(&self) -> Vec<(VertexId, f64, f64)> {
        self.result
            .per_step
            .iter()
            .map(|s| (s.vertex, s.g, s.f))
            .collect()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.report.warnings.clone()
    }

    /// The plan report as deterministic JSON.
    fn to_json(&self) -> String {
        report::to_json(&self.report)
    }

    fn __repr__(&self) -> String {
        format!(
            "PlanResult(path={:?}, total_value={})",
            self.result.path, self.result.total_value
        )
    }
}

/// Find the maximum-value attack path from source to target.
#[pyfunction]
#[pyo3(signature = (
    graph, db, source, target,
    heuristic = "reachable-sum", edge_weight = "dst",
    lenient_cve = false, critical_predicates = None
))]
#[allow(clippy::too_many_arguments)]
fn plan(
    graph: &PyAttackGraph,
    db: &PyVulnDb,
    source: VertexId,
    target: VertexId,
    heuristic: &str,
    edge_weight: &str,
    lenient_cve: bool,
    critical_predicates: Option<Vec<String>>,
) -> PyResult<PyPlanResult> {
    let mode: HeuristicMode = heuristic.parse().map_err(value_err)?;
    let wg = weighted(
        graph,
        db,
        source,
        target,
        edge_weight,
        lenient_cve,
        critical_predicates,
    )?;
    let result = search::plan(&wg, source, target, mode).map_err(value_err)?;
    let report = PlanReport::new(&result, &wg, false);
    Ok(PyPlanResult { result, report })
}

/// Exhaustive oracle (small graphs only): identical contract to plan().
#[pyfunction]
#[pyo3(signature = (
    graph, db, source, target,
    edge_weight = "dst", lenient_cve = false, critical_predicates = None
))]
#[allow(clippy::too_many_arguments)]
fn brute_force_optimal(
    graph: &PyAttackGraph,
    db: &PyVulnDb,
    source: VertexId,
    target: VertexId,
    edge_weight: &str,
    lenient_cve: bool,
    critical_predicates: Option<Vec<String>>,
) -> PyResult<PyPlanResult> {
    let wg = weighted(
        graph,
        db,
        source,
        target,
        edge_weight,
        lenient_cve,
        critical_predicates,
    )?;
    let result = search::brute_force_optimal(&wg, source, target).map_err(value_err)?;
    let report = PlanReport::new(&result, &wg, false);
    Ok(PyPlanResult { result, report })
}

/// Spatial optimum vs MCTS recommendation under time-varying dynamics.
#[pyclass(name = "CompareResult", frozen)]
struct PyCompareResult {
    outcome: temporal::CompareOutcome,
    report: TemporalReport,
}

#[pymethods]
impl PyCompareResult {
    #[getter]
    fn winner(&self) -> &'static str {
        match self.outcome.winner {
            Winner::Spatial => "spatial",
            Winner::Mcts => "mcts",
            Winner::Tie => "tie",
        }
    }

    #[getter]
    fn spatial_path(&self) -> Vec<VertexId> {
        self.outcome.spatial.path.clone()
    }

    #[getter]
    fn spatial_static_value(&self) -> f64 {
        self.outcome.spatial.total_value
    }

    /// (mean, std_error, success_rate) of the spatial path under dynamics.
    #[getter]
    fn spatial_estimate(&self) -> (f64, f64, f64) {
        let e = &self.outcome.spatial_estimate;
        (e.mean, e.std_error, e.success_rate)
    }

    #[getter]
    fn mcts_path(&self) -> Vec<VertexId> {
        self.outcome.mcts.recommended_path.clone()
    }

    #[getter]
    fn mcts_expected_value(&self) -> f64 {
        self.outcome.mcts.expected_value
    }

    #[getter]
    fn mcts_estimate(&self) -> (f64, f64, f64) {
        let e = &self.outcome.mcts_estimate;
        (e.mean, e.std_error, e.success_rate)
    }

    #[getter]
    fn mcts_root_visits(&self) -> u64 {
        self.outcome.mcts.root_visits
    }

    /// The temporal report as deterministic JSON.
    fn to_json(&self) -> String {
        report::to_json(&self.report)
    }

    fn __repr__(&self) -> String {
        format!(
            "CompareResult(winner={:?}, spatial_mean={}, mcts_mean={})",
            self.winner(),
            self.outcome.spatial_estimate.mean,
            self.outcome.mcts_estimate.mean
        )
    }
}

/// Compare the static optimum against MCTS under Bernoulli edge availability
/// and multiplicative score drift. `availability_overrides` is a list of
/// (src, dst, p) triples layered over `availability`.
#[pyfunction]
#[pyo3(signature = (
    graph, db, source, target,
    horizon, availability = 1.0, availability_overrides = None, score_drift = 0.0,
    model_seed = 0, iterations = 10_000, exploration_c = 0.7,
    rollout_depth_cap = 64, mcts_seed = 0, strict_goal = false, trials = 1000,
    edge_weight = "dst", lenient_cve = false, critical_predicates = None
))]
#[allow(clippy::too_many_arguments)]
fn compare(
    graph: &PyAttackGraph,
    db: &PyVulnDb,
    source: VertexId,
    target: VertexId,
    horizon: u32,
    availability: f64,
    availability_overrides: Option<Vec<(VertexId, VertexId, f64)>>,
    score_drift: f64,
    model_seed: u64,
    iterations: u32,
    exploration_c: f64,
    rollout_depth_cap: u32,
    mcts_seed: u64,
    strict_goal: bool,
    trials: u32,
    edge_weight: &str,
    lenient_cve: bool,
    critical_predicates: Option<Vec<String>>,
) -> PyResult<PyCompareResult> {
    let wg = weighted(
        graph,
        db,
        source,
        target,
        edge_weight,
        lenient_cve,
        critical_predicates,
    )?;
    let mut model = TimeVaryingModel::uniform(wg, availability, score_drift, horizon, model_seed)
        .map_err(value_err)?;
    for (src, dst, p) in availability_overrides.unwrap_or_default() {
        model.set_availability(src, dst, p).map_err(value_err)?;
    }
    let config = MctsConfig {
        iterations,
        exploration_c,
        rollout_depth_cap,
        seed: mcts_seed,
        strict_goal,
    };
    let outcome = temporal::compare(&model, source, target, &config, trials).map_err(value_err)?;
    let report = TemporalReport::new(&outcome, source, target);
    Ok(PyCompareResult { outcome, report })
}

#[pymodule]
fn coa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAttackGraph>()?;
    m.add_class::<PyVulnDb>()?;
    m.add_class::<PyPlanResult>()?;
    m.add_class::<PyCompareResult>()?;
    m.add_function(wrap_pyfunction!(score_vul, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
