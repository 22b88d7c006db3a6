//! `coa`: attack course-of-action planning over MULVAL attack graphs.
//!
//! Subcommands: `plan` (maximum-value attack path), `temporal` (static
//! optimum vs MCTS under time-varying dynamics), `export` (Graphviz DOT),
//! `validate` (parse and sanity-check inputs).
//!
//! Exit codes: 0 success, 1 input or validation error, 2 no attack path.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coa_core::graph::{self, ArcDirection, AttackGraph};
use coa_core::report::{self, PlanReport, TemporalReport};
use coa_core::scoring::{
    assign_node_scores, edge_weights, CvePolicy, EdgeWeightMode, ScoringOptions, VulnDb,
    WeightedGraph,
};
use coa_core::search::{plan, HeuristicMode, SearchError};
use coa_core::temporal::{compare, MctsConfig, TemporalError, TimeVaryingModel};
use coa_core::VertexId;

use config::FileConfig;

const EXIT_INPUT: u8 = 1;
const EXIT_NO_PATH: u8 = 2;

#[derive(Parser)]
#[command(
    name = "coa",
    version,
    about = "Attack course-of-action planning over MULVAL attack graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the maximum-value attack path and write a plan report
    Plan(PlanArgs),
    /// Compare the static optimum against MCTS under time-varying dynamics
    Temporal(TemporalArgs),
    /// Export the attack graph as Graphviz DOT, scores annotated when given
    Export(ExportArgs),
    /// Parse inputs and report graph statistics
    Validate(ValidateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// MULVAL VERTICES.CSV
    #[arg(long)]
    vertices: Option<PathBuf>,
    /// MULVAL ARCS.CSV
    #[arg(long)]
    arcs: Option<PathBuf>,
    /// Vulnerability database (JSON array or CSV with header)
    #[arg(long)]
    vulndb: Option<PathBuf>,
    /// Keep ARCS.CSV rows as written instead of reversing into
    /// attacker-progress direction
    #[arg(long)]
    no_reverse_arcs: bool,
}

#[derive(Args)]
struct PlanFlags {
    /// Attack source vertex id
    #[arg(long)]
    source: Option<VertexId>,
    /// Attack target vertex id
    #[arg(long)]
    target: Option<VertexId>,
    /// Heuristic: reachable-sum | dp-exact
    #[arg(long)]
    heuristic: Option<String>,
    /// Edge weight mode: src | dst | avg
    #[arg(long)]
    edge_weight: Option<String>,
    /// Fail when a vulExists CVE is missing from the db (default)
    #[arg(long, conflicts_with = "lenient_cve")]
    strict_cve: bool,
    /// Score missing CVEs as 0 with a warning instead of failing
    #[arg(long)]
    lenient_cve: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    plan: PlanFlags,
    /// Report file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a DOT file with the optimal path highlighted in red
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Include wall-clock timing in the report file
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct TemporalArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    plan: PlanFlags,
    /// Seed override applied to both the model and MCTS
    #[arg(long)]
    seed: Option<u64>,
    /// MCTS iterations override
    #[arg(long)]
    iterations: Option<u32>,
    /// Evaluation trials override
    #[arg(long)]
    trials: Option<u32>,
    /// Report file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    plan: PlanFlags,
    /// DOT file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    plan: PlanFlags,
}

/// Error with the process exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(err: SearchError) -> Self {
        let code = match err {
            SearchError::NoPath { .. } => EXIT_NO_PATH,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<TemporalError> for CliError {
    fn from(err: TemporalError) -> Self {
        match err {
            TemporalError::Search(inner) => inner.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let outcome = match cli.command {
        Command::Plan(args) => cmd_plan(args),
        Command::Temporal(args) => cmd_temporal(args),
        Command::Export(args) => cmd_export(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn load_config(inputs: &InputArgs) -> Result<FileConfig, CliError> {
    match &inputs.config {
        Some(path) => config::load(path).map_err(CliError::input),
        None => Ok(FileConfig::default()),
    }
}

fn read_text(path: &Path, what: &str) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {what} file {}: {e}", path.display())))?;
    String::from_utf8(bytes)
        .map_err(|_| CliError::input(format!("{what} file {} is not valid UTF-8", path.display())))
}

/// Everything shared by the subcommands after merging flags over the file.
struct Resolved {
    graph: AttackGraph,
    vulndb: Option<VulnDb>,
    source: Option<VertexId>,
    target: Option<VertexId>,
    heuristic: HeuristicMode,
    edge_weight: EdgeWeightMode,
    scoring: ScoringOptions,
    file: FileConfig,
}

fn resolve(inputs: &InputArgs, flags: &PlanFlags) -> Result<Resolved, CliError> {
    let file = load_config(inputs)?;

    let vertices_path = inputs
        .vertices
        .clone()
        .or_else(|| file.inputs.vertices.clone())
        .ok_or_else(|| {
            CliError::input("no vertices file given (--vertices or [inputs] vertices)")
        })?;
    let arcs_path = inputs
        .arcs
        .clone()
        .or_else(|| file.inputs.arcs.clone())
        .ok_or_else(|| CliError::input("no arcs file given (--arcs or [inputs] arcs)"))?;
    let vulndb_path = inputs.vulndb.clone().or_else(|| file.inputs.vulndb.clone());

    let reverse = if inputs.no_reverse_arcs {
        false
    } else {
        file.inputs.reverse_arcs.unwrap_or(true)
    };
    let direction = if reverse {
        ArcDirection::Reversed
    } else {
        ArcDirection::AsWritten
    };

    let vertices_text = read_text(&vertices_path, "vertices")?;
    let vertices = graph::parse_vertices(&vertices_text)
        .map_err(|e| CliError::input(format!("{}: {e}", vertices_path.display())))?;
    let arcs_text = read_text(&arcs_path, "arcs")?;
    let arcs = graph::parse_arcs_with(&arcs_text, direction)
        .map_err(|e| CliError::input(format!("{}: {e}", arcs_path.display())))?;
    let graph = graph::build_graph(vertices, arcs)
        .map_err(|e| CliError::input(format!("{}: {e}", arcs_path.display())))?;

    let vulndb = match vulndb_path {
        Some(path) => {
            let text = read_text(&path, "vulnerability db")?;
            Some(
                VulnDb::parse(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };

    let heuristic = match flags
        .heuristic
        .as_deref()
        .or(file.plan.heuristic.as_deref())
    {
        Some(text) => text.parse::<HeuristicMode>().map_err(CliError::input)?,
        None => HeuristicMode::default(),
    };
    let edge_weight = match flags
        .edge_weight
        .as_deref()
        .or(file.plan.edge_weight.as_deref())
    {
        Some(text) => text.parse::<EdgeWeightMode>().map_err(CliError::input)?,
        None => EdgeWeightMode::default(),
    };

    let cve_policy = if flags.lenient_cve {
        CvePolicy::Lenient
    } else if flags.strict_cve {
        CvePolicy::Strict
    } else {
        match file.plan.cve_policy.as_deref() {
            Some("strict") | None => CvePolicy::Strict,
            Some("lenient") => CvePolicy::Lenient,
            Some(other) => {
                return Err(CliError::input(format!(
                    "unknown cve_policy {other:?} (strict|lenient)"
                )))
            }
        }
    };
    let mut scoring = ScoringOptions {
        cve_policy,
        ..ScoringOptions::default()
    };
    if let Some(predicates) = &file.plan.critical_predicates {
        scoring.critical_predicates = predicates.clone();
    }

    Ok(Resolved {
        graph,
        vulndb,
        source: flags.source.or(file.plan.source),
        target: flags.target.or(file.plan.target),
        heuristic,
        edge_weight,
        scoring,
        file,
    })
}

impl Resolved {
    fn endpoints(&self) -> Result<(VertexId, VertexId), CliError> {
        let source = self
            .source
            .ok_or_else(|| CliError::input("no source vertex given (--source or [plan] source)"))?;
        let target = self
            .target
            .ok_or_else(|| CliError::input("no target vertex given (--target or [plan] target)"))?;
        Ok((source, target))
    }

    fn weighted(&self) -> Result<(WeightedGraph, VertexId, VertexId), CliError> {
        let (source, target) = self.endpoints()?;
        let db = self.vulndb.as_ref().ok_or_else(|| {
            CliError::input("no vulnerability db given (--vulndb or [inputs] vulndb)")
        })?;
        let scores = assign_node_scores(&self.graph, db, source, target, &self.scoring)
            .map_err(|e| CliError::input(e.to_string()))?;
        Ok((
            edge_weights(self.graph.clone(), scores, self.edge_weight),
            source,
            target,
        ))
    }
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir).map_err(|e| {
                        CliError::input(format!("cannot create {}: {e}", dir.display()))
                    })?;
                }
            }
            std::fs::write(path, content)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_plan(args: PlanArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.inputs, &args.plan)?;
    let (wg, source, target) = resolved.weighted()?;
    let result = plan(&wg, source, target, resolved.heuristic)?;

    let timing = args.timing || resolved.file.output.timing.unwrap_or(false);
    let report_path = args
        .out
        .clone()
        .or_else(|| resolved.file.output.report.clone());
    let report = PlanReport::new(&result, &wg, timing);
    write_or_print(report_path.as_deref(), &report::to_json(&report))?;

    let dot_path = args
        .dot
        .clone()
        .or_else(|| resolved.file.output.dot.clone());
    if let Some(path) = dot_path {
        let dot = graph::export_dot(wg.graph(), Some(wg.scores()), Some(&result.path))
            .map_err(|e| CliError::input(e.to_string()))?;
        write_or_print(Some(&path), &dot)?;
    }

    eprintln!(
        "optimal path {} with total value {} ({} states expanded, {:.1} ms)",
        result
            .path
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(" -> "),
        result.total_value,
        result.expanded,
        result.elapsed.as_secs_f64() * 1e3,
    );
    for warning in wg.scores().warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(())
}

fn cmd_temporal(args: TemporalArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.inputs, &args.plan)?;
    let (wg, source, target) = resolved.weighted()?;

    let temporal = resolved.file.temporal.as_ref().ok_or_else(|| {
        CliError::input("temporal runs need a config file with a [temporal] section")
    })?;
    let mcts_section = resolved.file.mcts.as_ref().ok_or_else(|| {
        CliError::input("temporal runs need a config file with an [mcts] section")
    })?;

    let model_seed = args.seed.or(temporal.seed).unwrap_or(0);
    let mut model = TimeVaryingModel::uniform(
        wg,
        temporal.default_availability,
        temporal.score_drift,
        temporal.horizon,
        model_seed,
    )?;
    for entry in &temporal.availability {
        model.set_availability(entry.src, entry.dst, entry.p)?;
    }

    let defaults = MctsConfig::default();
    let mcts_config = MctsConfig {
        iterations: args
            .iterations
            .or(mcts_section.iterations)
            .unwrap_or(defaults.iterations),
        exploration_c: mcts_section.exploration_c.unwrap_or(defaults.exploration_c),
        rollout_depth_cap: mcts_section
            .rollout_depth_cap
            .unwrap_or(defaults.rollout_depth_cap),
        seed: args.seed.or(mcts_section.seed).unwrap_or(defaults.seed),
        strict_goal: mcts_section.strict_goal.unwrap_or(defaults.strict_goal),
    };
    let trials = args.trials.unwrap_or(temporal.trials);

    let outcome = compare(&model, source, target, &mcts_config, trials)?;
    let report = TemporalReport::new(&outcome, source, target);
    let report_path = args
        .out
        .clone()
        .or_else(|| resolved.file.output.report.clone());
    write_or_print(report_path.as_deref(), &report::to_json(&report))?;

    eprintln!(
        "spatial mean {} vs mcts mean {} over {} trials: winner {:?}",
        outcome.spatial_estimate.mean, outcome.mcts_estimate.mean, trials, outcome.winner
    );
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.inputs, &args.plan)?;
    // Scores are annotated when a db plus endpoints are available.
    let dot = if resolved.vulndb.is_some() && resolved.source.is_some() && resolved.target.is_some()
    {
        let (wg, _, _) = resolved.weighted()?;
        graph::export_dot(wg.graph(), Some(wg.scores()), None)
            .map_err(|e| CliError::input(e.to_string()))?
    } else {
        graph::export_dot(&resolved.graph, None, None)
            .map_err(|e| CliError::input(e.to_string()))?
    };
    let out = args
        .out
        .clone()
        .or_else(|| resolved.file.output.dot.clone());
    write_or_print(out.as_deref(), &dot)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let resolved = resolve(&args.inputs, &args.plan)?;
    let graph = &resolved.graph;
    println!(
        "graph: {} vertices, {} arcs, {}",
        graph.vertex_count(),
        graph.arc_count(),
        if graph.is_acyclic() {
            "acyclic"
        } else {
            "cyclic"
        }
    );
    match &resolved.vulndb {
        Some(db) => {
            println!("vulnerability db: {} records", db.len());
            let mut missing = 0usize;
            for vertex in graph.vertices() {
                let predicate = coa_core::graph::parse_predicate(&vertex.label);
                if predicate.name == "vulExists" {
                    let cve = predicate
                        .args
                        .get(1)
                        .map(|a| a.trim_matches(|c| c == '\'' || c == '"').to_string());
                    match cve {
                        Some(cve) if db.get(&cve).is_some() => {}
                        Some(cve) => {
                            println!("warning: vertex {} names unknown CVE {cve}", vertex.id);
                            missing += 1;
                        }
                        None => {
                            println!(
                                "warning: vertex {} vulExists label has no CVE argument",
                                vertex.id
                            );
                            missing += 1;
                        }
                    }
                }
            }
            if missing == 0 {
                println!("all vulExists nodes resolve against the db");
            }
        }
        None => println!("vulnerability db: not provided"),
    }
    if let (Some(source), Some(target)) = (resolved.source, resolved.target) {
        for (name, id) in [("source", source), ("target", target)] {
            if !graph.contains(id) {
                return Err(CliError::input(format!("{name} vertex {id} not in graph")));
            }
        }
        println!("source {source} and target {target} present");
    }
    Ok(())
}
