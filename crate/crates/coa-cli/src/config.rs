//! TOML run configuration. Precedence is flags > file > defaults; input
//! paths inside a config file resolve relative to the file's directory so a
//! config stays archivable, while output paths resolve against the working
//! directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub inputs: InputsSection,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub output: OutputSection,
    pub temporal: Option<TemporalSection>,
    pub mcts: Option<MctsSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsSection {
    pub vertices: Option<PathBuf>,
    pub arcs: Option<PathBuf>,
    pub vulndb: Option<PathBuf>,
    /// Reverse ARCS.CSV rows into attacker-progress direction (default true).
    pub reverse_arcs: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub source: Option<u32>,
    pub target: Option<u32>,
    pub heuristic: Option<String>,
    pub edge_weight: Option<String>,
    /// "strict" (default) or "lenient" handling of CVEs missing from the db.
    pub cve_policy: Option<String>,
    pub critical_predicates: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    /// Include wall-clock timing in the report file (off by default so
    /// identical runs stay byte-identical).
    pub timing: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporalSection {
    #[serde(default = "one")]
    pub default_availability: f64,
    #[serde(default)]
    pub score_drift: f64,
    pub horizon: u32,
    pub seed: Option<u64>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub availability: Vec<AvailabilityOverride>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvailabilityOverride {
    pub src: u32,
    pub dst: u32,
    pub p: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MctsSection {
    pub iterations: Option<u32>,
    pub exploration_c: Option<f64>,
    pub rollout_depth_cap: Option<u32>,
    pub seed: Option<u64>,
    pub strict_goal: Option<bool>,
}

fn one() -> f64 {
    1.0
}

fn default_trials() -> u32 {
    1000
}

/// Load and parse a config file, resolving relative input paths against the
/// config file's directory.
pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut config: FileConfig =
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    for input in [
        &mut config.inputs.vertices,
        &mut config.inputs.arcs,
        &mut config.inputs.vulndb,
    ]
    .into_iter()
    .flatten()
    {
        if input.is_relative() {
            *input = dir.join(&input);
        }
    }
    Ok(config)
}
