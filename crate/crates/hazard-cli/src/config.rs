//! Experiment configuration: model selection, influencer scenario, trial
//! counts and requested estimands. Configs are JSON documents; validation
//! errors carry the offending field path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hazard_core::graph::InfluencerScheme;
use hazard_core::{
    erdos_spec, from_edge_list, grid_spec, norros_reittu_spec, random_star_spec, star_spec,
    GraphSpec, WeightVector,
};

/// Graph-model selector, either a named generator or an edge-list file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum ModelSpec {
    Erdos { n: usize, c: f64 },
    NorrosReittu { weights: Vec<f64> },
    Star { n: usize, p: f64 },
    Grid { dim: u32, side: usize, p: f64 },
    RandomStar { n: usize, a: f64, b: f64 },
    File { path: PathBuf },
}

impl ModelSpec {
    pub fn build(&self) -> hazard_core::Result<GraphSpec> {
        match self {
            ModelSpec::Erdos { n, c } => erdos_spec(*n, *c),
            ModelSpec::NorrosReittu { weights } => {
                let w = WeightVector::new(weights.clone())?;
                norros_reittu_spec(&w)
            }
            ModelSpec::Star { n, p } => star_spec(*n, *p),
            ModelSpec::Grid { dim, side, p } => grid_spec(*dim, *side, *p),
            ModelSpec::RandomStar { n, a, b } => random_star_spec(*n, *a, *b),
            ModelSpec::File { path } => from_edge_list(path),
        }
    }
}

/// A quantity estimated per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimandSpec {
    /// |R(I)| for the configured scenario.
    Influence,
    /// Largest component size (undirected models).
    C1,
    /// Number of components of size >= m.
    NAtLeast { m: usize },
    /// `sum_k C_k (1 - exp(-a C_k))`.
    LinkpercoLhs { a: f64 },
    /// `C1 (1 - exp(-a (C1 - 1)))`.
    C1Transform { a: f64 },
}

impl EstimandSpec {
    pub fn name(&self) -> String {
        match self {
            EstimandSpec::Influence => "influence".into(),
            EstimandSpec::C1 => "c1".into(),
            EstimandSpec::NAtLeast { m } => format!("n_at_least({m})"),
            EstimandSpec::LinkpercoLhs { a } => format!("linkperco_lhs({a})"),
            EstimandSpec::C1Transform { a } => format!("c1_transform({a})"),
        }
    }

    fn needs_components(&self) -> bool {
        !matches!(self, EstimandSpec::Influence)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub scenario: Option<InfluencerScheme>,
    pub trials: u64,
    pub master_seed: u64,
    pub outputs: Vec<EstimandSpec>,
    /// Attach the matching analytic bounds to the report.
    #[serde(default = "default_true")]
    pub with_bounds: bool,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Semantic validation; messages carry the field path.
    pub fn validate(&self) -> Result<(), String> {
        if self.trials < 1 {
            return Err("trials: must be >= 1".into());
        }
        if self.outputs.is_empty() {
            return Err("outputs: at least one estimand is required".into());
        }
        for (idx, output) in self.outputs.iter().enumerate() {
            match output {
                EstimandSpec::NAtLeast { m } if *m < 1 => {
                    return Err(format!("outputs[{idx}].m: must be >= 1"));
                }
                EstimandSpec::LinkpercoLhs { a } | EstimandSpec::C1Transform { a }
                    if !(*a > 0.0) =>
                {
                    return Err(format!("outputs[{idx}].a: must be > 0"));
                }
                _ => {}
            }
        }
        if self.outputs.contains(&EstimandSpec::Influence) && self.scenario.is_none() {
            return Err("scenario: required by the influence estimand".into());
        }
        if let Some(InfluencerScheme::Bernoulli { q }) = &self.scenario {
            if !(0.0..=1.0).contains(q) {
                return Err(format!("scenario.q: {q} must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn needs_components(&self) -> bool {
        self.outputs.iter().any(EstimandSpec::needs_components)
            || matches!(
                (
                    &self.scenario,
                    self.outputs.contains(&EstimandSpec::Influence)
                ),
                (Some(_), true)
            )
    }
}

pub fn load_config(path: impl AsRef<Path>) -> anyhow::Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
    config
        .validate()
        .map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))?;
    Ok(config)
}

/// Parses `fixed:0,1,2 | uniform:<n0> | bernoulli:<q>`.
pub fn parse_scenario(text: &str) -> Result<InfluencerScheme, String> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| format!("scenario `{text}` must look like kind:args"))?;
    match kind {
        "fixed" => {
            let nodes = arg
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("scenario `{text}`: {e}"))?;
            Ok(InfluencerScheme::fixed(nodes))
        }
        "uniform" => {
            let n0 = arg
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("scenario `{text}`: {e}"))?;
            Ok(InfluencerScheme::UniformK { n0 })
        }
        "bernoulli" => {
            let q = arg
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("scenario `{text}`: {e}"))?;
            Ok(InfluencerScheme::Bernoulli { q })
        }
        other => Err(format!("unknown scenario kind `{other}`")),
    }
}
