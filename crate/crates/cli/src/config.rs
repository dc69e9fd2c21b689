//! Run configuration: TOML schema, preset merging, and the JSON sidecar
//! that makes every run re-runnable.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hotgate_core::optimizer::log_grid;
use hotgate_core::presets::{find_preset, PresetDef};
use hotgate_core::runner::RunSpec;

/// One run = one file. Either `preset` or `scenario` must be set;
/// `[parameters]` entries override the preset's values.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    pub grid: Option<GridConfig>,
    pub optimizer: Option<OptimizerConfig>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iters: Option<usize>,
    pub warm_start: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub name: Option<String>,
}

/// Full provenance of one run, written next to the CSV. The `config` field
/// re-runs the record exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub resolved_scenario: String,
    pub resolved_parameters: BTreeMap<String, f64>,
    pub seed: u64,
    pub version: String,
    pub wall_time_seconds: f64,
    pub csv: Option<String>,
    pub echo_max_residual: Option<f64>,
}

/// A run configuration resolved against the preset table.
pub struct ResolvedRun {
    pub spec: RunSpec,
    pub config: RunConfig,
    pub output_name: String,
    pub output_dir: String,
}

pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            // Re-run from a sidecar record.
            let record: RunRecord = serde_json::from_str(&text)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(record.config)
        }
        _ => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
    }
}

/// Merge a preset (if named), parameter overrides, grid and optimizer
/// settings into a concrete run spec.
pub fn resolve(config: RunConfig, seed_override: Option<u64>, out_override: Option<String>)
    -> Result<ResolvedRun, String>
{
    let preset: Option<&'static PresetDef> = match &config.preset {
        Some(name) => Some(
            find_preset(name)
                .ok_or_else(|| format!("unknown preset `{name}`; see `hotgate presets`"))?,
        ),
        None => None,
    };
    let scenario = match (&config.scenario, preset) {
        (Some(s), Some(p)) => {
            if s != p.scenario {
                return Err(format!(
                    "config names scenario `{s}` but preset `{}` is a `{}` run",
                    p.name, p.scenario
                ));
            }
            s.clone()
        }
        (Some(s), None) => s.clone(),
        (None, Some(p)) => p.scenario.to_string(),
        (None, None) => return Err("config must set `preset` or `scenario`".into()),
    };

    let mut params: BTreeMap<String, f64> = preset
        .map(|p| p.params.iter().map(|(k, v)| (k.to_string(), *v)).collect())
        .unwrap_or_default();
    for (k, v) in &config.parameters {
        params.insert(k.clone(), *v);
    }

    let grid = match (&config.grid, preset) {
        (Some(g), _) => log_grid(g.min, g.max, g.points).map_err(|e| e.to_string())?,
        (None, Some(p)) => {
            log_grid(p.grid_min, p.grid_max, p.grid_points).map_err(|e| e.to_string())?
        }
        (None, None) => {
            if scenario == "echo_check" {
                vec![1.0] // unused by the echo path
            } else {
                return Err("config must provide a [grid] when no preset is named".into());
            }
        }
    };

    let seed = seed_override.or(config.seed).unwrap_or(0);
    let mut spec = RunSpec::new(scenario, params, grid);
    spec.seed = seed;
    if let Some(opt) = &config.optimizer {
        if let Some(r) = opt.restarts {
            spec.restarts = r;
        }
        if let Some(t) = opt.tolerance {
            spec.tolerance = t;
        }
        if let Some(m) = opt.max_iters {
            spec.max_iters = m;
        }
        if let Some(w) = opt.warm_start {
            spec.warm_start = w;
        }
    }

    let output = config.output.clone().unwrap_or_default();
    let output_dir = out_override
        .or(output.dir.clone())
        .unwrap_or_else(|| ".".to_string());
    let output_name = output.name.clone().unwrap_or_else(|| {
        config
            .preset
            .clone()
            .unwrap_or_else(|| spec.scenario.clone())
    });

    // Record the effective seed so the sidecar re-runs identically.
    let mut config = config;
    config.seed = Some(seed);

    Ok(ResolvedRun {
        spec,
        config,
        output_name,
        output_dir,
    })
}
