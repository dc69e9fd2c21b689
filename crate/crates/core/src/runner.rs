//! Scenario execution: turn a resolved run specification into an
//! infidelity curve (or an echo residual), deterministically from the seed.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fidelity::{echo_residual, EchoSpec, GateTime};
use crate::geometry::LogicalVector;
use crate::optimizer::{infidelity_curve, log_grid, CurvePoint, InfidelityCurve,
    OptimizationConfig};
use crate::presets::{build_scenario, ScenarioModel};

/// A fully resolved run: scenario, parameters, grid and optimizer settings.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub grid: Vec<f64>,
    pub restarts: usize,
    pub tolerance: f64,
    pub max_iters: usize,
    pub warm_start: bool,
    pub seed: u64,
}

impl RunSpec {
    pub fn new(scenario: impl Into<String>, params: BTreeMap<String, f64>, grid: Vec<f64>) -> Self {
        RunSpec {
            scenario: scenario.into(),
            params,
            grid,
            restarts: 4,
            tolerance: 1e-9,
            max_iters: 0,
            warm_start: true,
            seed: 0,
        }
    }

    /// Spec for a named preset with its reference grid.
    pub fn from_preset(def: &crate::presets::PresetDef) -> Result<Self> {
        let params = def
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let grid = log_grid(def.grid_min, def.grid_max, def.grid_points)?;
        Ok(RunSpec::new(def.scenario, params, grid))
    }

    fn optimizer_config(&self) -> Result<OptimizationConfig<f64>> {
        let config = OptimizationConfig {
            dt_grid: self.grid.clone(),
            restarts: self.restarts,
            tolerance: self.tolerance,
            max_iters: self.max_iters,
            warm_start: self.warm_start,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

/// What a run produces.
pub enum RunResult {
    Curve(InfidelityCurve<f64>),
    Echo { max_residual: f64, instances: usize },
}

/// Execute a run specification.
pub fn run(spec: &RunSpec) -> Result<RunResult> {
    match build_scenario(&spec.scenario, &spec.params)? {
        ScenarioModel::Kernel { kernel, .. } => {
            let config = spec.optimizer_config()?;
            Ok(RunResult::Curve(infidelity_curve(&kernel, &config)?))
        }
        ScenarioModel::Lattice { prepared, n } => {
            // The quantized lattice is evaluated with the trivial encoding;
            // the optimized trace equals the trivial one by construction.
            if spec.grid.is_empty() {
                return Err(Error::validation("dt grid must be non-empty"));
            }
            let trivial = LogicalVector::<f64>::trivial(n);
            let mut points = Vec::with_capacity(spec.grid.len());
            let mut trivial_fidelity = Vec::with_capacity(spec.grid.len());
            for &dt in &spec.grid {
                let f = prepared.fidelity(GateTime::new(dt)?)?;
                trivial_fidelity.push(f);
                points.push(CurvePoint {
                    delta_t: dt,
                    fidelity: f,
                    a: trivial.clone(),
                    b: trivial.clone(),
                });
            }
            Ok(RunResult::Curve(InfidelityCurve {
                points,
                trivial_fidelity,
            }))
        }
        ScenarioModel::Echo { k, tau, instances } => {
            let max_residual = run_echo(k, tau, instances, spec.seed)?;
            Ok(RunResult::Echo {
                max_residual,
                instances,
            })
        }
    }
}

/// Echo residuals over seeded random field/coupling instances; returns the
/// worst one.
pub fn run_echo(k: usize, tau: f64, instances: usize, seed: u64) -> Result<f64> {
    if instances == 0 {
        return Err(Error::validation("need at least one echo instance"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let fields: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut hzz = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in (i + 1)..k {
                hzz[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let spec = EchoSpec::new(fields, tau)?;
        worst = worst.max(echo_residual(&spec, &hzz, k)?);
    }
    Ok(worst)
}
