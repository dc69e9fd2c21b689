//! `hotgate`: batch runner for gate-fidelity curves of encoded qubit
//! modules under position noise.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use hotgate_core::presets::presets;
use hotgate_core::runner::{run, RunResult};
use hotgate_core::Error;

use crate::config::{load_config, resolve, ResolvedRun, RunConfig, RunRecord};
use crate::output::{csv_path, curve_to_csv, json_path, write_atomic, write_record};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Echo residuals above this are a numeric failure.
const ECHO_TOLERANCE: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "hotgate",
    about = "Fidelity curves for logical ZZ gates between position-noisy qubit modules",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run from a config file or a named preset.
    Run {
        /// TOML run configuration (or a JSON sidecar from a previous run).
        config: Option<PathBuf>,
        /// Run a built-in preset instead of a config file.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<String>,
        /// RNG seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in presets.
    Presets,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(code) = configure_threads() {
        return code;
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            list_presets();
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            preset,
            out,
            seed,
        } => match run_command(config, preset, out, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err((code, message)) => {
                eprintln!("error: {message}");
                ExitCode::from(code)
            }
        },
    }
}

fn configure_threads() -> Result<(), ExitCode> {
    if let Ok(value) = std::env::var("HOTGATE_THREADS") {
        let n: usize = value.parse().map_err(|_| {
            eprintln!("error: HOTGATE_THREADS must be a positive integer, got `{value}`");
            ExitCode::from(EXIT_CONFIG)
        })?;
        if n == 0 {
            eprintln!("error: HOTGATE_THREADS must be at least 1");
            return Err(ExitCode::from(EXIT_CONFIG));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| {
                eprintln!("error: cannot configure thread pool: {e}");
                ExitCode::from(EXIT_CONFIG)
            })?;
    }
    Ok(())
}

fn list_presets() {
    println!("available presets:");
    for def in presets() {
        let params = def
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!("  {:6} [{}] {}", def.name, def.scenario, def.description);
        println!("         parameters: {params}");
        println!(
            "         grid: {} log-spaced points over [{}, {}]",
            def.grid_points, def.grid_min, def.grid_max
        );
    }
}

type CommandError = (u8, String);

fn run_command(
    config_path: Option<PathBuf>,
    preset: Option<String>,
    out: Option<String>,
    seed: Option<u64>,
) -> Result<(), CommandError> {
    let config: RunConfig = match (&config_path, &preset) {
        (Some(path), None) => load_config(path).map_err(|e| (EXIT_CONFIG, e))?,
        (None, Some(name)) => RunConfig {
            preset: Some(name.clone()),
            ..RunConfig::default()
        },
        (Some(_), Some(_)) => {
            return Err((
                EXIT_CONFIG,
                "pass either a config file or --preset, not both".into(),
            ))
        }
        (None, None) => {
            return Err((
                EXIT_CONFIG,
                "pass a config file or --preset NAME; see `hotgate presets`".into(),
            ))
        }
    };

    let resolved = resolve(config, seed, out).map_err(|e| (EXIT_CONFIG, e))?;
    execute(resolved)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Validation(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn execute(resolved: ResolvedRun) -> Result<(), CommandError> {
    let ResolvedRun {
        spec,
        config,
        output_name,
        output_dir,
    } = resolved;

    let started = Instant::now();
    let result = run(&spec).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let wall_time_seconds = started.elapsed().as_secs_f64();

    let mut record = RunRecord {
        config,
        resolved_scenario: spec.scenario.clone(),
        resolved_parameters: spec.params.clone(),
        seed: spec.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds,
        csv: None,
        echo_max_residual: None,
    };

    match result {
        RunResult::Curve(curve) => {
            let csv = curve_to_csv(&curve);
            let csv_file = csv_path(&output_dir, &output_name);
            write_atomic(&csv_file, &csv)
                .map_err(|e| (EXIT_NUMERIC, format!("writing {}: {e}", csv_file.display())))?;
            record.csv = Some(
                csv_file
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
            let json_file = json_path(&output_dir, &output_name);
            write_record(&json_file, &record)
                .map_err(|e| (EXIT_NUMERIC, format!("writing {}: {e}", json_file.display())))?;
            let last = curve.points.last().expect("non-empty curve");
            println!(
                "{}: {} points, final infidelity {:.3e} (trivial {:.3e}) -> {}",
                output_name,
                curve.points.len(),
                1.0 - last.fidelity,
                1.0 - curve.trivial_fidelity.last().unwrap(),
                csv_file.display()
            );
        }
        RunResult::Echo {
            max_residual,
            instances,
        } => {
            record.echo_max_residual = Some(max_residual);
            let json_file = json_path(&output_dir, &output_name);
            write_record(&json_file, &record)
                .map_err(|e| (EXIT_NUMERIC, format!("writing {}: {e}", json_file.display())))?;
            println!(
                "echo check: max residual {max_residual:.3e} over {instances} instances"
            );
            if max_residual >= ECHO_TOLERANCE {
                return Err((
                    EXIT_NUMERIC,
                    format!(
                        "echo residual {max_residual:.3e} exceeds the {ECHO_TOLERANCE:.0e} bound"
                    ),
                ));
            }
        }
    }
    Ok(())
}
