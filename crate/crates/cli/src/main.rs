//! Command-line experiment harness for the variable-stiffness actuator
//! simulator: run catalog scenarios, export static model sweeps, and check
//! the numerical core against its independent references.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vssea_core::config::{self, ConfigLayer, RunConfig};
use vssea_core::csv_io;
use vssea_core::experiments::{self, Scenario};
use vssea_core::validation;

#[derive(Parser)]
#[command(
    name = "vssea",
    about = "Variable-stiffness series elastic actuator: simulation experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (flat dotted-key format); defaults apply if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override single keys, e.g. --set actuator.model=large_deflection
    /// (applied after the file).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, String> {
        let mut layer = ConfigLayer::new();
        for entry in &self.overrides {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| format!("--set expects KEY=VALUE, got '{entry}'"))?;
            layer.set(key.trim(), value.trim());
        }
        config::load_config_with_overrides(self.config.as_deref(), &layer)
            .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one catalog scenario and write its CSV log and metrics summary.
    Run {
        /// Scenario name (see `vssea catalog`); falls back to run.scenario
        /// from the configuration.
        scenario: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (default: run.out_dir, then $VSSEA_OUT_DIR, then ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the scenario catalog.
    Catalog {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Export the static large- vs small-deflection model sweep as CSV.
    SweepStatic {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical self-checks and print one line per check.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.out_dir.clone().map(PathBuf::from))
        .or_else(|| std::env::var_os("VSSEA_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn catalog_for(config: &RunConfig) -> Vec<Scenario> {
    experiments::scenario_catalog(&config.actuator, config.physics_dt, config.control_dt)
}

fn run_one(name: &str, config: &RunConfig, out_dir: &Path) -> Result<(), String> {
    let scenarios = catalog_for(config);
    let Some(scenario) = scenarios.iter().find(|s| s.name == name) else {
        let known: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
        return Err(format!(
            "usage: unknown scenario '{name}'; available: {}",
            known.join(", ")
        ));
    };
    let result = experiments::run_scenario(scenario).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    csv_io::write_csv(&result, &csv_path).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    let metrics_path = out_dir.join(format!("{name}.metrics.txt"));
    csv_io::write_metrics(name, &result.metrics, &metrics_path)
        .map_err(|e| format!("{}: {e}", metrics_path.display()))?;

    let report = experiments::energy_report(&result);
    println!("scenario          {name}");
    println!("samples           {}", result.len());
    println!("rms_error         {:.6e}", result.metrics.rms_error);
    println!("max_overshoot     {:.6e}", result.metrics.max_overshoot);
    println!("settling_time     {:.3} s", result.metrics.settling_time);
    println!(
        "peak |tau_s_dis|  {:.6e} Nm",
        result.metrics.peak_disturbance_torque
    );
    println!("energy cost       {:.6e} J", result.metrics.energy_cost);
    println!("peak stored       {:.6e} J", report.peak_stored);
    println!("wrote             {}", csv_path.display());
    println!("wrote             {}", metrics_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenario,
            config,
            out,
        } => config.resolve().and_then(|cfg| {
            let Some(name) = scenario.or_else(|| cfg.scenario.clone()) else {
                return Err("usage: no scenario given (pass one or set run.scenario)".to_string());
            };
            let dir = output_dir(out, &cfg);
            run_one(&name, &cfg, &dir)
        }),
        Command::Catalog { config } => config.resolve().map(|cfg| {
            for scenario in catalog_for(&cfg) {
                println!("{:<28} {}", scenario.name, scenario.description);
            }
        }),
        Command::SweepStatic { config, out } => config.resolve().and_then(|cfg| {
            let vsam = &cfg.actuator.vsam;
            let (q_grid, x_grid) = experiments::default_sweep_grids(vsam);
            let table = experiments::compare_models_sweep(vsam, &q_grid, &x_grid)
                .map_err(|e| e.to_string())?;
            let dir = output_dir(out, &cfg);
            std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let path = dir.join("static_sweep.csv");
            csv_io::write_sweep_csv(&table, &path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            println!("wrote {} ({} rows)", path.display(), table.rows.len());
            Ok(())
        }),
        Command::Validate { config } => config.resolve().and_then(|cfg| {
            let mut all_passed = true;
            for check in validation::run_all_checks(&cfg.actuator.vsam) {
                println!(
                    "{} {}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
                all_passed &= check.passed;
            }
            if all_passed {
                Ok(())
            } else {
                Err("validation failed".to_string())
            }
        }),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            if message.starts_with("usage:") {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
