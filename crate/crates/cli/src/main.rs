// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsl_cli::commands::{
    cmd_bound, cmd_check, cmd_min_time, cmd_relax, cmd_trajectory, run_closed_compare, run_sweep, write_closed_compare,
    write_sweep,
};
use qsl_cli::output::to_json;
use qsl_cli::{CliError, CliResult, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qsl", version, about = "Speed-limit bounds and minimal-time control for open quantum systems")]
struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `outputs` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Master seed (overrides `master_seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the schedule-independent bound for the configured model.
    Bound,
    /// Minimal-time search over the configured sweep, written to sweep.csv.
    Sweep,
    /// Minimal-time search for the configured model.
    MinTime,
    /// Uncontrolled first-passage time to the target.
    Relax,
    /// Uncontrolled and optimized trajectories.
    Trajectory,
    /// Run the invariant suite.
    Check {
        #[arg(long, hide = true)]
        corrupt_convention: bool,
    },
    /// Compare the generator-norm bound with the Bures-angle limit on random pure states.
    ClosedCompare,
}

fn load(cli: &Cli) -> CliResult<ExperimentConfig> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.outputs = out.clone();
    }
    Ok(cfg)
}

fn announce(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Bound => {
            let summary = cmd_bound(&load(cli)?)?;
            println!("{}", to_json(&summary));
        }
        Command::Sweep => {
            let cfg = load(cli)?;
            let rows = run_sweep(&cfg, cli.jobs)?;
            announce(&write_sweep(&cfg.outputs, &rows)?);
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                return Err(CliError::Numerical(format!("{failed} of {} sweep points failed", rows.len())));
            }
        }
        Command::MinTime => {
            let cfg = load(cli)?;
            let (s, path) = cmd_min_time(&cfg, &cfg.outputs)?;
            println!(
                "t_min = {:.6e}  t_uncontrolled = {:.6e}  speedup = {:.4}  bound = {:.6e}  distance = {:.3e}",
                s.result.t_min, s.result.t_uncontrolled, s.speedup, s.bound.bound, s.result.achieved_distance
            );
            announce(&path);
        }
        Command::Relax => {
            let cfg = load(cli)?;
            let (s, path) = cmd_relax(&cfg, &cfg.outputs)?;
            println!("{}", to_json(&s));
            announce(&path);
        }
        Command::Trajectory => {
            let cfg = load(cli)?;
            for path in cmd_trajectory(&cfg, &cfg.outputs)? {
                announce(&path);
            }
        }
        Command::Check { corrupt_convention } => {
            let report = cmd_check(cli.seed.unwrap_or(0), *corrupt_convention)?;
            for o in &report.outcomes {
                println!(
                    "{:<4} {:<50} residual {:.3e}  tolerance {:.1e}  instances {}",
                    if o.passed { "ok" } else { "FAIL" },
                    o.name,
                    o.residual,
                    o.tolerance,
                    o.count
                );
            }
            let failed = report.outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed { failed, total: report.outcomes.len() });
            }
        }
        Command::ClosedCompare => {
            let mut cfg = match &cli.config {
                Some(_) => load(cli)?,
                None => ExperimentConfig::from_json(r#"{"schema_version": 1, "model": {"kind": "single_qubit", "omega": 1.0, "gamma": 1.0}}"#)?,
            };
            if let Some(seed) = cli.seed {
                cfg.master_seed = seed;
            }
            if let Some(out) = &cli.out {
                cfg.outputs = out.clone();
            }
            let reports = run_closed_compare(&cfg)?;
            announce(&write_closed_compare(&cfg.outputs, &reports)?);
            let failed = reports.iter().filter(|(_, r)| !r.all_hold()).count();
            let divergent = reports.iter().filter(|(_, r)| r.reference_divergent()).count();
            println!("{} instances, {failed} violations, {divergent} with a divergent reference limit", reports.len());
            if failed > 0 {
                return Err(CliError::ChecksFailed { failed, total: reports.len() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
