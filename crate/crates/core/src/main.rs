use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use indicator_sim::config::{parse_entries, Entry, RunConfig};
use indicator_sim::error::{Error, Result};
use indicator_sim::experiments::{run_preset, Executor};
use indicator_sim::report::{deliver, emit_scenario_report, emit_simulation_csv, emit_sweep_csv};
use indicator_sim::scenario::evaluate;
use indicator_sim::simulation::run_simulation;

const WORKERS_ENV: &str = "INDICATOR_SIM_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "indicator-sim",
    version,
    about = "Impact factor vs. citations as article-level indicators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run one simulated world and dump every article as CSV.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replicated accuracy sweep over a preset grid, written as CSV.
    Sweep {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        /// Master seed for all runs.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: $INDICATOR_SIM_WORKERS, else all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Exact expected-value tables for the two-journal example.
    Scenario {
        #[arg(value_enum)]
        which: ScenarioArg,
        #[arg(long, required_if_eq("which", "custom"))]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Custom,
}

fn read_config(path: Option<&PathBuf>) -> Result<Vec<Entry>> {
    match path {
        Some(p) => parse_entries(&fs::read_to_string(p)?),
        None => Ok(Vec::new()),
    }
}

fn default_workers() -> Vec<Entry> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v,
        Err(_) => std::thread::available_parallelism()
            .map_or(1, |n| n.get())
            .to_string(),
    };
    vec![Entry::flag("run.workers", workers)]
}

fn push<T: ToString>(flags: &mut Vec<Entry>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        flags.push(Entry::flag(key, v.to_string()));
    }
}

fn build_config(cmd: &Cmd) -> Result<RunConfig> {
    let mut flags = Vec::new();
    let (config, out) = match cmd {
        Cmd::Simulate { config, seed, out } => {
            flags.push(Entry::flag("run.command", "simulate"));
            push(&mut flags, "model.seed", *seed);
            (config, out)
        }
        Cmd::Sweep {
            preset,
            config,
            runs,
            seed,
            out,
            workers,
        } => {
            let preset = match preset {
                PresetArg::Fig1 => "fig1",
                PresetArg::Fig2 => "fig2",
                PresetArg::Fig3 => "fig3",
                PresetArg::Custom => "custom",
            };
            flags.push(Entry::flag("run.command", "sweep"));
            flags.push(Entry::flag("run.preset", preset));
            push(&mut flags, "sweep.runs", *runs);
            push(&mut flags, "sweep.master_seed", *seed);
            push(&mut flags, "run.workers", *workers);
            (config, out)
        }
        Cmd::Scenario { which, config, out } => {
            let name = match which {
                ScenarioArg::One => "1",
                ScenarioArg::Two => "2",
                ScenarioArg::Custom => "custom",
            };
            flags.push(Entry::flag("run.command", "scenario"));
            flags.push(Entry::flag("scenario.name", name));
            (config, out)
        }
    };
    push(&mut flags, "output.path", out.as_ref().map(|p| p.display()));
    let file = read_config(config.as_ref())?;
    RunConfig::from_layers(&[&default_workers(), &file, &flags])
}

fn execute(cmd: &Cmd) -> Result<()> {
    let cfg = build_config(cmd)?;
    let out = cfg.output.as_deref();
    match cmd {
        Cmd::Simulate { .. } => {
            let outcome = run_simulation(&cfg.model)?;
            deliver(out, |buf| emit_simulation_csv(&outcome, buf))?;
            let ifs: Vec<String> = outcome
                .impact_factors
                .iter()
                .map(|f| format!("{f:.4}"))
                .collect();
            eprintln!("impact factors: {}", ifs.join(" "));
        }
        Cmd::Sweep { .. } => {
            let executor = Executor::new(cfg.workers)?;
            let cells = run_preset(cfg.preset, &cfg.sweep, &executor)?;
            deliver(out, |buf| emit_sweep_csv(&cells, buf))?;
            eprintln!(
                "{} cells, {} runs each, {} worker(s)",
                cells.len(),
                cfg.sweep.runs,
                cfg.workers
            );
        }
        Cmd::Scenario { .. } => {
            let results = evaluate(&cfg.scenario.scenario()?, cfg.scenario.select_count)?;
            deliver(out, |buf| emit_scenario_report(&results, buf))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Io(_)) { 2 } else { 1 })
        }
    }
}
