use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bopert::config::{Config, Scenario, ScenarioKind};
use bopert::runner::{emit_report, load_record, run_scenario, RunRecord};

/// Experiments for zeroth-order perturbations of the periodic Benjamin-Ono equation.
///
/// Exit status is 0 iff every verdict passes, 1 if some verdict fails and 2 on
/// usage or configuration errors. BOPERT_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "bopert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the initial data and store the trajectory.
    Evolve(RunArgs),
    /// beta conservation, exponential bound or isospectrality (bo-conservation by default).
    Beta(RunArgs),
    /// Infinite-depth limit or tightness (ilw-limit by default).
    Converge(RunArgs),
    /// Compare direct and zero-mean gauged evolutions.
    GaugeCheck(RunArgs),
    /// Structural checks of the shipped symbols.
    SymbolAudit(RunArgs),
    /// Reload a finished run from --out and re-emit its report.
    Report {
        #[arg(long, default_value = "bopert-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "bopert-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// key=value, applied after the config file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn scenario(args: &RunArgs, allowed: &[ScenarioKind]) -> bopert::Result<Scenario> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for o in &args.overrides {
        cfg.apply(o)?;
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    let mut sc = Scenario::from_config(&cfg, allowed[0])?;
    if !allowed.contains(&sc.kind) {
        let names: Vec<&str> = allowed.iter().map(|k| k.name()).collect();
        return Err(bopert::Error::Config(format!(
            "scenario `{}` is not available here; expected one of {}",
            sc.kind,
            names.join(", ")
        )));
    }
    sc.output = Some(args.out.clone());
    Ok(sc)
}

fn finish(rec: &RunRecord, out: &Path) -> ExitCode {
    if let Err(e) = emit_report(rec, out) {
        eprintln!("error: writing report to {}: {e}", out.display());
        return ExitCode::from(2);
    }
    print!("{}", rec.summary());
    if rec.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn init_threads() {
    let Ok(raw) = std::env::var("BOPERT_THREADS") else {
        return;
    };
    match raw.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring BOPERT_THREADS={raw}"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    use ScenarioKind::*;
    let (args, allowed): (&RunArgs, &[ScenarioKind]) = match &cli.command {
        Command::Evolve(a) => (a, &[Evolve]),
        Command::Beta(a) => (a, &[BoConservation, ExpBound, Isospectral]),
        Command::Converge(a) => (a, &[IlwLimit, Tightness]),
        Command::GaugeCheck(a) => (a, &[GaugeCheck]),
        Command::SymbolAudit(a) => (a, &[SymbolAudit]),
        Command::Report { out } => {
            return match load_record(out) {
                Ok(rec) => finish(&rec, out),
                Err(e) => {
                    eprintln!("error: reading {}: {e}", out.display());
                    ExitCode::from(2)
                }
            };
        }
    };
    match scenario(args, allowed) {
        Ok(sc) => finish(&run_scenario(&sc), &args.out),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
