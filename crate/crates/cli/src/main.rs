use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use locol_cli::{run_experiment, Command, ExperimentConfig};

/// Edge-coloring experiments on bounded-degree graphs.
#[derive(Parser)]
#[command(name = "locol", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// key = value config file; later --key value flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides such as `--n 400 --d 3 --mode general`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Edge-color an instance and write the coloring, audit and decay curve.
    Color(Common),
    /// Run the matching engine and check the structural claims.
    Diagnose(Common),
    /// Generate the edge set with matchings or partial injections.
    Decompose(Common),
    /// Exact baselines: chromatic index or the pre-coloring search.
    Oracle(Common),
    /// Color over an n0 sweep and seed list.
    Sweep(Common),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Sub::Color(c) => (Command::Color, c),
        Sub::Diagnose(c) => (Command::Diagnose, c),
        Sub::Decompose(c) => (Command::Decompose, c),
        Sub::Oracle(c) => (Command::Oracle, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let mut cfg = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text).with_context(|| p.display().to_string())?
        }
        None => ExperimentConfig::default(),
    };
    cfg.apply_overrides(&common.overrides)?;
    let report = run_experiment(cmd, &cfg)?;
    print!("{report}");
    Ok(())
}
