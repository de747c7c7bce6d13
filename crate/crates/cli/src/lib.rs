// `!(x > 0.0)` also rejects NaN; keep that form in argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod scenario;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::commands::{Format, Outcome};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};

#[derive(Debug, Parser)]
#[command(name = "farmbeam", version, about = "Beamed power from solar farms to aircraft")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario JSON; omitted fields take the built-in defaults.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Directory for every artifact the subcommand produces.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Samples per side of field maps, overriding the scenario.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Worker threads for field evaluation. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Focal spot size and encircled energy.
    Spot,
    /// Power density map around the target.
    BeamMap,
    /// Efficiency chain and density checks.
    Link,
    /// Flight over the farm network.
    Coverage,
    /// Beamed-energy price, hourly cost and farm counts.
    Econ,
    /// Density limits with PASS/FAIL lines.
    Safety,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Scenario(ScenarioError::Missing { .. }) => 2,
            CliError::Scenario(ScenarioError::Parse(_)) => 3,
            CliError::Scenario(ScenarioError::Invalid { .. }) => 4,
        }
    }
}

/// Runs one subcommand and returns its artifacts.
pub fn execute(command: Command, scenario: &Scenario, grid_n: Option<usize>) -> Result<Outcome, CliError> {
    let r = scenario.resolve()?;
    let n = grid_n.unwrap_or(r.grid_n);
    if n < 16 {
        return Err(CliError::Runtime(format!("--grid-n must be at least 16, got {n}")));
    }
    let out = match command {
        Command::Spot => commands::spot(&r, n),
        Command::BeamMap => commands::beam_map(&r, n),
        Command::Link => commands::link(&r),
        Command::Coverage => commands::coverage(&r),
        Command::Econ => commands::econ(&r),
        Command::Safety => commands::safety(&r),
    };
    out.map_err(CliError::Runtime)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = match &cli.scenario {
        Some(p) => parse_scenario(p)?,
        None => Scenario::default(),
    };
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let outcome = pool.install(|| execute(cli.command, &scenario, cli.grid_n))?;

    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    stdout
        .write_all(&outcome.primary(format).bytes)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        for a in &outcome.artifacts {
            let path = dir.join(a.name);
            fs::write(&path, &a.bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}
