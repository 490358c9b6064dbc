//! Command-line front end: scenario files, figure data, sweeps and reports.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{Context, Output};
pub use error::CliError;
pub use scenario::Scenario;

#[derive(Debug, Parser)]
#[command(name = "lgtorsion", version, about = "Windmill-rotor torsional optomechanics with Laguerre-Gaussian cavity modes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 or unset uses all cores.
    #[arg(long, global = true, env = "LGT_THREADS")]
    pub threads: Option<usize>,
    /// Quadrature relative tolerance (overrides `rel_tol`).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Override a scenario key, e.g. `--set radius="8 um"`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Linear coupling for the scenario's mode; writes coupling.csv.
    Coupling,
    /// Closed-form and numeric g/B for p = 0 over `fig2_l`; writes fig2.csv.
    Fig2,
    /// Field maps for l = 3, p = 0 and 5 with the rotor outline.
    Fig3,
    /// g over the `sweep_l` × `sweep_p` grid; writes fig4.csv.
    Fig4,
    /// ζ and Γ over the sweep grid; writes fig5.csv.
    Fig5,
    /// Radial index with the largest |g|.
    Optimize {
        #[arg(long)]
        l: Option<i32>,
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Human-readable design report.
    Report,
}

/// Loads the scenario and runs the command on a pool of `cli.threads` workers.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let path = cli.scenario.as_ref().ok_or_else(|| CliError::config("--scenario", "a scenario file is required"))?;
    let mut scenario = Scenario::from_file(path, &cli.overrides)?;
    if let Some(tol) = cli.tolerance {
        scenario = scenario.with_tolerance(tol)?;
    }
    let ctx = Context::new(scenario, cli.out.clone());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config("--threads", e))?;
    pool.install(|| match cli.command {
        Command::Coupling => commands::coupling(&ctx),
        Command::Fig2 => commands::fig2(&ctx),
        Command::Fig3 => commands::fig3(&ctx),
        Command::Fig4 => commands::fig4(&ctx),
        Command::Fig5 => commands::fig5(&ctx),
        Command::Optimize { l, p_max } => commands::optimize(&ctx, l, p_max),
        Command::Report => commands::report(&ctx),
    })
}
