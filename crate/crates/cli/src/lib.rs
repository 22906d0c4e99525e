//! Experiment runner behind the `covert-watch` binary.
//!
//! ```text
//! covert-watch <dep-sweep|ex-sweep|optimize> (--config FILE | --preset NAME)
//!     [--seed N] [--mc-samples N] [--step S] [--out PATH] [--set key=value ...]
//! ```

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "covert-watch", version, about = "Covert proactive eavesdropping experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Averaged minimum DEP along a sweep, at a fixed AN power (CSV).
    DepSweep(RunArgs),
    /// Eavesdropping non-outage probability per scheme along a sweep (CSV).
    ExSweep(RunArgs),
    /// Covert AN power search at a single point (JSON).
    Optimize(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Config file (flat TOML with dotted keys).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in figure preset: fig2, fig3, fig4, fig5a, fig5b, fig6, fig7, fig8a, fig8b.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// AN power step for the search (linear, absolute).
    #[arg(long)]
    pub step: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a config key, e.g. `--set params.eta=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl RunArgs {
    pub fn load(&self) -> Result<ExperimentConfig, CliError> {
        let text = match (&self.config, &self.preset) {
            (Some(path), _) => std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
            (None, Some(name)) => config::preset(name)?.to_string(),
            (None, None) => String::new(),
        };
        let mut flat = config::parse_flat(&text)?;
        for o in &self.overrides {
            let (k, v) = config::parse_override(o)?;
            flat.insert(k, v);
        }
        if let Some(seed) = self.seed {
            flat.insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        if let Some(n) = self.mc_samples {
            flat.insert("mc_samples".into(), toml::Value::Integer(n as i64));
        }
        if let Some(step) = self.step {
            flat.insert("step".into(), toml::Value::Float(step));
        }
        if let Some(out) = &self.out {
            flat.insert("output".into(), toml::Value::String(out.display().to_string()));
        }
        ExperimentConfig::from_flat(flat)
    }
}

/// Runs a parsed command and returns the rendered output and its destination.
pub fn run(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let (args, render): (&RunArgs, fn(&ExperimentConfig) -> Result<String, CliError>) = match &cli.command {
        Command::DepSweep(a) => (a, commands::dep_sweep),
        Command::ExSweep(a) => (a, commands::ex_sweep),
        Command::Optimize(a) => (a, commands::optimize),
    };
    let config = args.load()?;
    let text = render(&config)?;
    Ok((text, config.output.clone()))
}

/// Caps the global rayon pool from `COVERT_WATCH_THREADS`.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("COVERT_WATCH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("COVERT_WATCH_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}
