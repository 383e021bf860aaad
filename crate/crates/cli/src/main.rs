//! `vfrlab`: configuration-driven runs over the catalog and JSON problem specs.
//!
//! Exit status: 0 when every enabled check passed, 1 when a verification
//! failed, 2 on a usage or configuration error, 3 on any other error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::UsageError;
use config::{RunConfig, Subcommand};

const SCHEMA_HINT: &str = "see the \"Run configuration\" section of README.md for the config schema";

#[derive(Parser, Debug)]
#[command(name = "vfrlab", version, about = "Multiobjective bilevel optimization lab")]
struct Cli {
    /// Subcommand; may instead be given as `subcommand` in the config file.
    #[arg(value_enum)]
    subcommand: Option<Subcommand>,
    /// JSON run configuration; flags below override its keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Catalog id (replaces any `spec` in the config).
    #[arg(long, conflicts_with = "spec")]
    catalog: Option<String>,
    /// JSON problem spec (replaces any `catalog` in the config).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// `eff`, `weff`, `bar` or `all`.
    #[arg(long)]
    concept: Option<String>,
    /// Step for every non-degenerate axis of both grids.
    #[arg(long)]
    step: Option<f64>,
    /// Parameter vector, comma-separated; repeatable.
    #[arg(long = "param", value_delimiter = ';', allow_hyphen_values = true)]
    params: Vec<String>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    dominance_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, short, env = "VFRLAB_OUT")]
    out: Option<PathBuf>,
}

fn parse_vec(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("parameter `{s}`: {e}"))).collect()
}

fn merge(cli: Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.subcommand.is_some() {
        cfg.subcommand = cli.subcommand;
    }
    if let Some(id) = cli.catalog {
        cfg.catalog = Some(id);
        cfg.spec = None;
    }
    if let Some(p) = cli.spec {
        cfg.spec = Some(p);
        cfg.catalog = None;
    }
    if cli.concept.is_some() {
        cfg.concept = cli.concept;
    }
    if cli.step.is_some() {
        cfg.step = cli.step;
    }
    if !cli.params.is_empty() {
        cfg.params = Some(cli.params.iter().map(|s| parse_vec(s)).collect::<Result<_, _>>()?);
    }
    if let Some(r) = cli.resolution {
        cfg.resolution = r;
    }
    if cli.dominance_tol.is_some() {
        cfg.tolerances.dominance = cli.dominance_tol;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out_dir = cli.out;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match merge(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\n{SCHEMA_HINT}");
            return ExitCode::from(2);
        }
    };
    match commands::run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n{SCHEMA_HINT}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
