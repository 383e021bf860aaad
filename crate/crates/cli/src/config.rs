//! Run configuration: one JSON file, with command-line flags overriding keys.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use vfrlab::{Rat, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Solve,
    Frontier,
    DiagnoseClosedness,
    ScalarizeCompare,
    NormalCone,
    CoderivativeCheck,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Lower-level dominance tolerance; the problem's own value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominance: Option<f64>,
    /// Upper-level dominance tolerance; the instance's own value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<Subcommand>,
    /// Catalog id; exclusive with `spec`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    /// Path to a JSON problem spec; exclusive with `catalog`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<vfrlab::GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_grid: Option<vfrlab::GridSpec>,
    /// Replaces the step of every non-degenerate axis of both grids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Parameters for per-x subcommands; the x grid points when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<Vec<f64>>>,
    /// `eff`, `weff`, `bar`, or `all`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept: Option<String>,
    /// Points per dual-sphere arc for the scalarization sweep.
    pub resolution: usize,
    pub tolerances: Tolerances,
    pub solve: SolveOptions,
    /// Dual vectors for coderivative checks; the integer grid `[-2, 2]^q` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_star: Option<Vec<Vec<Rat>>>,
    pub oracle_samples: usize,
    pub oracle_radius: f64,
    pub seed: u64,
    /// Not written to reports, so artifacts do not depend on where they land.
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: None,
            catalog: None,
            spec: None,
            x_grid: None,
            y_grid: None,
            step: None,
            params: None,
            concept: None,
            resolution: 64,
            tolerances: Tolerances::default(),
            solve: SolveOptions::default(),
            z_star: None,
            oracle_samples: 10_000,
            oracle_radius: 0.1,
            seed: 0,
            out_dir: None,
        }
    }
}

pub const DEFAULT_OUT_DIR: &str = "vfrlab-out";

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.subcommand.is_none() {
            return Err("no subcommand given on the command line or in the config".into());
        }
        match (&self.catalog, &self.spec) {
            (Some(_), Some(_)) => return Err("`catalog` and `spec` are mutually exclusive".into()),
            (None, None) => return Err("a problem source is required: `catalog` or `spec`".into()),
            (None, Some(p)) if !p.exists() => return Err(format!("spec path {} does not exist", p.display())),
            _ => {}
        }
        if self.resolution == 0 {
            return Err("`resolution` must be positive".into());
        }
        if let Some(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err("`step` must be positive and finite".into());
            }
        }
        if !(self.oracle_radius > 0.0) || self.oracle_samples == 0 {
            return Err("`oracle_samples` and `oracle_radius` must be positive".into());
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}
