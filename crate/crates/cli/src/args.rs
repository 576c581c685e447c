//! Command-line interface.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::{Algorithm, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "narx-upso", version, about = "NARX model structure selection experiments")]
pub struct Cli {
    /// Worker threads for parallel runs (defaults to all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a benchmark system and write `<out>.csv` plus a JSON sidecar.
    Generate {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV path; defaults to `<SYSTEM>_seed<SEED>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run R seeded searches and keep the best structure.
    Identify(RunArgs),
    /// Selection frequencies and pruned outcome tallies of a run directory.
    Report {
        /// Directory written by `identify`.
        #[arg(long)]
        runs: PathBuf,
        /// Sidecar holding the true structure.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// t-test significance level for pruning.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean criterion over a (u_f, RG) grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Unification factors, comma separated.
        #[arg(long, value_delimiter = ',')]
        u_f: Option<Vec<f64>>,
        /// Refresh gaps, comma separated.
        #[arg(long, value_delimiter = ',')]
        rg: Option<Vec<usize>>,
        /// Searches per grid cell.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Residual correlation tests of the best model in a run directory.
    Validate {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_lag: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub system: Option<String>,
    /// `k,u,y` CSV dataset instead of a simulated system.
    #[arg(long, conflicts_with = "system")]
    pub data: Option<PathBuf>,
    /// Record length of a simulated system.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed of the simulated dataset.
    #[arg(long)]
    pub data_seed: Option<u64>,
    #[arg(long)]
    pub n_est: Option<usize>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Desk-scale preset: 10 runs.
    #[arg(long)]
    pub quick: bool,
    /// Evaluation budget of every population search.
    #[arg(long)]
    pub max_fes: Option<usize>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub nl: Option<usize>,
    /// OFR stopping threshold.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::load_or_default(self.config.as_deref())?;
        if let Some(s) = &self.system {
            c.data.system = Some(s.clone());
            c.data.path = None;
        }
        if let Some(p) = &self.data {
            c.data.path = Some(p.clone());
            c.data.system = None;
        }
        macro_rules! set {
            ($src:expr => $($dst:tt)+) => {
                if let Some(v) = $src.clone() {
                    $($dst)+ = v;
                }
            };
        }
        set!(self.n => c.data.n);
        set!(self.data_seed => c.data.seed);
        if self.n_est.is_some() {
            c.data.n_est = self.n_est;
        }
        set!(self.algorithm => c.search.algorithm);
        if self.quick {
            c.search.runs = 10;
        }
        set!(self.runs => c.search.runs);
        set!(self.base_seed => c.search.base_seed);
        if let Some(fes) = self.max_fes {
            c.search.upso.max_fes = fes;
            c.search.ga.max_fes = fes;
            c.search.bpso.max_fes = fes;
        }
        set!(self.nu => c.model.n_u);
        set!(self.ny => c.model.n_y);
        set!(self.nl => c.model.n_l);
        set!(self.sigma => c.search.ofr.sigma);
        if self.out.is_some() {
            c.output = self.out.clone();
        }
        Ok(c)
    }
}
