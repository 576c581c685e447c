//! Experiment configuration file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use narx_upso::baselines::{BpsoConfig, GaConfig, OfrConfig};
use narx_upso::benchmarks::{SystemId, DEFAULT_ESTIMATION, DEFAULT_LENGTH};
use narx_upso::narx::ModelSet;
use narx_upso::search::SwarmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "2d-upso")]
    #[value(name = "2d-upso", alias = "upso")]
    Upso,
    Ga,
    Bpso,
    #[value(alias = "ofr")]
    OfrErr,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Upso => "2d-upso",
            Algorithm::Ga => "ga",
            Algorithm::Bpso => "bpso",
            Algorithm::OfrErr => "ofr-err",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Benchmark system to simulate when no file is given.
    pub system: Option<String>,
    /// Existing `k,u,y` CSV file.
    pub path: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub n_est: Option<usize>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { system: None, path: None, n: DEFAULT_LENGTH, seed: 0, n_est: None }
    }
}

impl DataConfig {
    pub fn system_id(&self) -> Result<Option<SystemId>> {
        self.system.as_deref().map(|s| s.parse::<SystemId>().map_err(anyhow::Error::msg)).transpose()
    }

    /// Estimation length: explicit, or 70% of the record.
    pub fn n_est_for(&self, len: usize) -> usize {
        self.n_est.unwrap_or(if len == DEFAULT_LENGTH { DEFAULT_ESTIMATION } else { len * 7 / 10 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n_u: usize,
    pub n_y: usize,
    pub n_l: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { n_u: 4, n_y: 4, n_l: 3 }
    }
}

impl ModelConfig {
    pub fn model_set(&self) -> ModelSet {
        ModelSet::generate(self.n_u, self.n_y, self.n_l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub base_seed: u64,
    pub upso: SwarmConfig,
    pub ga: GaConfig,
    pub bpso: BpsoConfig,
    pub ofr: OfrConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Upso,
            runs: 40,
            base_seed: 0,
            upso: SwarmConfig::default(),
            ga: GaConfig::default(),
            bpso: BpsoConfig::default(),
            ofr: OfrConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub u_f: Vec<f64>,
    pub rg: Vec<usize>,
    /// Seeded searches per grid cell.
    pub k: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { u_f: vec![0.1, 0.4, 0.7, 1.0], rg: vec![5, 20, 35, 50], k: 3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    pub model: ModelConfig,
    pub search: SearchConfig,
    pub sweep: SweepConfig,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        if self.search.runs == 0 {
            bail!("runs must be at least 1");
        }
        match (&self.data.system, &self.data.path) {
            (None, None) => bail!("no dataset: give a system id or a CSV path"),
            (_, Some(p)) if !p.exists() => bail!("dataset {} does not exist", p.display()),
            _ => {}
        }
        self.data.system_id()?;
        self.search.upso.validate()?;
        self.search.ga.validate()?;
        self.search.bpso.validate()?;
        self.search.ofr.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c: ExperimentConfig = toml::from_str("[data]\nsystem = \"S3\"\n[search]\nruns = 5\n[search.upso]\nu_f = 0.6\n").unwrap();
        assert_eq!(c.search.runs, 5);
        assert_eq!(c.search.upso.unification, 0.6);
        assert_eq!(c.search.upso.max_fes, 6000);
        assert_eq!(c.model.model_set().len(), 165);
        c.validate().unwrap();
        let c: ExperimentConfig = toml::from_str("[search]\nalgorithm = \"bpso\"\n").unwrap();
        assert_eq!(c.search.algorithm, Algorithm::Bpso);
        assert!(c.validate().is_err());
        assert!(toml::from_str::<ExperimentConfig>("[search]\nbogus = 1\n").is_err());
    }

    #[test]
    fn split_defaults() {
        let d = DataConfig::default();
        assert_eq!(d.n_est_for(1000), 700);
        assert_eq!(d.n_est_for(500), 350);
    }
}
