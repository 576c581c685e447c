//! Subcommand implementations. Every command writes its artifacts to disk and
//! returns them for inspection.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use narx_upso::baselines::{run_bpso, run_ga, run_ofr};
use narx_upso::benchmarks::{self, OscillatorKind, OscillatorParams, SystemId, SystemSpec};
use narx_upso::narx::{read_csv, BicEvaluator, Dataset, ModelSet, StructureMask, TermSpec};
use narx_upso::report::RunReport;
use narx_upso::search::run_search;
use narx_upso::validation::{
    aggregate_outcomes, selection_frequency, validate_model, write_outcomes_csv, CorrelationReport, FrequencyReport,
    OutcomeTally,
};

use crate::config::{Algorithm, ExperimentConfig, ModelConfig};

/// Dataset description written next to a generated CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub system: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub true_terms: Vec<TermSpec>,
    /// Truth over the default `(4, 4, 3)` model set; absent for the oscillators.
    pub true_mask: Option<StructureMask>,
}

impl Sidecar {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Truth mask over `model_set`.
    pub fn truth_for(&self, model_set: &ModelSet) -> Result<StructureMask> {
        if self.true_terms.is_empty() {
            bail!("{} has no known term structure", self.system);
        }
        Ok(model_set.mask_of(&self.true_terms)?)
    }
}

/// Identification settings recorded alongside the run files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub algorithm: String,
    pub system: Option<String>,
    pub model: ModelConfig,
    pub n_est: usize,
    pub runs: usize,
    pub base_seed: u64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn sidecar_for(id: SystemId, n: usize, n_est: usize, seed: u64) -> Sidecar {
    let spec = SystemSpec::of(id);
    let params = match id {
        SystemId::Duffing | SystemId::VanDerPol => {
            let kind = if id == SystemId::Duffing { OscillatorKind::Duffing } else { OscillatorKind::VanDerPol };
            serde_json::json!({ "n": n, "n_est": n_est, "oscillator": OscillatorParams { n, ..OscillatorParams::new(kind) } })
        }
        _ => serde_json::json!({
            "n": n,
            "n_est": n_est,
            "input": spec.input,
            "noise": spec.noise,
            "true_coefficients": spec.true_coefficients,
        }),
    };
    let true_mask = spec.true_mask(&ModelConfig::default().model_set()).ok().filter(|_| !spec.true_terms.is_empty());
    Sidecar { system: id.to_string(), seed, params, true_terms: spec.true_terms, true_mask }
}

/// Writes `<stem>.csv` and `<stem>.json` for a simulated benchmark.
pub fn cmd_generate(system: &str, n: usize, seed: u64, out: Option<&Path>) -> Result<(PathBuf, PathBuf)> {
    let id: SystemId = system.parse()?;
    let data = benchmarks::generate(id, n, seed)?;
    let csv_path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("{id}_seed{seed}.csv")));
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = create(&csv_path)?;
    data.write_csv(&mut w)?;
    w.flush()?;
    let json_path = csv_path.with_extension("json");
    write_json(&json_path, &sidecar_for(id, n, data.n_est(), seed))?;
    info!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok((csv_path, json_path))
}

fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset<f64>> {
    if let Some(path) = &cfg.data.path {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let probe: Dataset<f64> = read_csv(file, 1).with_context(|| format!("reading {}", path.display()))?;
        return Ok(probe.with_split(cfg.data.n_est_for(probe.len()))?);
    }
    let id = cfg.data.system_id()?.ok_or_else(|| anyhow!("no dataset configured"))?;
    let data = benchmarks::generate(id, cfg.data.n, cfg.data.seed)?;
    Ok(data.with_split(cfg.data.n_est_for(data.len()))?)
}

fn run_one(cfg: &ExperimentConfig, data: &Dataset<f64>, set: &ModelSet, seed: u64) -> Result<RunReport> {
    let s = &cfg.search;
    Ok(match s.algorithm {
        Algorithm::Upso => run_search(data, set, &s.upso, seed)?,
        Algorithm::Ga => run_ga(data, set, &s.ga, seed)?,
        Algorithm::Bpso => run_bpso(data, set, &s.bpso, seed)?,
        Algorithm::OfrErr => {
            let mut r = run_ofr(data, set, &s.ofr)?;
            r.seed = seed;
            r
        }
    })
}

fn with_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

/// Best-of-R selection: the lowest criterion, earliest run on ties.
pub fn best_run(reports: &[RunReport]) -> Option<&RunReport> {
    reports.iter().reduce(|best, r| if r.criterion < best.criterion { r } else { best })
}

fn output_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("runs"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Runs `R` seeded searches and writes `run_NNN.json`, `summary.json`,
/// `manifest.json` and the dataset used.
pub fn cmd_identify(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<(PathBuf, Vec<RunReport>)> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let set = cfg.model.model_set();
    let dir = output_dir(cfg)?;
    let seeds: Vec<u64> = (0..cfg.search.runs as u64).map(|k| cfg.search.base_seed + k).collect();
    let reports = with_pool(workers, || {
        seeds.par_iter().map(|&s| run_one(cfg, &data, &set, s)).collect::<Result<Vec<_>>>()
    })??;
    for (k, r) in reports.iter().enumerate() {
        write_json(&dir.join(format!("run_{k:03}.json")), r)?;
    }
    let best = best_run(&reports).expect("at least one run");
    write_json(&dir.join("summary.json"), best)?;
    let manifest = Manifest {
        algorithm: cfg.search.algorithm.name().to_string(),
        system: cfg.data.system.clone().filter(|_| cfg.data.path.is_none()),
        model: cfg.model,
        n_est: data.n_est(),
        runs: cfg.search.runs,
        base_seed: cfg.search.base_seed,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    let mut w = create(&dir.join("dataset.csv"))?;
    data.write_csv(&mut w)?;
    w.flush()?;
    info!("best of {} runs: J = {} with {} terms", reports.len(), best.criterion, best.cardinality());
    Ok((dir, reports))
}

/// A run directory written by [`cmd_identify`].
pub struct RunDirectory {
    pub manifest: Manifest,
    pub dataset: Dataset<f64>,
    pub reports: Vec<RunReport>,
}

impl RunDirectory {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
        let file = File::open(dir.join("dataset.csv")).with_context(|| format!("opening dataset in {}", dir.display()))?;
        let dataset = read_csv(file, manifest.n_est)?;
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("run_") && n.ends_with(".json")))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no run reports in {}", dir.display());
        }
        let reports = paths.iter().map(|p| read_json(p)).collect::<Result<Vec<RunReport>>>()?;
        Ok(Self { manifest, dataset, reports })
    }
}

pub struct ReportOutput {
    pub frequency: FrequencyReport,
    pub outcomes: Option<OutcomeTally>,
}

/// Writes `frequency.csv` from the raw masks and, when the truth is known,
/// `outcomes.csv` from the pruned masks.
pub fn cmd_report(run_dir: &Path, truth: Option<&Path>, alpha: f64, out: Option<&Path>) -> Result<ReportOutput> {
    let runs = RunDirectory::load(run_dir)?;
    let out = out.unwrap_or(run_dir);
    fs::create_dir_all(out)?;
    let set = runs.manifest.model.model_set();
    let masks: Vec<StructureMask> = runs.reports.iter().map(|r| r.best_mask.clone()).collect();
    let frequency = selection_frequency(&masks)?;
    let mut w = create(&out.join("frequency.csv"))?;
    frequency.write_csv(&mut w, &set)?;
    w.flush()?;
    let outcomes = match truth {
        None => {
            warn!("no truth sidecar given; outcomes.csv not written");
            None
        }
        Some(path) => {
            let sidecar = Sidecar::load(path)?;
            let truth = sidecar.truth_for(&set)?;
            let evaluator = BicEvaluator::new(&set, &runs.dataset)?;
            let tally = aggregate_outcomes(&runs.reports, &truth, &evaluator, alpha)?;
            let mut w = create(&out.join("outcomes.csv"))?;
            write_outcomes_csv(&mut w, &[(sidecar.system.clone(), runs.manifest.algorithm.clone(), tally)])?;
            w.flush()?;
            Some(tally)
        }
    };
    Ok(ReportOutput { frequency, outcomes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub u_f: f64,
    pub rg: usize,
    pub runs: usize,
    pub mean_j: f64,
}

/// Mean best criterion of `k` searches per `(u_f, RG)` cell, written to `sweep.csv`.
pub fn cmd_sweep(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if cfg.sweep.k == 0 || cfg.sweep.u_f.is_empty() || cfg.sweep.rg.is_empty() {
        bail!("sweep grid is empty");
    }
    let data = load_dataset(cfg)?;
    let set = cfg.model.model_set();
    let cells: Vec<(f64, usize)> =
        cfg.sweep.u_f.iter().flat_map(|&u| cfg.sweep.rg.iter().map(move |&g| (u, g))).collect();
    let k = cfg.sweep.k;
    let rows = with_pool(workers, || {
        cells
            .par_iter()
            .map(|&(u_f, rg)| {
                let mut swarm = cfg.search.upso.clone();
                swarm.unification = u_f;
                swarm.refresh_gap = rg;
                let js = (0..k as u64)
                    .into_par_iter()
                    .map(|i| run_search(&data, &set, &swarm, cfg.search.base_seed + i).map(|r| r.criterion))
                    .collect::<narx_upso::error::Result<Vec<f64>>>()?;
                Ok(SweepRow { u_f, rg, runs: k, mean_j: js.iter().sum::<f64>() / k as f64 })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let dir = output_dir(cfg)?;
    let mut w = csv::Writer::from_writer(create(&dir.join("sweep.csv"))?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Correlation tests of the best model of a run directory, written to `validity.csv`.
pub fn cmd_validate(run_dir: &Path, max_lag: usize, out: Option<&Path>) -> Result<CorrelationReport> {
    let runs = RunDirectory::load(run_dir)?;
    let set = runs.manifest.model.model_set();
    let best = best_run(&runs.reports).expect("nonempty");
    let evaluator = BicEvaluator::new(&set, &runs.dataset)?;
    let model = evaluator.identify(&best.best_mask).context("refitting the best structure")?;
    let report = validate_model(&model, &runs.dataset, max_lag)?;
    let out = out.unwrap_or(run_dir);
    fs::create_dir_all(out)?;
    let mut w = create(&out.join("validity.csv"))?;
    report.write_csv(&mut w)?;
    w.flush()?;
    Ok(report)
}
