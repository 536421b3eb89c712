//! Batch runs: load → split → train → evaluate → write artifacts.
//!
//! Artifacts written by [`run`] into the output directory:
//!
//! * `metrics.json`: algorithm, seed, the full configuration echo, and train
//!   and test [`MetricsReport`]s.
//! * `history.csv`: `iteration,cost,train_evs` (variational models only).
//! * `model.json`: the serialized model.
//!
//! Every file is written to a temporary sibling first and renamed into place.
//! No timestamps are recorded, so identical configurations produce
//! byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{self, EncodedDataset, Sample};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::qforest::{Forest, ForestConfig};
use crate::variational::{self, ModelKind, TrainConfig, TrainingHistory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Qnn,
    Vqc,
    Qforest,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Qnn, Algorithm::Vqc, Algorithm::Qforest];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Qnn => "qnn",
            Algorithm::Vqc => "vqc",
            Algorithm::Qforest => "qforest",
        }
    }

    fn model_kind(self) -> Option<ModelKind> {
        match self {
            Algorithm::Qnn => Some(ModelKind::Qnn),
            Algorithm::Vqc => Some(ModelKind::Vqc),
            Algorithm::Qforest => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything that determines a run. Serialized verbatim into `metrics.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub data: PathBuf,
    pub test_fraction: f64,
    pub seed: u64,
    pub layers: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub num_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub bootstrap: bool,
    pub out: PathBuf,
}

impl RunConfig {
    /// Default hyperparameters for `algorithm` on `data`.
    pub fn new(algorithm: Algorithm, data: impl Into<PathBuf>) -> Self {
        let train = TrainConfig::default();
        let forest = ForestConfig::default();
        Self {
            algorithm,
            data: data.into(),
            test_fraction: 0.2,
            seed: 42,
            layers: train.layers,
            iterations: train.iterations,
            learning_rate: train.learning_rate,
            num_trees: forest.num_trees,
            max_depth: forest.max_depth,
            min_leaf: forest.min_leaf,
            bootstrap: forest.bootstrap,
            out: PathBuf::from("out"),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            layers: self.layers,
            iterations: self.iterations,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            num_trees: self.num_trees,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            bootstrap: self.bootstrap,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "--test-fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        match self.algorithm {
            Algorithm::Qforest => self.forest_config().validate(),
            _ => self.train_config().validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config: RunConfig,
    pub train: MetricsReport,
    pub test: MetricsReport,
}

/// In-memory result of one run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub metrics: MetricsFile,
    pub history: Option<TrainingHistory>,
    pub model_json: String,
}

/// Trains and evaluates without touching the filesystem.
pub fn execute(config: &RunConfig, samples: &[Sample]) -> Result<RunOutcome> {
    config.validate()?;
    let (train, test) = dataset::split(samples, config.test_fraction, config.seed)?;
    let train = EncodedDataset::from_samples(&train);
    let test = EncodedDataset::from_samples(&test);

    let (train_pred, test_pred, history, model_json) = match config.algorithm.model_kind() {
        Some(kind) => {
            let (model, history) = variational::train(kind, &train.features, &train.targets, &config.train_config())?;
            (
                model.predict_all(&train.features)?,
                model.predict_all(&test.features)?,
                Some(history),
                model.to_json()?,
            )
        }
        None => {
            let forest = Forest::fit(&train.features, &train.targets, &config.forest_config())?;
            (
                forest.predict_all(&train.features)?,
                forest.predict_all(&test.features)?,
                None,
                forest.to_json()?,
            )
        }
    };

    let metrics = MetricsFile {
        algorithm: config.algorithm,
        seed: config.seed,
        config: config.clone(),
        train: MetricsReport::compute(&train.targets, &train_pred)?,
        test: MetricsReport::compute(&test.targets, &test_pred)?,
    };
    Ok(RunOutcome {
        metrics,
        history,
        model_json,
    })
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Full run: loads the dataset, executes, and writes the artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let samples = dataset::load_csv(&config.data)?;
    let outcome = execute(config, &samples)?;
    write_outputs(&config.out, &outcome)?;
    Ok(outcome)
}

fn write_outputs(out: &Path, outcome: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut metrics = serde_json::to_string_pretty(&outcome.metrics)?;
    metrics.push('\n');
    write_atomic(&out.join("metrics.json"), metrics.as_bytes())?;
    if let Some(history) = &outcome.history {
        write_atomic(&out.join("history.csv"), history.to_csv().as_bytes())?;
    }
    write_atomic(&out.join("model.json"), outcome.model_json.as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: Algorithm,
    pub mse: f64,
    pub mae: f64,
    pub evs: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub data: PathBuf,
    pub test_fraction: f64,
    pub seed: u64,
    /// Test-set metrics, ascending by MSE.
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<4} {:<10} {:>12} {:>12} {:>12}", "rank", "algorithm", "mse", "mae", "evs");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:<4} {:<10} {:>12.6} {:>12.6} {:>12.6}",
                i + 1,
                r.algorithm.as_str(),
                r.mse,
                r.mae,
                r.evs
            );
        }
        s
    }
}

/// Runs every config against the same data, split and seed, then writes
/// `comparison.json` and `comparison.txt` into `out`. Member runs write their
/// own artifacts into `out/<index>-<algorithm>/`.
pub fn compare(configs: &[RunConfig], out: &Path) -> Result<Comparison> {
    let first = match configs {
        [first, _, ..] => first,
        _ => {
            return Err(Error::Config(format!(
                "comparison needs at least 2 configurations, got {}",
                configs.len()
            )))
        }
    };
    for c in configs {
        if c.data != first.data || c.test_fraction != first.test_fraction || c.seed != first.seed {
            return Err(Error::Config(
                "compared runs must share dataset, test fraction and seed".into(),
            ));
        }
        c.validate()?;
    }
    let samples = dataset::load_csv(&first.data)?;

    let outcomes = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let outcome = execute(c, &samples)?;
            write_outputs(&out.join(format!("{i}-{}", c.algorithm)), &outcome)?;
            Ok(outcome)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<ComparisonRow> = outcomes
        .iter()
        .map(|o| ComparisonRow {
            algorithm: o.metrics.algorithm,
            mse: o.metrics.test.mse,
            mae: o.metrics.test.mae,
            evs: o.metrics.test.evs,
            n: o.metrics.test.n,
        })
        .collect();
    rows.sort_by(|a, b| a.mse.total_cmp(&b.mse));

    let comparison = Comparison {
        data: first.data.clone(),
        test_fraction: first.test_fraction,
        seed: first.seed,
        rows,
    };
    std::fs::create_dir_all(out)?;
    let mut json = serde_json::to_string_pretty(&comparison)?;
    json.push('\n');
    write_atomic(&out.join("comparison.json"), json.as_bytes())?;
    write_atomic(&out.join("comparison.txt"), comparison.to_table().as_bytes())?;
    Ok(comparison)
}
