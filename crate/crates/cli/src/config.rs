use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use crednet::centrality::Algorithm;
use crednet::eval::BenchmarkConfig;
use crednet::ingest::{ActivityFilter, LabelingConfig};
use crednet::{KnnConfig, Node2vecParams, PropagationConfig, SyntheticConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub posts: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    /// CSV `short,expanded` mapping applied to domains during parsing.
    pub domain_map: Option<PathBuf>,
    /// Replaces the built-in platform blocklist when set.
    pub platform_domains: Option<Vec<String>>,
    /// Filtered records written by `ingest`; defaults to `<out-dir>/records.jsonl`.
    pub records: Option<PathBuf>,
    /// Defaults to `<out-dir>/credibilities.csv`.
    pub credibilities: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Evaluation {
    pub folds: usize,
    pub algorithms: Vec<Algorithm>,
    /// Candidate node2vec `p`/`q` values searched per fold; off when empty.
    pub pq_grid: Option<Vec<f64>>,
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation {
            folds: 5,
            algorithms: Algorithm::ALL.to_vec(),
            pq_grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Drives every random stream: synthetic data, folds, walks and training.
    pub seed: u64,
    pub inputs: Inputs,
    pub filters: ActivityFilter,
    pub labeling: LabelingConfig,
    pub propagation: PropagationConfig,
    pub node2vec: Node2vecParams,
    pub knn: KnnConfig,
    pub evaluation: Evaluation,
    pub synthetic: SyntheticConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            inputs: Inputs::default(),
            filters: ActivityFilter::default(),
            labeling: LabelingConfig::default(),
            propagation: PropagationConfig::default(),
            node2vec: Node2vecParams::default(),
            knn: KnnConfig::default(),
            evaluation: Evaluation::default(),
            synthetic: SyntheticConfig::default(),
        }
    }
}

/// Sets `a.b.c = value` in a TOML table, creating tables on the way. The
/// value is parsed as TOML and falls back to a plain string.
fn apply_override(root: &mut toml::Table, spec: &str) -> anyhow::Result<()> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override {spec:?} is not of the form key=value");
    };
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut table = root;
    for part in path {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .with_context(|| format!("{key}: {part} is not a table"))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                text.parse::<toml::Table>()
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for spec in overrides {
            apply_override(&mut table, spec)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .context("invalid configuration")?;
        Ok(cfg)
    }

    /// Pushes the run seed into every component and checks the result.
    pub fn finalize(mut self, seed: Option<u64>) -> crednet::Result<Self> {
        if let Some(s) = seed {
            self.seed = s;
        }
        self.node2vec.seed = self.seed;
        self.synthetic.seed = self.seed;
        self.propagation.validate()?;
        self.node2vec.validate()?;
        self.knn.validate()?;
        if self.evaluation.folds < 2 {
            return Err(crednet::Error::Config(
                "evaluation.folds must be at least 2".into(),
            ));
        }
        Ok(self)
    }

    pub fn benchmark(&self) -> BenchmarkConfig {
        BenchmarkConfig {
            propagation: self.propagation,
            node2vec: self.node2vec,
            knn: self.knn,
            folds: self.evaluation.folds,
            pq_grid: self.evaluation.pq_grid.clone(),
        }
    }
}
