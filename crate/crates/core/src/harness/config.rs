use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::search::SearchSpace;
use crate::baselines::SgdConfig;
use crate::datasets::{ClassificationTask, SplitSpec};
use crate::error::{Error, Result};
use crate::metrics::TwoClassMode;

pub const RUN_DIR_ENV: &str = "SKBENCH_RUN_DIR";
pub const JOBS_ENV: &str = "SKBENCH_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Pos,
    Sts,
    Sentiment,
    Docclass,
    Probe,
}

impl Task {
    /// Metric used for ranking and model selection.
    pub fn primary_metric(self) -> &'static str {
        match self {
            Task::Pos => "accuracy",
            Task::Sts => "spearman",
            Task::Sentiment => "macro_f1_3",
            Task::Docclass => "macro_f1",
            Task::Probe => "best_accuracy",
        }
    }

    pub(crate) fn classification(self) -> Option<ClassificationTask> {
        match self {
            Task::Sentiment => Some(ClassificationTask::Sentiment),
            Task::Docclass => Some(ClassificationTask::Docclass),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Task::Pos => "pos",
            Task::Sts => "sts",
            Task::Sentiment => "sentiment",
            Task::Docclass => "docclass",
            Task::Probe => "probe",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Config(format!("unknown task `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BaselineTfidf,
    BaselineAvgvec,
    BaselineStsvec,
    ExternalPredictions,
    ExternalEmbeddings,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::BaselineTfidf => "baseline-tfidf",
            ModelKind::BaselineAvgvec => "baseline-avgvec",
            ModelKind::BaselineStsvec => "baseline-stsvec",
            ModelKind::ExternalPredictions => "external-predictions",
            ModelKind::ExternalEmbeddings => "external-embeddings",
        }
    }

    pub fn trains(self) -> bool {
        matches!(self, ModelKind::BaselineTfidf | ModelKind::BaselineAvgvec)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    /// Single labelled file, split according to `split`.
    pub input: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// External predictions for the test items.
    pub predictions: Option<PathBuf>,
    /// Word vectors (baselines) or per-sentence vectors (external STS).
    pub embeddings: Option<PathBuf>,
    /// Token alignment for POS predictions (JSON with `word_first_token`).
    pub alignment: Option<PathBuf>,
    /// Directory of `.lrep` layer tensors.
    pub layers: Option<PathBuf>,
    /// CoNLL-U file with the probing labels.
    pub labels: Option<PathBuf>,
}

impl DataPaths {
    fn all(&self) -> impl Iterator<Item = (&'static str, &PathBuf)> {
        [
            ("input", &self.input),
            ("train", &self.train),
            ("dev", &self.dev),
            ("test", &self.test),
            ("predictions", &self.predictions),
            ("embeddings", &self.embeddings),
            ("alignment", &self.alignment),
            ("layers", &self.layers),
            ("labels", &self.labels),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
    }

    /// Resolves relative paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        for p in [
            &mut self.input,
            &mut self.train,
            &mut self.dev,
            &mut self.test,
            &mut self.predictions,
            &mut self.embeddings,
            &mut self.alignment,
            &mut self.layers,
            &mut self.labels,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfidfOptions {
    pub ngram_range: (usize, usize),
    pub min_count: usize,
}

impl Default for TfidfOptions {
    fn default() -> Self {
        Self { ngram_range: (1, 2), min_count: 2 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tagset {
    #[default]
    Upos,
    Xpos,
}

fn default_seed() -> u64 {
    13
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub model_kind: ModelKind,
    /// Row label in reports; defaults to the model kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub data: DataPaths,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub sgd: SgdConfig,
    #[serde(default)]
    pub tfidf: TfidfOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpace>,
    #[serde(default)]
    pub two_class_mode: TwoClassMode,
    #[serde(default)]
    pub tagset: Tagset,
    /// Skip the first and last token of each sentence when pooling.
    #[serde(default)]
    pub exclude_special: bool,
    /// Drives both the split and the optimizer, replacing their own seeds.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(task: Task, model_kind: ModelKind, data: DataPaths) -> Self {
        Self {
            task,
            model_kind,
            name: None,
            data,
            split: SplitSpec::default(),
            sgd: SgdConfig::default(),
            tfidf: TfidfOptions::default(),
            search: None,
            two_class_mode: TwoClassMode::default(),
            tagset: Tagset::default(),
            exclude_special: false,
            seed: default_seed(),
            run_dir: None,
        }
    }

    /// Parses a JSON config; relative data paths are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(base) = path.parent() {
            cfg.data.rebase(base);
        }
        Ok(cfg)
    }

    pub fn model_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.model_kind.name().to_owned())
    }

    /// SGD settings with the run seed applied.
    pub fn effective_sgd(&self) -> SgdConfig {
        SgdConfig { seed: self.seed, ..self.sgd.clone() }
    }

    pub fn effective_split(&self) -> SplitSpec {
        SplitSpec { seed: self.seed, ..self.split.clone() }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Directory that receives this run's artifacts: `SKBENCH_RUN_DIR`, else
    /// `run_dir`, else `runs`, followed by `<task>-<model>-<digest prefix>`.
    pub fn run_directory(&self) -> PathBuf {
        let base = std::env::var_os(RUN_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| self.run_dir.clone())
            .unwrap_or_else(|| PathBuf::from("runs"));
        let model: String = self
            .model_name()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        base.join(format!("{}-{}-{}", self.task, model, &self.digest()[..12]))
    }

    pub fn validate(&self) -> Result<()> {
        use ModelKind::*;
        let ok = match self.task {
            Task::Pos => matches!(self.model_kind, ExternalPredictions),
            Task::Sts => matches!(self.model_kind, BaselineStsvec | ExternalEmbeddings),
            Task::Sentiment | Task::Docclass => matches!(self.model_kind, BaselineTfidf | BaselineAvgvec | ExternalPredictions),
            Task::Probe => matches!(self.model_kind, ExternalEmbeddings),
        };
        if !ok {
            return Err(Error::Config(format!("model kind {} cannot run the {} task", self.model_kind.name(), self.task)));
        }
        let d = &self.data;
        let need = |name: &str, p: &Option<PathBuf>| -> Result<()> {
            if p.is_none() {
                return Err(Error::Config(format!("{} with {} needs data.{name}", self.task, self.model_kind.name())));
            }
            Ok(())
        };
        match (self.task, self.model_kind) {
            (Task::Probe, _) => {
                need("layers", &d.layers)?;
                need("labels", &d.labels)?;
            }
            (_, ExternalPredictions) => {
                need("predictions", &d.predictions)?;
                if d.test.is_none() && d.input.is_none() {
                    need("test", &d.test)?;
                }
            }
            (Task::Sts, _) => {
                need("embeddings", &d.embeddings)?;
                if d.test.is_none() && d.input.is_none() {
                    need("test", &d.test)?;
                }
            }
            (_, kind) => {
                if kind == BaselineAvgvec {
                    need("embeddings", &d.embeddings)?;
                }
                let has_files = d.train.is_some() && d.test.is_some();
                if !has_files && d.input.is_none() {
                    return Err(Error::Config("training needs data.input or both data.train and data.test".into()));
                }
            }
        }
        for (name, p) in d.all() {
            if !p.exists() {
                return Err(Error::Config(format!("data.{name} {} does not exist", p.display())));
            }
        }
        self.effective_split().validate()?;
        self.effective_sgd().validate()?;
        if let Some(space) = &self.search {
            space.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_digest() {
        let text = r#"{"task":"sentiment","model_kind":"baseline-tfidf","data":{"input":"x.jsonl"},"seed":7}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.tfidf, TfidfOptions::default());
        assert_eq!(cfg.effective_sgd().seed, 7);
        let again: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again.digest(), cfg.digest());
        let other = RunConfig { seed: 8, ..cfg.clone() };
        assert_ne!(other.digest(), cfg.digest());
        assert_eq!(cfg.digest().len(), 64);
    }

    #[test]
    fn incompatible_kind() {
        let cfg = RunConfig::new(Task::Pos, ModelKind::BaselineTfidf, DataPaths::default());
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_paths() {
        let data = DataPaths { input: Some("/nonexistent/file".into()), ..DataPaths::default() };
        let cfg = RunConfig::new(Task::Docclass, ModelKind::BaselineTfidf, data);
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("does not exist")));
        let cfg = RunConfig::new(Task::Docclass, ModelKind::BaselineTfidf, DataPaths::default());
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"task":"sts","model_kind":"baseline-stsvec","data":{},"bogus":1}"#;
        assert!(serde_json::from_str::<RunConfig>(text).is_err());
        assert!("nope".parse::<Task>().is_err());
        assert_eq!("docclass".parse::<Task>().unwrap(), Task::Docclass);
    }
}
