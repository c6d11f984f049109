use std::fs;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::run::evaluate;
use crate::baselines::{Scheduler, SgdConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    /// Sampled log-uniformly.
    pub learning_rate: [f64; 2],
    pub batch_size: Vec<usize>,
    pub warmup_steps: Vec<usize>,
    pub weight_decay: [f64; 2],
    pub label_smoothing: [f64; 2],
    pub scheduler: Vec<Scheduler>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            learning_rate: [1e-7, 1e-3],
            batch_size: vec![8, 16, 32, 64, 128],
            warmup_steps: vec![0, 500, 1000, 2000],
            weight_decay: [0.0, 0.1],
            label_smoothing: [0.0, 0.0],
            scheduler: vec![Scheduler::Constant, Scheduler::Linear, Scheduler::CosineWithRestarts],
            trials: 50,
            seed: 13,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        let interval = |name: &str, [lo, hi]: [f64; 2], min: f64| {
            if !(lo.is_finite() && hi.is_finite() && lo >= min && lo <= hi) {
                return Err(Error::Config(format!("search interval {name} [{lo}, {hi}] is invalid")));
            }
            Ok(())
        };
        interval("learning_rate", self.learning_rate, f64::MIN_POSITIVE)?;
        interval("weight_decay", self.weight_decay, 0.0)?;
        interval("label_smoothing", self.label_smoothing, 0.0)?;
        if self.label_smoothing[1] >= 1.0 {
            return Err(Error::Config("label_smoothing must stay below 1".into()));
        }
        if self.batch_size.is_empty() || self.warmup_steps.is_empty() || self.scheduler.is_empty() {
            return Err(Error::Config("search choice sets must not be empty".into()));
        }
        if self.batch_size.contains(&0) {
            return Err(Error::Config("batch sizes must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("search needs at least one trial".into()));
        }
        Ok(())
    }
}

/// Draws every trial up front from `space.seed`, so the sequence does not
/// depend on how trials are later scheduled.
pub fn sample_trials(space: &SearchSpace, base: &SgdConfig) -> Result<Vec<SgdConfig>> {
    space.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    let (llo, lhi) = (space.learning_rate[0].ln(), space.learning_rate[1].ln());
    let uniform = |rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]| if lo == hi { lo } else { rng.gen_range(lo..=hi) };
    Ok((0..space.trials)
        .map(|_| {
            let lr = uniform(&mut rng, [llo, lhi]).exp().clamp(space.learning_rate[0], space.learning_rate[1]);
            SgdConfig {
                learning_rate: lr,
                batch_size: *space.batch_size.choose(&mut rng).unwrap(),
                warmup_steps: *space.warmup_steps.choose(&mut rng).unwrap(),
                weight_decay: uniform(&mut rng, space.weight_decay),
                label_smoothing: uniform(&mut rng, space.label_smoothing),
                scheduler: *space.scheduler.choose(&mut rng).unwrap(),
                ..base.clone()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub config: SgdConfig,
    pub score: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_trial: usize,
    pub best_score: f64,
    pub best: SgdConfig,
    pub trials: Vec<TrialRecord>,
}

/// Evaluates every sampled trial on a pool of `jobs` workers and keeps the
/// highest score (earliest trial on ties). Failed trials are logged and
/// skipped; the search fails only if every trial does.
pub fn random_search<F>(space: &SearchSpace, base: &SgdConfig, jobs: usize, objective: F) -> Result<SearchOutcome>
where
    F: Fn(&SgdConfig) -> Result<f64> + Sync,
{
    let configs = sample_trials(space, base)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let trials: Vec<TrialRecord> = pool.install(|| {
        configs
            .into_par_iter()
            .enumerate()
            .map(|(trial, config)| {
                let result = objective(&config).and_then(|s| {
                    if s.is_finite() {
                        Ok(s)
                    } else {
                        Err(Error::Metric(format!("objective returned {s}")))
                    }
                });
                let (score, error) = match result {
                    Ok(s) => (Some(s), None),
                    Err(e) => {
                        log::warn!("trial {trial} failed: {e}");
                        (None, Some(e.to_string()))
                    }
                };
                TrialRecord { trial, config, score, error }
            })
            .collect()
    });
    let mut best: Option<&TrialRecord> = None;
    for t in &trials {
        if let Some(s) = t.score {
            if best.is_none_or(|b| s > b.score.unwrap()) {
                best = Some(t);
            }
        }
    }
    let best = best.ok_or_else(|| Error::Training(format!("all {} search trials failed", trials.len())))?;
    Ok(SearchOutcome {
        best_trial: best.trial,
        best_score: best.score.unwrap(),
        best: best.config.clone(),
        trials: trials.clone(),
    })
}

/// Random search over a run config's SGD settings, scored by the dev-set
/// primary metric. The trial log and best config are written to
/// `<run directory>-search/`.
pub fn run_search(cfg: &RunConfig, trials: Option<usize>, jobs: usize) -> Result<SearchOutcome> {
    cfg.validate()?;
    if !cfg.model_kind.trains() {
        return Err(Error::Config(format!("{} has no hyperparameters to search", cfg.model_kind.name())));
    }
    let mut space = cfg.search.clone().unwrap_or_default();
    if let Some(n) = trials {
        space.trials = n;
    }
    let key = format!("dev_{}", cfg.task.primary_metric());
    let outcome = random_search(&space, &cfg.effective_sgd(), jobs, |sgd| {
        let trial = RunConfig { sgd: sgd.clone(), ..cfg.clone() };
        let eval = evaluate(&trial)?;
        eval.metrics
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Config(format!("no {key}: the search needs a non-empty dev part")))
    })?;
    let mut dir = cfg.run_directory().into_os_string();
    dir.push("-search");
    let dir = std::path::PathBuf::from(dir);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let log_path = dir.join("trials.jsonl");
    let mut log = fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    for t in &outcome.trials {
        writeln!(log, "{}", serde_json::to_string(t)?).map_err(|e| Error::io(&log_path, e))?;
    }
    let best_path = dir.join("best.json");
    let best = RunConfig { sgd: outcome.best.clone(), search: None, ..cfg.clone() };
    fs::write(&best_path, serde_json::to_vec_pretty(&best)?).map_err(|e| Error::io(&best_path, e))?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_trial_is_best() {
        let space = SearchSpace { trials: 1, ..SearchSpace::default() };
        let out = random_search(&space, &SgdConfig::default(), 2, |_| Ok(0.3)).unwrap();
        assert_eq!((out.best_trial, out.best_score), (0, 0.3));
    }

    #[test]
    fn samples_inside_ranges() {
        let space = SearchSpace { trials: 500, label_smoothing: [0.0, 0.2], ..SearchSpace::default() };
        let trials = sample_trials(&space, &SgdConfig::default()).unwrap();
        assert_eq!(trials.len(), 500);
        for t in &trials {
            assert!((1e-7..=1e-3).contains(&t.learning_rate));
            assert!(space.batch_size.contains(&t.batch_size));
            assert!(space.warmup_steps.contains(&t.warmup_steps));
            assert!((0.0..=0.1).contains(&t.weight_decay));
            assert!((0.0..=0.2).contains(&t.label_smoothing));
        }
        let below_1e5 = trials.iter().filter(|t| t.learning_rate < 1e-5).count();
        // log-uniform: half of the mass lies below the geometric midpoint
        assert!((200..300).contains(&below_1e5), "{below_1e5}");
    }

    #[test]
    fn log_uniform_finds_target() {
        let space = SearchSpace { trials: 200, ..SearchSpace::default() };
        let out = random_search(&space, &SgdConfig::default(), 4, |c| Ok(-(c.learning_rate - 1e-5).abs())).unwrap();
        assert!((10f64.powf(-5.5)..=10f64.powf(-4.5)).contains(&out.best.learning_rate));
    }

    #[test]
    fn failures_recorded_and_ties_to_earliest() {
        let space = SearchSpace { trials: 6, ..SearchSpace::default() };
        let configs = sample_trials(&space, &SgdConfig::default()).unwrap();
        let out = random_search(&space, &SgdConfig::default(), 3, |c| {
            let i = configs.iter().position(|x| x == c).unwrap();
            if i % 2 == 0 { Err(Error::Training("boom".into())) } else { Ok(1.0) }
        })
        .unwrap();
        assert_eq!(out.best_trial, 1);
        assert_eq!(out.trials.iter().filter(|t| t.error.is_some()).count(), 3);
        assert!(random_search(&space, &SgdConfig::default(), 1, |_| Err(Error::Training("x".into()))).is_err());
    }

    #[test]
    fn same_trials_for_any_worker_count() {
        let space = SearchSpace { trials: 20, ..SearchSpace::default() };
        let score = |c: &SgdConfig| Ok(c.learning_rate.ln() * c.batch_size as f64);
        let a = random_search(&space, &SgdConfig::default(), 1, score).unwrap();
        let b = random_search(&space, &SgdConfig::default(), 8, score).unwrap();
        assert_eq!(a, b);
    }
}
