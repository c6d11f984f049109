//! End-to-end benchmark runs, hyperparameter random search and result tables.

mod config;
mod report;
mod run;
mod search;

pub use config::{DataPaths, ModelKind, RunConfig, Tagset, Task, TfidfOptions, JOBS_ENV, RUN_DIR_ENV};
pub use report::{read_reports, render_report, EvalReport, RenderedReport};
pub use run::{evaluate, run_task, Evaluation};
pub use search::{random_search, run_search, sample_trials, SearchOutcome, SearchSpace, TrialRecord};

/// Worker count: `SKBENCH_JOBS` when set and valid, else the number of CPUs.
pub fn jobs_from_env() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
