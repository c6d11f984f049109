//! Random hyperparameter search over SGD settings on a toy problem. The
//! trials are drawn up front from the seed, so the result does not depend on
//! the number of workers.

use skbench::baselines::{predict, sgd_train, Scheduler, SgdConfig};
use skbench::harness::{random_search, SearchSpace};
use skbench::metrics::accuracy;

fn main() -> skbench::Result<()> {
    // two interleaved half-moons; a quarter of the points is held out
    let points: Vec<(Vec<f64>, &str)> = (0..200)
        .map(|i| {
            let t = (i / 2) as f64 * 0.0314;
            if i % 2 == 0 { (vec![t.cos(), t.sin()], "upper") } else { (vec![1.0 - t.cos(), 0.5 - t.sin()], "lower") }
        })
        .collect();
    let (dev, train): (Vec<_>, Vec<_>) = points.iter().enumerate().partition(|(i, _)| i % 8 < 2);
    let train: Vec<&(Vec<f64>, &str)> = train.into_iter().map(|(_, p)| p).collect();
    let dev: Vec<&(Vec<f64>, &str)> = dev.into_iter().map(|(_, p)| p).collect();
    let rows: Vec<Vec<f64>> = train.iter().map(|p| p.0.clone()).collect();
    let labels: Vec<&str> = train.iter().map(|p| p.1).collect();

    let objective = |cfg: &SgdConfig| -> skbench::Result<f64> {
        let model = sgd_train(&rows, &labels, 2, cfg)?;
        let pred: Vec<String> = dev.iter().map(|p| predict(&model, &p.0).map(|x| x.label)).collect::<skbench::Result<_>>()?;
        let gold: Vec<String> = dev.iter().map(|p| p.1.to_string()).collect();
        accuracy(&gold, &pred)
    };

    let space = SearchSpace {
        learning_rate: [1e-3, 1.0],
        warmup_steps: vec![0, 10],
        scheduler: vec![Scheduler::Constant, Scheduler::Linear],
        trials: 16,
        ..SearchSpace::default()
    };
    let outcome = random_search(&space, &SgdConfig::default(), 4, objective)?;
    for t in &outcome.trials {
        println!("trial {:>2}: lr {:.4} batch {:>3} -> {:?}", t.trial, t.config.learning_rate, t.config.batch_size, t.score);
    }
    println!("best trial {} with dev accuracy {:.3}", outcome.best_trial, outcome.best_score);
    Ok(())
}
