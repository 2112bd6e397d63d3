//! Timing harness: a grid over cardinalities and seeded trials, run on a
//! worker pool whose size is capped by `TPOWER_THREADS`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::report::LIBRARY_VERSION;
use crate::io::synth::{default_spiked_spec, gen_gaussian_data, gen_spiked_covariance};
use crate::solver::{tpower, SolveConfig};
use crate::spca::{covariance_from_data, CovarianceScaling};

pub const THREADS_ENV: &str = "TPOWER_THREADS";

/// Pool sized by `TPOWER_THREADS`, or by the available parallelism.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| Error::invalid(format!("{THREADS_ENV}={v:?} is not a positive integer")))?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchInstance {
    /// Independent standard normal entries.
    Gaussian,
    /// The two-spike toy model.
    Spiked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub instance: BenchInstance,
    pub n: usize,
    pub p: usize,
    pub ks: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTrial {
    pub trial: usize,
    pub k: usize,
    /// Wall time of one component extraction, covariance excluded.
    pub seconds: f64,
    pub covariance_seconds: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub task: String,
    pub config: BenchConfig,
    pub threads: usize,
    pub trials: Vec<BenchTrial>,
    /// `(k, mean seconds)` in the order of `config.ks`.
    pub mean_seconds: Vec<(usize, f64)>,
    pub library_version: String,
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    if config.trials == 0 || config.ks.is_empty() {
        return Err(Error::invalid("bench needs at least one trial and one k"));
    }
    if let Some(k) = config.ks.iter().find(|k| **k == 0 || **k > config.p) {
        return Err(Error::invalid(format!("k = {k} outside [1, {}]", config.p)));
    }
    let pool = thread_pool()?;
    let threads = pool.current_num_threads();
    let per_trial: Vec<Result<Vec<BenchTrial>>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let data = match config.instance {
                    BenchInstance::Gaussian => gen_gaussian_data(config.n, config.p, config.seed, t as u64)?,
                    BenchInstance::Spiked => {
                        let (l, e) = default_spiked_spec(config.p)?;
                        gen_spiked_covariance(config.p, config.n, &l, &e, config.seed, t as u64)?.0
                    }
                };
                let start = Instant::now();
                let sigma = covariance_from_data(&data, true, CovarianceScaling::Unscaled)?;
                let covariance_seconds = start.elapsed().as_secs_f64();
                config
                    .ks
                    .iter()
                    .map(|&k| {
                        let cfg = SolveConfig::new(k).with_tol(config.tol);
                        let start = Instant::now();
                        let r = tpower(&sigma, &cfg)?;
                        Ok(BenchTrial {
                            trial: t,
                            k,
                            seconds: start.elapsed().as_secs_f64(),
                            covariance_seconds,
                            objective: r.objective,
                            iterations: r.iterations,
                            converged: r.converged,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    let mut trials = Vec::new();
    for r in per_trial {
        trials.extend(r?);
    }
    let mean_seconds = config
        .ks
        .iter()
        .map(|&k| {
            let times: Vec<f64> = trials.iter().filter(|t| t.k == k).map(|t| t.seconds).collect();
            (k, times.iter().sum::<f64>() / times.len() as f64)
        })
        .collect();
    Ok(BenchReport {
        task: "bench".into(),
        config: config.clone(),
        threads,
        trials,
        mean_seconds,
        library_version: LIBRARY_VERSION.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_is_ordered_and_deterministic() {
        let cfg = BenchConfig {
            instance: BenchInstance::Spiked,
            n: 30,
            p: 40,
            ks: vec![5, 10],
            trials: 3,
            seed: 1,
            tol: 1e-4,
        };
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.trials.len(), 6);
        let order: Vec<(usize, usize)> = a.trials.iter().map(|t| (t.trial, t.k)).collect();
        assert_eq!(order, vec![(0, 5), (0, 10), (1, 5), (1, 10), (2, 5), (2, 10)]);
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert_eq!(x.objective, y.objective);
        }
        assert_eq!(a.mean_seconds.len(), 2);
    }
}
