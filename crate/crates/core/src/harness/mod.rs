//! Simulation loop, experiment orchestration, and trial aggregation.
//!
//! Each `(algorithm, trial)` pair is an independent job that owns its policy
//! and its derived random streams. Jobs may run on a rayon pool (feature
//! `parallel`) or sequentially; records are sorted by `(algo, trial, t)`
//! afterwards, so the output is identical at every parallelism level.

use serde::{Deserialize, Serialize};

use crate::config::{check_c, ExperimentConfig, GammaModeKind};
use crate::environment::ProblemInstance;
use crate::error::{Error, Result};
use crate::pareto::jaccard;
use crate::policies::{build_policy, AlgoKind, Policy};
use crate::seeding::{instance_seed, trial_seed, TrialStreams};

pub mod output;

pub use output::{format_sig9, read_csv, write_csv, CSV_HEADER};

/// One simulated round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub algo: AlgoKind,
    pub trial: usize,
    pub t: usize,
    pub arm: usize,
    pub instant_psg: f64,
    pub cum_pareto_regret: f64,
    /// Size of the policy's approximate front, 0 when it keeps none.
    pub front_size: usize,
    pub jaccard: Option<f64>,
}

/// How jobs are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Sequential without the `parallel` feature.
    #[default]
    Parallel,
    /// A dedicated pool with this many workers.
    Threads(usize),
}

impl Execution {
    /// `--jobs N` semantics: `1` is sequential, `None` uses every core.
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            Some(0 | 1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
            None => Execution::Parallel,
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<I, T, F>(self, items: &[I], f: F) -> Result<Vec<T>>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> Result<T> + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Execution::Threads(n) => {
                use rayon::prelude::*;
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
                pool.install(|| items.par_iter().map(f).collect())
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::Threads(_) => items.iter().map(f).collect(),
        }
    }
}

/// Plays `policy` on `instance` for `horizon` rounds.
///
/// Randomness comes from the `(seed, algo, trial)` job streams: the environment
/// stream draws rewards and the policy stream drives the policy's choices.
pub fn run_trial(
    instance: &ProblemInstance,
    policy: &mut dyn Policy,
    horizon: usize,
    trial: usize,
    base_seed: u64,
) -> Result<Vec<RoundRecord>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let algo = policy.algo();
    let mut streams = TrialStreams::new(trial_seed(base_seed, algo.id(), trial));
    let psg = instance.psg_table();
    let truth = instance.true_front();
    let mut cum = 0.0;
    let mut records = Vec::with_capacity(horizon);

    for t in 1..=horizon {
        let arm = policy.select_arm(t, &mut streams.policy)?;
        if arm >= instance.num_arms() {
            return Err(Error::invalid(format!(
                "{algo} selected arm {arm} of {}",
                instance.num_arms()
            )));
        }
        let (front_size, ji) = match policy.current_front() {
            Some(front) => (front.len(), Some(jaccard(front, truth)?)),
            None => (0, None),
        };
        let reward = instance.sample_rewards(arm, &mut streams.env)?;
        policy.update(arm, &reward)?;

        cum += psg[arm];
        records.push(RoundRecord {
            algo,
            trial,
            t,
            arm,
            instant_psg: psg[arm],
            cum_pareto_regret: cum,
            front_size,
            jaccard: ji,
        });
    }
    Ok(records)
}

/// Mean and spread of one metric across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator, 0 for a single trial).
    pub std: f64,
}

impl MeanStd {
    /// Sums in slice order, so equal inputs give bit-equal outputs.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: usize,
    pub regret: MeanStd,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jaccard: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algo: AlgoKind,
    pub trials: usize,
    pub checkpoints: Vec<Checkpoint>,
}

impl AlgoSummary {
    pub fn at(&self, t: usize) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.t == t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub horizon: usize,
    pub algorithms: Vec<AlgoSummary>,
}

impl RunSummary {
    pub fn algo(&self, algo: AlgoKind) -> Option<&AlgoSummary> {
        self.algorithms.iter().find(|a| a.algo == algo)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

/// Rounds at 10%, 50% and 100% of the horizon (rounded up, deduplicated).
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut cps: Vec<usize> = [10, 50, 100]
        .iter()
        .map(|pct| (horizon * pct).div_ceil(100).max(1))
        .collect();
    cps.dedup();
    cps
}

/// Aggregates sorted records at the given rounds.
pub fn summarize(records: &[RoundRecord], horizon: usize, at: &[usize]) -> RunSummary {
    let mut algos: Vec<AlgoKind> = records.iter().map(|r| r.algo).collect();
    algos.sort();
    algos.dedup();
    let algorithms = algos
        .into_iter()
        .map(|algo| {
            let mine: Vec<&RoundRecord> = records.iter().filter(|r| r.algo == algo).collect();
            let mut trials: Vec<usize> = mine.iter().map(|r| r.trial).collect();
            trials.dedup();
            let checkpoints = at
                .iter()
                .map(|&t| {
                    let hits: Vec<&&RoundRecord> = mine.iter().filter(|r| r.t == t).collect();
                    let regret: Vec<f64> = hits.iter().map(|r| r.cum_pareto_regret).collect();
                    let ji: Option<Vec<f64>> = hits.iter().map(|r| r.jaccard).collect();
                    Checkpoint {
                        t,
                        regret: MeanStd::of(&regret),
                        jaccard: ji.filter(|v| !v.is_empty()).map(|v| MeanStd::of(&v)),
                    }
                })
                .collect();
            AlgoSummary {
                algo,
                trials: trials.len(),
                checkpoints,
            }
        })
        .collect();
    RunSummary {
        horizon,
        algorithms,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RoundRecord>,
    pub summary: RunSummary,
    /// Instance used by each trial (a single entry when pinned).
    pub instances: Vec<ProblemInstance>,
}

/// Instances for every trial: loaded from file, one pinned draw, or one fresh
/// draw per trial.
pub fn prepare_instances(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Vec<ProblemInstance>> {
    if let Some(path) = &config.instance {
        let inst = ProblemInstance::load(path)?;
        return Ok(vec![inst]);
    }
    let count = if config.pin_instance {
        1
    } else {
        config.trials
    };
    let trials: Vec<usize> = (0..count).collect();
    exec.map(&trials, |&trial| {
        let seed = instance_seed(config.base_seed, trial);
        ProblemInstance::generate(config.dim, config.num_objectives, seed, config.max_attempts)
    })
}

pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput> {
    config.validate()?;
    let instances = prepare_instances(config, exec)?;
    let settings = config.policy_settings();
    let jobs: Vec<(AlgoKind, usize)> = config
        .roster()
        .into_iter()
        .flat_map(|a| (0..config.trials).map(move |t| (a, t)))
        .collect();

    let per_job = exec.map(&jobs, |&(algo, trial)| {
        let instance = &instances[trial.min(instances.len() - 1)];
        let wrap = |e: Error| Error::Trial {
            algo: algo.to_string(),
            trial,
            seed: trial_seed(config.base_seed, algo.id(), trial),
            source: Box::new(e),
        };
        let mut policy = build_policy(algo, instance, &settings).map_err(wrap)?;
        run_trial(
            instance,
            policy.as_mut(),
            config.horizon,
            trial,
            config.base_seed,
        )
        .map_err(wrap)
    })?;

    let mut records: Vec<RoundRecord> = per_job.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.algo, r.trial, r.t));
    let summary = summarize(&records, config.horizon, &checkpoints(config.horizon));
    Ok(ExperimentOutput {
        records,
        summary,
        instances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneRow {
    pub c: f64,
    pub mean_final_regret: f64,
    pub std_final_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub rows: Vec<TuneRow>,
    pub best_c: f64,
}

impl TuneReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Grid values in first-seen order without repeats.
pub fn dedup_grid(grid: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(grid.len());
    for &c in grid {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Runs MOGLB-UCB with tuned width `c` for every grid value and reports the
/// mean final Pareto regret of each. Ties go to the earliest grid value.
pub fn tune_gamma(config: &ExperimentConfig, grid: &[f64], exec: Execution) -> Result<TuneReport> {
    let grid = dedup_grid(grid);
    if grid.is_empty() {
        return Err(Error::invalid("the c grid is empty"));
    }
    for &c in &grid {
        check_c(c)?;
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &c in &grid {
        let cfg = ExperimentConfig {
            algorithms: vec![AlgoKind::Moglb],
            gamma_mode: GammaModeKind::Tuned,
            c,
            ..config.clone()
        };
        let out = run_experiment(&cfg, exec)?;
        let last = out.summary.algorithms[0]
            .at(cfg.horizon)
            .expect("final checkpoint present")
            .regret;
        rows.push(TuneRow {
            c,
            mean_final_regret: last.mean,
            std_final_regret: last.std,
        });
    }
    let best = rows.iter().fold(&rows[0], |b, r| {
        if r.mean_final_regret < b.mean_final_regret {
            r
        } else {
            b
        }
    });
    Ok(TuneReport {
        best_c: best.c,
        rows,
    })
}
