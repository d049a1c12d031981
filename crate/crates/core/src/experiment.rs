//! Deterministic parallel Monte Carlo over one or more parameter sets.
//!
//! Trial `t` of configuration `c` draws from the stream keyed by
//! `(master_seed, c * trials + t)`. Per-trial outcomes are integers and are
//! combined by addition, so the totals, and every statistic derived from
//! them, do not depend on the number of workers or on scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::analysis::census;
use crate::model::{ModelError, ModelParams};
use crate::rng::SeedSpec;
use crate::sampler::build_graph;
use crate::theory::{bound_report, BoundReport};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
/// Environment variable naming the worker count.
pub const THREADS_ENV: &str = "KOUT_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("configuration list is empty")]
    EmptySweep,
    #[error("sweep step must be positive")]
    ZeroStep,
    #[error("confidence level {0} not in (0, 1)")]
    BadConfidence(f64),
    #[error("{index} x {trials} trials overflows the trial index space")]
    IndexOverflow { index: usize, trials: u64 },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Optional result sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Connectivity,
    YStats,
    EdgeCount,
    ComponentHistogram,
}

impl Output {
    pub const ALL: [Output; 4] = [
        Output::Connectivity,
        Output::YStats,
        Output::EdgeCount,
        Output::ComponentHistogram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Connectivity => "connectivity",
            Output::YStats => "y_stats",
            Output::EdgeCount => "edge_count",
            Output::ComponentHistogram => "component_histogram",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }

    pub fn default_set() -> Vec<Output> {
        vec![Output::Connectivity, Output::YStats, Output::EdgeCount]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// The last class's selection count `K_r`.
    KMax,
    N,
}

/// Inclusive range `from..=to` of one parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub vary: SweepAxis,
    pub from: u64,
    pub to: u64,
    #[serde(default = "one")]
    pub step: u64,
}

fn one() -> u64 {
    1
}

impl SweepSpec {
    pub fn expand(&self, base: &ModelParams) -> Result<Vec<ModelParams>, ExperimentError> {
        if self.step == 0 {
            return Err(ExperimentError::ZeroStep);
        }
        let out = (self.from..=self.to)
            .step_by(self.step as usize)
            .map(|v| match self.vary {
                SweepAxis::KMax => base.with_k_max(v),
                SweepAxis::N => base.with_n(v),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if out.is_empty() {
            return Err(ExperimentError::EmptySweep);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    configs: Vec<ModelParams>,
    trials: u64,
    master_seed: u64,
    confidence_level: f64,
    outputs: Vec<Output>,
}

impl ExperimentConfig {
    pub fn new(
        configs: Vec<ModelParams>,
        trials: u64,
        master_seed: u64,
    ) -> Result<Self, ExperimentError> {
        if configs.is_empty() {
            return Err(ExperimentError::EmptySweep);
        }
        if trials == 0 {
            return Err(ExperimentError::NoTrials);
        }
        if (configs.len() as u128) * (trials as u128) > u64::MAX as u128 {
            return Err(ExperimentError::IndexOverflow {
                index: configs.len(),
                trials,
            });
        }
        Ok(Self {
            configs,
            trials,
            master_seed,
            confidence_level: DEFAULT_CONFIDENCE,
            outputs: Output::default_set(),
        })
    }

    pub fn single(params: ModelParams, trials: u64, master_seed: u64) -> Result<Self, ExperimentError> {
        Self::new(vec![params], trials, master_seed)
    }

    pub fn sweep(
        base: &ModelParams,
        sweep: &SweepSpec,
        trials: u64,
        master_seed: u64,
    ) -> Result<Self, ExperimentError> {
        Self::new(sweep.expand(base)?, trials, master_seed)
    }

    pub fn with_confidence(mut self, level: f64) -> Result<Self, ExperimentError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(ExperimentError::BadConfidence(level));
        }
        self.confidence_level = level;
        Ok(self)
    }

    /// Replaces the output selection; `Connectivity` is always kept.
    pub fn with_outputs(mut self, outputs: impl IntoIterator<Item = Output>) -> Self {
        let mut set: Vec<Output> = outputs.into_iter().collect();
        set.push(Output::Connectivity);
        set.sort();
        set.dedup();
        self.outputs = set;
        self
    }

    pub fn configs(&self) -> &[ModelParams] {
        &self.configs
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn confidence_level(&self) -> f64 {
        self.confidence_level
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// Seed of trial `t` of configuration `c`.
    pub fn seed_for(&self, c: usize, t: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, c as u64 * self.trials + t)
    }
}

/// Integer totals over a batch of trials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialTotals {
    pub trials: u64,
    pub connected: u64,
    pub multi_component: u64,
    pub y_sum: u64,
    pub y_sq_sum: u128,
    pub y_zero: u64,
    pub edge_sum: u64,
    pub edge_sq_sum: u128,
    /// Component size -> number of components, summed over trials.
    pub histogram: BTreeMap<usize, u64>,
}

impl TrialTotals {
    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.connected += other.connected;
        self.multi_component += other.multi_component;
        self.y_sum += other.y_sum;
        self.y_sq_sum += other.y_sq_sum;
        self.y_zero += other.y_zero;
        self.edge_sum += other.edge_sum;
        self.edge_sq_sum += other.edge_sq_sum;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }
}

/// Monte Carlo estimates for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub params: ModelParams,
    pub trials: u64,
    pub master_seed: u64,
    pub confidence_level: f64,
    pub connected_trials: u64,
    pub empirical_p_connected: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_y: f64,
    /// Unbiased sample variance of `Y`; zero for a single trial.
    pub var_y: f64,
    pub empirical_p_y_zero: f64,
    pub mean_edges: f64,
    pub var_edges: f64,
    pub component_histogram: Option<BTreeMap<usize, u64>>,
    pub bounds: BoundReport,
    #[serde(skip)]
    pub totals: TrialTotals,
}

impl ExperimentResult {
    pub fn ci_half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    /// Standard error of `mean_y`.
    pub fn y_std_error(&self) -> f64 {
        (self.var_y / self.trials as f64).sqrt()
    }

    pub fn edge_std_error(&self) -> f64 {
        (self.var_edges / self.trials as f64).sqrt()
    }

    fn from_totals(
        params: &ModelParams,
        cfg: &ExperimentConfig,
        totals: TrialTotals,
    ) -> Self {
        let t = totals.trials as f64;
        let (ci_low, ci_high) = wilson_interval(totals.connected, totals.trials, cfg.confidence_level);
        let (mean_y, var_y) = mean_var(totals.y_sum, totals.y_sq_sum, totals.trials);
        let (mean_edges, var_edges) = mean_var(totals.edge_sum, totals.edge_sq_sum, totals.trials);
        Self {
            params: params.clone(),
            trials: totals.trials,
            master_seed: cfg.master_seed,
            confidence_level: cfg.confidence_level,
            connected_trials: totals.connected,
            empirical_p_connected: totals.connected as f64 / t,
            ci_low,
            ci_high,
            mean_y,
            var_y,
            empirical_p_y_zero: totals.y_zero as f64 / t,
            mean_edges,
            var_edges,
            component_histogram: cfg
                .wants(Output::ComponentHistogram)
                .then(|| totals.histogram.clone()),
            bounds: bound_report(params),
            totals,
        }
    }
}

/// Mean and unbiased variance from integer sums.
fn mean_var(sum: u64, sq_sum: u128, count: u64) -> (f64, f64) {
    let c = count as f64;
    let mean = sum as f64 / c;
    if count < 2 {
        return (mean, 0.0);
    }
    // count * sq_sum - sum^2 is exact in integers.
    let num = (count as u128) * sq_sum - (sum as u128) * (sum as u128);
    (mean, num as f64 / (c * (c - 1.0)))
}

/// Standard normal quantile for a two-sided interval at `level`.
pub fn z_value(level: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + 0.5 * level)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = z_value(level);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (center - half).clamp(0.0, 1.0).min(p);
    let high = (center + half).clamp(0.0, 1.0).max(p);
    (low, high)
}

/// Worker count from `KOUT_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
}

/// Knobs that change speed and reporting, never results.
#[derive(Default)]
pub struct RunOptions<'a> {
    /// `None` uses `KOUT_THREADS`, then the rayon default.
    pub workers: Option<usize>,
    /// Called with `(finished, total)` after each configuration.
    pub progress: Option<&'a mut dyn FnMut(usize, usize)>,
}

/// Runs every configuration using `KOUT_THREADS` workers.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ExperimentResult>, ExperimentError> {
    run_with(config, RunOptions::default())
}

pub fn run_with(
    config: &ExperimentConfig,
    mut opts: RunOptions<'_>,
) -> Result<Vec<ExperimentResult>, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers.or_else(threads_from_env) {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let total = config.configs.len();
    let want_hist = config.wants(Output::ComponentHistogram);

    let mut results = Vec::with_capacity(total);
    for (c, params) in config.configs.iter().enumerate() {
        let totals = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|t| one_trial(params, config.seed_for(c, t), want_hist))
                .reduce(TrialTotals::default, TrialTotals::merge)
        });
        results.push(ExperimentResult::from_totals(params, config, totals));
        if let Some(report) = opts.progress.as_mut() {
            report(c + 1, total);
        }
    }
    Ok(results)
}

fn one_trial(params: &ModelParams, seed: SeedSpec, want_hist: bool) -> TrialTotals {
    let graph = build_graph(params, seed);
    let cen = census(&graph);
    let y = cen.y_count as u64;
    let e = graph.num_edges() as u64;
    let histogram = if want_hist {
        cen.histogram().into_iter().map(|(k, v)| (k, v as u64)).collect()
    } else {
        BTreeMap::new()
    };
    TrialTotals {
        trials: 1,
        connected: cen.connected as u64,
        multi_component: (cen.num_components >= 2) as u64,
        y_sum: y,
        y_sq_sum: (y * y) as u128,
        y_zero: (y == 0) as u64,
        edge_sum: e,
        edge_sq_sum: (e as u128) * (e as u128),
        histogram,
    }
}
