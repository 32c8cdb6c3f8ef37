//! The measurement pipeline: scaling runs over n with median runtimes and
//! timeout censoring, satisfiability sweeps with crossing estimation, and
//! the scaling-factor profile over the XOR-clause density.
//!
//! Every trial gets its own ChaCha stream derived from the master seed, the
//! run label, n and the trial index, so results are identical whether
//! trials run serially or on a worker pool — aggregation always follows
//! (n, trial) order, never completion order.

pub mod fit;

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::{sample_formula, ModelParams, RngStream, SampleError};
use crate::solver::{solve, SolveStatus, SolverConfig};
use fit::{fit_curves, FitError, FitReport};

/// Medians below one microsecond are clamped to it before curve fitting.
pub const MIN_FIT_MEDIAN_S: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("n grid must be nonempty and strictly increasing")]
    BadGrid,
    #[error("sweep grid needs at least two points")]
    ShortSweep,
    #[error("at least one trial per point is required")]
    NoTrials,
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// One scaling run: fixed (k, r, s, p), medians measured across `n_grid`.
/// Fields omitted from a JSON config fall back to the defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingRunConfig {
    pub k: u32,
    pub r: f64,
    pub s: f64,
    pub p: f64,
    pub n_grid: Vec<u32>,
    pub trials_per_n: usize,
    pub timeout_s: f64,
    pub seed: u64,
    /// Worker threads; 0 means one per available CPU.
    pub workers: usize,
    /// Stream-derivation label; runs with different labels never share draws.
    pub label: String,
}

impl Default for ScalingRunConfig {
    fn default() -> Self {
        ScalingRunConfig {
            k: 3,
            r: 2.0,
            s: 0.5,
            p: 0.5,
            n_grid: Vec::new(),
            trials_per_n: 100,
            timeout_s: 10.0,
            seed: 0,
            workers: 1,
            label: "scale".to_string(),
        }
    }
}

impl ScalingRunConfig {
    fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::BadGrid);
        }
        if self.trials_per_n == 0 {
            return Err(ExperimentError::NoTrials);
        }
        for &n in &self.n_grid {
            self.params_for(n, 0).validate()?;
        }
        Ok(())
    }

    fn params_for(&self, n: u32, formula_seed: u64) -> ModelParams {
        ModelParams {
            k: self.k,
            n,
            r: self.r,
            s: self.s,
            p: self.p,
            seed: formula_seed,
        }
    }
}

/// Aggregated measurements for one n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: u32,
    pub trials: usize,
    pub sat: usize,
    pub unsat: usize,
    pub timeouts: usize,
    /// sat / (trials − timeouts); absent when every trial timed out.
    pub sat_fraction: Option<f64>,
    pub timeout_fraction: f64,
    /// At least half the trials timed out; the median is +∞ and the point
    /// is excluded from curve fitting.
    pub censored: bool,
    /// Median wall time in seconds, timeouts ranked as +∞. Absent exactly
    /// when censored.
    pub median_runtime_s: Option<f64>,
    pub total_decisions: u64,
    pub total_propagations: u64,
}

impl ScalingPoint {
    /// Equality of everything except wall-clock statistics. Used to check
    /// that worker count cannot change results.
    pub fn same_outcomes(&self, other: &ScalingPoint) -> bool {
        self.n == other.n
            && self.trials == other.trials
            && self.sat == other.sat
            && self.unsat == other.unsat
            && self.timeouts == other.timeouts
            && self.censored == other.censored
            && self.total_decisions == other.total_decisions
            && self.total_propagations == other.total_propagations
    }
}

struct TrialOutcome {
    status: SolveStatus,
    runtime_s: f64,
    decisions: u64,
    propagations: u64,
}

fn run_trial(config: &ScalingRunConfig, label: &str, n: u32, trial: u32) -> TrialOutcome {
    let formula_seed = RngStream::derive_seed(config.seed, &format!("{label}/formula"), n, trial);
    let solver_seed = RngStream::derive_seed(config.seed, &format!("{label}/solver"), n, trial);
    let formula = sample_formula(&config.params_for(n, formula_seed))
        .expect("config validated before running trials");
    let result = solve(
        &formula,
        &SolverConfig {
            timeout: Some(Duration::from_secs_f64(config.timeout_s)),
            seed: solver_seed,
        },
    );
    TrialOutcome {
        status: result.status,
        runtime_s: result.stats.wall_time_s,
        decisions: result.stats.decisions,
        propagations: result.stats.propagations,
    }
}

fn aggregate_point(n: u32, outcomes: &[TrialOutcome]) -> ScalingPoint {
    let trials = outcomes.len();
    let sat = outcomes
        .iter()
        .filter(|o| o.status == SolveStatus::Sat)
        .count();
    let unsat = outcomes
        .iter()
        .filter(|o| o.status == SolveStatus::Unsat)
        .count();
    let timeouts = trials - sat - unsat;

    let mut runtimes: Vec<f64> = outcomes
        .iter()
        .map(|o| {
            if o.status == SolveStatus::Timeout {
                f64::INFINITY
            } else {
                o.runtime_s
            }
        })
        .collect();
    runtimes.sort_by(|a, b| a.partial_cmp(b).expect("no NaN runtimes"));
    let median = if trials % 2 == 1 {
        runtimes[trials / 2]
    } else {
        let lower = runtimes[trials / 2 - 1];
        let upper = runtimes[trials / 2];
        0.5 * (lower + upper)
    };
    let censored = 2 * timeouts >= trials;
    debug_assert_eq!(censored, !median.is_finite());

    ScalingPoint {
        n,
        trials,
        sat,
        unsat,
        timeouts,
        sat_fraction: (trials > timeouts).then(|| sat as f64 / (trials - timeouts) as f64),
        timeout_fraction: timeouts as f64 / trials as f64,
        censored,
        median_runtime_s: median.is_finite().then_some(median),
        total_decisions: outcomes.iter().map(|o| o.decisions).sum(),
        total_propagations: outcomes.iter().map(|o| o.propagations).sum(),
    }
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool construction");
        pool.install(job)
    }
}

fn run_point(config: &ScalingRunConfig, n: u32) -> ScalingPoint {
    let outcomes: Vec<TrialOutcome> = with_pool(config.workers, || {
        (0..config.trials_per_n as u32)
            .into_par_iter()
            .map(|trial| run_trial(config, &config.label, n, trial))
            .collect()
    });
    aggregate_point(n, &outcomes)
}

/// Measure every n in the configured grid.
pub fn run_scaling(config: &ScalingRunConfig) -> Result<Vec<ScalingPoint>, ExperimentError> {
    config.validate()?;
    Ok(config.n_grid.iter().map(|&n| run_point(config, n)).collect())
}

/// How far an auto-extended scaling run keeps growing the grid.
#[derive(Clone, Copy, Debug)]
pub struct ExtendPolicy {
    /// Gap between appended n values.
    pub step: u32,
    /// Hard ceiling on n.
    pub max_n: u32,
    /// Stop once max median / min median reaches this ratio (medians clamped
    /// to [`MIN_FIT_MEDIAN_S`]). `None` extends until a point censors or the
    /// ceiling is hit.
    pub target_ratio: Option<f64>,
}

/// Run the configured grid, then keep appending larger n (in `policy.step`
/// increments) until a point censors, the target median ratio is reached,
/// or n would exceed `policy.max_n`. Because every point is derived from
/// `(seed, label, n, trial)` alone, extending the grid never changes the
/// points already measured.
pub fn run_scaling_extended(
    config: &ScalingRunConfig,
    policy: &ExtendPolicy,
) -> Result<Vec<ScalingPoint>, ExperimentError> {
    let mut points = run_scaling(config)?;
    loop {
        if points.last().is_some_and(|p| p.censored) {
            break;
        }
        if let Some(target) = policy.target_ratio {
            if median_ratio(&points) >= target {
                break;
            }
        }
        let next = points.last().expect("grid is nonempty").n + policy.step;
        if next > policy.max_n {
            break;
        }
        points.push(run_point(config, next));
    }
    Ok(points)
}

fn median_ratio(points: &[ScalingPoint]) -> f64 {
    let medians: Vec<f64> = points
        .iter()
        .filter_map(|p| p.median_runtime_s)
        .map(|m| m.max(MIN_FIT_MEDIAN_S))
        .collect();
    if medians.is_empty() {
        return 0.0;
    }
    let max = medians.iter().copied().fold(f64::MIN, f64::max);
    let min = medians.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

/// Fitting input from scaling points: censored points are dropped and
/// medians are clamped to [`MIN_FIT_MEDIAN_S`].
pub fn fit_input(points: &[ScalingPoint]) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter_map(|p| {
            p.median_runtime_s
                .map(|m| (f64::from(p.n), m.max(MIN_FIT_MEDIAN_S)))
        })
        .collect()
}

/// Fit the four models to a run's uncensored medians.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<FitReport, ExperimentError> {
    Ok(fit_curves(&fit_input(points))?)
}

/// Which model parameter a satisfiability sweep varies.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "r")]
    CnfDensity,
    #[serde(rename = "s")]
    XorDensity,
    #[serde(rename = "p")]
    XorProbability,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParameter::CnfDensity => "r",
            SweepParameter::XorDensity => "s",
            SweepParameter::XorProbability => "p",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionConfig {
    pub k: u32,
    pub r: f64,
    pub s: f64,
    pub p: f64,
    pub sweep: SweepParameter,
    pub grid: Vec<f64>,
    pub n: u32,
    pub trials: usize,
    pub timeout_s: f64,
    pub seed: u64,
    pub workers: usize,
    pub label: String,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        TransitionConfig {
            k: 3,
            r: 0.0,
            s: 0.0,
            p: 0.5,
            sweep: SweepParameter::XorDensity,
            grid: Vec::new(),
            n: 40,
            trials: 100,
            timeout_s: 10.0,
            seed: 0,
            workers: 1,
            label: "transition".to_string(),
        }
    }
}

/// Satisfiability probability along a parameter grid, plus the interpolated
/// point where it crosses 1/2 (absent when the grid never brackets 1/2).
#[derive(Clone, Debug, Serialize)]
pub struct TransitionEstimate {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// Per point, sat / (trials − timeouts); timeouts are excluded from the
    /// denominator and reported separately so the bias stays visible.
    pub sat_probability: Vec<Option<f64>>,
    pub timeout_fraction: Vec<f64>,
    pub trials: usize,
    pub crossing: Option<f64>,
}

/// Estimate where satisfiability drops through 1/2 along the sweep.
pub fn locate_transition(config: &TransitionConfig) -> Result<TransitionEstimate, ExperimentError> {
    if config.grid.len() < 2 {
        return Err(ExperimentError::ShortSweep);
    }
    if config.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let scaling_configs: Vec<ScalingRunConfig> = config
        .grid
        .iter()
        .map(|&value| {
            let mut sc = ScalingRunConfig {
                k: config.k,
                r: config.r,
                s: config.s,
                p: config.p,
                n_grid: vec![config.n],
                trials_per_n: config.trials,
                timeout_s: config.timeout_s,
                seed: config.seed,
                workers: config.workers,
                label: format!("{}/{}={}", config.label, config.sweep, value),
            };
            match config.sweep {
                SweepParameter::CnfDensity => sc.r = value,
                SweepParameter::XorDensity => sc.s = value,
                SweepParameter::XorProbability => sc.p = value,
            }
            sc
        })
        .collect();
    for sc in &scaling_configs {
        sc.validate()?;
    }

    let points: Vec<ScalingPoint> = scaling_configs
        .iter()
        .map(|sc| run_point(sc, config.n))
        .collect();
    let sat_probability: Vec<Option<f64>> = points.iter().map(|p| p.sat_fraction).collect();
    let timeout_fraction: Vec<f64> = points.iter().map(|p| p.timeout_fraction).collect();
    let crossing = find_crossing(&config.grid, &sat_probability);

    Ok(TransitionEstimate {
        parameter: config.sweep,
        grid: config.grid.clone(),
        sat_probability,
        timeout_fraction,
        trials: config.trials,
        crossing,
    })
}

/// Linear interpolation inside the first adjacent pair bracketing 1/2 from
/// above.
fn find_crossing(grid: &[f64], probs: &[Option<f64>]) -> Option<f64> {
    for i in 0..grid.len().saturating_sub(1) {
        let (Some(a), Some(b)) = (probs[i], probs[i + 1]) else {
            continue;
        };
        if a >= 0.5 && b < 0.5 {
            return Some(grid[i] + (grid[i + 1] - grid[i]) * (a - 0.5) / (a - b));
        }
    }
    None
}

/// Scaling factor α (where the exponential model wins) per XOR density.
#[derive(Clone, Debug, Serialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub scaling_factor: Option<f64>,
    pub selected: Option<fit::ModelKind>,
    pub points: Vec<ScalingPoint>,
}

/// Run a full scaling measurement and fit at every s in `s_grid`.
pub fn scaling_factor_profile(
    base: &ScalingRunConfig,
    s_grid: &[f64],
) -> Result<Vec<ProfilePoint>, ExperimentError> {
    s_grid
        .iter()
        .map(|&s| {
            let config = ScalingRunConfig {
                s,
                label: format!("{}/s={}", base.label, s),
                ..base.clone()
            };
            let points = run_scaling(&config)?;
            let (scaling_factor, selected) = match fit_scaling(&points) {
                Ok(report) => (report.scaling_factor, Some(report.selected)),
                Err(_) => (None, None), // too few uncensored points
            };
            Ok(ProfilePoint {
                s,
                scaling_factor,
                selected,
                points,
            })
        })
        .collect()
}
