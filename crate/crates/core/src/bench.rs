//! Monte Carlo comparison harness.
//!
//! Every trial builds one problem instance and hands the same `(A, y, K, p)`
//! to each algorithm in the roster. Trial randomness is keyed by the master
//! seed and the trial coordinates only:
//!
//! | stream | derivation words                          |
//! |--------|-------------------------------------------|
//! | signal | `[SIGNAL, trial]`                          |
//! | matrix | `[MATRIX, m, trial]`                       |
//! | noise  | `[NOISE, m, σ².to_bits(), trial]`          |
//!
//! so sweep points share signals (and matrices across noise levels), trials
//! can run in any order, and growing `trials` never perturbs earlier trials.
//! Reductions always run in trial-index order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{recover_lw_omp, recover_omp, recover_oracle, BaselineConfig};
use crate::error::{Error, Result};
use crate::model::{
    expand_priors, generate_matrix, generate_signal, measure, PriorModel, Problem, Rng,
    SparseSignal,
};
use crate::solvers::{
    recover_ka_niht, recover_niht, recover_rka_niht, AlphaMode, RecoveryResult, SolverConfig,
};
use crate::thresholding::Support;

const SIGNAL_STREAM: u64 = 0x5349_474E;
const MATRIX_STREAM: u64 = 0x4D41_5452;
const NOISE_STREAM: u64 = 0x4E4F_4953;

pub const DEFAULT_SEED: u64 = 2018;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Niht,
    KaNiht,
    RkaNiht,
    Omp,
    LwOmp,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Niht,
        Algorithm::KaNiht,
        Algorithm::RkaNiht,
        Algorithm::Omp,
        Algorithm::LwOmp,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Niht => "niht",
            Algorithm::KaNiht => "ka-niht",
            Algorithm::RkaNiht => "rka-niht",
            Algorithm::Omp => "omp",
            Algorithm::LwOmp => "lw-omp",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Algorithm::Niht | Algorithm::KaNiht | Algorithm::RkaNiht)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                Error::config(
                    "algorithms",
                    format!("unknown algorithm `{s}`, expected one of niht, ka-niht, rka-niht, omp, lw-omp, oracle"),
                )
            })
    }
}

/// Experiment settings. Every field has a default, so a partial document
/// deserializes into a complete config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub n: usize,
    pub m: usize,
    pub noise_variance: f64,
    pub group_sizes: Vec<usize>,
    pub group_probs: Vec<f64>,
    pub m_values: Vec<usize>,
    pub sigma_values: Vec<f64>,
    pub max_iters: usize,
    pub alpha_scale: f64,
    pub beta: f64,
    pub c: f64,
    pub kappa_scaled: f64,
    pub prob_floor: f64,
    pub alpha_mode: AlphaMode,
    pub residual_tol: f64,
    /// LW-OMP prior weight; `None` uses `alpha_scale / Σ p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lw_alpha: Option<f64>,
    pub algorithms: Vec<Algorithm>,
    /// Worker threads; 0 picks the rayon default, 1 runs serially.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            seed: DEFAULT_SEED,
            trials: 1000,
            n: 240,
            m: 70,
            noise_variance: 1e-3,
            group_sizes: vec![210, 20, 5, 5],
            group_probs: vec![4.0 / 210.0, 4.0 / 20.0, 4.0 / 5.0, 4.0 / 5.0],
            m_values: vec![40, 50, 60, 70, 80],
            sigma_values: vec![1e-4, 1e-3, 1e-2, 1e-1],
            max_iters: solver.max_iters,
            alpha_scale: solver.alpha_scale,
            beta: solver.beta,
            c: solver.c,
            kappa_scaled: solver.kappa_scaled,
            prob_floor: solver.prob_floor,
            alpha_mode: solver.alpha_mode,
            residual_tol: solver.residual_tol,
            lw_alpha: None,
            algorithms: Algorithm::ALL.to_vec(),
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn priors(&self) -> Result<PriorModel> {
        expand_priors(&self.group_sizes, &self.group_probs)
            .map_err(|e| Error::config("group_probs", e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            alpha_scale: self.alpha_scale,
            beta: self.beta,
            c: self.c,
            kappa_scaled: self.kappa_scaled,
            prob_floor: self.prob_floor,
            alpha_mode: self.alpha_mode,
            residual_tol: self.residual_tol,
            record_iterates: false,
        }
    }

    pub fn baseline_config(&self, priors: &PriorModel) -> BaselineConfig {
        match self.lw_alpha {
            Some(lw_alpha) => BaselineConfig {
                lw_alpha,
                prob_floor: self.prob_floor,
            },
            None => BaselineConfig::matched(self.alpha_scale, priors, self.prob_floor),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if self.n == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        if self.group_sizes.len() != self.group_probs.len() {
            return Err(Error::config(
                "group_probs",
                format!(
                    "{} probabilities for {} groups",
                    self.group_probs.len(),
                    self.group_sizes.len()
                ),
            ));
        }
        let total: usize = self.group_sizes.iter().sum();
        if total != self.n {
            return Err(Error::config(
                "group_sizes",
                format!("sizes sum to {total} but n = {}", self.n),
            ));
        }
        let priors = self.priors()?;
        let check_m = |key: &str, m: usize| {
            if m == 0 || m > self.n {
                Err(Error::config(key, format!("{m} outside range 1..={}", self.n)))
            } else {
                Ok(())
            }
        };
        check_m("m", self.m)?;
        for &m in &self.m_values {
            check_m("m_values", m)?;
        }
        let check_sigma = |key: &str, s: f64| {
            if !(s >= 0.0) || !s.is_finite() {
                Err(Error::config(key, format!("{s} must be finite and >= 0")))
            } else {
                Ok(())
            }
        };
        check_sigma("noise_variance", self.noise_variance)?;
        for &s in &self.sigma_values {
            check_sigma("sigma_values", s)?;
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "roster is empty"));
        }
        self.solver_config().validate_for(&priors)?;
        self.baseline_config(&priors).validate()?;
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))
    }

    /// Maps `job` over `0..count`, serially or on a pool; output is in index order.
    fn map_jobs<T, F>(&self, count: usize, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.threads == 1 {
            return Ok((0..count).map(job).collect());
        }
        Ok(self
            .pool()?
            .install(|| (0..count).into_par_iter().map(job).collect()))
    }
}

/// `|Λ ∩ Λ̂| / |Λ|`.
pub fn overlap_ratio(truth: &Support, estimate: &Support) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::InvalidArgument("true support is empty".into()));
    }
    Ok(truth.intersection_len(estimate) as f64 / truth.len() as f64)
}

/// `‖x − x̂‖² / ‖x‖²`.
pub fn deviation_ratio(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: estimate.len(),
            context: "estimate length vs signal length",
        });
    }
    let energy: f64 = truth.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::InvalidArgument("true signal has zero norm".into()));
    }
    let err: f64 = truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(err / energy)
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::InvalidArgument("no trials".into()));
    }
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            actual: b,
            context: "estimates vs ground truths",
        });
    }
    Ok(())
}

/// Mean fraction of the true support recovered per trial.
pub fn p_recovered(true_supports: &[Support], est_supports: &[Support]) -> Result<f64> {
    check_lengths(true_supports.len(), est_supports.len())?;
    let total = true_supports
        .iter()
        .zip(est_supports)
        .map(|(t, e)| overlap_ratio(t, e))
        .sum::<Result<f64>>()?;
    Ok(total / true_supports.len() as f64)
}

/// Mean normalized squared deviation.
pub fn msd<T: AsRef<[f64]>>(true_signals: &[T], estimates: &[T]) -> Result<f64> {
    check_lengths(true_signals.len(), estimates.len())?;
    let total = true_signals
        .iter()
        .zip(estimates)
        .map(|(t, e)| deviation_ratio(t.as_ref(), e.as_ref()))
        .sum::<Result<f64>>()?;
    Ok(total / true_signals.len() as f64)
}

/// Mean and standard error (sample standard deviation over `√S`).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let s = values.len();
    if s == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / s as f64;
    if s == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1) as f64;
    (mean, (var / s as f64).sqrt())
}

/// One problem instance plus its ground truth.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub signal: SparseSignal,
    pub problem: Problem,
}

pub fn trial_instance(
    config: &ExperimentConfig,
    m: usize,
    sigma2: f64,
    trial: usize,
) -> Result<TrialInstance> {
    let priors = config.priors()?;
    let t = trial as u64;
    let mut signal_rng = Rng::derive(config.seed, &[SIGNAL_STREAM, t]);
    let mut matrix_rng = Rng::derive(config.seed, &[MATRIX_STREAM, m as u64, t]);
    let mut noise_rng = Rng::derive(config.seed, &[NOISE_STREAM, m as u64, sigma2.to_bits(), t]);

    let signal = generate_signal(&priors, &mut signal_rng);
    let matrix = generate_matrix(m, config.n, &mut matrix_rng)?;
    let y = measure(&matrix, &signal, sigma2, &mut noise_rng)?;
    let problem = Problem::new(matrix, y, sigma2, signal.sparsity(), priors)?;
    Ok(TrialInstance { signal, problem })
}

pub fn run_algorithm(
    algorithm: Algorithm,
    instance: &TrialInstance,
    solver: &SolverConfig,
    baseline: &BaselineConfig,
) -> Result<RecoveryResult> {
    let problem = &instance.problem;
    match algorithm {
        Algorithm::Niht => recover_niht(problem, solver),
        Algorithm::KaNiht => recover_ka_niht(problem, solver),
        Algorithm::RkaNiht => recover_rka_niht(problem, solver),
        Algorithm::Omp => recover_omp(problem, baseline),
        Algorithm::LwOmp => recover_lw_omp(problem, baseline),
        Algorithm::Oracle => recover_oracle(problem, &instance.signal.support),
    }
}

/// One algorithm's result on one trial. Equality ignores `wall_time`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub overlap: f64,
    pub deviation: f64,
    pub iterations: usize,
    pub flagged: bool,
    pub error: Option<String>,
    pub wall_time: Duration,
}

impl PartialEq for AlgorithmOutcome {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.overlap.to_bits() == other.overlap.to_bits()
            && self.deviation.to_bits() == other.deviation.to_bits()
            && self.iterations == other.iterations
            && self.flagged == other.flagged
            && self.error == other.error
    }
}

impl AlgorithmOutcome {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub m: usize,
    pub sigma2: f64,
    pub sparsity: usize,
    pub outcomes: Vec<AlgorithmOutcome>,
}

impl TrialRecord {
    pub fn outcome(&self, algorithm: Algorithm) -> Option<&AlgorithmOutcome> {
        self.outcomes.iter().find(|o| o.algorithm == algorithm)
    }
}

fn score(
    algorithm: Algorithm,
    instance: &TrialInstance,
    solver: &SolverConfig,
    baseline: &BaselineConfig,
) -> AlgorithmOutcome {
    let start = Instant::now();
    let result = run_algorithm(algorithm, instance, solver, baseline).and_then(|r| {
        let overlap = overlap_ratio(&instance.signal.support, &r.support)?;
        let deviation =
            deviation_ratio(instance.signal.values.as_slice(), r.estimate.as_slice())?;
        Ok((r, overlap, deviation))
    });
    let wall_time = start.elapsed();
    match result {
        Ok((r, overlap, deviation)) => AlgorithmOutcome {
            algorithm,
            overlap,
            deviation,
            iterations: r.iterations_used,
            flagged: r.flagged(),
            error: None,
            wall_time,
        },
        Err(e) => AlgorithmOutcome {
            algorithm,
            overlap: f64::NAN,
            deviation: f64::NAN,
            iterations: 0,
            flagged: true,
            error: Some(e.to_string()),
            wall_time,
        },
    }
}

/// Runs every rostered algorithm on trial `trial` at `(m, σ²)`.
pub fn run_trial(
    config: &ExperimentConfig,
    m: usize,
    sigma2: f64,
    trial: usize,
) -> Result<TrialRecord> {
    let instance = trial_instance(config, m, sigma2, trial)?;
    let solver = config.solver_config();
    let baseline = config.baseline_config(instance.problem.priors());
    let outcomes = config
        .algorithms
        .iter()
        .map(|&a| score(a, &instance, &solver, &baseline))
        .collect();
    Ok(TrialRecord {
        trial,
        m,
        sigma2,
        sparsity: instance.signal.sparsity(),
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    M,
    Sigma2,
    Iteration,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::M => "m",
            SweepVar::Sigma2 => "sigma2",
            SweepVar::Iteration => "iteration",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_var: SweepVar,
    pub algorithm: Algorithm,
    pub value: f64,
    pub p_recovered: f64,
    pub p_recovered_se: f64,
    pub msd: f64,
    pub msd_db: f64,
    pub msd_se: f64,
    pub trials: usize,
}

impl SweepRow {
    fn aggregate(
        sweep_var: SweepVar,
        algorithm: Algorithm,
        value: f64,
        overlaps: &[f64],
        deviations: &[f64],
    ) -> Self {
        let (p, p_se) = mean_and_se(overlaps);
        let (d, d_se) = mean_and_se(deviations);
        Self {
            sweep_var,
            algorithm,
            value,
            p_recovered: p,
            p_recovered_se: p_se,
            msd: d,
            msd_db: 10.0 * d.log10(),
            msd_se: d_se,
            trials: overlaps.len(),
        }
    }
}

pub const CSV_HEADER: &str =
    "sweep_var,algorithm,value,p_recovered,p_recovered_se,msd,msd_db,msd_se,trials";

/// `printf("%.{sig}g")`-style formatting.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

/// Aggregated rows, sorted by sweep value then algorithm name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Algorithm runs that errored and were left out of the aggregates.
    pub failed_runs: usize,
}

impl SweepTable {
    fn new(mut rows: Vec<SweepRow>, failed_runs: usize) -> Self {
        rows.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| a.algorithm.name().cmp(b.algorithm.name()))
        });
        Self { rows, failed_runs }
    }

    pub fn row(&self, algorithm: Algorithm, value: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.value == value)
    }

    /// Rows of one algorithm in sweep order.
    pub fn series(&self, algorithm: Algorithm) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.algorithm == algorithm).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.sweep_var.name().to_string(),
                r.algorithm.name().to_string(),
                format_sig(r.value, 12),
                format_sig(r.p_recovered, 12),
                format_sig(r.p_recovered_se, 12),
                format_sig(r.msd, 12),
                format_sig(r.msd_db, 12),
                format_sig(r.msd_se, 12),
                r.trials.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    OverM,
    OverSigma,
}

fn aggregate_points(
    sweep_var: SweepVar,
    roster: &[Algorithm],
    points: &[(f64, Vec<TrialRecord>)],
) -> SweepTable {
    let mut rows = Vec::new();
    let mut failed = 0;
    for (value, records) in points {
        for &algorithm in roster {
            let (mut overlaps, mut deviations) = (Vec::new(), Vec::new());
            for o in records.iter().filter_map(|r| r.outcome(algorithm)) {
                if o.succeeded() {
                    overlaps.push(o.overlap);
                    deviations.push(o.deviation);
                } else {
                    failed += 1;
                }
            }
            if !overlaps.is_empty() {
                rows.push(SweepRow::aggregate(
                    sweep_var,
                    algorithm,
                    *value,
                    &overlaps,
                    &deviations,
                ));
            }
        }
    }
    SweepTable::new(rows, failed)
}

/// Runs `config.trials` trials at each sweep point.
pub fn run_sweep(config: &ExperimentConfig, sweep: Sweep) -> Result<SweepTable> {
    config.validate()?;
    let (sweep_var, points): (SweepVar, Vec<(usize, f64)>) = match sweep {
        Sweep::OverM => (
            SweepVar::M,
            config
                .m_values
                .iter()
                .map(|&m| (m, config.noise_variance))
                .collect(),
        ),
        Sweep::OverSigma => (
            SweepVar::Sigma2,
            config.sigma_values.iter().map(|&s| (config.m, s)).collect(),
        ),
    };
    if points.is_empty() {
        let key = match sweep {
            Sweep::OverM => "m_values",
            Sweep::OverSigma => "sigma_values",
        };
        return Err(Error::config(key, "sweep list is empty"));
    }
    run_points(config, sweep_var, &points)
}

/// Trials at the single point `(config.m, config.noise_variance)`.
pub fn run_single(config: &ExperimentConfig) -> Result<SweepTable> {
    config.validate()?;
    run_points(config, SweepVar::M, &[(config.m, config.noise_variance)])
}

fn run_points(
    config: &ExperimentConfig,
    sweep_var: SweepVar,
    points: &[(usize, f64)],
) -> Result<SweepTable> {
    let s = config.trials;
    let jobs = config.map_jobs(points.len() * s, |job| {
        let (m, sigma2) = points[job / s];
        run_trial(config, m, sigma2, job % s)
    })?;

    let mut grouped = Vec::with_capacity(points.len());
    let mut jobs = jobs.into_iter();
    let mut any_ok = false;
    for &(m, sigma2) in points {
        let records: Vec<TrialRecord> = jobs.by_ref().take(s).filter_map(|r| r.ok()).collect();
        any_ok |= !records.is_empty();
        let value = match sweep_var {
            SweepVar::Sigma2 => sigma2,
            _ => m as f64,
        };
        grouped.push((value, records));
    }
    if !any_ok {
        return Err(Error::Degenerate("every trial failed"));
    }
    let table = aggregate_points(sweep_var, &config.algorithms, &grouped);
    if table.rows.is_empty() {
        return Err(Error::Degenerate("every algorithm run failed"));
    }
    Ok(table)
}

/// Per-iteration `(overlap, deviation)` for iterates `x_2 … x_{I+1}`; an
/// early-stopped run repeats its final iterate.
pub fn iteration_metrics(
    signal: &SparseSignal,
    result: &RecoveryResult,
    iterations: usize,
) -> Result<Vec<(f64, f64)>> {
    (1..=iterations)
        .map(|l| {
            let rec = &result.trace[l.min(result.trace.len() - 1)];
            let iterate = rec
                .iterate
                .as_deref()
                .ok_or(Error::InvalidArgument("trace has no recorded iterates".into()))?;
            let support = Support::of_nonzeros(iterate);
            Ok((
                overlap_ratio(&signal.support, &support)?,
                deviation_ratio(signal.values.as_slice(), iterate)?,
            ))
        })
        .collect()
}

/// MSD after each of the first `max_iters` iterations, averaged over trials,
/// for the NIHT-family members of the roster.
pub fn run_convergence(config: &ExperimentConfig, m: usize, sigma2: f64) -> Result<SweepTable> {
    config.validate()?;
    let roster: Vec<Algorithm> = config
        .algorithms
        .iter()
        .copied()
        .filter(|a| a.is_iterative())
        .collect();
    if roster.is_empty() {
        return Err(Error::config(
            "algorithms",
            "convergence needs at least one of niht, ka-niht, rka-niht",
        ));
    }
    if config.max_iters == 0 {
        return Err(Error::config("max_iters", "convergence needs at least one iteration"));
    }
    let solver = SolverConfig {
        residual_tol: 0.0,
        record_iterates: true,
        ..config.solver_config()
    };
    let iters = config.max_iters;

    let per_trial = config.map_jobs(config.trials, |trial| -> Result<Vec<Option<Vec<(f64, f64)>>>> {
        let instance = trial_instance(config, m, sigma2, trial)?;
        let baseline = config.baseline_config(instance.problem.priors());
        Ok(roster
            .iter()
            .map(|&a| {
                run_algorithm(a, &instance, &solver, &baseline)
                    .and_then(|r| iteration_metrics(&instance.signal, &r, iters))
                    .ok()
            })
            .collect())
    })?;

    let ok: Vec<_> = per_trial.into_iter().filter_map(|r| r.ok()).collect();
    if ok.is_empty() {
        return Err(Error::Degenerate("every trial failed"));
    }
    let mut rows = Vec::with_capacity(roster.len() * iters);
    let mut failed = 0;
    for (slot, &algorithm) in roster.iter().enumerate() {
        let runs: Vec<&Vec<(f64, f64)>> = ok.iter().filter_map(|t| t[slot].as_ref()).collect();
        failed += ok.len() - runs.len();
        if runs.is_empty() {
            continue;
        }
        for l in 0..iters {
            let overlaps: Vec<f64> = runs.iter().map(|r| r[l].0).collect();
            let deviations: Vec<f64> = runs.iter().map(|r| r[l].1).collect();
            rows.push(SweepRow::aggregate(
                SweepVar::Iteration,
                algorithm,
                (l + 1) as f64,
                &overlaps,
                &deviations,
            ));
        }
    }
    if rows.is_empty() {
        return Err(Error::Degenerate("every algorithm run failed"));
    }
    Ok(SweepTable::new(rows, failed))
}

/// Machine-readable companion to the CSV output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub failed_runs: usize,
    pub rows: Vec<SweepRow>,
}

impl Summary {
    pub fn new(experiment: &str, config: &ExperimentConfig, table: &SweepTable) -> Self {
        Self {
            experiment: experiment.to_string(),
            master_seed: config.seed,
            config: config.clone(),
            failed_runs: table.failed_runs,
            rows: table.rows.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is always serializable") + "\n"
    }
}
