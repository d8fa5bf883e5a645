//! Normalized iterative hard thresholding and its knowledge-aided variants.
//!
//! All three solvers share one iteration engine. They differ only in how the
//! support is selected from the gradient step `v = x + μ g`:
//!
//! * NIHT keeps the `K` largest `|v_i|`.
//! * KA-NIHT keeps the `K` largest `|v_i| + α log p_i` with fixed priors.
//! * RKA-NIHT keeps the `K` largest `|v_i| + α log q_i`, where `q` starts at
//!   `p` and grows by `β p_i` on every accepted support.
//!
//! When the support moves, the step is shrunk by `κ(1−c)` until
//! `μ ≤ ϱ = (1−c)‖x̂ − x‖² / ‖A(x̂ − x)‖²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PriorModel, Problem};
use crate::thresholding::{hard_threshold, restrict, weighted_select, Support};

/// Upper bound on step shrinks within one iteration.
pub const MAX_BACKTRACKS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// `α = alpha_scale / Σ p_i`, computed once.
    Fixed,
    /// `α = alpha_scale / Σ q_i`, recomputed before every selection.
    Recomputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub alpha_scale: f64,
    pub beta: f64,
    pub c: f64,
    /// `κ(1−c)`, the divisor applied to `μ` per backtracking step.
    pub kappa_scaled: f64,
    pub prob_floor: f64,
    pub alpha_mode: AlphaMode,
    pub residual_tol: f64,
    /// Keep a copy of every iterate in the trace.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            alpha_scale: 1.5,
            beta: 0.6,
            c: 0.01,
            kappa_scaled: 2.0,
            prob_floor: 1e-6,
            alpha_mode: AlphaMode::Recomputed,
            residual_tol: 1e-12,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    /// Range checks; the key name is reported for config errors.
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::config("c", format!("{} outside range (0, 1)", self.c)));
        }
        if !(self.kappa_scaled > 1.0) || !self.kappa_scaled.is_finite() {
            return Err(Error::config(
                "kappa_scaled",
                format!("{} must be finite and > 1", self.kappa_scaled),
            ));
        }
        if !(self.alpha_scale >= 0.0) || !self.alpha_scale.is_finite() {
            return Err(Error::config(
                "alpha_scale",
                format!("{} must be finite and >= 0", self.alpha_scale),
            ));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::config(
                "beta",
                format!("{} must be finite and >= 0", self.beta),
            ));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor <= 1.0) {
            return Err(Error::config(
                "prob_floor",
                format!("{} outside range (0, 1]", self.prob_floor),
            ));
        }
        if !(self.residual_tol >= 0.0) {
            return Err(Error::config(
                "residual_tol",
                format!("{} must be >= 0", self.residual_tol),
            ));
        }
        Ok(())
    }

    /// Also checks `prob_floor ≤ min p_i`.
    pub fn validate_for(&self, priors: &PriorModel) -> Result<()> {
        self.validate()?;
        let min_p = priors.probs().iter().copied().fold(f64::INFINITY, f64::min);
        if self.prob_floor > min_p {
            return Err(Error::config(
                "prob_floor",
                format!("{} exceeds smallest prior probability {min_p}", self.prob_floor),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceFlag {
    /// Empty support or zero gradient on the support; the run stopped.
    DegenerateStep,
    /// Zero curvature along the search direction, or a rank-deficient least-squares solve.
    RankDeficient,
    /// The backtracking loop hit [`MAX_BACKTRACKS`].
    BacktrackCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// `‖y − A x_l‖₂²`.
    pub objective: f64,
    /// `None` for the initialization entry.
    pub step_size: Option<f64>,
    pub support: Support,
    pub backtracks: usize,
    pub flag: Option<TraceFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterate: Option<Vec<f64>>,
    /// Snapshot of `q` after this iteration (RKA-NIHT with `record_iterates`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub estimate: DVector<f64>,
    pub support: Support,
    pub trace: Vec<IterationRecord>,
    pub iterations_used: usize,
    /// Final recursive weights `q` (RKA-NIHT only).
    pub weights: Option<Vec<f64>>,
}

impl RecoveryResult {
    pub(crate) fn from_trace(
        estimate: DVector<f64>,
        trace: Vec<IterationRecord>,
        weights: Option<Vec<f64>>,
    ) -> Self {
        let support = Support::of_nonzeros(estimate.as_slice());
        Self {
            estimate,
            support,
            iterations_used: trace.len(),
            trace,
            weights,
        }
    }

    pub fn flagged(&self) -> bool {
        self.trace.iter().any(|r| r.flag.is_some())
    }
}

/// `A g|_Λ`, touching only the columns in `support`.
fn apply_restricted(matrix: &DMatrix<f64>, v: &DVector<f64>, support: &Support) -> DVector<f64> {
    let mut out = DVector::zeros(matrix.nrows());
    for i in support {
        out.axpy(v[i], &matrix.column(i), 1.0);
    }
    out
}

/// Exact line-search step `μ = ‖g_Λ‖² / ‖A_Λ g_Λ‖²` along the gradient restricted to `support`.
pub fn step_size(matrix: &DMatrix<f64>, gradient: &DVector<f64>, support: &Support) -> Result<f64> {
    if gradient.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            actual: gradient.len(),
            context: "gradient length vs matrix columns",
        });
    }
    if support.is_empty() {
        return Err(Error::Degenerate("empty support"));
    }
    if let Some(index) = support.iter().find(|&i| i >= gradient.len()) {
        return Err(Error::IndexOutOfBounds {
            index,
            len: gradient.len(),
        });
    }
    let numerator: f64 = support.iter().map(|i| gradient[i] * gradient[i]).sum();
    if numerator == 0.0 {
        return Err(Error::Degenerate("zero gradient on support"));
    }
    let denominator = apply_restricted(matrix, gradient, support).norm_squared();
    if denominator == 0.0 {
        return Err(Error::RankDeficientDirection);
    }
    Ok(numerator / denominator)
}

/// Support selection rule plus its probability state.
enum Selector {
    Magnitude,
    Fixed {
        penalty: Vec<f64>,
    },
    Recursive {
        priors: Vec<f64>,
        weights: Vec<f64>,
        alpha_scale: f64,
        beta: f64,
        frozen_alpha: Option<f64>,
        penalty: Vec<f64>,
    },
}

fn clamped(priors: &PriorModel, floor: f64) -> Vec<f64> {
    priors.probs().iter().map(|&p| p.max(floor)).collect()
}

fn log_penalty(weights: &[f64], alpha: f64) -> Vec<f64> {
    weights.iter().map(|&q| alpha * q.ln()).collect()
}

impl Selector {
    fn refresh(&mut self) {
        if let Selector::Recursive {
            weights,
            alpha_scale,
            frozen_alpha,
            penalty,
            ..
        } = self
        {
            let alpha = frozen_alpha.unwrap_or_else(|| *alpha_scale / weights.iter().sum::<f64>());
            *penalty = log_penalty(weights, alpha);
        }
    }

    fn select(&self, v: &[f64], k: usize) -> Result<Support> {
        match self {
            Selector::Magnitude => hard_threshold(v, k).map(|(_, s)| s),
            Selector::Fixed { penalty } | Selector::Recursive { penalty, .. } => {
                weighted_select(v, penalty, k)
            }
        }
    }

    fn accept(&mut self, support: &Support) {
        if let Selector::Recursive {
            priors,
            weights,
            beta,
            ..
        } = self
        {
            for i in support {
                weights[i] += *beta * priors[i];
            }
        }
    }

    fn weights(&self) -> Option<&[f64]> {
        match self {
            Selector::Recursive { weights, .. } => Some(weights),
            _ => None,
        }
    }

    fn into_weights(self) -> Option<Vec<f64>> {
        match self {
            Selector::Recursive { weights, .. } => Some(weights),
            _ => None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    problem: &Problem,
    x: &DVector<f64>,
    step: Option<f64>,
    support: &Support,
    backtracks: usize,
    flag: Option<TraceFlag>,
    selector: &Selector,
    keep: bool,
) -> IterationRecord {
    IterationRecord {
        objective: problem.objective(x),
        step_size: step,
        support: support.clone(),
        backtracks,
        flag,
        iterate: keep.then(|| x.as_slice().to_vec()),
        weights: if keep { selector.weights().map(<[f64]>::to_vec) } else { None },
    }
}

fn run(problem: &Problem, config: &SolverConfig, mut selector: Selector) -> Result<RecoveryResult> {
    config.validate()?;
    let a = problem.matrix();
    let y = problem.measurement();
    let k = problem.sparsity();
    let keep = config.record_iterates;

    selector.refresh();
    let correlation = a.tr_mul(y);
    let mut support = selector.select(correlation.as_slice(), k)?;
    let mut x = restrict(correlation.as_slice(), &support)?;
    let mut trace = vec![record(problem, &x, None, &support, 0, None, &selector, keep)];

    for _ in 0..config.max_iters {
        let residual = y - a * &x;
        if residual.norm() <= config.residual_tol {
            break;
        }
        let gradient = a.tr_mul(&residual);
        let mut mu = match step_size(a, &gradient, &support) {
            Ok(mu) => mu,
            Err(e) => {
                let flag = match e {
                    Error::RankDeficientDirection => TraceFlag::RankDeficient,
                    _ => TraceFlag::DegenerateStep,
                };
                if let Some(last) = trace.last_mut() {
                    last.flag = Some(flag);
                }
                break;
            }
        };

        selector.refresh();
        let propose = |mu: f64, selector: &Selector| -> Result<(Support, DVector<f64>)> {
            let v = &x + &gradient * mu;
            let s = selector.select(v.as_slice(), k)?;
            let candidate = restrict(v.as_slice(), &s)?;
            Ok((s, candidate))
        };
        let (mut next_support, mut candidate) = propose(mu, &selector)?;

        let mut backtracks = 0;
        let mut flag = None;
        if next_support != support {
            loop {
                let delta = &candidate - &x;
                let num = delta.norm_squared();
                let den = (a * &delta).norm_squared();
                if num == 0.0 || den == 0.0 {
                    break;
                }
                let rho = (1.0 - config.c) * num / den;
                if mu <= rho {
                    break;
                }
                if backtracks == MAX_BACKTRACKS {
                    flag = Some(TraceFlag::BacktrackCap);
                    break;
                }
                mu /= config.kappa_scaled;
                backtracks += 1;
                (next_support, candidate) = propose(mu, &selector)?;
            }
        }

        let unchanged = next_support == support && candidate == x;
        x = candidate;
        support = next_support;
        selector.accept(&support);
        trace.push(record(problem, &x, Some(mu), &support, backtracks, flag, &selector, keep));
        if unchanged {
            break;
        }
    }

    Ok(RecoveryResult::from_trace(x, trace, selector.into_weights()))
}

/// NIHT: `x_{l+1} = H_K(x_l + μ_l Aᵀ(y − A x_l))` from `x_1 = H_K(Aᵀ y)`.
pub fn recover_niht(problem: &Problem, config: &SolverConfig) -> Result<RecoveryResult> {
    run(problem, config, Selector::Magnitude)
}

/// KA-NIHT: support chosen by `|v| + α log p` with `α = alpha_scale / Σ p`.
pub fn recover_ka_niht(problem: &Problem, config: &SolverConfig) -> Result<RecoveryResult> {
    config.validate_for(problem.priors())?;
    let p = clamped(problem.priors(), config.prob_floor);
    let alpha = config.alpha_scale / p.iter().sum::<f64>();
    let penalty = log_penalty(&p, alpha);
    run(problem, config, Selector::Fixed { penalty })
}

/// RKA-NIHT: KA-NIHT with weights `q ← q + β p` on each accepted support.
pub fn recover_rka_niht(problem: &Problem, config: &SolverConfig) -> Result<RecoveryResult> {
    config.validate_for(problem.priors())?;
    let p = clamped(problem.priors(), config.prob_floor);
    let frozen_alpha = match config.alpha_mode {
        AlphaMode::Fixed => Some(config.alpha_scale / p.iter().sum::<f64>()),
        AlphaMode::Recomputed => None,
    };
    run(
        problem,
        config,
        Selector::Recursive {
            weights: p.clone(),
            priors: p,
            alpha_scale: config.alpha_scale,
            beta: config.beta,
            frozen_alpha,
            penalty: Vec::new(),
        },
    )
}
