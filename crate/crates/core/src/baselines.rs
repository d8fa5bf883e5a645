//! Greedy and oracle reference recoverers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PriorModel, Problem};
use crate::solvers::{IterationRecord, RecoveryResult, TraceFlag};
use crate::thresholding::Support;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Weight on `log p_i` in the LW-OMP selection score.
    pub lw_alpha: f64,
    pub prob_floor: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            lw_alpha: 0.0,
            prob_floor: 1e-6,
        }
    }
}

impl BaselineConfig {
    /// `lw_alpha = alpha_scale / Σ p_i`, the same scaling KA-NIHT uses.
    pub fn matched(alpha_scale: f64, priors: &PriorModel, prob_floor: f64) -> Self {
        let total: f64 = priors.probs().iter().map(|p| p.max(prob_floor)).sum();
        Self {
            lw_alpha: alpha_scale / total,
            prob_floor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lw_alpha >= 0.0) || !self.lw_alpha.is_finite() {
            return Err(Error::config(
                "lw_alpha",
                format!("{} must be finite and >= 0", self.lw_alpha),
            ));
        }
        if !(self.prob_floor > 0.0 && self.prob_floor <= 1.0) {
            return Err(Error::config(
                "prob_floor",
                format!("{} outside range (0, 1]", self.prob_floor),
            ));
        }
        Ok(())
    }
}

/// Least squares `min ‖b − M z‖₂` via SVD, falling back to the minimum-norm
/// solution when `M` is rank deficient. Returns the solution and whether
/// the rank fell short of the column count.
pub(crate) fn least_squares(m: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, bool) {
    if m.ncols() == 0 {
        return (DVector::zeros(0), false);
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * f64::EPSILON * m.nrows().max(m.ncols()) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let z = svd
        .solve(b, eps)
        .expect("both singular vector sets were requested");
    (z, rank < m.ncols())
}

fn columns(matrix: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    matrix.select_columns(indices)
}

fn scatter(n: usize, indices: &[usize], values: &DVector<f64>) -> DVector<f64> {
    let mut x = DVector::zeros(n);
    for (&i, &v) in indices.iter().zip(values.iter()) {
        x[i] = v;
    }
    x
}

fn greedy(problem: &Problem, penalty: Option<&[f64]>) -> Result<RecoveryResult> {
    let a = problem.matrix();
    let y = problem.measurement();
    let (m, n) = a.shape();
    let k = problem.sparsity();
    if k > m {
        return Err(Error::InvalidArgument(format!(
            "OMP needs sparsity <= rows, got K = {k} with M = {m}"
        )));
    }

    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let mut residual = y.clone();
    let mut x = DVector::zeros(n);
    let mut trace = Vec::with_capacity(k);

    for _ in 0..k {
        let correlation = a.tr_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !taken[i] && norms[i] > 0.0) {
            let mut score = correlation[i].abs() / norms[i];
            if let Some(p) = penalty {
                score += p[i];
            }
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((index, _)) = best else { break };
        chosen.push(index);
        taken[index] = true;

        let (z, deficient) = least_squares(&columns(a, &chosen), y);
        x = scatter(n, &chosen, &z);
        residual = y - a * &x;
        trace.push(IterationRecord {
            objective: residual.norm_squared(),
            step_size: None,
            support: Support::new(chosen.clone(), n)?,
            backtracks: 0,
            flag: deficient.then_some(TraceFlag::RankDeficient),
            iterate: None,
            weights: None,
        });
    }

    Ok(RecoveryResult::from_trace(x, trace, None))
}

/// Orthogonal matching pursuit with column-normalized correlations.
pub fn recover_omp(problem: &Problem, config: &BaselineConfig) -> Result<RecoveryResult> {
    config.validate()?;
    greedy(problem, None)
}

/// Log-weighted OMP: selection score `|a_iᵀ r| / ‖a_i‖ + lw_alpha · log p_i`.
pub fn recover_lw_omp(problem: &Problem, config: &BaselineConfig) -> Result<RecoveryResult> {
    config.validate()?;
    let penalty: Vec<f64> = problem
        .priors()
        .probs()
        .iter()
        .map(|&p| config.lw_alpha * p.max(config.prob_floor).ln())
        .collect();
    greedy(problem, Some(&penalty))
}

/// Least squares restricted to the true support.
pub fn recover_oracle(problem: &Problem, true_support: &Support) -> Result<RecoveryResult> {
    let a = problem.matrix();
    let (m, n) = a.shape();
    if true_support.is_empty() {
        return Err(Error::InvalidArgument("oracle needs a non-empty support".into()));
    }
    if true_support.len() > m {
        return Err(Error::InvalidArgument(format!(
            "oracle support size {} exceeds rows {m}",
            true_support.len()
        )));
    }
    if let Some(index) = true_support.iter().find(|&i| i >= n) {
        return Err(Error::IndexOutOfBounds { index, len: n });
    }
    let (z, deficient) = least_squares(&columns(a, true_support.indices()), problem.measurement());
    let x = scatter(n, true_support.indices(), &z);
    let trace = vec![IterationRecord {
        objective: problem.objective(&x),
        step_size: None,
        support: true_support.clone(),
        backtracks: 0,
        flag: deficient.then_some(TraceFlag::RankDeficient),
        iterate: None,
        weights: None,
    }];
    Ok(RecoveryResult::from_trace(x, trace, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{expand_priors, generate_matrix, Rng};

    fn problem(a: DMatrix<f64>, y: DVector<f64>, k: usize) -> Problem {
        let n = a.ncols();
        Problem::new(a, y, 0.0, k, expand_priors(&[n], &[0.5]).unwrap()).unwrap()
    }

    #[test]
    fn first_pick_is_max_correlation() {
        let mut rng = Rng::new(4);
        let mut a = generate_matrix(6, 10, &mut rng).unwrap();
        for mut c in a.column_iter_mut() {
            let norm = c.norm();
            c /= norm;
        }
        let y = DVector::from_fn(6, |_, _| rng.normal());
        let corr = a.tr_mul(&y);
        let expected = corr.iamax();
        let r = recover_omp(&problem(a, y, 1), &BaselineConfig::default()).unwrap();
        assert_eq!(r.trace[0].support.indices(), &[expected]);
    }

    #[test]
    fn orthogonal_columns_exact() {
        let q = DMatrix::from_fn(6, 6, |i, j| ((i * 5 + j * 11 + 1) as f64).cos())
            .qr()
            .q();
        let mut x = DVector::zeros(6);
        x[1] = 2.0;
        x[4] = -0.5;
        let y = &q * &x;
        let r = recover_omp(&problem(q, y, 2), &BaselineConfig::default()).unwrap();
        assert!((&r.estimate - &x).norm() < 1e-12);
        assert_eq!(r.support.indices(), &[1, 4]);
    }

    #[test]
    fn never_repeats_and_residual_shrinks() {
        for seed in 0..20 {
            let mut rng = Rng::new(seed);
            let a = generate_matrix(15, 30, &mut rng).unwrap();
            let y = DVector::from_fn(15, |_, _| rng.normal());
            let r = recover_omp(&problem(a, y.clone(), 6), &BaselineConfig::default()).unwrap();
            let mut prev = y.norm_squared();
            for (t, rec) in r.trace.iter().enumerate() {
                assert_eq!(rec.support.len(), t + 1);
                assert!(rec.objective < prev);
                prev = rec.objective;
            }
        }
    }

    #[test]
    fn lw_omp_tie_prefers_likely_column() {
        let a = DMatrix::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 1.0]);
        let priors = expand_priors(&[1, 1], &[0.8, 0.05]).unwrap();
        let p = Problem::new(a.clone(), y.clone(), 0.0, 1, priors).unwrap();
        let cfg = BaselineConfig {
            lw_alpha: 0.1,
            ..BaselineConfig::default()
        };
        assert_eq!(recover_lw_omp(&p, &cfg).unwrap().support.indices(), &[0]);
        let priors = expand_priors(&[1, 1], &[0.05, 0.8]).unwrap();
        let p = Problem::new(a, y, 0.0, 1, priors).unwrap();
        assert_eq!(recover_lw_omp(&p, &cfg).unwrap().support.indices(), &[1]);
    }

    #[test]
    fn oracle_identity() {
        let y = DVector::from_vec(vec![0.1, -0.2, 0.3, 0.4]);
        let p = problem(DMatrix::identity(4, 4), y, 2);
        let s = Support::new(vec![1, 3], 4).unwrap();
        let r = recover_oracle(&p, &s).unwrap();
        let expected = DVector::from_vec(vec![0.0, -0.2, 0.0, 0.4]);
        assert!((&r.estimate - &expected).norm() < 1e-14);
        assert_eq!(r.support.indices(), &[1, 3]);
        assert!(recover_oracle(&p, &Support::empty()).is_err());
    }

    #[test]
    fn rank_deficient_is_flagged() {
        let mut a = DMatrix::from_fn(4, 6, |i, j| (i + j) as f64 + 1.0);
        let dup = a.column(1).clone_owned();
        a.column_mut(2).copy_from(&dup);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let p = problem(a, y, 2);
        let r = recover_oracle(&p, &Support::new(vec![1, 2], 6).unwrap()).unwrap();
        assert!(r.flagged());
        // Minimum-norm solution splits the weight evenly.
        assert!((r.estimate[1] - r.estimate[2]).abs() < 1e-10);
    }

    #[test]
    fn omp_needs_k_at_most_m() {
        let a = DMatrix::from_fn(2, 4, |i, j| (i * 4 + j) as f64);
        let p = problem(a, DVector::from_vec(vec![1.0, 2.0]), 3);
        assert!(recover_omp(&p, &BaselineConfig::default()).is_err());
    }
}
