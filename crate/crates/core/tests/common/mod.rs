#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use sparse_prior::bench::{trial_instance, ExperimentConfig, TrialInstance};
use sparse_prior::model::Rng;

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Subset maximizing `Σ_S value(i)`; first one wins on exact ties.
pub fn best_subset(n: usize, k: usize, value: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for s in subsets(n, k) {
        let total: f64 = s.iter().map(|&i| value(i)).sum();
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, s));
        }
    }
    best.map(|(_, s)| s).unwrap_or_default()
}

/// Subset `S` minimizing `‖v − v|_S‖₂`.
pub fn exhaustive_hard_threshold(v: &[f64], k: usize) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for s in subsets(v.len(), k) {
        let resid: f64 = (0..v.len())
            .filter(|i| !s.contains(i))
            .map(|i| v[i] * v[i])
            .sum();
        if best.as_ref().is_none_or(|(b, _)| resid < *b) {
            best = Some((resid, s));
        }
    }
    best.map(|(_, s)| s).unwrap_or_default()
}

/// Minimizer of a convex 1-D function on `t ≥ 0`: bracket by doubling, dense
/// scan, then golden-section refinement.
pub fn line_search_min(phi: impl Fn(f64) -> f64) -> f64 {
    let f0 = phi(0.0);
    let mut hi = 1e-12;
    while phi(hi) <= f0 {
        hi *= 2.0;
        assert!(hi < 1e12, "no bracket");
    }
    let steps = 2000;
    let h = hi / steps as f64;
    let (mut best_i, mut best_f) = (0usize, f0);
    for i in 1..=steps {
        let f = phi(i as f64 * h);
        if f < best_f {
            best_f = f;
            best_i = i;
        }
    }
    let (mut a, mut b) = ((best_i.saturating_sub(1)) as f64 * h, (best_i + 1) as f64 * h);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    while (b - a) > 1e-13 * (1.0 + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    0.5 * (a + b)
}

/// `(AᵀA)⁻¹ Aᵀ y` through a Cholesky factorization.
pub fn normal_equations(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let gram = a.transpose() * a;
    gram.cholesky().expect("full column rank").solve(&a.tr_mul(y))
}

pub fn random_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

pub fn random_matrix(rng: &mut Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.normal())
}

/// Reference-setup problem at M = 70, σ² = 10⁻³.
pub fn reference_instance(seed: u64, trial: usize) -> TrialInstance {
    let config = ExperimentConfig {
        seed,
        ..ExperimentConfig::default()
    };
    trial_instance(&config, 70, 1e-3, trial).unwrap()
}
