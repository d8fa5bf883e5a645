//! Problem data and the seeded generators for signals, priors, sensing
//! matrices and noisy measurements.
//!
//! Randomness flows through [`Rng`], a ChaCha8 stream keyed by a 64-bit
//! seed. Child seeds are derived with [`Rng::derive_seed`], which folds a
//! list of words into the parent seed with SplitMix64:
//!
//! ```text
//! state = seed
//! for w in words { state = splitmix64(state ^ w) }
//! ```
//!
//! The stream itself is `ChaCha8Rng::seed_from_u64(state)`; normals come from
//! `rand_distr::StandardNormal`. Both are platform independent.

use nalgebra::{DMatrix, DVector};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thresholding::Support;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded pseudorandom stream.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
        words
            .iter()
            .fold(seed, |state, &w| splitmix64(state ^ w))
    }

    /// Independent child stream keyed by `words`.
    pub fn derive(seed: u64, words: &[u64]) -> Self {
        Self::new(Self::derive_seed(seed, words))
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

/// Per-index prior inclusion probabilities built from equal-probability groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorModel {
    group_sizes: Vec<usize>,
    group_probs: Vec<f64>,
    probs: Vec<f64>,
    expected_sparsity: f64,
}

impl PriorModel {
    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn group_probs(&self) -> &[f64] {
        &self.group_probs
    }

    /// The expanded vector `p`, group by group in index order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `K̄ = Σ_n N_n p̄_n`.
    pub fn expected_sparsity(&self) -> f64 {
        self.expected_sparsity
    }

    /// Variance of `|Λ|` under independent Bernoulli draws.
    pub fn sparsity_variance(&self) -> f64 {
        self.probs.iter().map(|p| p * (1.0 - p)).sum()
    }
}

pub fn expand_priors(group_sizes: &[usize], group_probs: &[f64]) -> Result<PriorModel> {
    if group_sizes.is_empty() || group_probs.is_empty() {
        return Err(Error::InvalidArgument("prior groups must be non-empty".into()));
    }
    if group_sizes.len() != group_probs.len() {
        return Err(Error::DimensionMismatch {
            expected: group_sizes.len(),
            actual: group_probs.len(),
            context: "group probabilities vs group sizes",
        });
    }
    if let Some(g) = group_sizes.iter().position(|&s| s == 0) {
        return Err(Error::InvalidArgument(format!("group {g} has zero size")));
    }
    if let Some(g) = group_probs
        .iter()
        .position(|&p| !(p > 0.0 && p <= 1.0))
    {
        return Err(Error::InvalidArgument(format!(
            "group {g} probability {} outside (0, 1]",
            group_probs[g]
        )));
    }

    let probs: Vec<f64> = group_sizes
        .iter()
        .zip(group_probs)
        .flat_map(|(&size, &p)| std::iter::repeat_n(p, size))
        .collect();
    let expected_sparsity = group_sizes
        .iter()
        .zip(group_probs)
        .map(|(&size, &p)| size as f64 * p)
        .sum();

    Ok(PriorModel {
        group_sizes: group_sizes.to_vec(),
        group_probs: group_probs.to_vec(),
        probs,
        expected_sparsity,
    })
}

/// Ground truth `x = w ⊙ ϑ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    pub values: DVector<f64>,
    pub support: Support,
    pub weights: Vec<f64>,
    pub indicator: Vec<bool>,
}

impl SparseSignal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// Draws `ϑ_i ~ Bernoulli(p_i)` and `w_i ~ N(0, 1)` for every index.
///
/// Exact-zero amplitudes are redrawn, and an empty support triggers a fresh
/// draw of the whole signal, so `|Λ| ≥ 1` always holds.
pub fn generate_signal(priors: &PriorModel, rng: &mut Rng) -> SparseSignal {
    let n = priors.len();
    loop {
        let indicator: Vec<bool> = priors.probs().iter().map(|&p| rng.uniform() < p).collect();
        let weights: Vec<f64> = (0..n)
            .map(|_| loop {
                let w = rng.normal();
                if w != 0.0 {
                    break w;
                }
            })
            .collect();
        if !indicator.iter().any(|&b| b) {
            continue;
        }
        let values = DVector::from_iterator(
            n,
            weights
                .iter()
                .zip(&indicator)
                .map(|(&w, &on)| if on { w } else { 0.0 }),
        );
        let support = Support::from_sorted_unchecked(
            indicator
                .iter()
                .enumerate()
                .filter_map(|(i, &on)| on.then_some(i))
                .collect(),
        );
        return SparseSignal {
            values,
            support,
            weights,
            indicator,
        };
    }
}

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries, filled column-major.
pub fn generate_matrix(m: usize, n: usize, rng: &mut Rng) -> Result<DMatrix<f64>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix dimensions must be positive, got {m}x{n}"
        )));
    }
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "sensing matrix needs m <= n, got {m}x{n}"
        )));
    }
    let scale = 1.0 / (m as f64).sqrt();
    Ok(DMatrix::from_fn(m, n, |_, _| rng.normal() * scale))
}

/// `y = A x + e` with `e ~ N(0, σ² I)`. No noise is drawn when `σ² = 0`.
pub fn measure(
    matrix: &DMatrix<f64>,
    signal: &SparseSignal,
    noise_variance: f64,
    rng: &mut Rng,
) -> Result<DVector<f64>> {
    if matrix.ncols() != signal.len() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            actual: signal.len(),
            context: "signal length vs matrix columns",
        });
    }
    if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be finite and non-negative, got {noise_variance}"
        )));
    }
    let mut y = matrix * &signal.values;
    if noise_variance > 0.0 {
        let sigma = noise_variance.sqrt();
        for v in y.iter_mut() {
            *v += sigma * rng.normal();
        }
    }
    Ok(y)
}

/// One recovery instance `y = A x + e` with sparsity budget `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    matrix: DMatrix<f64>,
    measurement: DVector<f64>,
    noise_variance: f64,
    sparsity: usize,
    priors: PriorModel,
}

impl Problem {
    pub fn new(
        matrix: DMatrix<f64>,
        measurement: DVector<f64>,
        noise_variance: f64,
        sparsity: usize,
        priors: PriorModel,
    ) -> Result<Self> {
        let (m, n) = matrix.shape();
        if m > n {
            return Err(Error::InvalidArgument(format!(
                "problem needs m <= n, got {m}x{n}"
            )));
        }
        if measurement.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: measurement.len(),
                context: "measurement length vs matrix rows",
            });
        }
        if priors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: priors.len(),
                context: "prior length vs matrix columns",
            });
        }
        if sparsity == 0 || sparsity > n {
            return Err(Error::InvalidArgument(format!(
                "sparsity must lie in 1..={n}, got {sparsity}"
            )));
        }
        if !(noise_variance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be non-negative, got {noise_variance}"
            )));
        }
        Ok(Self {
            matrix,
            measurement,
            noise_variance,
            sparsity,
            priors,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn measurement(&self) -> &DVector<f64> {
        &self.measurement
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn priors(&self) -> &PriorModel {
        &self.priors
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Same problem with a different prior vector (used for prior misspecification studies).
    pub fn with_priors(&self, priors: PriorModel) -> Result<Self> {
        Self::new(
            self.matrix.clone(),
            self.measurement.clone(),
            self.noise_variance,
            self.sparsity,
            priors,
        )
    }

    /// `‖y − A x‖₂²`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        (&self.measurement - &self.matrix * x).norm_squared()
    }
}
