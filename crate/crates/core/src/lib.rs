//! Sparse recovery with prior support probabilities.
//!
//! The crate provides normalized iterative hard thresholding (NIHT), its
//! knowledge-aided variant driven by per-index inclusion probabilities
//! (KA-NIHT), and a recursive variant that sharpens those probabilities while
//! iterating (RKA-NIHT). OMP, log-weighted OMP and a true-support least-squares
//! oracle serve as reference points, and [`bench`] runs seeded Monte Carlo
//! comparisons of all of them.
//!
//! ```
//! use sparse_prior::model::{expand_priors, generate_matrix, generate_signal, measure, Problem, Rng};
//! use sparse_prior::solvers::{recover_rka_niht, SolverConfig};
//!
//! let priors = expand_priors(&[90, 10], &[2.0 / 90.0, 0.5]).unwrap();
//! let mut rng = Rng::new(7);
//! let signal = generate_signal(&priors, &mut rng);
//! let a = generate_matrix(50, 100, &mut rng).unwrap();
//! let y = measure(&a, &signal, 1e-4, &mut rng).unwrap();
//! let problem = Problem::new(a, y, 1e-4, signal.sparsity(), priors).unwrap();
//!
//! let result = recover_rka_niht(&problem, &SolverConfig::default()).unwrap();
//! assert!(result.support.len() <= signal.sparsity());
//! ```

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod model;
pub mod solvers;
pub mod thresholding;

pub use error::{Error, Result};
