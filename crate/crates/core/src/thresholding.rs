//! Top-K selection operators shared by every solver.
//!
//! Rankings are strict: larger score first, lower index first on ties.
//! Selection uses `select_nth_unstable_by` under that total order, so the
//! chosen set is exactly the first `k` entries of a full stable sort.

use std::cmp::Ordering;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, duplicate-free index set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Support(Vec<usize>);

impl Support {
    /// Builds a support from arbitrary indices, checking them against `len`.
    pub fn new(mut indices: Vec<usize>, len: usize) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfBounds { index, len });
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self(indices))
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(len: usize) -> Self {
        Self((0..len).collect())
    }

    /// Positions of the nonzero entries of `v`.
    pub fn of_nonzeros(v: &[f64]) -> Self {
        Self(
            v.iter()
                .enumerate()
                .filter_map(|(i, &x)| (x != 0.0).then_some(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// `|self ∩ other|`, by merging the two sorted lists.
    pub fn intersection_len(&self, other: &Support) -> usize {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        let mut count = 0;
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => {
                    count += 1;
                    a.next();
                    b.next();
                }
            }
        }
        count
    }
}

impl<'a> IntoIterator for &'a Support {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

fn check_k(k: usize, len: usize) -> Result<()> {
    if k > len {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds vector length {len}"
        )));
    }
    Ok(())
}

/// Indices of the `k` largest scores; `+ 0.0` folds `-0.0` into `0.0`
/// so `total_cmp` agrees with numeric equality.
fn top_k(scores: &[f64], k: usize) -> Support {
    if k == 0 {
        return Support::empty();
    }
    let rank = |&a: &usize, &b: &usize| {
        (scores[b] + 0.0)
            .total_cmp(&(scores[a] + 0.0))
            .then(a.cmp(&b))
    };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, rank);
        order.truncate(k);
    }
    order.sort_unstable();
    Support::from_sorted_unchecked(order)
}

/// `H_K`: keeps the `k` largest-magnitude entries of `v`.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<(DVector<f64>, Support)> {
    check_k(k, v.len())?;
    let magnitudes: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let support = top_k(&magnitudes, k);
    let out = restrict(v, &support)?;
    Ok((out, support))
}

/// Top-`k` indices of `|v_i| + penalty_i`.
///
/// Solvers pass `penalty_i = α·log(q_i)`. A non-finite penalty means a
/// probability reached the logarithm without being clamped.
pub fn weighted_select(v: &[f64], penalty: &[f64], k: usize) -> Result<Support> {
    if v.len() != penalty.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            actual: penalty.len(),
            context: "penalty length vs vector length",
        });
    }
    check_k(k, v.len())?;
    if let Some(i) = penalty.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinitePenalty(i));
    }
    let scores: Vec<f64> = v.iter().zip(penalty).map(|(x, p)| x.abs() + p).collect();
    Ok(top_k(&scores, k))
}

/// `v` on `support`, zero elsewhere.
pub fn restrict(v: &[f64], support: &Support) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(v.len());
    for i in support {
        let x = v.get(i).ok_or(Error::IndexOutOfBounds {
            index: i,
            len: v.len(),
        })?;
        out[i] = *x;
    }
    Ok(out)
}
