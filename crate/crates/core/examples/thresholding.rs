// Plain versus prior-weighted support selection on a toy vector.

use sparse_prior::model::expand_priors;
use sparse_prior::thresholding::{hard_threshold, weighted_select};

pub fn run_example() -> sparse_prior::Result<()> {
    let v = [0.9, -0.2, 0.85, 0.05, -0.8, 0.3];
    let (kept, support) = hard_threshold(&v, 2)?;
    println!("H_2(v) keeps {:?} -> {:?}", support.indices(), kept.as_slice());

    // Indices 3..6 are a priori far more likely to be active.
    let priors = expand_priors(&[3, 3], &[0.05, 0.9])?;
    for alpha in [0.0, 0.05, 0.2] {
        let penalty: Vec<f64> = priors.probs().iter().map(|p| alpha * p.ln()).collect();
        let s = weighted_select(&v, &penalty, 2)?;
        println!("alpha = {alpha:<4}: selects {:?}", s.indices());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
