// Recover one structured sparse signal with the three NIHT variants.

use sparse_prior::bench::{deviation_ratio, overlap_ratio, trial_instance, ExperimentConfig};
use sparse_prior::solvers::{recover_ka_niht, recover_niht, recover_rka_niht, SolverConfig};

pub fn run_example() -> sparse_prior::Result<()> {
    let config = ExperimentConfig::default();
    let inst = trial_instance(&config, 60, 1e-3, 0)?;
    let truth = &inst.signal;
    println!(
        "N = {}, M = {}, |support| = {}",
        config.n,
        inst.problem.rows(),
        truth.sparsity()
    );

    let solver = SolverConfig::default();
    let runs = [
        ("niht", recover_niht(&inst.problem, &solver)?),
        ("ka-niht", recover_ka_niht(&inst.problem, &solver)?),
        ("rka-niht", recover_rka_niht(&inst.problem, &solver)?),
    ];
    for (name, r) in &runs {
        println!(
            "{name:>9}: overlap {:.3}  deviation {:.2e}  iterations {}",
            overlap_ratio(&truth.support, &r.support)?,
            deviation_ratio(truth.values.as_slice(), r.estimate.as_slice())?,
            r.iterations_used,
        );
    }

    // The adapted weights drift towards indices the solver kept selecting.
    let (_, rka) = &runs[2];
    let q = rka.weights.as_ref().expect("rka-niht reports its weights");
    let p = inst.problem.priors().probs();
    let boosted = (0..p.len()).filter(|&i| q[i] > p[i]).count();
    println!("weights raised on {boosted} of {} indices", p.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
