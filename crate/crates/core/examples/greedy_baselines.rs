// OMP, log-weighted OMP and the support oracle on a shared instance.

use sparse_prior::baselines::{recover_lw_omp, recover_omp, recover_oracle, BaselineConfig};
use sparse_prior::bench::{deviation_ratio, overlap_ratio, trial_instance, ExperimentConfig};

pub fn run_example() -> sparse_prior::Result<()> {
    let config = ExperimentConfig::default();
    let inst = trial_instance(&config, 50, 1e-3, 3)?;
    let priors = inst.problem.priors();

    let matched = BaselineConfig::matched(config.alpha_scale, priors, config.prob_floor);
    println!("lw_alpha = {:.4}", matched.lw_alpha);
    let runs = [
        ("omp", recover_omp(&inst.problem, &BaselineConfig::default())?),
        ("lw-omp", recover_lw_omp(&inst.problem, &matched)?),
        ("oracle", recover_oracle(&inst.problem, &inst.signal.support)?),
    ];
    for (name, r) in &runs {
        println!(
            "{name:>7}: overlap {:.3}  deviation {:.2e}",
            overlap_ratio(&inst.signal.support, &r.support)?,
            deviation_ratio(inst.signal.values.as_slice(), r.estimate.as_slice())?,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
