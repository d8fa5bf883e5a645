// Recovery probability as the number of measurements grows.

use sparse_prior::bench::{run_sweep, Algorithm, ExperimentConfig, Sweep};

fn trials() -> usize {
    std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10)
}

pub fn run_example() -> sparse_prior::Result<()> {
    let config = ExperimentConfig {
        trials: trials(),
        algorithms: vec![Algorithm::Niht, Algorithm::RkaNiht, Algorithm::LwOmp],
        ..ExperimentConfig::default()
    };
    let table = run_sweep(&config, Sweep::OverM)?;
    for row in &table.rows {
        println!(
            "M = {:>3}  {:>9}  P_rec = {:.3} ± {:.3}",
            row.value, row.algorithm, row.p_recovered, row.p_recovered_se
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
