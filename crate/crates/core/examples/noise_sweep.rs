// MSD versus noise variance at a fixed number of measurements.

use sparse_prior::bench::{run_sweep, Algorithm, ExperimentConfig, Sweep};

fn trials() -> usize {
    std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10)
}

pub fn run_example() -> sparse_prior::Result<()> {
    let config = ExperimentConfig {
        trials: trials(),
        algorithms: vec![Algorithm::RkaNiht, Algorithm::LwOmp, Algorithm::Oracle],
        ..ExperimentConfig::default()
    };
    let table = run_sweep(&config, Sweep::OverSigma)?;
    for s in &config.sigma_values {
        let line: Vec<String> = config
            .algorithms
            .iter()
            .filter_map(|&a| table.row(a, *s))
            .map(|r| format!("{} {:.1} dB", r.algorithm, r.msd_db))
            .collect();
        println!("σ² = {s:<7} {}", line.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
