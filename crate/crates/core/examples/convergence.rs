// Average MSD per iteration for the NIHT family.
//
// `cargo run --release --example convergence -- 200` reproduces the full
// run; the default trial count keeps it quick.

use sparse_prior::bench::{run_convergence, Algorithm, ExperimentConfig};

fn trials() -> usize {
    std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20)
}

pub fn run_example() -> sparse_prior::Result<()> {
    let config = ExperimentConfig {
        trials: trials(),
        max_iters: 50,
        algorithms: vec![Algorithm::Niht, Algorithm::KaNiht, Algorithm::RkaNiht],
        ..ExperimentConfig::default()
    };
    let table = run_convergence(&config, config.m, config.noise_variance)?;
    println!("{:>4} {:>10} {:>10} {:>10}", "l", "niht", "ka-niht", "rka-niht");
    for l in [1, 2, 5, 10, 20, 30, 40, 50] {
        let db = |a| table.row(a, l as f64).map_or(f64::NAN, |r| r.msd_db);
        println!(
            "{l:>4} {:>10.2} {:>10.2} {:>10.2}",
            db(Algorithm::Niht),
            db(Algorithm::KaNiht),
            db(Algorithm::RkaNiht)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
