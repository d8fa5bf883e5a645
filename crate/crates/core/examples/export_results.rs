// Run a single configuration and write the CSV table and JSON summary,
// the same files the command-line tool produces.

use std::fs;

use sparse_prior::bench::{run_single, ExperimentConfig, Summary};

pub fn run_example() -> sparse_prior::Result<()> {
    let config: ExperimentConfig = toml::from_str(
        r#"
        trials = 8
        m = 60
        noise_variance = 1e-2
        algorithms = ["niht", "rka-niht", "omp"]
        "#,
    )
    .map_err(|e| sparse_prior::Error::Io(e.to_string()))?;
    config.validate()?;

    let table = run_single(&config)?;
    let dir = std::env::temp_dir().join("sparse-prior-example");
    fs::create_dir_all(&dir)?;
    let csv = dir.join("single.csv");
    let json = dir.join("single.json");
    fs::write(&csv, table.to_csv())?;
    fs::write(&json, Summary::new("single", &config, &table).to_json())?;

    print!("{}", table.to_csv());
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> sparse_prior::Result<()> {
    run_example()
}
