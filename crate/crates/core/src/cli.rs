//! Command-line front end.
//!
//! Configuration precedence, highest first: command-line flag, config file,
//! `SPARSE_PRIOR_SEED` (seed only), built-in default.
//!
//! Config files are flat documents with the field names of
//! [`ExperimentConfig`]. Files ending in `.json` are read as JSON, anything
//! else as TOML:
//!
//! ```toml
//! trials = 200
//! m_values = [40, 50, 60, 70, 80]
//! algorithms = ["niht", "ka-niht", "rka-niht"]
//! ```
//!
//! Exit codes: 0 success, 1 configuration or output error, 2 every trial failed.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::bench::{
    run_convergence, run_single, run_sweep, Algorithm, ExperimentConfig, Summary, Sweep,
    SweepTable,
};
use crate::error::{Error, Result};

pub const SEED_ENV: &str = "SPARSE_PRIOR_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// MSD versus iteration for the NIHT family at (m, noise_variance)
    Convergence,
    /// Sweep the measurement count over m_values
    SweepM,
    /// Sweep the noise variance over sigma_values at m
    SweepNoise,
    /// All algorithms at the single point (m, noise_variance)
    Single,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convergence => "convergence",
            Command::SweepM => "sweep-m",
            Command::SweepNoise => "sweep-noise",
            Command::Single => "single",
        }
    }
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.trim().parse::<Algorithm>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Parser)]
#[command(name = "sparse-prior", version, about = "Monte Carlo comparison of prior-aided sparse recovery")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,

    /// TOML or JSON experiment config
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, created if absent
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Comma list from niht,ka-niht,rka-niht,omp,lw-omp,oracle
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_algorithm)]
    pub algos: Option<Vec<Algorithm>>,

    /// Worker threads (0 = auto, 1 = serial)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true)]
    pub verbose: bool,
}

fn from_document(text: &str, json: bool) -> Result<(ExperimentConfig, bool)> {
    let (value, has_seed): (serde_json::Value, bool) = if json {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::config("<document>", e.to_string()))?;
        let has_seed = v.get("seed").is_some();
        (v, has_seed)
    } else {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        let has_seed = table.contains_key("seed");
        let v = serde_json::to_value(table).map_err(|e| Error::config("<document>", e.to_string()))?;
        (v, has_seed)
    };
    if let Some(map) = value.as_object() {
        for (key, v) in map {
            let mut probe = serde_json::Map::new();
            probe.insert(key.clone(), v.clone());
            serde_json::from_value::<ExperimentConfig>(serde_json::Value::Object(probe))
                .map_err(|e| Error::config(key.clone(), e.to_string()))?;
        }
    } else {
        return Err(Error::config("<document>", "top level must be a table"));
    }
    let config = serde_json::from_value(value).map_err(|e| Error::config("<document>", e.to_string()))?;
    Ok((config, has_seed))
}

/// Parses a config document without validating it; absent keys take defaults.
pub fn parse_config(text: &str, json: bool) -> Result<ExperimentConfig> {
    from_document(text, json).map(|(c, _)| c)
}

fn read_config(path: &Path) -> Result<(ExperimentConfig, bool)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config("<document>", format!("{}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e == "json");
    from_document(&text, json)
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let (config, _) = read_config(path)?;
    config.validate()?;
    Ok(config)
}

/// Applies file, environment and flag layers, then validates.
pub fn resolve_config(inv: &Invocation, env_seed: Option<&str>) -> Result<ExperimentConfig> {
    let (mut config, file_has_seed) = match &inv.config {
        Some(path) => read_config(path)?,
        None => (ExperimentConfig::default(), false),
    };
    if !file_has_seed {
        if let Some(raw) = env_seed {
            config.seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::config(SEED_ENV, format!("`{raw}` is not a u64")))?;
        }
    }
    if let Some(seed) = inv.seed {
        config.seed = seed;
    }
    if let Some(trials) = inv.trials {
        config.trials = trials;
    }
    if let Some(algos) = &inv.algos {
        config.algorithms = algos.clone();
    }
    if let Some(threads) = inv.threads {
        config.threads = threads;
    }
    config.validate()?;
    Ok(config)
}

pub fn run_command(command: Command, config: &ExperimentConfig) -> Result<SweepTable> {
    match command {
        Command::Convergence => run_convergence(config, config.m, config.noise_variance),
        Command::SweepM => run_sweep(config, Sweep::OverM),
        Command::SweepNoise => run_sweep(config, Sweep::OverSigma),
        Command::Single => run_single(config),
    }
}

fn unique_stem(out: &Path, command: Command) -> PathBuf {
    let millis = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let mut stem = out.join(format!("{}_{millis}", command.name()));
    let mut n = 1;
    while stem.with_extension("csv").exists() {
        stem = out.join(format!("{}_{millis}-{n}", command.name()));
        n += 1;
    }
    stem
}

/// Paths of the files written by a successful run.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub rows: usize,
}

pub fn write_outputs(
    out: &Path,
    command: Command,
    config: &ExperimentConfig,
    table: &SweepTable,
) -> Result<Outputs> {
    fs::create_dir_all(out)?;
    let stem = unique_stem(out, command);
    let csv = stem.with_extension("csv");
    let json = stem.with_extension("json");
    fs::write(&csv, table.to_csv())?;
    fs::write(&json, Summary::new(command.name(), config, table).to_json())?;
    Ok(Outputs {
        csv,
        json,
        rows: table.rows.len(),
    })
}

/// Runs an invocation end to end and returns the process exit code.
pub fn execute(inv: &Invocation) -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    let config = match resolve_config(inv, env_seed.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if inv.verbose {
        eprintln!(
            "{}",
            toml::to_string(&config).unwrap_or_else(|e| format!("<config: {e}>"))
        );
    }
    if let Err(e) = fs::create_dir_all(&inv.out) {
        eprintln!("error: cannot create {}: {e}", inv.out.display());
        return EXIT_CONFIG;
    }

    let table = match run_command(inv.command, &config) {
        Ok(t) => t,
        Err(e @ Error::Degenerate(_)) => {
            eprintln!("error: {e}");
            return EXIT_DEGENERATE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if inv.verbose && table.failed_runs > 0 {
        eprintln!("{} algorithm runs failed and were skipped", table.failed_runs);
    }
    match write_outputs(&inv.out, inv.command, &config, &table) {
        Ok(o) => {
            println!("seed {}", config.seed);
            println!("rows {}", o.rows);
            println!("wrote {}", o.csv.display());
            println!("wrote {}", o.json.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", inv.out.display());
            EXIT_CONFIG
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Invocation::try_parse_from(args) {
        Ok(inv) => execute(&inv),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("", false).unwrap(), ExperimentConfig::default());
        assert_eq!(parse_config("{}", true).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn single_override() {
        let c = parse_config("trials = 10", false).unwrap();
        assert_eq!(
            c,
            ExperimentConfig {
                trials: 10,
                ..ExperimentConfig::default()
            }
        );
    }

    #[test]
    fn invalid_c_names_key() {
        let c = parse_config("c = 1.5", false).unwrap();
        match c.validate() {
            Err(Error::Config { key, reason }) => {
                assert_eq!(key, "c");
                assert!(reason.contains("(0, 1)"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn type_errors_name_key() {
        match parse_config("trials = \"many\"", false) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "trials"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_config("bogus = 1", false) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_config("trials = ", false).is_err());
    }

    #[test]
    fn algorithm_roster_parses() {
        let c = parse_config(r#"algorithms = ["niht", "lw-omp"]"#, false).unwrap();
        assert_eq!(c.algorithms, vec![Algorithm::Niht, Algorithm::LwOmp]);
        let inv =
            Invocation::try_parse_from(["sparse-prior", "single", "--algos", "rka-niht,oracle"]).unwrap();
        assert_eq!(inv.algos, Some(vec![Algorithm::RkaNiht, Algorithm::Oracle]));
        assert!(Invocation::try_parse_from(["sparse-prior", "single", "--algos", "niht,lasso"]).is_err());
    }

    #[test]
    fn seed_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let with_seed = dir.path().join("a.toml");
        fs::write(&with_seed, "seed = 5").unwrap();
        let without = dir.path().join("b.toml");
        fs::write(&without, "trials = 3").unwrap();

        let inv = |config: Option<&Path>, seed: Option<u64>| {
            let mut args = vec!["sparse-prior".to_string(), "single".into()];
            if let Some(p) = config {
                args.push("--config".into());
                args.push(p.display().to_string());
            }
            if let Some(s) = seed {
                args.push("--seed".into());
                args.push(s.to_string());
            }
            Invocation::try_parse_from(args).unwrap()
        };

        let r = |i: &Invocation, env: Option<&str>| resolve_config(i, env).unwrap().seed;
        assert_eq!(r(&inv(None, None), None), crate::bench::DEFAULT_SEED);
        assert_eq!(r(&inv(None, None), Some("9")), 9);
        assert_eq!(r(&inv(Some(&without), None), Some("9")), 9);
        assert_eq!(r(&inv(Some(&with_seed), None), Some("9")), 5);
        assert_eq!(r(&inv(Some(&with_seed), Some(7)), Some("9")), 7);
        assert!(resolve_config(&inv(None, None), Some("x")).is_err());
    }
}
