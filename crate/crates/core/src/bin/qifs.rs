use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qifs::experiment::{self, Experiment, ExperimentConfig, Format, Source};
use qifs::{Error, Result};

/// Relative output directories are resolved below this directory when set.
const OUTPUT_ROOT_VAR: &str = "QIFS_OUTPUT_ROOT";

#[derive(Parser)]
#[command(name = "qifs", version, about = "Classical and quantum iterated function system experiments")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config or a preset.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Artifact formats, comma separated.
        #[arg(long, value_enum, value_delimiter = ',')]
        format: Vec<Format>,
    },
    /// List the built-in example presets.
    Catalogue {
        /// Print the full preset configs as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare a classical source with a quantum source on a common grid.
    Compare {
        #[arg(long)]
        classical: PathBuf,
        #[arg(long)]
        quantum: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 27)]
        resolution: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn execute(cfg: ExperimentConfig, out: Option<PathBuf>) -> Result<()> {
    let root = std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from);
    let dir = experiment::resolve_out(&cfg, out.as_deref(), root.as_deref());
    let manifest = experiment::run(&cfg, &dir)?;
    let summary = serde_json::json!({ "out": dir, "config_hash": manifest.config_hash, "results": manifest.results });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config, preset, seed, out, format } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => read_json::<ExperimentConfig>(&path)?,
                (None, Some(name)) => experiment::preset(&name)?.config,
                (None, None) => unreachable!("clap requires one of --config and --preset"),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !format.is_empty() {
                cfg.output.formats = format;
            }
            execute(cfg, out)
        }
        Command::Catalogue { json } => {
            let all = experiment::catalogue();
            if json {
                println!("{}", serde_json::to_string_pretty(&all)?);
            } else {
                for p in &all {
                    println!("{:<11} {:<24} {:<26} {}", p.key, p.slug, p.config.experiment.kind(), p.summary);
                }
            }
            Ok(())
        }
        Command::Compare { classical, quantum, dims, resolution, seed, out } => {
            let classical: Source = read_json(&classical)?;
            let quantum: Source = read_json(&quantum)?;
            let cfg = ExperimentConfig {
                name: Some("compare".into()),
                seed: seed.unwrap_or(0),
                out: None,
                output: Default::default(),
                experiment: Experiment::CompareClassicalQuantum { classical, quantum, resolution, dims },
            };
            execute(cfg, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
