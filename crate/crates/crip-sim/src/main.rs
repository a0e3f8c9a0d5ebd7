use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crip_sim::{config, experiments, run, Error};

#[derive(Parser)]
#[command(name = "crip-sim", version, about = "NV-probe hyperpolarisation experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or the bundled registry.
    Run {
        /// Path to a TOML experiment config.
        config: Option<PathBuf>,
        /// Bundled experiment name (see `list`).
        #[arg(long, conflicts_with = "config")]
        experiment: Option<String>,
        /// Output directory (default: runs/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for seed sweeps (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List bundled experiments.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).expect("error serializes"));
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::List => {
            for e in experiments::EXPERIMENTS {
                println!("{:16} {}", e.name, e.description);
            }
            Ok(())
        }
        Command::Run {
            config: config_path,
            experiment,
            out,
            seed,
            threads,
        } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Error::Parse(format!("--threads: {e}")))?;
            }
            let (name, mut cfg) = match (&config_path, &experiment) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)?;
                    let name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "run".into());
                    (name, config::parse_config(&text)?)
                }
                (None, Some(name)) => (name.clone(), experiments::lookup(name)?),
                _ => {
                    return Err(Error::Parse(
                        "provide either a config path or --experiment <name>".into(),
                    ))
                }
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from("runs").join(&name));
            let outcome = run(&cfg, &out_dir)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.summary).expect("summary serializes")
            );
            eprintln!(
                "wrote {} file(s) to {}",
                outcome.outputs.len(),
                outcome.out_dir.display()
            );
            Ok(())
        }
    }
}
