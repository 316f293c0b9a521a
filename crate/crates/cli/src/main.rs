//! Command-line front end for the percolation / first-passage toolkit.
//!
//! Subcommands:
//!   run       execute an experiment config and write CSVs + summary
//!   validate  parse and validate a config without running it
//!   circuits  exact lattice circuit counts up to a half-length

use clap::{Parser, Subcommand};
use perc_fpp_core::experiment::{run_experiment, validate_config};
use perc_fpp_core::lattice::enumerate_surrounding_circuits;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "perc-fpp", version, about)]
struct Cli {
    /// Worker threads (default: PERC_FPP_THREADS or all cores).
    /// Results are independent of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file.
    Run {
        config_file: PathBuf,
        /// Override the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Override the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a config file and print the canonical form.
    Validate { config_file: PathBuf },
    /// Enumerate origin-surrounding lattice circuits for m = 2..=m_max.
    Circuits {
        #[arg(long, default_value_t = 6)]
        m_max: u32,
    },
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("PERC_FPP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<(), Box<dyn std::error::Error>> {
    match command {
        Command::Run {
            config_file,
            output_dir,
            seed,
        } => {
            let text = std::fs::read_to_string(&config_file)
                .map_err(|e| format!("reading {}: {e}", config_file.display()))?;
            let mut config = validate_config(&text)?;
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            if let Some(s) = seed {
                config.master_seed = s;
            }
            let outcome = run_experiment(&config)?;
            for (k, v) in &outcome.summary {
                println!("{k} = {v}");
            }
            println!("summary written to {}", outcome.summary_path.display());
            Ok(())
        }
        Command::Validate { config_file } => {
            let text = std::fs::read_to_string(&config_file)
                .map_err(|e| format!("reading {}: {e}", config_file.display()))?;
            let config = validate_config(&text)?;
            print!("{}", config.serialize());
            Ok(())
        }
        Command::Circuits { m_max } => {
            println!("m,count,bound,ratio");
            for m in 2..=m_max {
                let c = enumerate_surrounding_circuits(m)?;
                println!(
                    "{},{},{},{}",
                    c.m,
                    c.count,
                    c.bound,
                    c.count as f64 / c.bound as f64
                );
            }
            Ok(())
        }
    }
}
