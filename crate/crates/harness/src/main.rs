use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dca_harness::{
    emit_results, load_dataset, run_accuracy_on, run_timing_on, write_csv, ExperimentConfig, Format, HarnessError,
    Status,
};

#[derive(Parser)]
#[command(name = "dca", version, about = "Data collaboration analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Jsonl,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Holdout accuracy of every configured method.
    Accuracy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        /// Worker threads; output order is unaffected.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Wall time of collaborative-function estimation (always sequential).
    Timing {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Writes the config's synthetic dataset to CSV.
    Synth {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    let (result, out, format) = match cli.command {
        Command::Accuracy {
            common,
            format,
            threads,
        } => {
            let cfg = load_config(&common)?;
            let dataset = load_dataset(&cfg)?;
            (run_accuracy_on(&cfg, &dataset, threads)?, common.out, format)
        }
        Command::Timing { common, format } => {
            let cfg = load_config(&common)?;
            let dataset = load_dataset(&cfg)?;
            (run_timing_on(&cfg, &dataset)?, common.out, format)
        }
        Command::Synth { common } => {
            let mut cfg = load_config(&common)?;
            if let Some(seed) = common.seed {
                cfg.synthetic_seed = Some(seed);
            }
            let dataset = dca_harness::make_synthetic(&cfg.synthetic_spec()?)?;
            write_csv(&dataset, &common.out)?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    let format = match format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Jsonl => Format::Jsonl,
    };
    emit_results(&result, format, &out)?;
    let failed = result.records.iter().filter(|r| r.status == Status::Error).count();
    if failed > 0 {
        eprintln!("{failed} of {} records failed", result.records.len());
    }
    if !result.records.is_empty() && failed == result.records.len() {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
