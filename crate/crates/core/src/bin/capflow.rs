use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use capflow::harness::config::{Config, StudyKind};
use capflow::harness::studies::run_study;
use capflow::Error;

#[derive(Parser)]
#[command(name = "capflow", version, about = "Two-phase flow studies: Taylor tests, convergence and VoF residuals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the study named in the config and write CSV and JSON output.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the available studies.
    ListStudies,
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

fn is_validation(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter { .. } | Error::Config(_) | Error::UnknownStudy(_) | Error::TooFewNodes { .. })
}

fn load(path: &PathBuf) -> Result<Config, ExitCode> {
    Config::from_path(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn run(path: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let config = match load(&path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let start = Instant::now();
    let result = match run_study(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: study {} failed: {e}", config.study.name());
            return ExitCode::from(if is_validation(&e) { EXIT_VALIDATION } else { EXIT_SOLVER });
        }
    };
    let dir = out.unwrap_or_else(|| PathBuf::from(&config.output_dir));
    let runtime = start.elapsed().as_secs_f64();
    match result.write(&dir, config.study.name(), &config, runtime) {
        Ok((csv, json)) => println!("wrote {} and {}", csv.display(), json.display()),
        Err(e) => {
            eprintln!("error: writing output: {e}");
            return ExitCode::FAILURE;
        }
    }
    for (name, m) in &result.metrics {
        println!("{:<24} {:>12.4e}  {:<8} {:>10.3e}  {}", name, m.value, m.check, m.tolerance, if m.pass { "pass" } else { "FAIL" });
    }
    if result.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("CAPFLOW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("CAPFLOW_THREADS ignored: {e}");
        }
    }
    match Cli::parse().command {
        Command::Run { config, out } => run(config, out),
        Command::Validate { config } => match load(&config) {
            Ok(c) => {
                println!("{}: ok (study {})", config.display(), c.study.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::ListStudies => {
            for k in StudyKind::ALL {
                println!("{:<16} {}", k.name(), k.describe());
            }
            ExitCode::SUCCESS
        }
    }
}
