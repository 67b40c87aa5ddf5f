use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qjump_cli::{run, threads_from_env, CliError, Mode, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Simulate,
    Ensemble,
    Sweep,
    Analyze,
    Plot,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simulate => Mode::Simulate,
            ModeArg::Ensemble => Mode::Ensemble,
            ModeArg::Sweep => Mode::Sweep,
            ModeArg::Analyze => Mode::Analyze,
            ModeArg::Plot => Mode::Plot,
        }
    }
}

/// Quantum-trajectory simulator for a measured resonator coupled to a
/// Cooper-pair box.
#[derive(Parser, Debug)]
#[command(name = "qjump-sim", version)]
struct Args {
    mode: ModeArg,
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(args: Args) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = args.out {
        cfg.set_output_dir(out);
    }
    cfg.set_mode(args.mode.into())?;
    cfg.threads = threads_from_env()?;
    run(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
