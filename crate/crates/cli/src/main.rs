//! `condgamma`: batch driver for the condensate experiments.
//!
//! Exit status: 0 when every requested run converged, 1 when some run failed
//! (a table goes to stderr), 2 on usage, configuration or I/O errors.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{Ctx, Failure, Fatal};
use config::Config;
use report::Sink;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Tf,
    Eta,
    Minimize,
    Decompose,
    Gamma,
    Recovery,
    Symmetry,
}

#[derive(Debug, Parser)]
#[command(name = "condgamma", version, about = "Segregated two-component condensates and their sharp-interface limit")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat key = value file with [section] headers.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, env = "CONDGAMMA_THREADS")]
    threads: Option<usize>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<Vec<Failure>, Fatal> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = match &cli.config {
        Some(path) => Config::parse(
            &std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )?,
        None => Config::default(),
    };
    let mut ctx = Ctx {
        cfg: &cfg,
        seed: cli.seed,
        sink: Sink::new(&cli.out)?,
    };
    let failures = match cli.command {
        Command::Tf => commands::tf(&mut ctx)?,
        Command::Eta => commands::eta(&mut ctx)?,
        Command::Minimize => commands::minimize(&mut ctx)?,
        Command::Decompose => commands::decompose_cmd(&mut ctx)?,
        Command::Gamma => commands::gamma(&mut ctx)?,
        Command::Recovery => commands::recovery(&mut ctx)?,
        Command::Symmetry => commands::symmetry(&mut ctx)?,
    };
    for p in &ctx.sink.written {
        println!("wrote {}", p.display());
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(f) if f.is_empty() => ExitCode::SUCCESS,
        Ok(f) => {
            let w = f.iter().map(|x| x.run.len()).max().unwrap_or(0).max(3);
            eprintln!("{:<w$}  error", "run");
            for x in &f {
                eprintln!("{:<w$}  {}", x.run, x.error);
            }
            eprintln!("{} run(s) failed", f.len());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
