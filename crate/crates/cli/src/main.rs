use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tractrix_cli::{exit_code, execute, Command, Config, VERBOSITY_ENV};

/// Tractrix flows, short retractions and their acceptance checks.
#[derive(Parser)]
#[command(name = "tractrix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tractrix trajectory, plot and refinement study.
    Run(Common),
    /// Short retraction pipeline with Lipschitz sampling.
    Retract(Common),
    /// Gradient flow with EVI and distance-estimate reports.
    Flow(Common),
    /// Full acceptance suite.
    VerifyAll(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(VERBOSITY_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Cmd::Run(a) => (Command::Run, a),
        Cmd::Retract(a) => (Command::Retract, a),
        Cmd::Flow(a) => (Command::Flow, a),
        Cmd::VerifyAll(a) => (Command::VerifyAll, a),
    };
    match run(command, args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn run(command: Command, args: Common) -> anyhow::Result<u8> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(d) = args.delta {
        cfg.set("delta", &d.to_string())?;
    }
    if let Some(o) = &args.out {
        cfg.set("out", &o.display().to_string())?;
    }
    let out = PathBuf::from(cfg.str_or("out", "out"));
    log::info!("{} with config hash {}", command.name(), cfg.hash());
    let manifest = execute(command, &cfg, &out)?;
    for c in &manifest.checks {
        println!("{}", c.line());
    }
    println!(
        "{}/{} checks passed; outputs in {}",
        manifest.checks.iter().filter(|c| c.passed).count(),
        manifest.checks.len(),
        out.display()
    );
    Ok(if manifest.all_passed() { 0 } else { 3 })
}
