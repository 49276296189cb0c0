use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use isoprofile::walk::ArithmeticMode;
use isoprofile::Error;

mod commands;
mod config;
mod output;
mod verify;

use config::ExperimentConfig;
use output::OutputDir;

/// Output directory override; the only setting read from the environment.
const OUT_ENV: &str = "ISOPROFILE_OUT";

#[derive(Parser, Debug)]
#[command(name = "isoprofile", version, about = "Return probabilities, spectral distributions and isoperimetric profiles of amenable groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Ball and sphere sizes in the word metric.
    Ball,
    /// Return probabilities p(t) of the configured measure.
    ReturnProb,
    /// Dirichlet spectrum and spectral distribution on a finite set.
    Spectrum,
    /// L²-isoperimetric profile, exhaustive or from candidate sets.
    Profile,
    /// Følner function with the ball-growth lower bound.
    Folner,
    /// Legendre transform of a closed-form monotone function.
    Legendre,
    /// Windowed fits and template checks for one group.
    VerifyTable,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Ball => "ball",
            Command::ReturnProb => "return-prob",
            Command::Spectrum => "spectrum",
            Command::Profile => "profile",
            Command::Folner => "folner",
            Command::Legendre => "legendre",
            Command::VerifyTable => "verify-table",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Mode {
    Exact,
    Float,
    Auto,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource { .. } => 3,
        Error::Invariant(_) | Error::Convergence { .. } => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> isoprofile::Result<()> {
    let path = cli
        .config
        .ok_or_else(|| Error::Precondition("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(m) = cli.mode {
        cfg.mode = match m {
            Mode::Exact => ArithmeticMode::Exact,
            Mode::Float => ArithmeticMode::Float,
            Mode::Auto => ArithmeticMode::Auto,
        };
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let out = cli
        .out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.out = Some(out.clone());
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let mut dir = OutputDir::create(&out, cli.command.name(), &cfg.hash())?;
    match cli.command {
        Command::Ball => commands::ball(&cfg, &mut dir)?,
        Command::ReturnProb => commands::return_prob(&cfg, &mut dir)?,
        Command::Spectrum => commands::spectrum_cmd(&cfg, &mut dir)?,
        Command::Profile => commands::profile(&cfg, &mut dir)?,
        Command::Folner => commands::folner(&cfg, &mut dir)?,
        Command::Legendre => commands::legendre_cmd(&cfg, &mut dir)?,
        Command::VerifyTable => {
            let pass = verify::verify_table(&cfg, &mut dir)?;
            println!("verify-table {}: {}", cfg.group.name(), if pass { "PASS" } else { "FAIL" });
        }
    }
    let mode = serde_json::to_value(cfg.mode)?.as_str().unwrap_or_default().to_string();
    let manifest = dir.finish(mode, cfg.seed)?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, out.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Precondition("x".into())), 2);
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
        assert_eq!(exit_code(&Error::Structural("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Resource {
                what: "x".into(),
                limit: 1,
                reached: 2
            }),
            3
        );
        assert_eq!(exit_code(&Error::Invariant("x".into())), 4);
        assert_eq!(
            exit_code(&Error::Convergence {
                what: "x".into(),
                residual: 1.0
            }),
            4
        );
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["isoprofile", "return-prob", "--config", "c.json", "--mode", "exact", "--threads", "2"]).unwrap();
        assert!(matches!(cli.command, Command::ReturnProb));
        assert_eq!(cli.threads, Some(2));
    }
}
