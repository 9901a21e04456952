//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 validation or I/O error, 2 solver divergence,
//! 3 estimator failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypercircle::experiment::{estimate, run_ensembles, run_synthetic, verify_analytic, ExperimentConfig};
use hypercircle::Error;

#[derive(Parser)]
#[command(
    name = "hypercircle",
    version,
    about = "Ensemble error estimation for steady 2D Euler solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace existing results.
    #[arg(long, global = true)]
    force: bool,
    /// Seed for the synthetic suite (overrides the config's `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the analytic pattern and check its invariants.
    VerifyAnalytic,
    /// Run the scheme roster and persist the ensembles.
    RunEnsemble,
    /// Run the configured estimators on persisted ensembles.
    Estimate,
    /// Randomized checks of the estimator bounds.
    SyntheticSuite,
}

fn out_dir(cli: &Cli, config: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Error> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => {
            let c = ExperimentConfig::default();
            c.validate()?;
            Ok(c)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let mut config = load_config(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    match cli.command {
        Command::VerifyAnalytic => {
            let r = verify_analytic(&config)?;
            print!("{}", r.summary);
            println!(
                "{}",
                if r.passed {
                    "analytic checks passed"
                } else {
                    "analytic checks FAILED"
                }
            );
            Ok(if r.passed { 0 } else { 1 })
        }
        Command::RunEnsemble => {
            let out = out_dir(cli, &config);
            let manifests = run_ensembles(&config, &out, cli.force)?;
            let mut code = 0;
            for m in &manifests {
                println!("grid {}x{}", m.grid.nx, m.grid.ny);
                for mm in &m.members {
                    println!(
                        "  {:<4} steps {:>6} residual {:.3e} {}",
                        mm.label,
                        mm.steps,
                        mm.final_residual,
                        if mm.converged { "converged" } else { "not converged" }
                    );
                }
                for f in &m.failures {
                    println!("  {:<4} FAILED: {}", f.label, f.error);
                    code = code.max(f.exit_code as u8);
                }
            }
            println!("written to {}", out.display());
            Ok(code)
        }
        Command::Estimate => {
            let out = out_dir(cli, &config);
            let mut code = 0;
            for o in estimate(&config, &out)? {
                for r in &o.reports {
                    println!("{}", r.summary());
                }
                for (m, e, c) in &o.failures {
                    println!("{} estimate FAILED on grid {}: {e}", m.tag(), o.grid_size);
                    code = code.max(*c as u8);
                }
            }
            Ok(code)
        }
        Command::SyntheticSuite => {
            let out = cli.out.clone().or_else(|| config.output.clone());
            let r = run_synthetic(&config, out.as_deref())?;
            for c in &r.checks {
                println!(
                    "{:<18} {:>6}/{:<6} min bound/true {:.4}",
                    c.name, c.passed, c.trials, c.min_ratio
                );
            }
            Ok(if r.all_passed() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
