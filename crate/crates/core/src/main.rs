use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ecdnorm::cli::{run, Experiment, RunOptions, Source};

/// Energy-constrained operator and diamond norms, and bound checks for
/// quantum dynamical semigroups.
#[derive(Parser)]
#[command(name = "ecdnorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Set a config leaf, e.g. `--override operator.alpha=0.25`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct Preset {
    /// Config file to start from instead of the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Operator E-norms over a grid of energies.
    Enorm(Preset),
    /// ECD-norm lower bounds of `Φ_t − id` or of a map given by its Choi matrix.
    Ecd(Preset),
    /// Continuity and Taylor bounds for one semigroup.
    Semigroup(Preset),
    /// The full verification suite.
    Verify(Preset),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (source, common) = match cli.command {
        Command::Run { config, common } => (Source::File(config), common),
        Command::Enorm(p) => (Source::Template(Experiment::Enorm, p.config), p.common),
        Command::Ecd(p) => (Source::Template(Experiment::Ecd, p.config), p.common),
        Command::Semigroup(p) => (Source::Template(Experiment::Semigroup, p.config), p.common),
        Command::Verify(p) => (Source::Template(Experiment::VerifySuite, p.config), p.common),
    };
    let opts = RunOptions { seed: common.seed, out_dir: common.out_dir, overrides: common.overrides };
    let outcome = run(&source, &opts);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    if let Some(r) = &outcome.report {
        let advisory = r.checks.iter().filter(|c| c.advisory && !c.passed).count();
        let passed = r.checks.iter().filter(|c| c.passed).count();
        println!(
            "{}: {} checks, {passed} passed, {} hard failures, {advisory} advisory misses, {} sweeps, {} ms",
            r.experiment.name(),
            r.checks.len(),
            r.hard_failures.len(),
            r.sweeps.len(),
            r.runtime_ms
        );
        for id in &r.hard_failures {
            eprintln!("FAILED {id}");
        }
        if let Some(p) = outcome.files.first() {
            println!("report: {}", p.display());
        }
    }
    ExitCode::from(outcome.status.code() as u8)
}
