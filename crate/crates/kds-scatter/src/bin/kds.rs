use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kds_scatter::config::Config;
use kds_scatter::scenario::{run_scenario, Command};

#[derive(Parser)]
#[command(name = "kds", version, about = "Klein-Gordon scattering on De Sitter-Kerr at fixed axial mode")]
struct Cli {
    /// TOML configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for the CSV tables and summary.json.
    #[arg(long, global = true, default_value = "kds-out")]
    out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Radial chart tables and surface-gravity fits.
    Background,
    /// Eigenvalues of the angular operator.
    Spectrum,
    /// Norm and energy histories of the full dynamics.
    Evolve,
    /// Inverse and direct wave operators with convergence histories.
    Scatter,
    /// Future horizon traces.
    Trace,
    /// W∘Ω and Ω∘W residuals and trace agreement.
    Roundtrip,
    /// The property suite with pass/fail per check.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Background => Command::Background,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Evolve => Command::Evolve,
            Cmd::Scatter => Command::Scatter,
            Cmd::Trace => Command::Trace,
            Cmd::Roundtrip => Command::Roundtrip,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn run(cli: &Cli) -> kds_scatter::Result<bool> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.run.seed = seed;
    }
    let command = Command::from(cli.command);
    let report = run_scenario(command, &config)?;
    report.write_to(&cli.out)?;
    for c in &report.checks {
        println!("{} {} value={:.3e} threshold={:.3e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    println!("{command}: wrote {}", cli.out.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {} stage failed: {e}", Command::from(cli.command));
            ExitCode::from(2)
        }
    }
}
