use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use burkholder_cli::commands::{self, Corollary};
use burkholder_cli::config::{Family, FileConfig, Format, RunConfig};
use burkholder_cli::suites::Suite;
use clap::{Args, Parser, Subcommand};

/// Numerical verification of Burkholder-functional inequalities for
/// quasiconformal maps.
#[derive(Parser)]
#[command(name = "burkholder", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit 2 if any row fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Solve the principal Beltrami equation for `--mu` and write fields.
    Solve,
    /// Sweep one corollary over a parameter grid and emit a CSV table.
    Table {
        #[arg(value_enum)]
        corollary: Corollary,
        /// Parameter values (comma separated); defaults to a standard sweep.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Flags {
    /// TOML configuration document; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid size N (power of two).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Half side L of the periodic box [-L, L)².
    #[arg(long = "box", global = true)]
    half_side: Option<f64>,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Beltrami coefficient, KIND[:k=VALUE] with KIND in zero, const, radial, random, bump.
    #[arg(long, global = true)]
    mu: Option<String>,
    /// Packing description (JSON).
    #[arg(long, global = true)]
    packing: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Distortion K.
    #[arg(long = "K", global = true)]
    k: Option<f64>,
    /// Output directory; reports go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Interpolation family run by `verify interpolation`.
    #[arg(long, global = true, value_enum)]
    family: Option<Family>,
    /// Grid size of solver-backed interpolation families.
    #[arg(long, global = true)]
    family_grid: Option<usize>,
}

impl Flags {
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            grid: self.grid,
            half_side: self.half_side,
            tol: self.tol,
            seed: self.seed,
            mu: self.mu,
            packing: self.packing,
            p: self.p,
            k: self.k,
            out: self.out,
            format: self.format,
            family: self.family,
            family_grid: self.family_grid,
        };
        RunConfig::merge(file, flags)
    }
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = cli.flags.resolve()?;
    match cli.command {
        Command::Verify { suite } => commands::verify(suite, &cfg),
        Command::Solve => commands::solve(&cfg),
        Command::Table { corollary, values } => commands::table(corollary, values, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
