use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prym_cli::commands;
use prym_cli::{CliError, Format, FuzzOptions};

/// Double covers of metric graphs: signed matroids and Prym varieties.
#[derive(Debug, Parser)]
#[command(name = "prym", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a cover document and print its genus counts.
    Validate { file: PathBuf },
    /// Ogods with indices, circuits with types, small circuits of the dual matroid.
    Analyze { file: PathBuf },
    /// Kernel basis, Gram matrix, volume and polarization type.
    Gram {
        file: PathBuf,
        /// Also report the Gram matrix and volume as polynomials in the edge lengths.
        #[arg(long)]
        symbolic: bool,
    },
    /// Simplify the cover and check that the Prym is unchanged.
    Simplify {
        file: PathBuf,
        /// Write the simplified cover document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the Prym varieties of two covers.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Largest absolute entry tried in a congruence transform.
        #[arg(long, default_value_t = 3)]
        congruence_bound: u32,
    },
    /// Check all invariants on random covers.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Bound on undilated edges per cover.
        #[arg(long, default_value_t = 10)]
        max_edges: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => commands::validate(file),
        Command::Analyze { file } => commands::analyze(file),
        Command::Gram { file, symbolic } => commands::gram(file, *symbolic),
        Command::Simplify { file, out } => commands::simplify(file, out.as_deref()),
        Command::Compare { file_a, file_b, congruence_bound } => commands::compare(file_a, file_b, *congruence_bound),
        Command::Fuzz { seed, trials, max_edges } => {
            commands::fuzz(FuzzOptions { seed: *seed, trials: *trials, max_edges: *max_edges })
        }
    };
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(report) => {
            let _ = stdout.write_all(report.render(cli.format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Property { report, .. } = &e {
                let _ = stdout.write_all(report.render(cli.format).as_bytes());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
