use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "mixcert", version, about = "Numerical strong-mixing certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a certification scenario from a TOML config and write reports.
    Certify {
        /// Scenario configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.txt and the CSV tables.
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify the operator-identity suite on randomized fixtures.
    Identities {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Largest matrix dimension used by the randomized checks.
        #[arg(long = "max-dim", default_value_t = 16)]
        max_dim: usize,
    },
    /// Check the length-function axioms for a group kind or adapter demo.
    Axioms {
        /// z<d>, f<r>, r<d>, or an adapter demo: z2-scaled, z2-flat, r2-squared.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Certify { config, out } => mixcert_cli::run_certify(&config, &out),
        Command::Identities { seed, max_dim } => mixcert_cli::identities::run_identities(seed, max_dim),
        Command::Axioms { group, samples, seed } => {
            mixcert_cli::axioms::run_axioms(&group, samples, seed)
        }
    };
    ExitCode::from(code as u8)
}
