mod cache;
mod commands;
mod error;
mod files;
mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use nefcone::engine::Mode;

use crate::commands::{FiltrateArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::render::Format;

#[derive(Parser)]
#[command(name = "nefcone", version, about = "Nef cones of M̄_{0,n} by exact filtration")]
struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ambient,
    Quotient,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Ambient => Mode::Ambient,
            ModeArg::Quotient => Mode::Quotient,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write boundary classes, relations, the F-nef cone and the quotient basis.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "Bn")]
        basis: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a filtration and report facets and Γ per step.
    Filtrate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "quotient")]
        mode: ModeArg,
        /// `paper`, `greedy`, or an order file.
        #[arg(long, default_value = "paper")]
        order: String,
        /// `Bn` or a basis file.
        #[arg(long, default_value = "Bn")]
        basis: String,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Permit ambient runs at n = 7 beyond the default step limit.
        #[arg(long)]
        allow_deep: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Prove F-nef ⊆ effective and write a certificate bundle.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Recheck every certificate of a bundle.
    Audit { bundle: PathBuf },
    /// Write an effective representation of an F-nef divisor, or a witness.
    Effective {
        #[arg(long)]
        n: usize,
        divisor: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a divisor file from LABEL=VALUE terms.
    Divisor {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        terms: Vec<String>,
    },
    /// Worst-case inequality count of repeated elimination.
    Estimate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build_global()
            .map_err(CliError::config)?;
    }
    match cli.command {
        Command::Generate { n, basis, out } => commands::generate(n, &basis, &out),
        Command::Filtrate { n, mode, order, basis, max_steps, allow_deep, out, cache, format } => {
            commands::filtrate(&FiltrateArgs {
                n,
                mode: mode.into(),
                order,
                basis,
                max_steps,
                allow_deep,
                out,
                cache,
                format,
            })
        }
        Command::Verify { n, order, basis, max_steps, out, format } => {
            commands::verify(&VerifyArgs { n, order, basis, max_steps, out, format })
        }
        Command::Audit { bundle } => commands::audit(&bundle),
        Command::Effective { n, divisor, out } => commands::effective(n, &divisor, out.as_deref()),
        Command::Divisor { n, out, terms } => commands::divisor(n, &terms, &out),
        Command::Estimate { n, count, depth, format } => commands::estimate(n, count, depth, format),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
