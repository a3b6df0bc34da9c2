//! `ttforge`: batch front end for train track maps, their induced maps on
//! covers, mapping tori and the randomized property harness.

mod commands;
mod dot;
mod harness;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::report::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "ttforge", version, about = "Train track maps, induced covers and mapping tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Semigroup law and the h-map identities on the mapping torus.
    Flow,
    /// The flow-equivariant maps built from the induced package.
    Pair,
    /// Validation, round trip and lifted flow of a cover descriptor.
    Descriptor,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report (and, for `induce`, the package) into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train track, growth and irreducibility analysis of a self-map.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Kernel stabilization and stable quotient of the induced endomorphism.
    Quotient {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Builds and verifies the induced map on the core of the cover.
    Induce {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled identities on the mapping torus.
    Suspend {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "flow")]
        check: Check,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Evaluate the flow at this point, e.g. '["edge",0,1,3,0,1]'.
        #[arg(long)]
        point: Option<String>,
        /// Flow time for `--point`, an exact rational such as 3/2.
        #[arg(long, default_value = "1")]
        time: String,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the invariant suite on random train track maps.
    Proptest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 6)]
        max_edges: usize,
        #[arg(long, default_value_t = 12)]
        max_image: usize,
        /// Mix in maps that need not be train tracks.
        #[arg(long)]
        adversarial: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Graphviz rendering of an input graph or of a package directory.
    ExportDot {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { file, common } => commands::analyze(&file, &common),
        Command::Quotient { file, common } => commands::quotient(&file, &common),
        Command::Induce { file, common } => commands::induce(&file, &common),
        Command::Suspend {
            file,
            check,
            count,
            seed,
            point,
            time,
            common,
        } => commands::suspend(&file, check, count, seed, point.as_deref(), &time, &common),
        Command::Proptest {
            seed,
            count,
            jobs,
            max_edges,
            max_image,
            adversarial,
            common,
        } => harness::run(
            &harness::Options {
                seed,
                count,
                jobs,
                max_edges,
                max_image,
                adversarial,
            },
            &common,
        ),
        Command::ExportDot { path, out } => dot::export(&path, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TTFORGE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => outcome.finish(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
