mod report;
mod run;
mod seedfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mvtr", version, about = "Exact checks of framed-vertex Hodge integral identities")]
pub struct Cli {
    /// Seed file (TOML); falls back to $MVTR_SEEDS, then the built-in seeds
    #[arg(long, global = true, env = seedfile::SEED_ENV)]
    seeds: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for independent cells (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Highest Ψ level kept in the memo table
    #[arg(long, global = true, default_value_t = mvtr_core::psi::DEFAULT_MAX_LEVEL)]
    cap: usize,
    /// Leave wall time out of reports
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify an identity
    #[command(subcommand)]
    Verify(Verify),
    /// Topological recursion on the framed curve
    #[command(subcommand)]
    Bm(Bm),
    /// Evaluate Hodge correlators
    #[command(subcommand)]
    Hodge(Hodge),
    /// Table of the coefficients f^k(b,i)
    PsiTable {
        #[arg(long)]
        max_b: usize,
    },
    /// Curve expansions
    #[command(subcommand)]
    Curve(Curve),
    /// Seed file checks
    #[command(subcommand)]
    Seed(Seed),
}

#[derive(Args, Debug, Clone)]
pub struct Cells {
    /// Genus: `2`, `1-3` or `1,2`
    #[arg(long)]
    g: String,
    /// Number of points, same syntax as --g
    #[arg(long)]
    l: String,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// The Laplace-transformed cut-and-join equation
    Theorem11 {
        #[command(flatten)]
        cells: Cells,
    },
    /// A τ-slice of the cut-and-join equation
    Corollary {
        #[arg(long, value_parser = ["12", "12b", "13", "14"])]
        which: String,
        #[command(flatten)]
        cells: Cells,
    },
    /// Partition-level cut-and-join
    Cutjoin {
        #[arg(long)]
        g: String,
        /// A single partition, e.g. `2,1`
        #[arg(long, conflicts_with = "max_size")]
        mu: Option<String>,
        /// Every partition with |μ| up to this size
        #[arg(long)]
        max_size: Option<u32>,
    },
    /// Two-variable series identities for the unstable terms
    Lemmas {
        #[arg(long, default_value_t = 12)]
        order: u32,
        #[arg(long, default_value_t = 3)]
        max_a: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Bm {
    /// Recursion output against the Hodge side
    Verify {
        #[command(flatten)]
        cells: Cells,
        /// Starting truncation order of the local expansions
        #[arg(long, default_value_t = 16)]
        order: usize,
    },
    /// Coefficients of W_{g,l} in the dΨ̂ basis
    Wform {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 16)]
        order: usize,
        /// Read the form off the Hodge side instead of running the recursion
        #[arg(long)]
        hodge: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Class {
    Psi,
    LambdaG,
    LambdaGm1,
    LambdaGLambda1,
    Gamma,
}

#[derive(Subcommand, Debug)]
enum Hodge {
    Eval {
        #[arg(long)]
        g: u32,
        /// Insertions, e.g. `1,2`
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = Class::Gamma)]
        class: Class,
    },
}

#[derive(Subcommand, Debug)]
enum Curve {
    /// Coefficients of y(x) and t(x)
    Series {
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Seed {
    /// Run every identity the seeds feed into and flag inconsistent keys
    Check {
        /// Seed file to audit (defaults to --seeds resolution)
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        cutjoin_size: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("mvtr: {}", e);
            return ExitCode::from(run::EXIT_ERROR);
        }
    }
    match run::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mvtr: {}", e);
            ExitCode::from(run::EXIT_ERROR)
        }
    }
}
