use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use robustflow::Limits;

mod commands;

#[derive(Parser)]
#[command(
    name = "robustflow",
    version,
    about = "Exact maximum robust flow and network interdiction"
)]
struct Cli {
    /// Print every linear program solved to stderr
    #[arg(long, global = true)]
    dump_lp: bool,

    /// Cap on enumerated paths (default from ROBUSTFLOW_PATH_LIMIT)
    #[arg(long, global = true, value_name = "N")]
    path_limit: Option<usize>,

    /// Cap on enumerated interdiction scenarios (default from ROBUSTFLOW_SCENARIO_LIMIT)
    #[arg(long, global = true, value_name = "N")]
    scenario_limit: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize an instance and print its exact value and a witness flow
    Solve {
        file: PathBuf,
        /// Write the witness here instead of stdout
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
    },
    /// Answer the decision question of an instance
    Decide {
        file: PathBuf,
        /// Robust-value threshold for mrf, or demand override for mrf_r
        #[arg(long, value_name = "P/Q")]
        threshold: Option<String>,
        /// Write the witness here instead of stdout
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
        /// Validate this flow document instead of solving
        #[arg(long, value_name = "FLOW")]
        check_witness: Option<PathBuf>,
    },
    /// Transform an instance and write the result with a provenance sidecar
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Output file; with `--to full`, the stem of three output files
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Decide every stage of the reduction chain and compare the answers
    Verify {
        file: PathBuf,
        /// Last stage to decide
        #[arg(long, value_enum, default_value = "mrf")]
        until: Stage,
    },
    /// Run a brute-force oracle on a graph instance
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
        file: PathBuf,
    },
    /// Generate an instance from a seeded recipe
    Gen {
        /// Recipe as inline JSON or a path to a JSON file
        #[arg(long, value_name = "JSON")]
        spec: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Mrfr,
    Mrfm,
    Mrf,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Stage {
    Mrfr,
    Mrfm,
    Mrf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Chif,
    CliqueInterdiction,
}

fn limits(cli: &Cli) -> robustflow::Result<Limits> {
    let mut limits = Limits::from_env()?;
    if let Some(n) = cli.path_limit {
        limits.max_paths = n;
    }
    if let Some(n) = cli.scenario_limit {
        limits.max_scenarios = n;
    }
    Ok(limits)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = limits(&cli).and_then(|limits| commands::run(&cli, &limits));
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { 2 } else { 1 })
        }
    }
}
