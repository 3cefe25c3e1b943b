mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "hk", version, about = "Hyperkähler structures, canonical maps and hyperhamiltonian flows")]
struct Cli {
    /// Seed for randomized suites and sampled inputs.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Tolerance override for floating-point checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suite; exit 0 iff every check passes.
    Verify(verify::VerifyArgs),
    /// Classify a linear map against a structure.
    Classify(commands::ClassifyArgs),
    /// Bring a pointwise structure to standard form.
    Standardize(commands::StandardizeArgs),
    /// Integrate a hyperhamiltonian flow and certify canonicity.
    Flow(commands::FlowArgs),
    /// Lie derivative coefficients of sphere forms in four dimensions.
    Lie(commands::LieArgs),
    /// Dual structure and Dirac canonicity check.
    Dual(commands::DualArgs),
}

/// Options every subcommand sees.
#[derive(Debug, Clone)]
pub struct Common {
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct StructureSource {
    /// Structure JSON file (`{schema, n, metric, Y}`).
    #[arg(long)]
    pub structure: Option<PathBuf>,
    /// Orientation signs of a standard structure, e.g. `+,-` or `1,-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = Common {
        seed: cli.seed,
        tol: cli.tol,
        out: cli.out,
        format: cli.format,
    };
    let outcome = match &cli.command {
        Command::Verify(a) => verify::run(&common, a),
        Command::Classify(a) => commands::classify(&common, a),
        Command::Standardize(a) => commands::standardize(&common, a),
        Command::Flow(a) => commands::flow(&common, a),
        Command::Lie(a) => commands::lie(&common, a),
        Command::Dual(a) => commands::dual(&common, a),
    };
    match outcome {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("hk: {e}");
            ExitCode::from(Outcome::Usage.code())
        }
    }
}
