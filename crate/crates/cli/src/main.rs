use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use conejsr_cli::{error_outcome, run_command, Command, Flags};
use conejsr_core::parse_problem;

/// Linear inclusions preserving a polyhedral cone: classification,
/// irreducibility, joint spectral radius bounds, extremal norms.
#[derive(Parser, Debug)]
#[command(name = "conejsr", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem document (JSON); `-` reads standard input.
    problem: PathBuf,
    /// Relative tolerance for cone membership tests.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node budget for searches.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    /// Target gap between JSR bounds.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, env = "CONEJSR_THREADS")]
    threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write the tabular companion (per-depth rows, trajectories, trials) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read_problem(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("conejsr: {e}");
        }
    }
    let text = match read_problem(&cli.problem) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("conejsr: {}: {e}", cli.problem.display());
            return ExitCode::from(1);
        }
    };
    let flags = Flags { tol: cli.tol, seed: cli.seed, budget: cli.budget, depth: cli.depth, delta: cli.delta };
    let outcome = match parse_problem(&text) {
        Ok(spec) => run_command(cli.command, &spec, &flags),
        Err(e) => error_outcome(&e),
    };
    let body = serde_json::to_string_pretty(&outcome.report).unwrap_or_default();
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, body + "\n") {
                eprintln!("conejsr: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{body}"),
    }
    if let (Some(p), Some(csv)) = (&cli.csv, outcome.csv()) {
        if let Err(e) = std::fs::write(p, csv) {
            eprintln!("conejsr: {}: {e}", p.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
