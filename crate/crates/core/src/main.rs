use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nadiff::cli::compute::compute;
use nadiff::cli::{run_suite, RunConfig, Suite};
use nadiff::Error;

/// Non-archimedean difference calculus, Mahler expansions and permutation towers.
#[derive(Parser)]
#[command(name = "nadiff", version)]
struct Cli {
    /// Residue characteristic p.
    #[arg(long, env = "NADIFF_PRIME", default_value_t = 2, global = true)]
    prime: u32,
    /// Residue field degree u of F_{p^u}((t)).
    #[arg(long, env = "NADIFF_EXT_DEGREE", default_value_t = 1, global = true)]
    ext_degree: u32,
    /// Absolute precision N in digits.
    #[arg(long, env = "NADIFF_PRECISION", default_value_t = 32, global = true)]
    precision: i64,
    /// Truncation order for Mahler inversion and composition.
    #[arg(long, env = "NADIFF_TRUNCATION", default_value_t = 8, global = true)]
    truncation: usize,
    /// Seed fixing every sampled fixture.
    #[arg(long, env = "NADIFF_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Comma-separated suites, `all` or `none`.
    #[arg(long, env = "NADIFF_SUITE", default_value = "none", global = true)]
    suite: String,
    /// Write the report here instead of standard output.
    #[arg(long, env = "NADIFF_OUT", global = true)]
    out: Option<PathBuf>,
    /// JSON file of extra fixture polynomials, `{"polys": [[c0, c1, ...], ...]}`.
    #[arg(long, env = "NADIFF_FIXTURES", global = true)]
    fixtures: Option<PathBuf>,
    /// Omit timing fields so that reports are byte-identical across runs.
    #[arg(long, env = "NADIFF_NO_TIMING", global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected verification suites and emit a JSON-lines report.
    Run,
    /// Mahler expansions: expand, evaluate, invert, compose.
    Mahler(Op),
    /// Level permutations: project, check, witness, commutators, thread.
    Tower(Op),
    /// Difference quotients and their identities: leibniz, multi, chain, phi, note2.
    Calculus(Op),
    /// One-parameter subgroups: ball-group, eta, lift, obstruction, condition-i.
    Oneparam(Op),
    /// Loop monoids: classes, wedge, group, thread.
    Loop(Op),
    /// Combinatorial tables as CSV: S, T or Omega.
    Tables(Op),
}

#[derive(clap::Args)]
struct Op {
    op: String,
    /// `key=value` settings and positional arguments.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    args: Vec<String>,
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::InvalidArgument(_) | Error::BoundExceeded(_))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let suites = match Suite::parse_list(&cli.suite) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = RunConfig {
        p: cli.prime,
        u: cli.ext_degree,
        precision: cli.precision,
        truncation: cli.truncation,
        seed: cli.seed,
        suites,
        out: cli.out.clone(),
        fixtures: cli.fixtures.clone(),
        timing: !cli.no_timing,
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (group, op) = match &cli.command {
        Command::Run => return run(&config),
        Command::Mahler(op) => ("mahler", op),
        Command::Tower(op) => ("tower", op),
        Command::Calculus(op) => ("calculus", op),
        Command::Oneparam(op) => ("oneparam", op),
        Command::Loop(op) => ("loop", op),
        Command::Tables(op) => ("tables", op),
    };
    match compute(group, &op.op, &op.args, &config) {
        Ok(text) => {
            println!("{}", text.trim_end());
            let failed = text.lines().next().is_some_and(|l| l.contains("\"status\":\"FAIL\""));
            ExitCode::from(failed as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if usage_error(&e) { 2 } else { 1 })
        }
    }
}

fn run(config: &RunConfig) -> ExitCode {
    let report = match run_suite(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.to_json_lines(config.timing);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for s in &report.summary.suites {
        eprintln!("{:<14} {:>6} passed {:>6} failed", s.suite.name(), s.passed, s.failed);
    }
    ExitCode::from(!report.all_passed() as u8)
}
