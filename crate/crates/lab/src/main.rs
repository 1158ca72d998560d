use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lab::formats::{read_atom, read_symbol};
use lab::suites::resolution_for;
use lab::{run_suite, ExperimentConfig, Suite};
use lab_core::atoms::validate_atom;
use lab_core::hankel::{besov_lattice_norm, hankel_matrix, schatten_norm};

#[derive(Parser)]
#[command(name = "lab", version, about = "Dyadic product-space experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SuiteArgs {
    /// JSON overlay on the suite defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// CSV path; the summary goes to `<stem>.summary.json` beside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    Counting(SuiteArgs),
    Journe(SuiteArgs),
    Geometric(SuiteArgs),
    Annular(SuiteArgs),
    Pairing(SuiteArgs),
    BesovSchatten(SuiteArgs),
    /// Checks an atom manifest and prints the report as JSON.
    ValidateAtom {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Schatten and Besov norms of a symbol file.
    Norms {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        p: f64,
        /// Spectral window exponent L for the Besov side.
        #[arg(long, default_value_t = 0)]
        window_exp: i32,
    },
}

fn run_suite_command(suite: Suite, args: SuiteArgs) -> Result<bool> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(suite, path)?,
        None => ExperimentConfig::default_for(suite),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    config.validate()?;
    let report = run_suite(&config)?;
    let summary = report.write(&args.out)?;
    eprintln!(
        "{suite}: {} rows, max ratio {}, {} failed assertion(s); summary in {}",
        report.rows.len(),
        report.max_ratio,
        report.failures(),
        summary.display()
    );
    for a in report.assertions.iter().filter(|a| !a.pass) {
        eprintln!("  FAIL {}: {} > {}", a.name, a.value, a.limit);
    }
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let suite = |s, args| run_suite_command(s, args);
    match cli.command {
        Command::Counting(a) => suite(Suite::Counting, a),
        Command::Journe(a) => suite(Suite::Journe, a),
        Command::Geometric(a) => suite(Suite::Geometric, a),
        Command::Annular(a) => suite(Suite::Annular, a),
        Command::Pairing(a) => suite(Suite::Pairing, a),
        Command::BesovSchatten(a) => suite(Suite::BesovSchatten, a),
        Command::ValidateAtom { input } => {
            let atom = read_atom(&input)?;
            let report = validate_atom(&atom);
            let sweep: Vec<_> = report
                .sweep
                .iter()
                .map(|m| serde_json::json!({ "delta": m.delta, "value": m.value, "bound": m.bound, "ok": m.ok() }))
                .collect();
            let json = serde_json::json!({
                "ok": report.all_ok(),
                "adapted": report.adapted_ok,
                "support": report.support_ok,
                "global": { "value": report.global.value, "bound": report.global.bound, "ok": report.global_ok },
                "weighted": { "delta": report.weighted.delta, "value": report.weighted.value, "bound": report.weighted.bound, "ok": report.weighted_ok },
                "delta_sweep": sweep,
                "cancellation": { "max_residual": report.max_residual, "ok": report.cancellation_ok },
                "outside_omega": report.outside_omega,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(report.all_ok())
        }
        Command::Norms {
            symbol,
            p,
            window_exp,
        } => {
            let file = std::fs::File::open(&symbol)
                .with_context(|| format!("opening {}", symbol.display()))?;
            let symbol = read_symbol(file)?;
            let schatten = schatten_norm(&hankel_matrix(&symbol), p)?;
            let kp = resolution_for(symbol.n(), window_exp, 1);
            let besov = besov_lattice_norm(&symbol, p, window_exp, kp)?;
            let json = serde_json::json!({
                "N": symbol.n(),
                "p": p,
                "schatten": schatten,
                "besov": besov,
                "resolution_exp": kp,
                "ratio": if besov == 0.0 { None } else { Some(schatten / besov) },
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
