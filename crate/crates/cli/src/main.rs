use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gooddeal::{cases::CASES, error::EXIT_USAGE, BSet, CheckArgs, CliError, Loaded, Output, CHECK_NAMES};
use gooddeal_core::diagnostics::CheckOptions;

#[derive(Parser)]
#[command(name = "gooddeal", version, about = "No-arbitrage and good-deal bounds on finite sample spaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed of the randomized checks.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sample count of the randomized checks.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Smallest loss probed by relevance checks.
    #[arg(long, global = true, default_value_t = 1e-4)]
    delta_min: f64,
    /// Override the comparison tolerance of papercase rows.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print an aligned table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a risk measure at a claim.
    Value {
        #[arg(long)]
        market: String,
        #[arg(long)]
        claim: String,
        #[arg(long, default_value = "rho_hat0")]
        measure: String,
        /// Also print the good-deal and no-arbitrage price intervals.
        #[arg(long)]
        bound: bool,
    },
    /// Run a theorem-level check.
    Check {
        /// One of gdv-exists, is-gdv, relevant, nfl, coherent, relevant-coherent,
        /// first-kind, extension, separate, axioms.
        name: String,
        #[arg(long)]
        market: String,
        #[arg(long, default_value = "rho_hat0")]
        measure: String,
        /// Generators of B for `separate`, as a JSON array of claims.
        #[arg(long, conflicts_with = "delta")]
        b: Option<String>,
        /// Use B = {0 <= z <= 1, E[z] >= delta} for `separate`.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Recompute a worked case and compare it with its reference values.
    Papercase {
        /// One of illiquid-two-state, scaled-half, monotone-cap, geometric-S,
        /// indicator-grid, counterexample-1, counterexample-2.
        case: String,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Risk indifference price of a claim.
    Indiff {
        #[arg(long)]
        market: String,
        /// The measure eta.
        #[arg(long)]
        measure: String,
        #[arg(long)]
        claim: String,
    },
    /// Luxemburg norm of a claim.
    Norm {
        #[arg(long)]
        market: String,
        #[arg(long)]
        claim: String,
        /// power:P, exp:GAMMA, capped, or a JSON descriptor.
        #[arg(long, default_value = "power:2")]
        phi: String,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let c = &cli.common;
    let opts = CheckOptions { samples: c.samples, seed: c.seed, delta_min: c.delta_min };
    if opts.samples == 0 {
        return Err(CliError::Usage(String::from("--samples must be positive")));
    }
    match cli.command {
        Command::Value { market, claim, measure, bound } => gooddeal::cmd_value(&Loaded::from_path(&market)?, &claim, &measure, bound),
        Command::Check { name, market, measure, b, delta } => {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("unknown check {name:?}; expected one of {}", CHECK_NAMES.join(", "))));
            }
            let b = match (b, delta) {
                (Some(text), _) => BSet::Generators(serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--b: {e}")))?),
                (None, Some(d)) => BSet::Delta(d),
                (None, None) => BSet::One,
            };
            gooddeal::cmd_check(&Loaded::from_path(&market)?, &name, &CheckArgs { measure: &measure, b }, &opts)
        }
        Command::Papercase { case, size } => {
            if !CASES.contains(&case.as_str()) {
                return Err(CliError::Usage(format!("unknown case {case:?}; expected one of {}", CASES.join(", "))));
            }
            gooddeal::cmd_papercase(&case, size, &opts, c.tol)
        }
        Command::Indiff { market, measure, claim } => gooddeal::cmd_indiff(&Loaded::from_path(&market)?, &measure, &claim),
        Command::Norm { market, claim, phi } => gooddeal::cmd_norm(&Loaded::from_path(&market)?, &claim, &phi),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let table = cli.common.table;
    match run(cli) {
        Ok(out) => {
            if table {
                println!("{}", out.table);
            } else {
                println!("{}", gooddeal::render::to_json(&out.value));
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
