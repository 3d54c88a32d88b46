//! `bfzeta`: p-adic zeta branches, their finite-level exponents, and the
//! Gauss sums of the BF functional.

mod cache;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "bfzeta", version, about = "p-adic zeta branches, Iwasawa exponents and BF Gauss sums")]
struct Cli {
    /// TOML file with default values for the flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all subcommands.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Odd prime
    #[arg(long)]
    pub p: Option<u64>,
    /// Odd component index, k != 1 mod p-1
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Level (cyclotomic layer Q(mu_{p^{n+1}}))
    #[arg(long)]
    pub n: Option<u32>,
    /// Working p-adic precision M
    #[arg(long)]
    pub prec: Option<u32>,
    /// Starting truncation order N
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Seed for randomized runs
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON list of class-group fixtures (merged over the bundled ones)
    #[arg(long, value_name = "PATH")]
    pub fixtures: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Branch series with certified precision, lambda and the distinguished polynomial
    Branch(#[command(flatten)] Common),

    /// LHS and RHS exponents at level n and the verdict
    Theorem {
        #[command(flatten)]
        common: Common,
        /// Sum a deliberately mis-twisted Stickelberger element (negative control)
        #[arg(long, hide = true)]
        mistwist: bool,
    },

    /// CSV table of e_n and its increments for n = 0..=n
    Growth {
        #[command(flatten)]
        common: Common,
        /// Use the synthetic polynomial T - p*c instead of a branch
        #[arg(long, value_name = "C", allow_hyphen_values = true)]
        synthetic: Option<i64>,
    },

    /// Brute-force and closed-form Gauss sums of a BF instance
    Gauss {
        #[command(flatten)]
        common: Common,
        /// Instance JSON file
        #[arg(value_name = "INSTANCE", conflicts_with_all = ["random", "example"])]
        instance: Option<PathBuf>,
        /// Use the bundled example instance
        #[arg(long, conflicts_with = "random")]
        example: bool,
        /// Compare both methods on seeded random instances
        #[arg(long)]
        random: bool,
        /// Number of random instances
        #[arg(long, default_value_t = 200, requires = "random")]
        pairs: usize,
    },

    /// Held-out interpolation residuals and Stickelberger agreement per level
    InterpCheck {
        #[command(flatten)]
        common: Common,
        /// Number of held-out nodes
        #[arg(long)]
        nodes: Option<usize>,
        /// Guard digits g; comparisons are mod p^(M-g)
        #[arg(long)]
        guard: Option<u32>,
        /// Sum a deliberately mis-twisted Stickelberger element (negative control)
        #[arg(long, hide = true)]
        mistwist: bool,
    },
}

/// What a command produced: text to print and whether the check held.
pub struct Outcome {
    pub body: String,
    pub ok: bool,
}

/// Exit status for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    use bfzeta::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::PrecisionExhausted(_)
                | E::MuPositive { .. }
                | E::InsufficientTruncation { .. }
                | E::BoundExceeded { .. } => 2,
                E::CalibrationFailure { .. } => 3,
                E::Schema(_)
                | E::InvalidPrime(_)
                | E::ZeroPrecision
                | E::ExcludedComponent { .. }
                | E::WrongCongruenceClass { .. }
                | E::EquivarianceViolation(_) => 4,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return 4;
        }
    }
    1
}

fn hint(err: &anyhow::Error) -> Option<&'static str> {
    use bfzeta::Error as E;
    match err.chain().find_map(|c| c.downcast_ref::<E>())? {
        E::MuPositive { .. } | E::InsufficientTruncation { .. } => Some("raise --trunc or --prec"),
        E::PrecisionExhausted(_) => Some("raise --prec"),
        E::BoundExceeded { .. } => Some("raise `bound` in the config file or lower --trunc"),
        E::ExcludedComponent { .. } => Some("k must be odd and k != 1 mod p-1"),
        _ => None,
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env = commands::Env { file, json: cli.json };
    match cli.command {
        Command::Branch(common) => commands::branch::run(&env, &common),
        Command::Theorem { common, mistwist } => commands::theorem::run(&env, &common, mistwist),
        Command::Growth { common, synthetic } => commands::growth::run(&env, &common, synthetic),
        Command::Gauss { common, instance, example, random, pairs } => {
            let source = match (instance, example, random) {
                (Some(path), _, _) => commands::gauss::Source::File(path),
                (None, _, true) => commands::gauss::Source::Random { count: pairs },
                (None, true, false) => commands::gauss::Source::Example,
                (None, false, false) => anyhow::bail!(bfzeta::Error::Schema(
                    "give an instance file, --example or --random".into()
                )),
            };
            commands::gauss::run(&env, &common, source)
        }
        Command::InterpCheck { common, nodes, guard, mistwist } => {
            commands::interp::run(&env, &common, nodes, guard, mistwist)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let loaded = cache::load();
    let result = run(cli);
    cache::store(loaded);
    match result {
        Ok(out) => {
            println!("{}", out.body);
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            if let Some(h) = hint(&e) {
                eprintln!("hint: {}", h);
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
