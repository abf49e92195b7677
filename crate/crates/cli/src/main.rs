mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elfact_core::{Grading, Parity};

#[derive(Parser, Debug)]
#[command(name = "elfact", version, about = "Elementary matrix factorizations over Bezout domains")]
pub struct Cli {
    /// Emit a JSON report instead of the human-readable table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Largest integer that will be factored by trial division and Pollard rho.
    #[arg(long, global = true, env = "ELFACT_FACTOR_BOUND")]
    pub factor_bound: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PotentialArg {
    /// The potential, e.g. `p^3*q^3` or `216`.
    #[arg(long = "W", value_name = "W", allow_hyphen_values = true)]
    pub w: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GradingArg {
    #[value(name = "HEF")]
    Graded,
    #[value(name = "hef")]
    Even,
}

impl From<GradingArg> for Grading {
    fn from(g: GradingArg) -> Grading {
        match g {
            GradingArg::Graded => Grading::Graded,
            GradingArg::Even => Grading::Even,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of isomorphism classes of elementary factorizations.
    Count {
        #[command(flatten)]
        w: PotentialArg,
        #[arg(long, value_enum)]
        grading: GradingArg,
        /// Evaluate the printed closed formula and compare it with the census.
        #[arg(long)]
        literal: bool,
    },
    /// Brute-force census of the isomorphism classes.
    Classes {
        #[command(flatten)]
        w: PotentialArg,
        #[arg(long, value_enum)]
        grading: GradingArg,
        /// Refuse potentials with more divisors than this.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
    /// Decide whether two elementary (or matrix) factorizations are isomorphic.
    Iso {
        /// Divisors of W, or paths to matrix factorization JSON files.
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
        #[arg(long = "W", value_name = "W", allow_hyphen_values = true)]
        w: Option<String>,
        #[arg(long, value_enum)]
        grading: Option<GradingArg>,
    },
    /// Hom module between two elementary factorizations.
    Hom {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
        #[command(flatten)]
        w: PotentialArg,
        /// Restrict to one parity; both are reported by default.
        #[arg(long, value_enum)]
        parity: Option<ParityArg>,
    },
    /// Presentation of the endomorphism ring of e_v.
    Endring {
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        w: PotentialArg,
    },
    /// Divisorial invariant data of e_v.
    Invariant {
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        w: PotentialArg,
    },
    /// Krull-Schmidt normal form of a direct sum of elementary factorizations.
    Decompose {
        #[command(flatten)]
        w: PotentialArg,
        /// Summand divisors; may be repeated.
        #[arg(long = "v", value_name = "V", allow_hyphen_values = true)]
        v: Vec<String>,
        #[arg(allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Smith decomposition of an integer matrix factorization read from JSON.
    Snf {
        /// Path to the JSON file, or `-` for standard input.
        input: String,
    },
    /// Posets, divisibility groups and prime filters.
    Poset {
        #[command(subcommand)]
        action: PosetCommand,
    },
    /// Cross-check closed-form counts against the census for a family of potentials.
    Verify {
        /// Check these potentials; otherwise the uniform family below is used.
        #[arg(long = "W", value_name = "W", allow_hyphen_values = true)]
        w: Vec<String>,
        /// Largest number of critical primes in the family.
        #[arg(long, default_value_t = 2)]
        max_r: usize,
        /// Largest prime order in the family.
        #[arg(long, default_value_t = 4)]
        max_n: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum PosetCommand {
    /// Tree and Kaplansky properties, and X*.
    Analyze { poset: String },
    /// Check which principal filters up 1_x are prime.
    Primes {
        poset: String,
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
    /// Check whether the principal filter generated by g is prime.
    FilterCheck {
        poset: String,
        /// Values of g, e.g. `1=1,2=1`; unlisted elements are 0.
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable report"));
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(report.status)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.status)
        }
    }
}
