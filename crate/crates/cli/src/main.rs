//! `nambu`: command-line front end. Exit status is 0 when a check holds or a
//! command succeeds, 1 when a check fails (a witness is printed), and 2 on
//! malformed input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "nambu", version, about = "Exact checks for n-Lie, Nambu-Poisson and n-Jacobi structures")]
pub struct Cli {
    /// Print machine-readable JSON instead of a table
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized operations
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Degree bound for the Casimir search
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,
    /// Tolerance for floating-point comparisons
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the n-ary Jacobi identity of an algebra
    CheckNlie { file: PathBuf },
    /// Check the fundamental identity of a multivector
    CheckPoisson { file: PathBuf },
    /// Check the n-Jacobi identity of a pair (nabla, box)
    CheckJacobi { file: PathBuf },
    /// Classify an (n+1)-dimensional n-Lie algebra
    Classify { file: PathBuf },
    /// Basis of the derivation algebra
    Derivations { file: PathBuf },
    /// Build the canonical algebra of a given class
    Synthesize {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Arity of the algebra (its dimension is n+1)
        #[arg(long)]
        n: usize,
        /// λ for the plus and minus kinds
        #[arg(long)]
        lambda: Option<String>,
        /// Rank of the form for the unimodular kind
        #[arg(long)]
        rank: Option<usize>,
        /// max(p, q) of the signature for the unimodular kind
        #[arg(long)]
        index: Option<usize>,
        /// Apply a seeded random change of basis
        #[arg(long)]
        random_basis: bool,
    },
    /// Compatibility of two algebras or two multivectors
    Compat { first: PathBuf, second: PathBuf },
    /// Freeze leading arguments of an algebra
    Hereditary {
        file: PathBuf,
        /// Comma-separated coordinates of a frozen vector; repeatable
        #[arg(long = "u", required = true)]
        us: Vec<String>,
    },
    /// Integrate a Nambu system with RK4 and report first-integral drift
    Integrate {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        system: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Comma-separated initial state
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Magnetic field for the spin system
        #[arg(long = "B", default_value = "0,0,1")]
        b: String,
        #[arg(long, default_value = "1")]
        mu: String,
        #[arg(long, default_value = "1")]
        mass: String,
        #[arg(long, default_value = "1")]
        k: String,
    },
    /// Check the Poisson realization of the Witt algebra
    WittDemo,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Kind {
    Unimodular,
    Plus,
    Minus,
    PsiOne,
    PsiZero,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Builtin {
    Spin,
    Kepler,
}

/// What a command produced: a verdict (or success), a JSON report and,
/// optionally, a raw text body that replaces the table (CSV output).
pub struct Outcome {
    pub ok: bool,
    pub report: Value,
    pub raw: Option<String>,
}

fn render_table(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| {
                    let shown = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    format!("{k:<width$}  {shown}\n")
                })
                .collect()
        }
        other => format!("{other}\n"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
            } else if let Some(raw) = &out.raw {
                print!("{raw}");
            } else {
                print!("{}", render_table(&out.report));
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
