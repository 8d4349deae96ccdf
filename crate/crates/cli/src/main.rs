mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bgw", version, about = "Gromov-Witten theory of BG for a finite group G")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Group spec: a JSON file or inline JSON such as '{"name":"S","param":3}'.
    #[arg(long, global = true)]
    pub group: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for brute-force enumeration and checks.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest tuple count a brute-force enumeration may visit.
    #[arg(long, global = true)]
    pub work_cap: Option<u128>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report enumeration throughput (adds timings, so output is no longer reproducible).
    #[arg(long, global = true)]
    pub profile: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Order, conjugacy classes, centralizers and inverse classes.
    Group,
    /// Irreducible characters, residuals and the ν_α.
    Chartable,
    /// Ω_g by cutting loops and by brute force.
    Omega {
        #[arg(long)]
        genus: u32,
        /// Class indices or element names, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "")]
        classes: Vec<String>,
    },
    /// One descendant correlator ⟨τ_{a_1}(e_{m_1})⋯⟩_g.
    Correlator {
        #[arg(long)]
        genus: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<u32>,
        /// Class indices or element names, one per level.
        #[arg(long, value_delimiter = ',', required = true)]
        classes: Vec<String>,
    },
    /// The truncated potential Φ^G and Z^G = exp(Φ^G).
    Potential {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = Basis::Class)]
        basis: Basis,
    },
    /// Run one family of identity checks.
    Check {
        #[command(subcommand)]
        which: Check,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Class,
    Canonical,
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// Oracle agreement, cutting, forgetting tails, invariance.
    Cohft {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 64)]
        random_keys: usize,
    },
    /// Annihilation of Z^G by L_n and L_n^(α).
    Virasoro {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        n_max: i32,
        /// Double one genus-0 coefficient of Φ^G first.
        #[arg(long)]
        mutate: bool,
    },
    /// The KdV identity coefficientwise.
    Kdv {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        a_max: u32,
        #[arg(long)]
        mutate: bool,
    },
    /// Φ^G in rescaled canonical variables against Σ_α Φ(ũ^α).
    Factorization {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Ω of G×H against the product of the factors.
    Tensor {
        /// The second factor H.
        #[arg(long)]
        with: String,
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
