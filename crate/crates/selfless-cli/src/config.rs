//! Command-line interface definition and the normalized run configuration
//! echoed into every report.

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "selfless",
    version,
    about = "Exact and numeric checks of approximate-Haar and alternating-word moment conditions"
)]
pub struct Cli {
    /// Write the JSON report to this path instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (overrides SELFLESS_THREADS; default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every alternating template for a centered-set size and bound
    Enumerate {
        /// Size of the centered set the Y slots index into
        #[arg(long)]
        p: usize,
        /// Bound on the factor count and exponents
        #[arg(long = "N")]
        n: u32,
        /// Also bound the sum of absolute exponents by N
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Exact check of a group unitary against a finite set of group words
    Check {
        /// Presentation, e.g. F2 or Z2*Z3
        #[arg(long)]
        group: String,
        /// Comma-separated list of words, e.g. "a,b,a b^-1"
        #[arg(long = "F", value_delimiter = ',', num_args = 0..)]
        f: Vec<String>,
        /// The unitary, as a word
        #[arg(long)]
        u: String,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Search an axial family for the smallest index passing exactly
    AxialSearch {
        #[arg(long)]
        group: String,
        #[arg(long = "F", value_delimiter = ',', num_args = 0..)]
        f: Vec<String>,
        /// Family word with exponents linear in n, e.g. "a^n b a^n"
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        n_min: i64,
        #[arg(long, default_value_t = 40)]
        n_max: i64,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Exact check inside group * Z with the adjoined generator as unitary
    FreeProductCheck {
        #[arg(long)]
        group: String,
        #[arg(long = "F", value_delimiter = ',', num_args = 0..)]
        f: Vec<String>,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps", default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Numeric check of sampled Haar unitaries in a matrix space
    MatrixCheck {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probe set: "diag" (default) or "none"
        #[arg(long, default_value = "diag")]
        f_gen: String,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Sample Haar unitaries and keep the one minimizing the violation
    SearchUnitary {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "diag")]
        f_gen: String,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Best/median violation as a function of the matrix dimension
    Sweep {
        #[arg(long = "k-list", value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the rows as CSV to this path
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        strict_exponents: bool,
    },
    /// Perturbation radius for a tolerance, factor bound, and norm bound
    Delta {
        #[arg(long = "eps")]
        epsilon: f64,
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "M")]
        m: f64,
        /// Which norm produced M: "operator" or "l1" (recorded, not checked)
        #[arg(long, default_value = "operator")]
        norm: String,
    },
    /// Randomized validation of the perturbation estimate
    VerifyEstimate {
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        p: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build per-stage witnesses for a growing set with shrinking tolerance
    Diagonal {
        /// Group mode: presentation string
        #[arg(long)]
        group: Option<String>,
        /// Group mode: comma-separated enumeration of words
        #[arg(long = "enum", value_delimiter = ',', num_args = 0..)]
        enumeration: Vec<String>,
        /// Group mode: axial family, e.g. "a^n b a^n"
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 1)]
        n_min: i64,
        #[arg(long, default_value_t = 60)]
        n_max: i64,
        /// Matrix mode: dimension (enumeration drawn from the seed)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m_max: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Track a word per stage, e.g. "Y0 U1" or "U3" (repeatable)
        #[arg(long = "trajectory")]
        trajectories: Vec<String>,
        #[arg(long)]
        strict_exponents: bool,
    },
}

/// Normalized configuration; serialized verbatim into the report envelope so
/// a run is reproducible from its own output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    Enumerate {
        p: usize,
        n: u32,
        strict_exponents: bool,
    },
    Check {
        group: String,
        f: Vec<String>,
        u: String,
        n: u32,
        epsilon: f64,
        strict_exponents: bool,
    },
    AxialSearch {
        group: String,
        f: Vec<String>,
        family: String,
        n_min: i64,
        n_max: i64,
        n: u32,
        epsilon: f64,
        strict_exponents: bool,
    },
    FreeProductCheck {
        group: String,
        f: Vec<String>,
        n: u32,
        epsilon: f64,
        strict_exponents: bool,
    },
    MatrixCheck {
        k: usize,
        n: u32,
        epsilon: f64,
        samples: usize,
        seed: u64,
        f_gen: String,
        strict_exponents: bool,
    },
    SearchUnitary {
        k: usize,
        n: u32,
        epsilon: f64,
        samples: usize,
        seed: u64,
        f_gen: String,
        strict_exponents: bool,
    },
    Sweep {
        k_list: Vec<usize>,
        n: u32,
        epsilon: f64,
        samples: usize,
        seed: u64,
        csv: Option<PathBuf>,
        strict_exponents: bool,
    },
    Delta {
        epsilon: f64,
        n: u32,
        m: f64,
        norm: String,
    },
    VerifyEstimate {
        k: usize,
        p: usize,
        trials: usize,
        seed: u64,
    },
    Diagonal {
        group: Option<String>,
        enumeration: Vec<String>,
        family: Option<String>,
        n_min: i64,
        n_max: i64,
        k: Option<usize>,
        m_max: u32,
        samples: usize,
        seed: u64,
        trajectories: Vec<String>,
        strict_exponents: bool,
    },
}

impl Command {
    pub fn into_config(self) -> RunConfig {
        match self {
            Command::Enumerate { p, n, strict_exponents } => RunConfig::Enumerate { p, n, strict_exponents },
            Command::Check { group, f, u, n, epsilon, strict_exponents } => RunConfig::Check { group, f, u, n, epsilon, strict_exponents },
            Command::AxialSearch { group, f, family, n_min, n_max, n, epsilon, strict_exponents } => RunConfig::AxialSearch { group, f, family, n_min, n_max, n, epsilon, strict_exponents },
            Command::FreeProductCheck { group, f, n, epsilon, strict_exponents } => RunConfig::FreeProductCheck { group, f, n, epsilon, strict_exponents },
            Command::MatrixCheck { k, n, epsilon, samples, seed, f_gen, strict_exponents } => RunConfig::MatrixCheck { k, n, epsilon, samples, seed, f_gen, strict_exponents },
            Command::SearchUnitary { k, n, epsilon, samples, seed, f_gen, strict_exponents } => RunConfig::SearchUnitary { k, n, epsilon, samples, seed, f_gen, strict_exponents },
            Command::Sweep { k_list, n, epsilon, samples, seed, csv, strict_exponents } => RunConfig::Sweep { k_list, n, epsilon, samples, seed, csv, strict_exponents },
            Command::Delta { epsilon, n, m, norm } => RunConfig::Delta { epsilon, n, m, norm },
            Command::VerifyEstimate { k, p, trials, seed } => RunConfig::VerifyEstimate { k, p, trials, seed },
            Command::Diagonal { group, enumeration, family, n_min, n_max, k, m_max, samples, seed, trajectories, strict_exponents } => RunConfig::Diagonal { group, enumeration, family, n_min, n_max, k, m_max, samples, seed, trajectories, strict_exponents },
        }
    }
}
