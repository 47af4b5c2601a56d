use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsl_core::oracles::{DjKindChoice, PermPolicy, SecretChoice};

#[derive(Debug, Parser)]
#[command(name = "qsl", version, about = "Quantum Simulation Logic experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Deutsch-Jozsa trials on random oracles.
    Dj(DjArgs),
    /// Run Simon trials on random oracles.
    Simon(SimonArgs),
    /// Check QSL output distributions against a statevector simulation.
    Verify(VerifyArgs),
    /// Time oracle build, query and solve phases as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Any,
    Constant,
    Constant0,
    Constant1,
    Balanced,
}

impl From<Kind> for DjKindChoice {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Any => DjKindChoice::Any,
            Kind::Constant => DjKindChoice::Constant,
            Kind::Constant0 => DjKindChoice::Constant0,
            Kind::Constant1 => DjKindChoice::Constant1,
            Kind::Balanced => DjKindChoice::Balanced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Det,
    Prob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Secret {
    Any,
    Nonzero,
    Zero,
}

impl From<Secret> for SecretChoice {
    fn from(s: Secret) -> Self {
        match s {
            Secret::Any => SecretChoice::Any,
            Secret::Nonzero => SecretChoice::Nonzero,
            Secret::Zero => SecretChoice::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchAlgorithm {
    Dj,
    SimonDet,
    SimonProb,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of trials.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Master seed; trial t uses streams 4t, 4t+1, 4t+2 of it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Gate count factor c in c*n*log2(n+1) for permutations wider than 12 bits.
    #[arg(long, default_value_t = 10.0)]
    pub perm_depth_factor: f64,
    /// Write records here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn policy(&self) -> Result<PermPolicy, String> {
        if !(self.perm_depth_factor.is_finite() && self.perm_depth_factor > 0.0) {
            return Err(format!(
                "--perm-depth-factor must be positive, got {}",
                self.perm_depth_factor
            ));
        }
        Ok(PermPolicy {
            depth_factor: self.perm_depth_factor,
            ..PermPolicy::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct DjArgs {
    /// Input width.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Oracle kind; `any` picks constant or balanced per trial.
    #[arg(long, value_enum, default_value_t = Kind::Any)]
    pub kind: Kind,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SimonArgs {
    /// Input width.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Mode::Det)]
    pub mode: Mode,
    /// How secrets are drawn.
    #[arg(long, value_enum, default_value_t = Secret::Any)]
    pub secret: Secret,
    /// Iteration cap for `--mode prob` (default 4(n+1)).
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Largest Simon width to check, at most 6.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..=6))]
    pub max_n: u64,
    /// Subroutine samples per Simon case.
    #[arg(long, default_value_t = 50_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random permutations per secret, on top of the identity.
    #[arg(long, default_value_t = 5)]
    pub perms: usize,
    /// Largest acceptable total-variation distance.
    #[arg(long, default_value_t = 0.02)]
    pub tvd: f64,
    /// Smallest acceptable chi-square p-value.
    #[arg(long, default_value_t = 1e-6)]
    pub min_p: f64,
    /// Verify a single oracle spec (JSON) instead of the built-in suite.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = BenchAlgorithm::Dj)]
    pub algorithm: BenchAlgorithm,
    /// Comma-separated input widths.
    #[arg(long, value_delimiter = ',', default_values_t = [1000u64, 10_000, 100_000])]
    pub n_list: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-run wall-time budget; any run over it fails the command.
    #[arg(long, default_value_t = 30.0)]
    pub budget_secs: f64,
    #[arg(long, default_value_t = 10.0)]
    pub perm_depth_factor: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
