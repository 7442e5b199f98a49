//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 configuration or usage error,
//! 3 numerical failure (no convergence, no valid SHA regime, size caps).

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use bcs_sha::config::ModelConfig;
use bcs_sha::eig::{EigenOptions, SolverChoice};
use bcs_sha::sha::ShiftOptions;
use bcs_sha::subspace::RankRule;
use bcs_sha::{Error, Result};
use clap::Parser;

use commands::{parse_subspace, Command, RunConfig, SweepGrid};

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Solver {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Rank {
    DiagonalEnergy,
    ShaWeight,
}

#[derive(Parser, Debug)]
#[command(name = "bcs-sha", version, about = "Exact, SHA and subspace spectra of the multi-level pairing Hamiltonian")]
struct Cli {
    /// Model description (JSON file).
    #[arg(long, required_unless_present = "config_json", conflicts_with = "config_json")]
    config: Option<PathBuf>,
    /// Model description given inline as JSON.
    #[arg(long)]
    config_json: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    command: Command,
    /// Override the coupling strength of a rule-based G.
    #[arg(long)]
    g: Option<f64>,
    /// Coupling grid `start:stop:steps` for `sweep`.
    #[arg(long)]
    sweep: Option<String>,
    /// `sha-vectors`, `sha-vectors:<count>` or `su2-states:<count>`.
    #[arg(long)]
    subspace: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra CSV of oscillator state energies for `sha`.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// Total-quanta cutoff for oscillator state sets.
    #[arg(long, default_value_t = 10)]
    quanta_max: u32,
    /// Ranking rule for `su2-states` subspaces.
    #[arg(long, value_enum, default_value = "diagonal-energy")]
    rank: Rank,
    /// Number of eigenvalues reported (10 for exact/subspace, 5 excitations for compare).
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    solver: Solver,
    /// Largest dimension handled by the dense solver under `--solver auto`.
    #[arg(long, default_value_t = 6000)]
    dense_max: usize,
    /// Residual tolerance relative to the matrix norm.
    #[arg(long, default_value_t = 1e-9)]
    residual_tol: f64,
    /// Relative tolerance of the shift equations.
    #[arg(long, default_value_t = 1e-12)]
    shift_tol: f64,
    /// Seed for solver restarts and Lanczos start vectors.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the Hamiltonian in coordinate format (`exact` only).
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Write every SHA intermediate (`sha` only).
    #[arg(long)]
    dump_sha: Option<PathBuf>,
    /// Skip exact diagonalization in `sweep`.
    #[arg(long)]
    sha_only: bool,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig> {
        let model = match (&self.config, &self.config_json) {
            (Some(p), _) => ModelConfig::from_path(p)?,
            (None, Some(text)) => ModelConfig::from_json(text)?,
            (None, None) => return Err(Error::Config("no model given".into())),
        };
        let rank = match self.rank {
            Rank::DiagonalEnergy => RankRule::DiagonalEnergy,
            Rank::ShaWeight => RankRule::ShaWeight,
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Config(format!("--{name} must be positive")))
            }
        };
        let eigen = EigenOptions {
            solver: match self.solver {
                Solver::Auto => SolverChoice::Auto,
                Solver::Dense => SolverChoice::Dense,
                Solver::Lanczos => SolverChoice::Lanczos,
            },
            dense_max_dim: self.dense_max,
            residual_tol: positive("residual-tol", self.residual_tol)?,
            seed: self.seed,
            ..Default::default()
        };
        let shift = ShiftOptions { tol: positive("shift-tol", self.shift_tol)?, seed: self.seed, ..Default::default() };
        if let Some(g) = self.g {
            if !g.is_finite() {
                return Err(Error::Config("--g must be finite".into()));
            }
        }
        Ok(RunConfig {
            model,
            command: self.command,
            g: self.g,
            sweep: self.sweep.as_deref().map(SweepGrid::parse).transpose()?,
            subspace: self.subspace.as_deref().map(|s| parse_subspace(s, self.quanta_max, rank)).transpose()?,
            out: self.out,
            csv_out: self.csv_out,
            quanta_max: self.quanta_max,
            levels: self.levels,
            eigen,
            shift,
            dump_matrix: self.dump_matrix,
            dump_sha: self.dump_sha,
            sha_only: self.sha_only,
        })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.into_config().and_then(|cfg| commands::run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
