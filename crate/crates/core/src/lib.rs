//! Exact and shifted-harmonic treatment of the multi-level pairing Hamiltonian
//!
//! `H = sum_p eps_p n_p - sum_pq G_pq J+^p J-^q`
//!
//! in the quasi-spin representation. Everything numeric is generic over
//! [`Real`] (`f32` or `f64`); the aliases at the crate root fix `f64`.
//!
//! ```
//! use bcs_sha::{config::ModelConfig, enumerate_basis};
//!
//! let cfg = ModelConfig::from_json(r#"{"levels":[{"j":2,"epsilon":0},{"j":3,"epsilon":1}],
//!     "N":3,"G":{"rule":"linear-gap","g":0.2}}"#).unwrap();
//! let model: bcs_sha::PairingModel = cfg.build().unwrap();
//! let basis = enumerate_basis(&model).unwrap();
//! assert_eq!(basis.dim(), 4);
//! ```

pub mod config;
pub mod eig;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod scalar;
pub mod sha;
pub mod subspace;

pub use eig::{diagonalize, diagonalize_with, ritz_diagonalize, EigenOptions, SolverChoice, SolverKind};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, diagonal_element, single_level_spectrum};
pub use model::{build_model, coupling_from_rule, enumerate_basis, BasisState, QuasispinBasis};
pub use scalar::Real;
pub use sha::solve_shifts;
pub use subspace::{run_subspace, QuantaSet, RankRule, SubspaceSpec};

pub type LevelSpec = model::LevelSpec<f64>;
pub type PairingModel = model::PairingModel<f64>;
pub type SymmetricOperatorMatrix = hamiltonian::SymmetricOperatorMatrix<f64>;
pub type SpectrumResult = eig::SpectrumResult<f64>;
pub type ShiftOptions = sha::ShiftOptions<f64>;
pub type ShiftSolution = sha::ShiftSolution<f64>;
pub type OscillatorTensors = sha::OscillatorTensors<f64>;
pub type NormalModes = sha::NormalModes<f64>;
pub type ShaAnalysis = sha::ShaAnalysis<f64>;
pub type SubspaceRun = subspace::SubspaceRun<f64>;
pub type SubspaceOptions = subspace::SubspaceOptions<f64>;
