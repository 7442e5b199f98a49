//! Shifted harmonic approximation.
//!
//! Treating the projections `m_p` as continuous and expanding the Hamiltonian
//! to bilinear order about an equilibrium point turns the pairing problem into
//! a `(k-1)`-dimensional harmonic oscillator. The pipeline is
//! [`solve_shifts`] → [`build_tensors`] → [`remove_spurious`] → [`normal_modes`].

pub mod hermite;
pub mod modes;
pub mod shift;
pub mod tensors;

use std::fmt::Write as _;

use nalgebra::DMatrix;

pub use hermite::{hermite, oscillator_function};
pub use modes::{
    hyperplane_basis, normal_modes, project, remove_spurious, sha_energies, sha_excitations, sha_wavefunction,
    HyperplaneProjection, NormalModes,
};
pub use shift::{least_squares_shifts, shift_functions, solve_shifts, ShiftOptions, ShiftSolution};
pub use tensors::{build_tensors, OscillatorTensors};

use crate::error::Result;
use crate::model::PairingModel;
use crate::scalar::Real;

/// Every intermediate of one SHA evaluation.
#[derive(Clone, Debug)]
pub struct ShaAnalysis<T: Real> {
    pub shift: ShiftSolution<T>,
    pub tensors: OscillatorTensors<T>,
    pub projection: HyperplaneProjection<T>,
    pub modes: NormalModes<T>,
}

impl<T: Real> ShaAnalysis<T> {
    /// Runs the full pipeline at the equilibrium found by [`solve_shifts`].
    pub fn new(model: &PairingModel<T>, options: &ShiftOptions<T>) -> Result<Self> {
        let shift = solve_shifts(model, options)?;
        Self::at(model, shift)
    }

    /// Runs the tensor and normal-mode stages at a given shift solution.
    pub fn at(model: &PairingModel<T>, shift: ShiftSolution<T>) -> Result<Self> {
        let tensors = build_tensors(model, &shift);
        let projection = remove_spurious(&tensors)?;
        let modes = normal_modes(&projection)?;
        Ok(Self { shift, tensors, projection, modes })
    }

    /// Like [`ShaAnalysis::new`], falling back to the least-squares equilibrium if the
    /// shift equations have no interior solution.
    pub fn with_fallback(model: &PairingModel<T>, options: &ShiftOptions<T>) -> Result<Self> {
        match solve_shifts(model, options) {
            Ok(shift) => Self::at(model, shift),
            Err(_) => Self::at(model, least_squares_shifts(model, options)?),
        }
    }

    /// Plain-text dump of every SHA quantity at 17 significant digits.
    pub fn diagnostics(&self) -> String {
        let mut out = String::new();
        let num = |x: T| format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN));
        let line = |out: &mut String, key: &str, vals: &[T]| {
            let body: Vec<String> = vals.iter().map(|&v| num(v)).collect();
            let _ = writeln!(out, "{key} {}", body.join(" "));
        };
        let matrix = |out: &mut String, key: &str, m: &DMatrix<T>| {
            for r in 0..m.nrows() {
                let row: Vec<T> = m.row(r).iter().copied().collect();
                line(out, &format!("{key}[{r}]"), &row);
            }
        };
        line(&mut out, "x0", &self.shift.x0);
        line(&mut out, "lambda", &[self.shift.lambda]);
        line(&mut out, "shift_residual", &[self.shift.residual]);
        let _ = writeln!(out, "shift_iterations {}", self.shift.iterations);
        let _ = writeln!(out, "shift_fallback {}", self.shift.fallback);
        line(&mut out, "kappa", &self.shift.kappa);
        matrix(&mut out, "A", &self.tensors.a);
        matrix(&mut out, "B", &self.tensors.b);
        line(&mut out, "D", &self.tensors.d);
        line(&mut out, "E", &[self.tensors.e]);
        line(&mut out, "omega", &self.modes.omega);
        line(&mut out, "sigma", &self.modes.sigma);
        line(&mut out, "alpha", &self.modes.alpha);
        line(&mut out, "beta", &self.modes.beta);
        matrix(&mut out, "mode", &self.modes.mode_vectors);
        out
    }
}
