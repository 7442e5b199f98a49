//! Reduction to the fixed-pair-number hyperplane and normal-mode analysis.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::BasisState;
use crate::scalar::{int, lit, Real};
use crate::sha::hermite::oscillator_table;
use crate::sha::tensors::OscillatorTensors;

/// Kinetic and potential tensors restricted to the hyperplane `sum_p xi_p = 0`.
#[derive(Clone, Debug)]
pub struct HyperplaneProjection<T: Real> {
    /// `k x (k-1)`, orthonormal columns orthogonal to `(1, ..., 1)`.
    pub basis: DMatrix<T>,
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub e: T,
    pub origin: Vec<T>,
}

/// Orthonormal Helmert basis of the hyperplane orthogonal to `(1, ..., 1)` in `k` dimensions.
///
/// Column `i` is `(1, ..., 1, -(i+1), 0, ..., 0) / sqrt((i+1)(i+2))`.
pub fn hyperplane_basis<T: Real>(k: usize) -> DMatrix<T> {
    DMatrix::from_fn(k, k.saturating_sub(1), |p, i| {
        let w = int::<T>(((i + 1) * (i + 2)) as i64).sqrt();
        match p.cmp(&(i + 1)) {
            Ordering::Less => T::one() / w,
            Ordering::Equal => -int::<T>(i as i64 + 1) / w,
            Ordering::Greater => T::zero(),
        }
    })
}

fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    let (vals, _) = T::dense_symmetric_eigen(m, false);
    vals.into_iter().fold(T::zero(), |a, v| a.max(v.abs()))
}

/// Projects `A` and `B` onto the hyperplane, discarding the spurious zero mode of `A`.
pub fn remove_spurious<T: Real>(tensors: &OscillatorTensors<T>) -> Result<HyperplaneProjection<T>> {
    let basis = hyperplane_basis::<T>(tensors.a.nrows());
    project(tensors, basis)
}

/// Same as [`remove_spurious`] with a caller-supplied orthonormal hyperplane basis.
pub fn project<T: Real>(tensors: &OscillatorTensors<T>, basis: DMatrix<T>) -> Result<HyperplaneProjection<T>> {
    let k = tensors.a.nrows();
    if basis.nrows() != k || basis.ncols() + 1 != k {
        return Err(Error::DimensionMismatch(format!("hyperplane basis must be {k}x{}", k.saturating_sub(1))));
    }
    let symmetrize = |m: DMatrix<T>| (&m + m.transpose()) * lit::<T>(0.5);
    let a = symmetrize(basis.transpose() * &tensors.a * &basis);
    let b = symmetrize(basis.transpose() * &tensors.b * &basis);
    let floor = lit::<T>(1e-12) * spectral_norm(&tensors.a);
    if k > 1 {
        let (vals, _) = T::dense_symmetric_eigen(&a, false);
        if vals[0] <= floor {
            return Err(Error::InvalidRegime(format!(
                "inverse-mass tensor has a second soft direction (eigenvalue {:e})",
                vals[0].to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    Ok(HyperplaneProjection { basis, a, b, e: tensors.e, origin: tensors.origin.clone() })
}

/// Decoupled oscillators on the hyperplane.
///
/// Mode `i` has coordinate `y_i = V_i . xi` with `xi_p = m_p - j_p x_op` and
/// Hamiltonian `-alpha_i d^2/dy_i^2 + beta_i y_i^2`.
#[derive(Clone, Debug)]
pub struct NormalModes<T: Real> {
    /// `(k-1) x k`, unit-norm rows orthogonal to `(1, ..., 1)`.
    pub mode_vectors: DMatrix<T>,
    /// Ascending.
    pub omega: Vec<T>,
    pub sigma: Vec<T>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub e: T,
    pub origin: Vec<T>,
}

/// Simultaneous diagonalization of the restricted kinetic and potential tensors.
///
/// The kinetic term is whitened with the symmetric square root of `A`, the
/// transformed `B` is diagonalized, and each mode is rescaled so that its
/// coordinate is measured along a unit vector in `xi` space.
pub fn normal_modes<T: Real>(projection: &HyperplaneProjection<T>) -> Result<NormalModes<T>> {
    let k = projection.origin.len();
    let n = k.saturating_sub(1);
    if n == 0 {
        return Ok(NormalModes {
            mode_vectors: DMatrix::zeros(0, k),
            omega: Vec::new(),
            sigma: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            e: projection.e,
            origin: projection.origin.clone(),
        });
    }
    let (a_vals, a_vecs) = T::dense_symmetric_eigen(&projection.a, true);
    let a_vecs = a_vecs.expect("vectors requested");
    if a_vals[0] <= T::zero() {
        return Err(Error::InvalidRegime("restricted inverse-mass tensor is not positive definite".into()));
    }
    let root = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, a_vals.iter().map(|v| v.sqrt())));
    let inv_root = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, a_vals.iter().map(|v| v.sqrt().recip())));
    let sqrt_a = &a_vecs * root * a_vecs.transpose();
    let inv_sqrt_a = &a_vecs * inv_root * a_vecs.transpose();
    let whitened = &sqrt_a * &projection.b * &sqrt_a;
    let whitened = (&whitened + whitened.transpose()) * lit::<T>(0.5);
    let (b_vals, w) = T::dense_symmetric_eigen(&whitened, true);
    let w = w.expect("vectors requested");
    if b_vals[0] <= T::zero() {
        return Err(Error::InvalidRegime(format!(
            "oscillator potential is not confining on the hyperplane (curvature {:e})",
            b_vals[0].to_f64().unwrap_or(f64::NAN)
        )));
    }
    // rows map xi to whitened mode coordinates
    let raw = w.transpose() * inv_sqrt_a * projection.basis.transpose();

    let mut modes: Vec<(T, Vec<T>, T, T)> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = raw.row(i).iter().copied().collect();
            let len = row.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
            let big = row.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
            let lead = row.iter().copied().find(|v| v.abs() > lit::<T>(1e-12) * big).unwrap_or(T::one());
            let sign = if lead < T::zero() { -T::one() } else { T::one() };
            for v in &mut row {
                *v = *v * sign / len;
            }
            let alpha = T::one() / (len * len);
            let beta = b_vals[i] * len * len;
            (int::<T>(2) * b_vals[i].sqrt(), row, alpha, beta)
        })
        .collect();
    modes.sort_by(|x, y| {
        let tie = lit::<T>(1e-12) * x.0.abs().max(y.0.abs());
        if (x.0 - y.0).abs() <= tie {
            x.1.iter().zip(&y.1).map(|(a, b)| a.partial_cmp(b).unwrap_or(Ordering::Equal)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
        } else {
            x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal)
        }
    });

    let mut mode_vectors = DMatrix::zeros(n, k);
    for (i, m) in modes.iter().enumerate() {
        for p in 0..k {
            mode_vectors[(i, p)] = m.1[p];
        }
    }
    let quarter = lit::<T>(0.25);
    Ok(NormalModes {
        mode_vectors,
        omega: modes.iter().map(|m| m.0).collect(),
        sigma: modes.iter().map(|m| (m.2 / m.3).powf(quarter)).collect(),
        alpha: modes.iter().map(|m| m.2).collect(),
        beta: modes.iter().map(|m| m.3).collect(),
        e: projection.e,
        origin: projection.origin.clone(),
    })
}

impl<T: Real> NormalModes<T> {
    pub fn num_modes(&self) -> usize {
        self.omega.len()
    }

    /// Zero-point energy `sum_i omega_i / 2`.
    pub fn zero_point(&self) -> T {
        self.omega.iter().fold(T::zero(), |a, &w| a + w) * lit(0.5)
    }

    /// Ground-state energy `E + sum_i omega_i / 2`.
    pub fn ground_energy(&self) -> T {
        self.e + self.zero_point()
    }

    /// `xi_p = m_p - j_p x_op`.
    pub fn displacement(&self, state: &BasisState) -> Vec<T> {
        state
            .twice_m
            .iter()
            .zip(&self.origin)
            .map(|(&tm, &o)| int::<T>(tm as i64) / int(2) - o)
            .collect()
    }

    /// Same as [`NormalModes::displacement`] from pair occupations and twice-j values.
    pub fn displacement_from_occupations(&self, occupations: &[u32], twice_j: &[u32]) -> Vec<T> {
        occupations
            .iter()
            .zip(twice_j)
            .zip(&self.origin)
            .map(|((&n, &tj), &o)| int::<T>(2 * n as i64 - tj as i64) / int(2) - o)
            .collect()
    }

    /// Mode coordinates `y_i = V_i . xi`.
    pub fn mode_coordinates(&self, xi: &[T]) -> Vec<T> {
        (0..self.num_modes())
            .map(|i| xi.iter().enumerate().fold(T::zero(), |acc, (p, &v)| acc + self.mode_vectors[(i, p)] * v))
            .collect()
    }

    /// `y_i / sigma_i`.
    pub fn scaled_coordinates(&self, xi: &[T]) -> Vec<T> {
        self.mode_coordinates(xi).into_iter().zip(&self.sigma).map(|(y, &s)| y / s).collect()
    }

    fn check_quanta(&self, quanta: &[u32]) -> Result<()> {
        if quanta.len() != self.num_modes() {
            return Err(Error::InvalidArgument(format!(
                "quanta {quanta:?} need {} components",
                self.num_modes()
            )));
        }
        Ok(())
    }

    /// `E_nu = sum_i (nu_i + 1/2) omega_i + E`.
    pub fn energy(&self, quanta: &[u32]) -> Result<T> {
        Ok(self.e + self.zero_point() + self.excitation(quanta)?)
    }

    /// `E_nu - E_0 = sum_i nu_i omega_i`.
    pub fn excitation(&self, quanta: &[u32]) -> Result<T> {
        self.check_quanta(quanta)?;
        Ok(quanta.iter().zip(&self.omega).fold(T::zero(), |acc, (&n, &w)| acc + int::<T>(n as i64) * w))
    }

    /// Oscillator eigenfunction `prod_i sigma_i^{-1/2} phi_{nu_i}(y_i / sigma_i)` at displacement `xi`.
    ///
    /// This is the continuum-normalized amplitude; sampling it on the basis
    /// and renormalizing the resulting vector supplies the grid factor.
    pub fn wavefunction(&self, quanta: &[u32], xi: &[T]) -> Result<T> {
        self.check_quanta(quanta)?;
        let z = self.scaled_coordinates(xi);
        Ok((0..self.num_modes()).fold(T::one(), |acc, i| {
            acc * oscillator_table(quanta[i], z[i])[quanta[i] as usize] / self.sigma[i].sqrt()
        }))
    }
}

/// Absolute energies for each quanta tuple.
pub fn sha_energies<T: Real>(modes: &NormalModes<T>, quanta_list: &[Vec<u32>]) -> Result<Vec<T>> {
    quanta_list.iter().map(|q| modes.energy(q)).collect()
}

/// Excitation energies above the oscillator ground state for each quanta tuple.
pub fn sha_excitations<T: Real>(modes: &NormalModes<T>, quanta_list: &[Vec<u32>]) -> Result<Vec<T>> {
    quanta_list.iter().map(|q| modes.excitation(q)).collect()
}

/// Amplitude of one oscillator eigenfunction at a basis state.
pub fn sha_wavefunction<T: Real>(modes: &NormalModes<T>, quanta: &[u32], state: &BasisState) -> Result<T> {
    modes.wavefunction(quanta, &modes.displacement(state))
}
