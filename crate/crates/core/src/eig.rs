//! Symmetric eigensolvers: dense reference solves, Lanczos for large matrices,
//! and Rayleigh-Ritz projection onto a given subspace.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SymmetricOperatorMatrix;
use crate::scalar::{lit, Real};

/// Which algorithm produced a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Dense,
    Lanczos,
    Ritz,
}

/// Route selection for [`diagonalize_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Dense up to `dense_max_dim`, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct EigenOptions<T> {
    pub solver: SolverChoice,
    /// Largest dimension handled by the dense path under [`SolverChoice::Auto`].
    pub dense_max_dim: usize,
    /// Relative residual target, `|Hv - lv| <= tol |H|`.
    pub residual_tol: T,
    /// Upper bound on the Krylov basis size.
    pub max_krylov: usize,
    pub seed: u64,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        Self {
            solver: SolverChoice::Auto,
            dense_max_dim: 6000,
            residual_tol: lit(1e-9),
            max_krylov: 3000,
            seed: 0x5eed,
        }
    }
}

/// Lowest eigenpairs of a symmetric operator.
#[derive(Clone, Debug)]
pub struct SpectrumResult<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unit-norm eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Option<DMatrix<T>>,
    pub solver: SolverKind,
    /// `|Hv - lv|` per pair; empty when vectors were not requested.
    pub residuals: Vec<T>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    /// `E_i - E_0` for every returned level.
    pub fn excitations(&self) -> Vec<T> {
        let e0 = self.eigenvalues[0];
        self.eigenvalues.iter().map(|&e| e - e0).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Lowest `count` eigenpairs with default options.
pub fn diagonalize<T: Real>(matrix: &SymmetricOperatorMatrix<T>, count: usize, want_vectors: bool) -> Result<SpectrumResult<T>> {
    diagonalize_with(matrix, count, want_vectors, &EigenOptions::default())
}

pub fn diagonalize_with<T: Real>(
    matrix: &SymmetricOperatorMatrix<T>,
    count: usize,
    want_vectors: bool,
    options: &EigenOptions<T>,
) -> Result<SpectrumResult<T>> {
    let dim = matrix.dim();
    if count == 0 || count > dim {
        return Err(Error::InvalidArgument(format!("requested {count} eigenpairs of a {dim}-dimensional matrix")));
    }
    match options.solver {
        SolverChoice::Dense => dense(matrix, count, want_vectors),
        SolverChoice::Lanczos => lanczos(matrix, count, want_vectors, options),
        SolverChoice::Auto if dim <= options.dense_max_dim => dense(matrix, count, want_vectors),
        SolverChoice::Auto => lanczos(matrix, count, want_vectors, options),
    }
}

fn dense<T: Real>(matrix: &SymmetricOperatorMatrix<T>, count: usize, want_vectors: bool) -> Result<SpectrumResult<T>> {
    let (mut values, vectors) = T::dense_symmetric_eigen(&matrix.to_dense(), want_vectors);
    values.truncate(count);
    let vectors = vectors.map(|v| v.columns(0, count).into_owned());
    let residuals = vectors.as_ref().map(|v| residual_norms(matrix, &values, v)).unwrap_or_default();
    Ok(SpectrumResult { eigenvalues: values, eigenvectors: vectors, solver: SolverKind::Dense, residuals })
}

fn residual_norms<T: Real>(matrix: &SymmetricOperatorMatrix<T>, values: &[T], vectors: &DMatrix<T>) -> Vec<T> {
    values
        .iter()
        .enumerate()
        .map(|(c, &lambda)| {
            let v = vectors.column(c).into_owned();
            (matrix.mul_vector(&v) - v * lambda).norm()
        })
        .collect()
}

/// Lanczos with full reorthogonalization.
///
/// The Krylov basis grows until the `count` lowest Ritz pairs satisfy the
/// residual target. On breakdown the iteration continues from a fresh random
/// vector orthogonal to the basis, so the method ends exact once the basis
/// spans the whole space. Exactly degenerate eigenvalues may be missed: a
/// single start vector only sees one copy of each eigenspace.
fn lanczos<T: Real>(
    matrix: &SymmetricOperatorMatrix<T>,
    count: usize,
    want_vectors: bool,
    options: &EigenOptions<T>,
) -> Result<SpectrumResult<T>> {
    let dim = matrix.dim();
    let max_basis = options.max_krylov.max(count).min(dim);
    let norm = matrix.norm_bound();
    let tol = options.residual_tol * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let mut basis: Vec<DVector<T>> = Vec::new();
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new(); // beta[i] couples basis[i] and basis[i + 1]
    let mut next = random_unit(dim, &mut rng, &basis).ok_or_else(|| Error::NonConvergence("no start vector".into()))?;
    let mut check_at = (2 * count + 20).max(40).min(max_basis);

    loop {
        while basis.len() < check_at {
            let q = next.clone();
            let mut w = matrix.mul_vector(&q);
            let a = q.dot(&w);
            basis.push(q);
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.axpy(-c, b, T::one());
                }
            }
            let b = w.norm();
            if basis.len() == dim {
                break;
            }
            if b > lit::<T>(1e-10) * norm {
                beta.push(b);
                next = w / b;
            } else {
                beta.push(T::zero());
                match random_unit(dim, &mut rng, &basis) {
                    Some(v) => next = v,
                    None => break,
                }
            }
        }

        let m = basis.len();
        let mut tri = DMatrix::zeros(m, m);
        for i in 0..m {
            tri[(i, i)] = alpha[i];
            if i + 1 < m {
                tri[(i, i + 1)] = beta[i];
                tri[(i + 1, i)] = beta[i];
            }
        }
        let (theta, s) = T::dense_symmetric_eigen(&tri, true);
        let s = s.expect("vectors requested");
        let wanted = count.min(m);
        let tail = if m < dim && beta.len() >= m { beta[m - 1] } else { T::zero() };
        let converged = wanted == count && (0..count).all(|i| (tail * s[(m - 1, i)]).abs() <= tol);

        if converged || m >= max_basis {
            if !converged {
                return Err(Error::NonConvergence(format!("Lanczos basis reached {m} vectors without convergence")));
            }
            let values: Vec<T> = theta[..count].to_vec();
            let mut vectors = DMatrix::zeros(dim, count);
            for i in 0..count {
                let mut v = DVector::zeros(dim);
                for (r, b) in basis.iter().enumerate() {
                    v.axpy(s[(r, i)], b, T::one());
                }
                let n = v.norm();
                vectors.set_column(i, &(v / n));
            }
            let residuals = residual_norms(matrix, &values, &vectors);
            return Ok(SpectrumResult {
                eigenvalues: values,
                residuals: if want_vectors { residuals } else { Vec::new() },
                eigenvectors: want_vectors.then_some(vectors),
                solver: SolverKind::Lanczos,
            });
        }
        check_at = (check_at * 3 / 2).min(max_basis);
    }
}

fn random_unit<T: Real>(dim: usize, rng: &mut ChaCha8Rng, against: &[DVector<T>]) -> Option<DVector<T>> {
    for _ in 0..8 {
        let mut v = DVector::from_fn(dim, |_, _| lit::<T>(rng.gen_range(-1.0..1.0)));
        for _ in 0..2 {
            for b in against {
                let c = b.dot(&v);
                v.axpy(-c, b, T::one());
            }
        }
        let n = v.norm();
        if n > lit(1e-8) {
            return Some(v / n);
        }
    }
    None
}

/// Rayleigh-Ritz: eigenpairs of `Q^T H Q` for orthonormal columns `Q`, lifted back to the full space.
pub fn ritz_diagonalize<T: Real>(matrix: &SymmetricOperatorMatrix<T>, subspace: &DMatrix<T>) -> Result<SpectrumResult<T>> {
    let dim = matrix.dim();
    let s = subspace.ncols();
    if s == 0 {
        return Err(Error::EmptySubspace("no subspace vectors".into()));
    }
    if subspace.nrows() != dim {
        return Err(Error::DimensionMismatch(format!("subspace vectors have length {}, matrix dimension {dim}", subspace.nrows())));
    }
    let mut hq = DMatrix::zeros(dim, s);
    for c in 0..s {
        let col = subspace.column(c).into_owned();
        hq.set_column(c, &matrix.mul_vector(&col));
    }
    let mut projected = subspace.transpose() * &hq;
    // symmetrize away rounding
    for i in 0..s {
        for j in i + 1..s {
            let avg = (projected[(i, j)] + projected[(j, i)]) / lit(2.0);
            projected[(i, j)] = avg;
            projected[(j, i)] = avg;
        }
    }
    let (values, w) = T::dense_symmetric_eigen(&projected, true);
    let w = w.expect("vectors requested");
    let vectors = subspace * &w;
    let residuals = residual_norms(matrix, &values, &vectors);
    Ok(SpectrumResult { eigenvalues: values, eigenvectors: Some(vectors), solver: SolverKind::Ritz, residuals })
}
