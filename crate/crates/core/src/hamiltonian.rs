//! Matrix of the pairing Hamiltonian
//! `H = sum_p eps_p n_p - sum_pq G_pq J+^p J-^q` in the quasi-spin basis.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{PairingModel, QuasispinBasis};
use crate::scalar::{int, Real};

/// Default cap on the number of stored matrix elements.
pub const DEFAULT_MAX_NNZ: usize = 500_000_000;

/// Raising or lowering quasi-spin operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Coefficient `c` in `J± |j m> = c |j m±1>`, from twice-j and twice-m.
///
/// Returns zero when the target projection is outside `-j..=j` or `|m| > j`.
pub fn ladder_factor<T: Real>(twice_j: u32, twice_m: i32, direction: Ladder) -> T {
    let tj = twice_j as i64;
    let tm = twice_m as i64;
    if tm.abs() > tj || (tj + tm) % 2 != 0 {
        return T::zero();
    }
    // (j -+ m)(j +- m + 1), scaled by 4
    let product = match direction {
        Ladder::Raise => (tj - tm) * (tj + tm + 2),
        Ladder::Lower => (tj + tm) * (tj - tm + 2),
    };
    if product <= 0 {
        return T::zero();
    }
    int::<T>(product).sqrt() / int(2)
}

/// Symmetric sparse matrix: dense diagonal plus the strict upper triangle in CSR form.
#[derive(Clone, Debug)]
pub struct SymmetricOperatorMatrix<T> {
    diag: Vec<T>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SymmetricOperatorMatrix<T> {
    /// Builds from a diagonal and strict-upper rows `(col, value)`, each sorted by column.
    pub fn from_upper_rows(diag: Vec<T>, rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let dim = diag.len();
        if rows.len() != dim {
            return Err(Error::DimensionMismatch(format!("{} upper rows for dimension {dim}", rows.len())));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if c <= i || c >= dim {
                    return Err(Error::InvalidArgument(format!("entry ({i}, {c}) not in strict upper triangle")));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("entry ({i}, {c}) is not finite")));
                }
                if cols.len() > row_ptr[i] && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("diagonal entry is not finite".into()));
        }
        Ok(Self { diag, row_ptr, cols, vals })
    }

    /// Builds from a dense matrix, rejecting any asymmetry.
    pub fn from_dense(m: &DMatrix<T>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
                }
                if m[(i, j)] != T::zero() {
                    rows[i].push((j, m[(i, j)]));
                }
            }
        }
        Self::from_upper_rows((0..n).map(|i| m[(i, i)]).collect(), rows)
    }

    pub fn diagonal_matrix(diag: Vec<T>) -> Result<Self> {
        let n = diag.len();
        Self::from_upper_rows(diag, vec![Vec::new(); n])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Stored elements: the diagonal plus the strict upper triangle.
    pub fn nnz(&self) -> usize {
        self.diag.len() + self.vals.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    /// Strict upper triangle as `(row, col, value)`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim()).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |e| (i, self.cols[e], self.vals[e]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return self.diag[i];
        }
        let (r, c) = if i < j { (i, j) } else { (j, i) };
        let row = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(pos) => self.vals[self.row_ptr[r] + pos],
            Err(_) => T::zero(),
        }
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.diag[i] * x[i];
        }
        for i in 0..self.dim() {
            let xi = x[i];
            let mut acc = T::zero();
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.cols[e];
                let v = self.vals[e];
                acc += v * x[c];
                y[c] += v * xi;
            }
            y[i] += acc;
        }
    }

    pub fn mul_vector(&self, x: &DVector<T>) -> DVector<T> {
        let mut y = DVector::zeros(self.dim());
        self.apply(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, j, v) in self.upper_entries() {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// Maximum absolute row sum; an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> T {
        let mut rows: Vec<T> = self.diag.iter().map(|d| d.abs()).collect();
        for (i, j, v) in self.upper_entries() {
            rows[i] += v.abs();
            rows[j] += v.abs();
        }
        rows.into_iter().fold(T::zero(), |a, b| a.max(b))
    }

    /// Writes `row col value` lines (0-based, diagonal and upper triangle, 17 significant digits).
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.dim() {
            writeln!(out, "{} {} {:.16e}", i, i, self.diag[i].to_f64().unwrap_or(f64::NAN))?;
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(out, "{} {} {:.16e}", i, self.cols[e], self.vals[e].to_f64().unwrap_or(f64::NAN))?;
            }
        }
        Ok(())
    }
}

/// Diagonal matrix element for the state with pair occupations `occupations`.
///
/// `sum_p 2 eps_p n_p - sum_p G_pp n_p (2 j_p - n_p + 1)` plus the seniority offset,
/// where `n_p (2 j_p - n_p + 1)` is the eigenvalue of `J+^p J-^p`.
pub fn diagonal_element<T: Real>(model: &PairingModel<T>, occupations: &[u32]) -> T {
    let g = model.coupling();
    let mut e = model.seniority_energy_offset();
    for (p, level) in model.levels().iter().enumerate() {
        let n = occupations[p] as i64;
        let tj = level.twice_j_eff() as i64;
        e += int::<T>(2 * n) * level.epsilon - g[(p, p)] * int::<T>(n * (tj - n + 1));
    }
    e
}

/// Assembles the Hamiltonian with the default element cap.
pub fn build_hamiltonian<T: Real>(model: &PairingModel<T>, basis: &QuasispinBasis) -> Result<SymmetricOperatorMatrix<T>> {
    build_hamiltonian_with_cap(model, basis, DEFAULT_MAX_NNZ)
}

/// Assembles the Hamiltonian.
///
/// Each state emits the pair-scattering terms `-G_pq J+^p J-^q` (`p != q`) whose
/// target lies after it in the basis order, so every symmetric pair is stored once.
pub fn build_hamiltonian_with_cap<T: Real>(
    model: &PairingModel<T>,
    basis: &QuasispinBasis,
    max_nnz: usize,
) -> Result<SymmetricOperatorMatrix<T>> {
    let k = model.num_levels();
    if basis.num_levels() != k || basis.twice_j() != model.twice_j_effs().as_slice() || basis.pairs() != model.pairs() {
        return Err(Error::DimensionMismatch("basis was not enumerated from this model".into()));
    }
    let dim = basis.dim();
    let g = model.coupling();
    let twice_j = model.twice_j_effs();

    let mut diag = Vec::with_capacity(dim);
    let mut rows = Vec::with_capacity(dim);
    let mut stored = 0usize;
    let mut target = vec![0u32; k];
    for i in 0..dim {
        let occ = basis.occupations(i);
        diag.push(diagonal_element(model, occ));
        let mut row = Vec::new();
        for p in 0..k {
            if occ[p] >= twice_j[p] {
                continue;
            }
            for q in 0..k {
                if q == p || occ[q] == 0 || g[(p, q)] == T::zero() {
                    continue;
                }
                target.copy_from_slice(occ);
                target[p] += 1;
                target[q] -= 1;
                let Some(t) = basis.index_of_occupations(&target) else {
                    continue;
                };
                if t <= i {
                    continue;
                }
                let (np, nq) = (occ[p] as i64, occ[q] as i64);
                let (tjp, tjq) = (twice_j[p] as i64, twice_j[q] as i64);
                // sqrt((j_p - m_p)(j_p + m_p + 1)) sqrt((j_q + m_q)(j_q - m_q + 1))
                let amp = int::<T>(((tjp - np) * (np + 1)) * (nq * (tjq - nq + 1))).sqrt();
                row.push((t, -g[(p, q)] * amp));
            }
        }
        stored += row.len() + 1;
        if stored > max_nnz {
            return Err(Error::TooManyNonZeros { cap: max_nnz });
        }
        rows.push(row);
    }
    SymmetricOperatorMatrix::from_upper_rows(diag, rows)
}

/// Energies `E(n) = 2 eps n - G n (2j - n + 1)` of a single level holding `n = 0..=2j` pairs.
pub fn single_level_spectrum<T: Real>(twice_j: u32, epsilon: T, coupling: T) -> Vec<T> {
    let tj = twice_j as i64;
    (0..=tj)
        .map(|n| int::<T>(2 * n) * epsilon - coupling * int::<T>(n * (tj - n + 1)))
        .collect()
}
