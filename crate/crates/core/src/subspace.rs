//! SHA-guided subspaces and their Ritz spectra.
//!
//! Two kinds of subspace are supported: oscillator eigenfunctions sampled on
//! the quasi-spin lattice (accurate when the oscillator picture holds), and a
//! ranked selection of the quasi-spin product states themselves.

use nalgebra::{DMatrix, DVector};

use crate::eig::{ritz_diagonalize, SpectrumResult};
use crate::error::{Error, Result};
use crate::hamiltonian::{diagonal_element, SymmetricOperatorMatrix};
use crate::model::{PairingModel, QuasispinBasis};
use crate::scalar::{lit, Real};
use crate::sha::hermite::oscillator_table;
use crate::sha::{NormalModes, ShaAnalysis, ShiftOptions};

/// Oscillator quanta tuples ordered by total quanta, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantaSet {
    num_modes: usize,
    tuples: Vec<Vec<u32>>,
}

impl QuantaSet {
    /// All tuples with `sum_i nu_i <= n_max`.
    pub fn with_cutoff(num_modes: usize, n_max: u32) -> Self {
        let mut tuples = Vec::new();
        for total in 0..=n_max {
            push_with_total(num_modes, total, &mut Vec::with_capacity(num_modes), &mut tuples);
            if num_modes == 0 {
                break;
            }
        }
        Self { num_modes, tuples }
    }

    /// The first `count` tuples of the ordering (fewer only when `num_modes == 0`).
    pub fn first(num_modes: usize, count: usize) -> Self {
        let mut n_max = 0;
        loop {
            let mut set = Self::with_cutoff(num_modes, n_max);
            if set.tuples.len() >= count || num_modes == 0 {
                set.tuples.truncate(count);
                return set;
            }
            n_max += 1;
        }
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn max_quanta(&self) -> u32 {
        self.tuples.iter().flatten().copied().max().unwrap_or(0)
    }
}

fn push_with_total(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if slots == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        push_with_total(slots - 1, total - first, prefix, out);
        prefix.pop();
    }
}

/// Ranking of quasi-spin product states for the state-selection subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankRule {
    /// Smallest diagonal Hamiltonian element first.
    DiagonalEnergy,
    /// Largest ground-state oscillator weight `exp(-sum_i (y_i / sigma_i)^2 / 2)` first.
    ShaWeight,
}

impl std::str::FromStr for RankRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal-energy" => Ok(Self::DiagonalEnergy),
            "sha-weight" => Ok(Self::ShaWeight),
            other => Err(Error::Config(format!("unknown ranking rule `{other}`"))),
        }
    }
}

impl std::fmt::Display for RankRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::DiagonalEnergy => "diagonal-energy",
            Self::ShaWeight => "sha-weight",
        })
    }
}

/// Which subspace to diagonalize in.
#[derive(Clone, Debug, PartialEq)]
pub enum SubspaceSpec {
    /// Sampled oscillator eigenfunctions: the first `count` tuples of the quanta
    /// ordering, or every tuple up to `quanta_max` total quanta when `count` is unset.
    ShaVectors { quanta_max: u32, count: Option<usize> },
    /// The `count` best-ranked quasi-spin product states.
    Su2States { count: usize, rule: RankRule },
}

impl SubspaceSpec {
    pub fn quanta_set(&self, num_modes: usize) -> Option<QuantaSet> {
        match *self {
            Self::ShaVectors { count: Some(c), .. } => Some(QuantaSet::first(num_modes, c)),
            Self::ShaVectors { quanta_max, count: None } => Some(QuantaSet::with_cutoff(num_modes, quanta_max)),
            Self::Su2States { .. } => None,
        }
    }
}

/// Oscillator eigenfunctions sampled on the basis, each unit-normalized.
#[derive(Clone, Debug)]
pub struct SampledVectors<T: Real> {
    pub labels: Vec<Vec<u32>>,
    pub vectors: Vec<DVector<T>>,
    /// Tuples whose sampled vector vanished on the lattice.
    pub dropped: Vec<Vec<u32>>,
}

/// Samples each oscillator eigenfunction of `quanta` at every basis state.
///
/// Vectors whose norm before normalization is below `1e-300` are dropped.
pub fn sample_sha_vectors<T: Real>(modes: &NormalModes<T>, basis: &QuasispinBasis, quanta: &QuantaSet) -> Result<SampledVectors<T>> {
    if quanta.is_empty() {
        return Err(Error::EmptySubspace("no quanta tuples".into()));
    }
    if quanta.num_modes() != modes.num_modes() {
        return Err(Error::DimensionMismatch(format!(
            "quanta have {} modes, oscillator has {}",
            quanta.num_modes(),
            modes.num_modes()
        )));
    }
    let dim = basis.dim();
    let n_modes = modes.num_modes();
    let n_max = quanta.max_quanta();
    // tables[state][mode][n] = sigma^{-1/2} phi_n(y / sigma)
    let tables: Vec<Vec<Vec<T>>> = (0..dim)
        .map(|s| {
            let xi = modes.displacement_from_occupations(basis.occupations(s), basis.twice_j());
            let z = modes.scaled_coordinates(&xi);
            (0..n_modes)
                .map(|i| {
                    let inv = modes.sigma[i].sqrt().recip();
                    oscillator_table(n_max, z[i]).into_iter().map(|v| v * inv).collect()
                })
                .collect()
        })
        .collect();

    let floor = lit::<T>(1e-300);
    let mut out = SampledVectors { labels: Vec::new(), vectors: Vec::new(), dropped: Vec::new() };
    for nu in quanta.tuples() {
        let v = DVector::from_fn(dim, |s, _| {
            (0..n_modes).fold(T::one(), |acc, i| acc * tables[s][i][nu[i] as usize])
        });
        let norm = v.norm();
        if norm < floor || !norm.is_finite() {
            out.dropped.push(nu.clone());
        } else {
            out.labels.push(nu.clone());
            out.vectors.push(v / norm);
        }
    }
    Ok(out)
}

/// Orthonormal basis of the span of `vectors` by pivoted Gram-Schmidt.
///
/// At each step the remaining vector with the largest residual is taken;
/// vectors whose residual falls below `drop_tol` times their original norm are
/// discarded. Returned columns follow pivot order.
pub fn orthonormalize<T: Real>(vectors: &[DVector<T>], drop_tol: T) -> Result<DMatrix<T>> {
    if vectors.is_empty() {
        return Err(Error::EmptySubspace("no vectors to orthonormalize".into()));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    let original: Vec<T> = vectors.iter().map(|v| v.norm()).collect();
    let mut work: Vec<DVector<T>> = vectors.to_vec();
    let mut remaining: Vec<usize> = (0..vectors.len()).filter(|&i| original[i] > T::zero()).collect();
    let mut accepted: Vec<DVector<T>> = Vec::new();
    let near_tie = lit::<T>(1.0 - 1e-10);

    while !remaining.is_empty() {
        let ratio = |i: usize| work[i].norm() / original[i];
        let best = remaining.iter().fold(T::zero(), |a, &i| a.max(ratio(i)));
        if best < drop_tol {
            break;
        }
        let pos = remaining.iter().position(|&i| ratio(i) >= best * near_tie).expect("maximum exists");
        let pick = remaining.remove(pos);
        let mut q = work[pick].clone();
        // second pass against accepted vectors cleans up rounding
        for a in &accepted {
            let c = a.dot(&q);
            q.axpy(-c, a, T::one());
        }
        let n = q.norm();
        if n / original[pick] < drop_tol {
            continue;
        }
        q /= n;
        for &i in &remaining {
            let c = q.dot(&work[i]);
            work[i].axpy(-c, &q, T::one());
        }
        accepted.push(q);
    }
    if accepted.is_empty() {
        return Err(Error::EmptySubspace("every vector fell below the drop tolerance".into()));
    }
    Ok(DMatrix::from_columns(&accepted))
}

/// Indices of the `count` best-ranked basis states (ties broken by basis index), in rank order.
pub fn select_su2_states<T: Real>(
    model: &PairingModel<T>,
    basis: &QuasispinBasis,
    modes: Option<&NormalModes<T>>,
    rule: RankRule,
    count: usize,
) -> Result<Vec<usize>> {
    let dim = basis.dim();
    if count == 0 || count > dim {
        return Err(Error::InvalidArgument(format!("cannot select {count} of {dim} states")));
    }
    let keys: Vec<T> = match rule {
        RankRule::DiagonalEnergy => (0..dim).map(|s| diagonal_element(model, basis.occupations(s))).collect(),
        RankRule::ShaWeight => {
            let modes = modes.ok_or_else(|| Error::InvalidArgument("sha-weight ranking needs normal modes".into()))?;
            (0..dim)
                .map(|s| {
                    let xi = modes.displacement_from_occupations(basis.occupations(s), basis.twice_j());
                    // smaller exponent = larger Gaussian weight
                    modes.scaled_coordinates(&xi).iter().fold(T::zero(), |a, &z| a + z * z)
                })
                .collect()
        }
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    order.truncate(count);
    Ok(order)
}

/// Tunables for [`run_subspace`].
#[derive(Clone, Debug)]
pub struct SubspaceOptions<T> {
    pub drop_tol: T,
    pub shift: ShiftOptions<T>,
}

impl<T: Real> Default for SubspaceOptions<T> {
    fn default() -> Self {
        Self { drop_tol: lit(1e-8), shift: ShiftOptions::default() }
    }
}

/// Outcome of one subspace diagonalization.
#[derive(Clone, Debug)]
pub struct SubspaceRun<T: Real> {
    pub spectrum: SpectrumResult<T>,
    /// Vectors or states requested by the spec.
    pub requested: usize,
    /// Dimension of the orthonormal subspace actually diagonalized.
    pub used: usize,
    /// SHA data used to build or rank the subspace.
    pub sha: Option<ShaAnalysis<T>>,
    /// Quanta labels of the sampled vectors (oscillator subspaces only).
    pub labels: Vec<Vec<u32>>,
    /// Basis indices of selected states (state-selection subspaces only).
    pub states: Vec<usize>,
}

impl<T: Real> SubspaceRun<T> {
    /// `|<ritz_i | exact_i>|` for the first `n` pairs present in both results.
    pub fn overlaps_with(&self, exact: &SpectrumResult<T>, n: usize) -> Option<Vec<T>> {
        let a = self.spectrum.eigenvectors.as_ref()?;
        let b = exact.eigenvectors.as_ref()?;
        let n = n.min(a.ncols()).min(b.ncols());
        Some((0..n).map(|i| a.column(i).dot(&b.column(i)).abs()).collect())
    }
}

/// Builds the requested subspace and diagonalizes the Hamiltonian in it.
///
/// Oscillator subspaces need a valid SHA solution. State ranking by SHA weight
/// uses the least-squares equilibrium when the shift equations fail.
pub fn run_subspace<T: Real>(
    model: &PairingModel<T>,
    basis: &QuasispinBasis,
    matrix: &SymmetricOperatorMatrix<T>,
    spec: &SubspaceSpec,
    options: &SubspaceOptions<T>,
) -> Result<SubspaceRun<T>> {
    if matrix.dim() != basis.dim() {
        return Err(Error::DimensionMismatch("matrix and basis dimensions differ".into()));
    }
    match *spec {
        SubspaceSpec::ShaVectors { .. } => {
            let sha = ShaAnalysis::new(model, &options.shift)?;
            let quanta = spec.quanta_set(sha.modes.num_modes()).expect("oscillator spec");
            let sampled = sample_sha_vectors(&sha.modes, basis, &quanta)?;
            let q = orthonormalize(&sampled.vectors, options.drop_tol)?;
            let spectrum = ritz_diagonalize(matrix, &q)?;
            Ok(SubspaceRun { used: q.ncols(), requested: quanta.len(), spectrum, sha: Some(sha), labels: sampled.labels, states: Vec::new() })
        }
        SubspaceSpec::Su2States { count, rule } => {
            let sha = match rule {
                RankRule::DiagonalEnergy => None,
                RankRule::ShaWeight => Some(ShaAnalysis::with_fallback(model, &options.shift)?),
            };
            let states = select_su2_states(model, basis, sha.as_ref().map(|s| &s.modes), rule, count)?;
            let mut q = DMatrix::zeros(basis.dim(), states.len());
            for (c, &s) in states.iter().enumerate() {
                q[(s, c)] = T::one();
            }
            let spectrum = ritz_diagonalize(matrix, &q)?;
            Ok(SubspaceRun { used: states.len(), requested: count, spectrum, sha, labels: Vec::new(), states })
        }
    }
}
