//! Pairing model definition and the fixed-pair-number quasi-spin basis.
//!
//! Quasi-spins are half-integers, so every `j` and `m` is stored as twice its
//! value. A level with quasi-spin `j` holds between 0 and `2j` pairs, and the
//! projection `m = n - j` grows by one with each added pair.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{int, Real};

/// Default cap on the number of basis states.
pub const DEFAULT_MAX_STATES: usize = 10_000_000;

/// One single-particle level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpec<T> {
    twice_j: u32,
    /// Single-particle energy.
    pub epsilon: T,
    /// Number of unpaired particles blocking the level.
    seniority: u32,
}

impl<T: Real> LevelSpec<T> {
    /// Level with quasi-spin `j` (a positive half-integer) and no unpaired particles.
    pub fn new(j: f64, epsilon: T) -> Result<Self> {
        Self::with_seniority(j, epsilon, 0)
    }

    pub fn with_seniority(j: f64, epsilon: T, seniority: u32) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice >= 1.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64) {
            return Err(Error::InvalidLevel {
                level: 0,
                reason: format!("quasi-spin {j} is not a positive half-integer"),
            });
        }
        Self::from_twice_j(twice as u32, epsilon, seniority)
    }

    pub fn from_twice_j(twice_j: u32, epsilon: T, seniority: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(Error::InvalidLevel { level: 0, reason: "quasi-spin must be positive".into() });
        }
        if seniority > twice_j {
            return Err(Error::InvalidLevel {
                level: 0,
                reason: format!("seniority {seniority} exceeds level capacity {twice_j}"),
            });
        }
        Ok(Self { twice_j, epsilon, seniority })
    }

    /// Twice the bare quasi-spin.
    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn seniority(&self) -> u32 {
        self.seniority
    }

    /// Twice the effective quasi-spin `j - seniority / 2`; also the pair capacity.
    pub fn twice_j_eff(&self) -> u32 {
        self.twice_j - self.seniority
    }

    pub fn j_eff(&self) -> T {
        int::<T>(self.twice_j_eff() as i64) / int(2)
    }
}

/// Multi-level pairing model with a fixed number of pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingModel<T: Real> {
    levels: Vec<LevelSpec<T>>,
    coupling: DMatrix<T>,
    pairs: u32,
    seniority_energy_offset: T,
}

impl<T: Real> PairingModel<T> {
    /// Validates the levels, the coupling matrix and the pair count.
    ///
    /// `coupling` must be square of size `levels.len()` and exactly symmetric.
    pub fn new(levels: Vec<LevelSpec<T>>, coupling: DMatrix<T>, pairs: u32) -> Result<Self> {
        let k = levels.len();
        if k == 0 {
            return Err(Error::DimensionMismatch("model needs at least one level".into()));
        }
        if coupling.nrows() != k || coupling.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "coupling matrix is {}x{} but there are {k} levels",
                coupling.nrows(),
                coupling.ncols()
            )));
        }
        for (p, level) in levels.iter().enumerate() {
            if level.twice_j == 0 || level.seniority > level.twice_j {
                return Err(Error::InvalidLevel { level: p, reason: "inconsistent quasi-spin".into() });
            }
            if !level.epsilon.is_finite() {
                return Err(Error::InvalidLevel { level: p, reason: "energy is not finite".into() });
            }
        }
        for r in 0..k {
            for c in 0..k {
                if !coupling[(r, c)].is_finite() {
                    return Err(Error::DimensionMismatch(format!("coupling ({r}, {c}) is not finite")));
                }
                if coupling[(r, c)] != coupling[(c, r)] {
                    return Err(Error::NonSymmetricCoupling { row: r.min(c), col: r.max(c) });
                }
            }
        }
        let max: u32 = levels.iter().map(LevelSpec::twice_j_eff).sum();
        if pairs > max {
            return Err(Error::PairCountOutOfRange { pairs, max });
        }
        let seniority_energy_offset = levels
            .iter()
            .fold(T::zero(), |acc, l| acc + int::<T>(l.seniority as i64) * l.epsilon);
        Ok(Self { levels, coupling, pairs, seniority_energy_offset })
    }

    /// Number of levels `k`.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[LevelSpec<T>] {
        &self.levels
    }

    pub fn level(&self, p: usize) -> &LevelSpec<T> {
        &self.levels[p]
    }

    pub fn coupling(&self) -> &DMatrix<T> {
        &self.coupling
    }

    pub fn pairs(&self) -> u32 {
        self.pairs
    }

    /// Maximum number of pairs, `sum_p 2 j_eff,p`.
    pub fn max_pairs(&self) -> u32 {
        self.levels.iter().map(LevelSpec::twice_j_eff).sum()
    }

    /// Energy carried by unpaired particles, `sum_p seniority_p * epsilon_p`.
    pub fn seniority_energy_offset(&self) -> T {
        self.seniority_energy_offset
    }

    pub fn epsilons(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.epsilon).collect()
    }

    pub fn j_effs(&self) -> Vec<T> {
        self.levels.iter().map(LevelSpec::j_eff).collect()
    }

    pub fn twice_j_effs(&self) -> Vec<u32> {
        self.levels.iter().map(LevelSpec::twice_j_eff).collect()
    }

    /// Same model with every energy scale (`epsilon` and `G`) multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for l in &mut out.levels {
            l.epsilon *= c;
        }
        out.coupling *= c;
        out.seniority_energy_offset *= c;
        out
    }

    /// Same model with a different pair count.
    pub fn with_pairs(&self, pairs: u32) -> Result<Self> {
        Self::new(self.levels.clone(), self.coupling.clone(), pairs)
    }

    /// Same model with a different coupling matrix.
    pub fn with_coupling(&self, coupling: DMatrix<T>) -> Result<Self> {
        Self::new(self.levels.clone(), coupling, self.pairs)
    }

    /// Reorders levels: new level `i` is old level `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let k = self.num_levels();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        let levels = perm.iter().map(|&p| self.levels[p].clone()).collect();
        let coupling = DMatrix::from_fn(k, k, |r, c| self.coupling[(perm[r], perm[c])]);
        Self::new(levels, coupling, self.pairs)
    }

    /// Converts every parameter to another scalar type.
    pub fn cast<U: Real>(&self) -> PairingModel<U> {
        let conv = |x: T| U::from_f64(x.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::zero);
        PairingModel {
            levels: self
                .levels
                .iter()
                .map(|l| LevelSpec { twice_j: l.twice_j, epsilon: conv(l.epsilon), seniority: l.seniority })
                .collect(),
            coupling: self.coupling.map(conv),
            pairs: self.pairs,
            seniority_energy_offset: conv(self.seniority_energy_offset),
        }
    }
}

/// Builds and validates a model from levels, couplings and a pair count.
pub fn build_model<T: Real>(levels: Vec<LevelSpec<T>>, coupling: DMatrix<T>, pairs: u32) -> Result<PairingModel<T>> {
    PairingModel::new(levels, coupling, pairs)
}

/// Couplings `G_pq = (2 - |eps_p - eps_q| / 10) g`, shrinking linearly with the level gap.
pub fn coupling_from_rule<T: Real>(g: T, epsilons: &[T]) -> DMatrix<T> {
    let k = epsilons.len();
    let two = int::<T>(2);
    let tenth = int::<T>(1) / int(10);
    DMatrix::from_fn(k, k, |p, q| (two - tenth * (epsilons[p] - epsilons[q]).abs()) * g)
}

/// A product state `|m_1 ... m_k>`, stored as twice-m values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub twice_m: Vec<i32>,
}

impl BasisState {
    pub fn m<T: Real>(&self, p: usize) -> T {
        int::<T>(self.twice_m[p] as i64) / int(2)
    }
}

/// Lexicographically ordered enumeration of all states with the model's pair count.
#[derive(Clone, Debug)]
pub struct QuasispinBasis {
    twice_j: Vec<u32>,
    pairs: u32,
    occupations: Vec<u32>,
    /// `completions[p][r]`: number of ways levels `p..k` can hold `r` pairs.
    completions: Vec<Vec<u64>>,
}

impl QuasispinBasis {
    /// Enumerates the basis with the default state cap.
    pub fn new<T: Real>(model: &PairingModel<T>) -> Result<Self> {
        Self::with_cap(model, DEFAULT_MAX_STATES)
    }

    pub fn with_cap<T: Real>(model: &PairingModel<T>, max_states: usize) -> Result<Self> {
        let twice_j = model.twice_j_effs();
        let pairs = model.pairs();
        let k = twice_j.len();

        let mut completions = vec![vec![0u64; pairs as usize + 1]; k + 1];
        completions[k][0] = 1;
        for p in (0..k).rev() {
            for r in 0..=pairs as usize {
                let cap = (twice_j[p] as usize).min(r);
                completions[p][r] = (0..=cap).fold(0u64, |acc, n| acc.saturating_add(completions[p + 1][r - n]));
            }
        }
        let dim = completions[0][pairs as usize];
        if dim as u128 > max_states as u128 || dim == u64::MAX {
            return Err(Error::BasisTooLarge { dim: dim as u128, cap: max_states });
        }

        let dim = dim as usize;
        let mut occupations = Vec::with_capacity(dim * k);
        let mut current = vec![0u32; k];
        fill(&twice_j, &completions, 0, pairs, &mut current, &mut occupations);
        debug_assert_eq!(occupations.len(), dim * k);
        Ok(Self { twice_j, pairs, occupations, completions })
    }

    pub fn dim(&self) -> usize {
        if self.twice_j.is_empty() {
            0
        } else {
            self.occupations.len() / self.twice_j.len()
        }
    }

    pub fn num_levels(&self) -> usize {
        self.twice_j.len()
    }

    pub fn pairs(&self) -> u32 {
        self.pairs
    }

    /// Pair occupations `n_p = m_p + j_p` of state `i`.
    pub fn occupations(&self, i: usize) -> &[u32] {
        let k = self.twice_j.len();
        &self.occupations[i * k..(i + 1) * k]
    }

    pub fn state(&self, i: usize) -> BasisState {
        let twice_m = self
            .occupations(i)
            .iter()
            .zip(&self.twice_j)
            .map(|(&n, &tj)| 2 * n as i32 - tj as i32)
            .collect();
        BasisState { twice_m }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(move |i| self.state(i))
    }

    /// Position of the state with these occupations, if it belongs to the basis.
    pub fn index_of_occupations(&self, occ: &[u32]) -> Option<usize> {
        if occ.len() != self.twice_j.len() {
            return None;
        }
        let mut remaining = self.pairs;
        let mut index = 0u64;
        for (p, &n) in occ.iter().enumerate() {
            if n > self.twice_j[p] || n > remaining {
                return None;
            }
            for smaller in 0..n {
                index += self.completions[p + 1][(remaining - smaller) as usize];
            }
            remaining -= n;
        }
        (remaining == 0).then_some(index as usize)
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        if state.twice_m.len() != self.twice_j.len() {
            return None;
        }
        let mut occ = Vec::with_capacity(state.twice_m.len());
        for (&tm, &tj) in state.twice_m.iter().zip(&self.twice_j) {
            let twice_n = tm + tj as i32;
            if twice_n < 0 || twice_n % 2 != 0 {
                return None;
            }
            occ.push((twice_n / 2) as u32);
        }
        self.index_of_occupations(&occ)
    }

    pub fn twice_j(&self) -> &[u32] {
        &self.twice_j
    }
}

fn fill(twice_j: &[u32], completions: &[Vec<u64>], p: usize, remaining: u32, current: &mut [u32], out: &mut Vec<u32>) {
    let k = twice_j.len();
    if p == k {
        if remaining == 0 {
            out.extend_from_slice(current);
        }
        return;
    }
    for n in 0..=twice_j[p].min(remaining) {
        if completions[p + 1][(remaining - n) as usize] == 0 {
            continue;
        }
        current[p] = n;
        fill(twice_j, completions, p + 1, remaining - n, current, out);
    }
}

/// Enumerates the basis of `model`.
pub fn enumerate_basis<T: Real>(model: &PairingModel<T>) -> Result<QuasispinBasis> {
    QuasispinBasis::new(model)
}
