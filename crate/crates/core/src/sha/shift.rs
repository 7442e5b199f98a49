//! Equilibrium point of the oscillator potential on the fixed-pair-number hyperplane.
//!
//! The shift functions `D_p(x)` are the gradient of the classical energy with
//! respect to `xi_p = j_p x_p`. On the hyperplane `sum_p j_p (1 + x_p) = N` the
//! linear term vanishes exactly when every `D_p` takes a common value `2 lambda`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::PairingModel;
use crate::scalar::{int, lit, Real};

#[derive(Clone, Debug)]
pub struct ShiftOptions<T> {
    /// Residual target, relative to the magnitude of the shift functions.
    pub tol: T,
    pub max_iter: usize,
    /// Random interior starting points tried after the uniform-occupancy guess fails.
    pub restarts: usize,
    pub seed: u64,
}

impl<T: Real> Default for ShiftOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-12), max_iter: 200, restarts: 20, seed: 0x5817 }
    }
}

/// Solution of the shift equations.
#[derive(Clone, Debug)]
pub struct ShiftSolution<T: Real> {
    /// Equilibrium `x_op`, one per level, each in `(-1, 1)`.
    pub x0: Vec<T>,
    /// Common value `D_p / 2` at the solution.
    pub lambda: T,
    /// `1 - x_op^2`.
    pub kappa: Vec<T>,
    /// `T_pq = G_pq j_p j_q sqrt(kappa_p kappa_q)`.
    pub t: DMatrix<T>,
    /// Infinity norm of the residual `(D_p - 2 lambda, sum_p j_p (1 + x_p) - N)`.
    pub residual: T,
    pub iterations: usize,
    /// Set when the point comes from the least-squares fallback instead of an exact solve.
    pub fallback: bool,
}

impl<T: Real> ShiftSolution<T> {
    /// Evaluates the derived tensors at a given point; `lambda` is the mean of `D_p / 2`.
    pub fn at_point(model: &PairingModel<T>, x0: Vec<T>) -> Self {
        let d = shift_functions(model, &x0);
        let k = d.len();
        let lambda = d.iter().fold(T::zero(), |a, &b| a + b) / int::<T>(2 * k as i64);
        let kappa = x0.iter().map(|&x| T::one() - x * x).collect::<Vec<_>>();
        let t = pair_tensor(model, &kappa);
        let mut residual = constraint_residual(model, &x0).abs();
        for &dp in &d {
            residual = residual.max((dp - lambda * int(2)).abs());
        }
        Self { x0, lambda, kappa, t, residual, iterations: 0, fallback: false }
    }

    /// Mean fractional occupancy `(1 + x_op) / 2` of each level.
    pub fn occupancies(&self) -> Vec<T> {
        self.x0.iter().map(|&x| (T::one() + x) / int(2)).collect()
    }
}

fn pair_tensor<T: Real>(model: &PairingModel<T>, kappa: &[T]) -> DMatrix<T> {
    let j = model.j_effs();
    let g = model.coupling();
    let k = j.len();
    DMatrix::from_fn(k, k, |p, q| {
        let (p, q) = (p.min(q), p.max(q));
        g[(p, q)] * j[p] * j[q] * (kappa[p] * kappa[q]).sqrt()
    })
}

/// `D_p = 2 eps_p - G_pp + (2 x_p / (j_p kappa_p)) sum_r T_pr`.
pub fn shift_functions<T: Real>(model: &PairingModel<T>, x: &[T]) -> Vec<T> {
    let j = model.j_effs();
    let g = model.coupling();
    let root: Vec<T> = x.iter().map(|&v| (T::one() - v * v).sqrt()).collect();
    (0..j.len())
        .map(|p| {
            // sum_r T_pr / (j_p kappa_p) = sum_r G_pr j_r sqrt(kappa_r) / sqrt(kappa_p)
            let s = (0..j.len()).fold(T::zero(), |acc, r| acc + g[(p, r)] * j[r] * root[r]);
            int::<T>(2) * model.level(p).epsilon - g[(p, p)] + int::<T>(2) * x[p] / root[p] * s
        })
        .collect()
}

fn constraint_residual<T: Real>(model: &PairingModel<T>, x: &[T]) -> T {
    let j = model.j_effs();
    let filled = x.iter().zip(&j).fold(T::zero(), |acc, (&xp, &jp)| acc + jp * (T::one() + xp));
    filled - int(model.pairs() as i64)
}

/// Residual vector of the full system and its magnitude scale.
fn residual<T: Real>(model: &PairingModel<T>, x: &[T], lambda: T) -> (DVector<T>, T) {
    let k = x.len();
    let d = shift_functions(model, x);
    let mut r = DVector::zeros(k + 1);
    let mut scale = T::one();
    for p in 0..k {
        r[p] = d[p] - lambda * int(2);
        scale = scale.max(d[p].abs());
    }
    r[k] = constraint_residual(model, x);
    (r, scale.max(int(model.max_pairs() as i64)))
}

/// Jacobian of the residual with respect to `(x_1..x_k, lambda)`.
fn jacobian<T: Real>(model: &PairingModel<T>, x: &[T]) -> DMatrix<T> {
    let j = model.j_effs();
    let g = model.coupling();
    let k = x.len();
    let two = int::<T>(2);
    let root: Vec<T> = x.iter().map(|&v| (T::one() - v * v).sqrt()).collect();
    let mut jac = DMatrix::zeros(k + 1, k + 1);
    for p in 0..k {
        let s = (0..k).fold(T::zero(), |acc, r| acc + g[(p, r)] * j[r] * root[r]);
        for q in 0..k {
            jac[(p, q)] = -two * x[p] * x[q] / (root[p] * root[q]) * g[(p, q)] * j[q];
        }
        jac[(p, p)] += two * s / (root[p] * root[p] * root[p]);
        jac[(p, k)] = -two;
        jac[(k, p)] = j[p];
    }
    jac
}

fn interior<T: Real>(x: &[T]) -> bool {
    x.iter().all(|&v| v > -T::one() && v < T::one())
}

/// Damped Newton iteration from one starting point.
fn newton<T: Real>(model: &PairingModel<T>, start: Vec<T>, options: &ShiftOptions<T>) -> Result<ShiftSolution<T>> {
    let k = start.len();
    if !interior(&start) {
        return Err(Error::InvalidRegime("starting point on the boundary of (-1, 1)".into()));
    }
    let mut x = start;
    let d = shift_functions(model, &x);
    let mut lambda = d.iter().fold(T::zero(), |a, &b| a + b) / int::<T>(2 * k as i64);
    let min_step = lit::<T>(1e-12);
    let half = lit::<T>(0.5);

    for it in 0..=options.max_iter {
        let (r, scale) = residual(model, &x, lambda);
        let rmax = r.amax();
        if !rmax.is_finite() {
            return Err(Error::InvalidRegime("shift functions are not finite".into()));
        }
        if rmax <= options.tol * scale {
            if !interior(&x) {
                return Err(Error::InvalidRegime("solution on the boundary of (-1, 1)".into()));
            }
            let mut sol = ShiftSolution::at_point(model, x);
            sol.lambda = lambda;
            sol.residual = rmax;
            sol.iterations = it;
            return Ok(sol);
        }
        if it == options.max_iter {
            break;
        }
        let step = jacobian(model, &x)
            .lu()
            .solve(&(-&r))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::InvalidRegime("singular Jacobian of the shift equations".into()))?;

        let rnorm = r.norm();
        let mut t = T::one();
        loop {
            let trial: Vec<T> = (0..k).map(|p| x[p] + t * step[p]).collect();
            if interior(&trial) {
                let (rt, _) = residual(model, &trial, lambda + t * step[k]);
                if rt.norm() <= (T::one() - lit::<T>(1e-4) * t) * rnorm {
                    x = trial;
                    lambda += t * step[k];
                    break;
                }
            }
            t *= half;
            if t < min_step {
                return Err(Error::NonConvergence(format!("line search stalled at iteration {it}")));
            }
        }
    }
    Err(Error::NonConvergence(format!("shift equations not solved in {} iterations", options.max_iter)))
}

/// Uniform fractional occupancy `x_p = N / sum_q j_q - 1`.
pub fn uniform_guess<T: Real>(model: &PairingModel<T>) -> Vec<T> {
    let total = model.j_effs().iter().fold(T::zero(), |a, &b| a + b);
    let x = int::<T>(model.pairs() as i64) / total - T::one();
    vec![x; model.num_levels()]
}

/// Random point `x_p = tanh(u_p + c)` with `c` chosen to satisfy the pair-number constraint.
fn random_guess<T: Real>(model: &PairingModel<T>, rng: &mut ChaCha8Rng) -> Vec<T> {
    let u: Vec<T> = (0..model.num_levels()).map(|_| lit(rng.gen_range(-2.0..2.0))).collect();
    let at = |c: T| u.iter().map(|&v| (v + c).tanh()).collect::<Vec<_>>();
    let (mut lo, mut hi) = (lit::<T>(-40.0), lit::<T>(40.0));
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if constraint_residual(model, &at(mid)) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at((lo + hi) * lit(0.5))
}

/// Solves `D_p(x) = 2 lambda` for all `p` together with `sum_p j_p (1 + x_p) = N`.
pub fn solve_shifts<T: Real>(model: &PairingModel<T>, options: &ShiftOptions<T>) -> Result<ShiftSolution<T>> {
    if model.j_effs().iter().any(|&j| j <= T::zero()) {
        return Err(Error::InvalidRegime("a level has no pair capacity".into()));
    }
    if model.pairs() == 0 || model.pairs() == model.max_pairs() {
        return Err(Error::InvalidRegime("pair number leaves no interior equilibrium".into()));
    }
    let first = match newton(model, uniform_guess(model), options) {
        Ok(sol) => return Ok(sol),
        Err(e) => e,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..options.restarts {
        if let Ok(sol) = newton(model, random_guess(model, &mut rng), options) {
            return Ok(sol);
        }
    }
    Err(first)
}

/// Point on the constraint hyperplane minimizing `sum_p (D_p - mean D)^2`.
///
/// Levenberg-Marquardt from the uniform-occupancy guess, restricted to
/// directions that preserve the pair number. Used when [`solve_shifts`] fails.
pub fn least_squares_shifts<T: Real>(model: &PairingModel<T>, options: &ShiftOptions<T>) -> Result<ShiftSolution<T>> {
    let k = model.num_levels();
    let mut x = uniform_guess(model);
    if !interior(&x) {
        return Err(Error::InvalidRegime("pair number leaves no interior point".into()));
    }
    if k == 1 {
        let mut s = ShiftSolution::at_point(model, x);
        s.fallback = true;
        return Ok(s);
    }
    let j = model.j_effs();
    // directions w with sum_p j_p w_p = 0: w_i = e_i / j_i - e_{k-1} / j_{k-1}
    let dirs = DMatrix::from_fn(k, k - 1, |p, i| {
        if p == i {
            T::one() / j[p]
        } else if p == k - 1 {
            -T::one() / j[p]
        } else {
            T::zero()
        }
    });
    let centered = |x: &[T]| {
        let d = shift_functions(model, x);
        let mean = d.iter().fold(T::zero(), |a, &b| a + b) / int::<T>(k as i64);
        DVector::from_iterator(k, d.into_iter().map(|v| v - mean))
    };
    let center = DMatrix::from_fn(k, k, |p, q| if p == q { T::one() } else { T::zero() } - T::one() / int::<T>(k as i64));
    let mut mu = lit::<T>(1e-3);
    let mut iterations = 0;
    for it in 0..options.max_iter {
        iterations = it;
        let r = centered(&x);
        let jd = jacobian(model, &x).view((0, 0), (k, k)).into_owned();
        let jr = &center * jd * &dirs;
        let grad = jr.transpose() * &r;
        if grad.amax() <= options.tol * (T::one() + r.norm()) {
            break;
        }
        let normal = jr.transpose() * &jr;
        let mut improved = false;
        for _ in 0..60 {
            let mut sys = normal.clone();
            for i in 0..k - 1 {
                sys[(i, i)] += mu * (T::one() + normal[(i, i)]);
            }
            let Some(delta) = sys.cholesky().map(|c| c.solve(&(-&grad))) else {
                mu *= int(10);
                continue;
            };
            let step = &dirs * delta;
            let trial: Vec<T> = (0..k).map(|p| x[p] + step[p]).collect();
            if interior(&trial) && centered(&trial).norm() < r.norm() {
                x = trial;
                mu = (mu / int(3)).max(lit(1e-12));
                improved = true;
                break;
            }
            mu *= int(10);
        }
        if !improved {
            break;
        }
    }
    let mut s = ShiftSolution::at_point(model, x);
    s.iterations = iterations;
    s.fallback = true;
    Ok(s)
}
