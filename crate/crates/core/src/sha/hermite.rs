//! Physicists' Hermite polynomials and oscillator eigenfunctions.

use crate::scalar::{int, Real};

/// `H_n(x)` by the three-term recurrence `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite<T: Real>(n: u32, x: T) -> T {
    let two = int::<T>(2);
    let (mut prev, mut cur) = (T::one(), two * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = two * x * cur - two * int::<T>(k as i64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(2^n n! sqrt(pi))^{-1/2} H_n(z) exp(-z^2 / 2)`, unit-normalized on the real line.
///
/// Evaluated through the normalized recurrence, which neither overflows for
/// large `n` nor loses the Gaussian factor.
pub fn oscillator_function<T: Real>(n: u32, z: T) -> T {
    oscillator_table(n, z)[n as usize]
}

/// Values of [`oscillator_function`] for every order `0..=n_max`.
pub fn oscillator_table<T: Real>(n_max: u32, z: T) -> Vec<T> {
    let n_max = n_max as usize;
    let two = int::<T>(2);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(T::pi().sqrt().sqrt().recip() * (-z * z / two).exp());
    if n_max >= 1 {
        out.push(two.sqrt() * z * out[0]);
    }
    for n in 1..n_max {
        let nf = int::<T>(n as i64);
        let next = (two / (nf + T::one())).sqrt() * z * out[n] - (nf / (nf + T::one())).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}
