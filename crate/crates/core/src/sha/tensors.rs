use nalgebra::DMatrix;

use crate::model::PairingModel;
use crate::scalar::{int, Real};
use crate::sha::shift::{shift_functions, ShiftSolution};

/// Coefficients of the bilinear oscillator Hamiltonian
/// `sum_pq [-d_p A_pq d_q + xi_p B_pq xi_q] + sum_p D_p xi_p + E` in `xi_p = m_p - j_p x_op`.
#[derive(Clone, Debug)]
pub struct OscillatorTensors<T: Real> {
    /// Inverse-mass tensor.
    pub a: DMatrix<T>,
    /// Spring-constant tensor.
    pub b: DMatrix<T>,
    /// Shift functions at the expansion point.
    pub d: Vec<T>,
    /// Constant term (classical energy at the expansion point plus the seniority offset).
    pub e: T,
    /// `j_p x_op`: the expansion point in `m` coordinates.
    pub origin: Vec<T>,
}

pub fn build_tensors<T: Real>(model: &PairingModel<T>, shift: &ShiftSolution<T>) -> OscillatorTensors<T> {
    let k = model.num_levels();
    let j = model.j_effs();
    let g = model.coupling();
    let x = &shift.x0;
    let kappa = &shift.kappa;
    let t = &shift.t;
    let row_sums: Vec<T> = (0..k).map(|p| t.row(p).sum()).collect();

    let a = DMatrix::from_fn(k, k, |p, q| if p == q { row_sums[p] - t[(p, q)] } else { -t[(p, q)] });
    let b = DMatrix::from_fn(k, k, |p, q| {
        let (p, q) = (p.min(q), p.max(q));
        let cross = t[(p, q)] * x[p] * x[q] / (j[p] * j[q] * kappa[p] * kappa[q]);
        if p == q {
            row_sums[p] / (j[p] * j[p] * kappa[p] * kappa[p]) - cross
        } else {
            -cross
        }
    });
    let d = shift_functions(model, x);
    let mut e = model.seniority_energy_offset() - t.sum();
    for p in 0..k {
        e += j[p] * (int::<T>(2) * model.level(p).epsilon - g[(p, p)]) * (T::one() + x[p]);
    }
    let origin = (0..k).map(|p| j[p] * x[p]).collect();
    OscillatorTensors { a, b, d, e, origin }
}
