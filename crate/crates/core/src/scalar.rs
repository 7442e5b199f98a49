//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{DMatrix, RealField};
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`).
///
/// Arithmetic and elementary functions come from [`RealField`]; conversions go
/// through `num-traits`. The dense symmetric eigensolver is dispatched per
/// concrete type so that each precision uses a blocked LAPACK-class kernel.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Send + Sync + 'static
{
    /// Eigen-decomposition of a dense symmetric matrix, eigenvalues ascending.
    ///
    /// Only the lower triangle of `a` is read. When `want_vectors` is set the
    /// returned matrix holds unit-norm eigenvectors as columns.
    fn dense_symmetric_eigen(a: &DMatrix<Self>, want_vectors: bool) -> (Vec<Self>, Option<DMatrix<Self>>);

    /// Machine epsilon.
    fn epsilon() -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn dense_symmetric_eigen(a: &DMatrix<Self>, want_vectors: bool) -> (Vec<Self>, Option<DMatrix<Self>>) {
                let n = a.nrows();
                assert_eq!(n, a.ncols(), "dense_symmetric_eigen needs a square matrix");
                if n == 0 {
                    return (Vec::new(), want_vectors.then(|| DMatrix::zeros(0, 0)));
                }
                let m = faer::Mat::<$t>::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] });
                if want_vectors {
                    let evd = m.selfadjoint_eigendecomposition(faer::Side::Lower);
                    let s = evd.s().column_vector();
                    let u = evd.u();
                    let mut order: Vec<usize> = (0..n).collect();
                    order.sort_by(|&x, &y| s.read(x).total_cmp(&s.read(y)));
                    let values = order.iter().map(|&i| s.read(i)).collect();
                    let vectors = DMatrix::from_fn(n, n, |r, c| u.read(r, order[c]));
                    (values, Some(vectors))
                } else {
                    let mut values = m.selfadjoint_eigenvalues(faer::Side::Lower);
                    values.sort_by(|x, y| x.total_cmp(y));
                    (values, None)
                }
            }

            fn epsilon() -> Self {
                <$t>::EPSILON
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Converts an integer into `T`.
#[inline]
pub fn int<T: Real>(x: i64) -> T {
    T::from_i64(x).expect("integer representable in scalar type")
}

/// Converts `T` to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
