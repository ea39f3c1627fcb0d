use num_complex::Complex;

use crate::numerics::{hermitian_solve, ComplexMatrix, Real};
use crate::{Error, Result};

/// Minimum-norm Tikhonov solution `x = A^H (A A^H + alpha I)^-1 y`.
///
/// Equivalent to `(A^H A + alpha I)^-1 A^H y`, but only factors an `M x M`
/// system, which is the small side for underdetermined problems.
pub fn tikhonov_recover<T: Real>(
    a: &ComplexMatrix<T>,
    y: &[Complex<T>],
    alpha: T,
) -> Result<Vec<Complex<T>>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Tikhonov alpha must be > 0, got {alpha}")));
    }
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "data has length {} but the matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let mut gram = a.matmul(&a.adjoint())?;
    // A A^H is Hermitian up to rounding; symmetrize so the check in the
    // Cholesky factorization sees exact structure
    let m = gram.rows();
    for i in 0..m {
        gram[(i, i)].im = T::zero();
        for j in i + 1..m {
            gram[(j, i)] = gram[(i, j)].conj();
        }
    }
    gram.add_to_diagonal(Complex::new(alpha, T::zero()));
    let z = hermitian_solve(&gram, &ComplexMatrix::from_column(y))?;
    a.adjoint_mul_vec(z.as_slice())
}
