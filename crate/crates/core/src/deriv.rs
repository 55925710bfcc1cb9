//! Finite-difference derivatives used as independent slope oracles.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};
use crate::model::ParametricModel;

/// Default step for central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Richardson-extrapolated central difference, `O(h⁴)`.
///
/// Combines `D(h) = (f(x+h) - f(x-h)) / 2h` and `D(h/2)` as
/// `(4 D(h/2) - D(h)) / 3`.
pub fn fd_derivative(mut f: impl FnMut(f64) -> f64, x0: f64, h: f64) -> Result<f64> {
    try_fd_derivative(|x| Ok(f(x)), x0, h)
}

/// As [`fd_derivative`] for fallible functions.
pub fn try_fd_derivative(mut f: impl FnMut(f64) -> Result<f64>, x0: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteFunction { at: x, value: y })
        }
    };
    let coarse = (eval(x0 + h)? - eval(x0 - h)?) / (2.0 * h);
    let half = 0.5 * h;
    let fine = (eval(x0 + half)? - eval(x0 - half)?) / (2.0 * half);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Richardson-extrapolated central difference of a vector-valued function.
pub fn try_fd_vector_derivative(
    mut f: impl FnMut(f64) -> Result<Vec<f64>>,
    x0: f64,
    h: f64,
) -> Result<Vec<f64>> {
    check_step(h)?;
    let half = 0.5 * h;
    let (p1, m1) = (f(x0 + h)?, f(x0 - h)?);
    let (p2, m2) = (f(x0 + half)?, f(x0 - half)?);
    Ok((0..p1.len())
        .map(|i| {
            let coarse = (p1[i] - m1[i]) / (2.0 * h);
            let fine = (p2[i] - m2[i]) / (2.0 * half);
            (4.0 * fine - coarse) / 3.0
        })
        .collect())
}

/// Entrywise central difference `(H(λ+h) - H(λ-h)) / 2h`.
pub fn fd_matrix_derivative<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    h: f64,
) -> Result<SymmetricMatrix> {
    check_step(h)?;
    let domain = model.domain();
    domain.check(lambda - h)?;
    domain.check(lambda + h)?;
    let plus = model.hamiltonian(lambda + h)?;
    let minus = model.hamiltonian(lambda - h)?;
    let n = plus.dim();
    let scale = 1.0 / (2.0 * h);
    let diff = Matrix::from_fn(n, n, |i, j| (plus[(i, j)] - minus[(i, j)]) * scale);
    SymmetricMatrix::new(diff)
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::BadStep(h))
    }
}
