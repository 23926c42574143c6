use nalgebra::{DMatrix, DVector};

use super::{is_hurwitz, symmetrize};
use crate::error::{Error, Result};

/// Solves `Mᵀ P + P M + S = 0` for Hurwitz `M`.
///
/// The equation is vectorized column-major as
/// `(I ⊗ Mᵀ + Mᵀ ⊗ I) vec(P) = -vec(S)` and solved by partially pivoted LU
/// with one step of iterative refinement. The result is symmetrized.
pub fn solve_lyapunov(m: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::dims(
            "solve_lyapunov::M",
            "non-empty square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if s.shape() != (n, n) {
        return Err(Error::dims(
            "solve_lyapunov::S",
            format!("{n}x{n}"),
            format!("{}x{}", s.nrows(), s.ncols()),
        ));
    }
    if !is_hurwitz(m)? {
        return Err(Error::Infeasible(format!(
            "Lyapunov operator is not Hurwitz: {m}"
        )));
    }

    let mt = m.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(&mt) + mt.kronecker(&eye);
    let rhs = -DVector::from_column_slice(s.as_slice());

    let lu = op.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Kronecker system in Lyapunov solve".into()))?;
    let correction = &rhs - &op * &x;
    if let Some(dx) = lu.solve(&correction) {
        x += dx;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite Lyapunov solution".into()));
    }
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, x.as_slice())))
}

/// Solves the dual equation `M X + X Mᵀ + S = 0` (controllability Gramian form).
pub fn solve_lyapunov_adjoint(m: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    solve_lyapunov(&m.transpose(), s)
}

/// `‖Mᵀ P + P M + S‖_F / (1 + ‖S‖_F)`.
pub fn lyapunov_residual(m: &DMatrix<f64>, s: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    (m.transpose() * p + p * m + s).norm() / (1.0 + s.norm())
}
