use nalgebra::DMatrix;

use super::{
    solve_lyapunov, spectral_abscissa, symmetrize, Controller, CostWeights, SystemMode, EPS_STAB,
};
use crate::error::{Error, Result};

const MAX_SHIFTS: usize = 200;
const MAX_NEWTON: usize = 100;
const NEWTON_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-8;

/// Stabilizing solution of the continuous algebraic Riccati equation.
#[derive(Debug, Clone)]
pub struct CareSolution {
    pub p: DMatrix<f64>,
    /// `K* = -R⁻¹ Bᵀ P`, so that `u = K* z` is the optimal feedback.
    pub k_star: Controller,
}

/// Solves `Aᵀ P + P A - P B R⁻¹ Bᵀ P + Q = 0` for the stabilizing `P`.
///
/// Newton–Kleinman iteration needs a stabilizing seed. It is obtained by
/// continuation on a spectral shift: for `σ` above the spectral abscissa of
/// `A`, `K = 0` stabilizes `A - σI`; each converged shifted gain keeps
/// `A - σ'I + BK` Hurwitz for `σ' = (σ + α)/2`, with `α` the abscissa of
/// `A + BK`, until `K` stabilizes `A` itself. An unstabilizable pair makes
/// the shift stall above zero, which is reported as infeasible.
pub fn solve_care(mode: &SystemMode, w: &CostWeights) -> Result<CareSolution> {
    w.check_against(mode)?;
    let (a, b) = (mode.a(), mode.b());
    let n = mode.state_dim();
    let r_inv = w
        .r()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("R is not positive definite".into()))?
        .inverse();
    let eye = DMatrix::<f64>::identity(n, n);

    let mut sigma = spectral_abscissa(a)?.max(0.0) + 1.0;
    let mut k = DMatrix::zeros(mode.input_dim(), n);
    let mut solved = None;
    for _ in 0..MAX_SHIFTS {
        let shifted = a - &eye * sigma;
        let (p, k_next) = newton_kleinman(&shifted, b, w, &r_inv, k)?;
        k = k_next;
        if sigma == 0.0 {
            solved = Some(p);
            break;
        }
        let alpha = spectral_abscissa(&(a + b * &k))?;
        let next = if alpha < -EPS_STAB {
            0.0
        } else {
            0.5 * (sigma + alpha)
        };
        if sigma - next < 1e-12 * (1.0 + sigma) {
            return Err(Error::Infeasible(format!(
                "(A, B) appears not stabilizable: spectral shift stalled at {sigma:e}"
            )));
        }
        sigma = next;
    }
    let p = solved.ok_or_else(|| {
        Error::Infeasible("no stabilizing Riccati solution found within the shift budget".into())
    })?;

    let k_star = Controller::new(k)?;
    let residual = care_residual(mode, w, &p);
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "Riccati residual {residual:e} above tolerance"
        )));
    }
    if spectral_abscissa(&(a + b * k_star.gain()))? >= -EPS_STAB {
        return Err(Error::Infeasible(
            "optimal closed loop is not Hurwitz".into(),
        ));
    }
    Ok(CareSolution { p, k_star })
}

/// Kleinman's iteration from a gain that stabilizes `a`; every iterate stays stabilizing.
fn newton_kleinman(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    w: &CostWeights,
    r_inv: &DMatrix<f64>,
    mut k: DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let bt = b.transpose();
    let mut p = DMatrix::zeros(a.nrows(), a.nrows());
    for _ in 0..MAX_NEWTON {
        let closed = a + b * &k;
        let stage = symmetrize(&(w.q() + k.transpose() * w.r() * &k));
        p = solve_lyapunov(&closed, &stage)?;
        let k_next = -(r_inv * &bt * &p);
        let step = (&k_next - &k).norm();
        k = k_next;
        if step <= NEWTON_TOL * (1.0 + k.norm()) {
            break;
        }
    }
    // P consistent with the final gain
    let closed = a + b * &k;
    let stage = symmetrize(&(w.q() + k.transpose() * w.r() * &k));
    if let Ok(p_final) = solve_lyapunov(&closed, &stage) {
        p = p_final;
    }
    Ok((p, k))
}

/// Relative Riccati residual
/// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖_F / max(1, ‖Q‖_F + 2‖AᵀP‖_F + ‖PBR⁻¹BᵀP‖_F)`.
pub fn care_residual(mode: &SystemMode, w: &CostWeights, p: &DMatrix<f64>) -> f64 {
    let (a, b) = (mode.a(), mode.b());
    let r_inv = w
        .r()
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(w.input_dim(), w.input_dim(), f64::NAN));
    let atp = a.transpose() * p;
    let quad = p * b * r_inv * b.transpose() * p;
    let res = &atp + atp.transpose() - &quad + w.q();
    let scale = (w.q().norm() + 2.0 * atp.norm() + quad.norm()).max(1.0);
    res.norm() / scale
}
