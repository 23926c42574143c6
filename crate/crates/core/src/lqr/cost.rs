use nalgebra::DMatrix;

use super::{
    closed_loop, is_hurwitz, solve_lyapunov, Controller, CostValue, CostWeights, SystemMode,
};
use crate::error::{Error, Result};

/// Value, cost matrix and gain gradient at one stabilizing gain.
#[derive(Debug, Clone)]
pub struct CostEval {
    pub value: f64,
    /// Solution of `(A+BK)ᵀ P + P (A+BK) + Q + Kᵀ R K = 0`.
    pub p: DMatrix<f64>,
    /// `∇_K tr(P)`, m×n.
    pub gradient: DMatrix<f64>,
}

/// Infinite-horizon cost `tr(P)` of the closed loop `A + B K`.
///
/// `tr(P)` is the quadratic cost summed over the n canonical initial states.
/// Returns [`CostValue::Infeasible`] when `K` does not stabilize the mode.
pub fn cost(mode: &SystemMode, k: &Controller, w: &CostWeights) -> Result<CostValue> {
    w.check_against(mode)?;
    let m = closed_loop(mode, k)?;
    if !is_hurwitz(&m)? {
        return Ok(CostValue::Infeasible);
    }
    let p = solve_lyapunov(&m, &stage_weight(k, w))?;
    Ok(CostValue::Finite(p.trace()))
}

/// `∇_K tr(P) = 2 (R K + Bᵀ P) X` with `X` the closed-loop Gramian
/// `(A+BK) X + X (A+BK)ᵀ + I = 0`.
pub fn cost_gradient(mode: &SystemMode, k: &Controller, w: &CostWeights) -> Result<DMatrix<f64>> {
    Ok(cost_and_gradient(mode, k, w)?.gradient)
}

pub fn cost_and_gradient(mode: &SystemMode, k: &Controller, w: &CostWeights) -> Result<CostEval> {
    w.check_against(mode)?;
    let m = closed_loop(mode, k)?;
    if !is_hurwitz(&m)? {
        return Err(Error::Infeasible(format!(
            "gain {k} does not stabilize the mode"
        )));
    }
    let p = solve_lyapunov(&m, &stage_weight(k, w))?;
    let n = mode.state_dim();
    let x = solve_lyapunov(&m.transpose(), &DMatrix::identity(n, n))?;
    let gradient = (w.r() * k.gain() + mode.b().transpose() * &p) * x * 2.0;
    Ok(CostEval {
        value: p.trace(),
        p,
        gradient,
    })
}

fn stage_weight(k: &Controller, w: &CostWeights) -> DMatrix<f64> {
    let kg = k.gain();
    super::symmetrize(&(w.q() + kg.transpose() * w.r() * kg))
}
