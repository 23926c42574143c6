use nalgebra::DMatrix;

use super::{closed_loop, is_hurwitz, Controller, CostWeights, SystemMode};
use crate::error::{Error, Result};

/// Time-domain cost: `Σ_j ∫₀^{t_f} z_jᵀ (Q + KᵀRK) z_j dt` over trajectories
/// from the canonical basis states, integrated by classical fixed-step RK4.
///
/// RK4 applied to the augmented system `ż = M z`, `ċ = zᵀ S z` is linear in
/// `z` and quadratic in the running cost, so one step is
/// `z ← Φ z`, `c ← c + zᵀ W z` for fixed matrices `Φ`, `W`. After `N` steps
/// from all basis states at once the accumulated cost is
/// `tr(Σ_{k<N} (Φᵏ)ᵀ W Φᵏ)`, which is evaluated by binary splitting of `N`
/// (`G_{a+b} = G_a + (Φᵃ)ᵀ G_b Φᵃ`). The result is identical to stepping
/// `N` times, up to rounding.
pub fn simulate_cost_oracle(
    mode: &SystemMode,
    k: &Controller,
    w: &CostWeights,
    t_f: f64,
    dt: f64,
) -> Result<f64> {
    if !(t_f > 0.0 && dt > 0.0 && t_f.is_finite() && dt.is_finite()) {
        return Err(Error::Precondition(format!(
            "t_f and dt must be positive (got t_f={t_f}, dt={dt})"
        )));
    }
    w.check_against(mode)?;
    let m = closed_loop(mode, k)?;
    if !is_hurwitz(&m)? {
        return Err(Error::Infeasible(format!(
            "gain {k} does not stabilize the mode"
        )));
    }
    let s = w.q() + k.gain().transpose() * w.r() * k.gain();
    let (phi, weight) = rk4_step_matrices(&m, &s, dt);
    let steps = (t_f / dt).round().max(1.0) as u64;
    Ok(accumulate(&phi, &weight, steps).trace())
}

/// One RK4 step as `(Φ, W)`.
fn rk4_step_matrices(m: &DMatrix<f64>, s: &DMatrix<f64>, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    // stage states as linear maps of z
    let z2 = &eye + m * (0.5 * h);
    let z3 = &eye + m * &z2 * (0.5 * h);
    let z4 = &eye + m * &z3 * h;
    let slope = m + m * &z2 * 2.0 + m * &z3 * 2.0 + m * &z4;
    let phi = &eye + slope * (h / 6.0);
    let quad = |a: &DMatrix<f64>| a.transpose() * s * a;
    let weight = (s + quad(&z2) * 2.0 + quad(&z3) * 2.0 + quad(&z4)) * (h / 6.0);
    (phi, weight)
}

fn accumulate(phi: &DMatrix<f64>, weight: &DMatrix<f64>, mut steps: u64) -> DMatrix<f64> {
    let n = phi.nrows();
    let mut total_phi = DMatrix::<f64>::identity(n, n);
    let mut total = DMatrix::<f64>::zeros(n, n);
    let mut block_phi = phi.clone();
    let mut block = weight.clone();
    while steps > 0 {
        if steps & 1 == 1 {
            total += total_phi.transpose() * &block * &total_phi;
            total_phi = &block_phi * total_phi;
        }
        steps >>= 1;
        if steps > 0 {
            block = &block + block_phi.transpose() * &block * &block_phi;
            block_phi = &block_phi * &block_phi;
        }
    }
    total
}
