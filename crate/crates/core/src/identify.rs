//! Inferring the realized mode from the revealed round cost.
//!
//! The realized cost `J(K, ω)` is compared against `Jᵢ(K)` for every mode;
//! `Jᵢ(K)` is the Lyapunov-equality value `tr(P)`, i.e. the infimum of
//! `tr(P)` subject to the strict inequality
//! `(Aᵢ+BᵢK)ᵀP + P(Aᵢ+BᵢK) + Q + KᵀRK ≺ 0`.

use crate::error::{Error, Result};
use crate::lqr::{cost, Controller, CostValue};
use crate::sim::SwitchedSystem;

/// Two smallest residuals closer than this are flagged as ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult {
    /// 0-based index of the identified mode.
    pub mode_index: usize,
    /// `|observed − J_mode_index|`.
    pub residual: f64,
    pub all_costs: Vec<CostValue>,
    /// The runner-up residual is within [`AMBIGUITY_TOL`] of the winner.
    pub ambiguous: bool,
}

/// `Jᵢ(K)` for every mode; `Infeasible` where `K` does not stabilize mode i.
pub fn mode_costs(system: &SwitchedSystem, k: &Controller) -> Result<Vec<CostValue>> {
    system
        .modes()
        .iter()
        .map(|mode| cost(mode, k, system.weights()))
        .collect()
}

/// Nearest finite mode cost to `observed`; ties go to the lowest index.
pub fn identify_realization(observed: f64, costs: &[CostValue]) -> Result<IdentificationResult> {
    let mut best: Option<(usize, f64)> = None;
    let mut runner_up = f64::INFINITY;
    for (i, c) in costs.iter().enumerate() {
        let Some(v) = c.value() else { continue };
        let r = (observed - v).abs();
        match best {
            Some((_, br)) if r >= br => runner_up = runner_up.min(r),
            Some((_, br)) => {
                runner_up = br;
                best = Some((i, r));
            }
            None => best = Some((i, r)),
        }
    }
    let (mode_index, residual) = best.ok_or_else(|| {
        Error::Infeasible("every mode cost is infeasible; cannot identify the realization".into())
    })?;
    Ok(IdentificationResult {
        mode_index,
        residual,
        all_costs: costs.to_vec(),
        ambiguous: runner_up - residual < AMBIGUITY_TOL,
    })
}
