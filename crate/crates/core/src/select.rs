//! Optimistic controller selection and the static comparison controllers.
//!
//! The selection problem is `min_{θ ∈ Θ} min_{K ∈ 𝒞} Σ θᵢ Jᵢ(K)`, solved by
//! alternating the exact θ-step ([`optimistic_theta`]) with a projected-free
//! gradient descent on `K`. The stabilizing set `𝒞` means stabilizing *every*
//! mode, so identification always has finite costs to compare against.
//! Trial gains outside `𝒞` score `+∞` and are rejected by the line search.

use nalgebra::DMatrix;

use crate::belief::{
    argmin_lowest_index, confidence_set, in_simplex, optimistic_theta, BeliefState,
};
use crate::error::{Error, Result};
use crate::identify::mode_costs;
use crate::lqr::{cost_and_gradient, Controller, CostValue};
use crate::sim::SwitchedSystem;

/// Knobs for the descent and alternation loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub max_outer_iters: usize,
    /// Absolute objective decrease below which alternation stops.
    pub outer_tol: f64,
    pub max_inner_iters: usize,
    /// Frobenius norm of the gain gradient at which descent stops.
    pub grad_tol: f64,
    pub backtrack_shrink: f64,
    pub armijo_c: f64,
    pub init_step: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 50,
            outer_tol: 1e-8,
            max_inner_iters: 500,
            grad_tol: 1e-6,
            backtrack_shrink: 0.5,
            armijo_c: 1e-4,
            init_step: 1.0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("outer_tol", self.outer_tol),
            ("grad_tol", self.grad_tol),
            ("armijo_c", self.armijo_c),
            ("init_step", self.init_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::Precondition(
                "iteration limits must be positive".into(),
            ));
        }
        if !(self.backtrack_shrink > 0.0 && self.backtrack_shrink < 1.0) {
            return Err(Error::Precondition(format!(
                "backtrack_shrink must lie in (0, 1), got {}",
                self.backtrack_shrink
            )));
        }
        Ok(())
    }
}

/// Outcome of one gain descent.
#[derive(Debug, Clone)]
pub struct DescentReport {
    pub k: Controller,
    pub objective: f64,
    pub iterations: usize,
    /// Gradient norm at the returned gain.
    pub grad_norm: f64,
    /// Stopped because the gradient norm reached `grad_tol`.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub k: Controller,
    /// The optimistic distribution paired with `k`.
    pub theta_opt: Vec<f64>,
    /// `Σ theta_opt_i · cost(mode_i, k)`.
    pub objective: f64,
    pub outer_iters: usize,
    pub converged: bool,
    /// Objective after initialization and after every half-step.
    pub trace: Vec<f64>,
}

/// `Σ θᵢ cost(modeᵢ, K)`; `Infeasible` unless `K` stabilizes every mode.
pub fn mixture_cost(system: &SwitchedSystem, theta: &[f64], k: &Controller) -> Result<CostValue> {
    check_theta(system, theta)?;
    let costs = mode_costs(system, k)?;
    Ok(weighted(theta, &costs))
}

fn weighted(theta: &[f64], costs: &[CostValue]) -> CostValue {
    if costs.iter().any(|c| !c.is_finite()) {
        return CostValue::Infeasible;
    }
    CostValue::Finite(
        theta
            .iter()
            .zip(costs)
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, c)| t * c.as_f64())
            .sum(),
    )
}

fn mixture_gradient(
    system: &SwitchedSystem,
    theta: &[f64],
    k: &Controller,
) -> Result<DMatrix<f64>> {
    let mut grad = DMatrix::zeros(system.input_dim(), system.state_dim());
    for (mode, &t) in system.modes().iter().zip(theta) {
        if t > 0.0 {
            grad += cost_and_gradient(mode, k, system.weights())?.gradient * t;
        }
    }
    Ok(grad)
}

fn check_theta(system: &SwitchedSystem, theta: &[f64]) -> Result<()> {
    if theta.len() != system.num_modes() {
        return Err(Error::dims("theta", system.num_modes(), theta.len()));
    }
    if !in_simplex(theta) {
        return Err(Error::Precondition(format!(
            "theta {theta:?} is not in the simplex"
        )));
    }
    Ok(())
}

/// Gradient descent on the mixture cost from a gain in `𝒞`.
pub fn minimize_mixture(
    system: &SwitchedSystem,
    theta: &[f64],
    k_init: &Controller,
    cfg: &SelectionConfig,
) -> Result<Controller> {
    Ok(minimize_mixture_report(system, theta, k_init, cfg)?.k)
}

pub fn minimize_mixture_report(
    system: &SwitchedSystem,
    theta: &[f64],
    k_init: &Controller,
    cfg: &SelectionConfig,
) -> Result<DescentReport> {
    check_theta(system, theta)?;
    descend(
        k_init,
        cfg,
        |k| Ok(mixture_cost(system, theta, k)?.as_f64()),
        |k| mixture_gradient(system, theta, k),
    )
}

/// Armijo-backtracked descent along `-direction`. `objective` returns `+∞`
/// outside the feasible set.
fn descend(
    k_init: &Controller,
    cfg: &SelectionConfig,
    objective: impl Fn(&Controller) -> Result<f64>,
    direction: impl Fn(&Controller) -> Result<DMatrix<f64>>,
) -> Result<DescentReport> {
    cfg.validate()?;
    let mut k = k_init.clone();
    let mut value = objective(&k)?;
    if !value.is_finite() {
        return Err(Error::Precondition(format!(
            "initial gain {k} does not stabilize every mode"
        )));
    }
    let mut grad = direction(&k)?;
    let mut grad_norm = grad.norm();
    let mut iterations = 0;
    while iterations < cfg.max_inner_iters && grad_norm > cfg.grad_tol {
        let sq = grad_norm * grad_norm;
        let mut step = cfg.init_step;
        let mut accepted = None;
        while step * grad_norm > 1e-15 * (1.0 + k.gain().norm()) {
            let trial = Controller::new(k.gain() - &grad * step);
            let trial_value = match &trial {
                Ok(t) => objective(t)?,
                Err(_) => f64::INFINITY,
            };
            if trial_value <= value - cfg.armijo_c * step * sq {
                accepted = trial.ok().map(|t| (t, trial_value));
                break;
            }
            step *= cfg.backtrack_shrink;
        }
        let Some((next, next_value)) = accepted else {
            break;
        };
        k = next;
        value = next_value;
        grad = direction(&k)?;
        grad_norm = grad.norm();
        iterations += 1;
    }
    Ok(DescentReport {
        k,
        objective: value,
        iterations,
        grad_norm,
        converged: grad_norm <= cfg.grad_tol,
    })
}

/// Per-mode LQR gains that stabilize every mode, in mode order.
pub fn feasible_care_gains(system: &SwitchedSystem) -> Result<Vec<Controller>> {
    let mut out = Vec::new();
    for sol in system.care_solutions().into_iter().flatten() {
        if stabilizes_all(system, &sol.k_star)? {
            out.push(sol.k_star);
        }
    }
    Ok(out)
}

pub fn stabilizes_all(system: &SwitchedSystem, k: &Controller) -> Result<bool> {
    for mode in system.modes() {
        if !crate::lqr::is_stabilizing(mode, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Picks the candidate with the lowest `score`; ties keep the earliest.
fn best_candidate(
    candidates: Vec<Controller>,
    score: impl Fn(&Controller) -> Result<f64>,
) -> Result<Option<(Controller, f64)>> {
    let mut best: Option<(Controller, f64)> = None;
    for k in candidates {
        let s = score(&k)?;
        if s.is_finite() && best.as_ref().is_none_or(|(_, b)| s < *b) {
            best = Some((k, s));
        }
    }
    Ok(best)
}

/// Alternating minimization of the optimistic objective over `(θ, K)`.
///
/// Starts from the best of `{warm_start, K₁*, …, K_p*}` that stabilizes every
/// mode, then alternates the θ-step and the K-step until the objective
/// decrease falls below `outer_tol`. A final θ-step pairs the returned gain
/// with its optimistic distribution.
pub fn optimistic_select(
    system: &SwitchedSystem,
    belief: &BeliefState,
    warm_start: Option<&Controller>,
    cfg: &SelectionConfig,
) -> Result<SelectionResult> {
    cfg.validate()?;
    if belief.num_modes() != system.num_modes() {
        return Err(Error::dims(
            "belief",
            system.num_modes(),
            belief.num_modes(),
        ));
    }
    let cs = confidence_set(belief)?;

    let mut candidates = Vec::new();
    if let Some(w) = warm_start {
        if stabilizes_all(system, w)? {
            candidates.push(w.clone());
        }
    }
    candidates.extend(feasible_care_gains(system)?);
    let theta_step = |k: &Controller| -> Result<(Vec<f64>, f64)> {
        let costs = mode_costs(system, k)?;
        let theta = optimistic_theta(&cs, &costs)?;
        let value = weighted(&theta, &costs).as_f64();
        Ok((theta, value))
    };
    let (mut k, mut objective) = best_candidate(candidates, |k| Ok(theta_step(k)?.1))?
        .ok_or_else(|| Error::Infeasible("no initial gain stabilizes every mode".into()))?;

    let mut trace = vec![objective];
    let mut theta = Vec::new();
    let mut outer_iters = 0;
    let mut outer_converged = false;
    while outer_iters < cfg.max_outer_iters {
        outer_iters += 1;
        let (t, after_theta) = theta_step(&k)?;
        theta = t;
        trace.push(after_theta);
        let report = minimize_mixture_report(system, &theta, &k, cfg)?;
        k = report.k;
        trace.push(report.objective);
        let decrease = objective - report.objective;
        objective = report.objective;
        if decrease < cfg.outer_tol {
            outer_converged = true;
            break;
        }
    }
    let (t, after_theta) = theta_step(&k)?;
    if after_theta < objective || theta.is_empty() {
        theta = t;
        objective = after_theta;
    }
    trace.push(objective);
    let grad_norm = mixture_gradient(system, &theta, &k)?.norm();

    Ok(SelectionResult {
        k,
        theta_opt: theta,
        objective,
        outer_iters,
        converged: outer_converged && grad_norm <= cfg.grad_tol,
        trace,
    })
}

/// Worst-case cost over modes, `Infeasible` outside `𝒞`.
pub fn max_mode_cost(system: &SwitchedSystem, k: &Controller) -> Result<CostValue> {
    let costs = mode_costs(system, k)?;
    if costs.iter().any(|c| !c.is_finite()) {
        return Ok(CostValue::Infeasible);
    }
    Ok(CostValue::Finite(
        costs
            .iter()
            .map(CostValue::as_f64)
            .fold(f64::NEG_INFINITY, f64::max),
    ))
}

/// Approximate minimax gain `argmin_K maxᵢ Jᵢ(K)` by subgradient descent.
///
/// The descent direction is the gradient of the active mode (lowest index on
/// ties), with the same backtracking and feasibility rules as the mixture
/// descent.
pub fn robust_controller(system: &SwitchedSystem, cfg: &SelectionConfig) -> Result<Controller> {
    let (k0, _) = best_candidate(feasible_care_gains(system)?, |k| {
        Ok(max_mode_cost(system, k)?.as_f64())
    })?
    .ok_or_else(|| Error::Infeasible("no per-mode optimal gain stabilizes every mode".into()))?;
    let report = descend(
        &k0,
        cfg,
        |k| Ok(max_mode_cost(system, k)?.as_f64()),
        |k| {
            let costs: Vec<f64> = mode_costs(system, k)?.iter().map(|c| -c.as_f64()).collect();
            let active = argmin_lowest_index(&costs);
            Ok(cost_and_gradient(system.mode(active), k, system.weights())?.gradient)
        },
    )?;
    Ok(report.k)
}

/// Best static gain under the true distribution (clairvoyant baseline).
pub fn oracle_controller(
    system: &SwitchedSystem,
    theta_true: &[f64],
    cfg: &SelectionConfig,
) -> Result<Controller> {
    check_theta(system, theta_true)?;
    let (k0, _) = best_candidate(feasible_care_gains(system)?, |k| {
        Ok(mixture_cost(system, theta_true, k)?.as_f64())
    })?
    .ok_or_else(|| Error::Infeasible("no per-mode optimal gain stabilizes every mode".into()))?;
    minimize_mixture(system, theta_true, &k0, cfg)
}
