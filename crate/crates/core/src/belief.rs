//! Realization counts, the empirical estimate of the mode distribution, and
//! the L1 confidence set around it.
//!
//! The confidence radius comes from the method of types combined with
//! Pinsker's inequality:
//!
//! ```text
//! P(‖θ − θ̂‖₁ ≥ α) ≤ (τ+1)^p · 2^(−τα²/2)
//! ```
//!
//! Setting the right-hand side to `δ` gives `α = sqrt((2/τ) · log₂((τ+1)^p / δ))`.
//! The logarithm is base 2.

use crate::error::{Error, Result};
use crate::lqr::CostValue;

/// Tolerance for checking that a vector lies on the probability simplex.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Observed realization counts, one entry per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Precondition(
                "count vector must have p >= 1 entries".into(),
            ));
        }
        Ok(Self(counts))
    }

    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(vec![0; p])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Belief about the hidden mode distribution.
///
/// `sum(counts) = t_init + rounds observed`, which is the `τ` of the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    counts: CountVector,
    t_init: u64,
    delta: f64,
}

impl BeliefState {
    /// `initial` are the counts gathered during `t_init` exploration rounds.
    pub fn new(initial: CountVector, t_init: u64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Precondition(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if initial.total() != t_init {
            return Err(Error::Precondition(format!(
                "initial counts sum to {} but t_init = {t_init}",
                initial.total()
            )));
        }
        Ok(Self {
            counts: initial,
            t_init,
            delta,
        })
    }

    pub fn counts(&self) -> &CountVector {
        &self.counts
    }

    pub fn t_init(&self) -> u64 {
        self.t_init
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn num_modes(&self) -> usize {
        self.counts.len()
    }

    /// Learning rounds observed after exploration.
    pub fn rounds_observed(&self) -> u64 {
        self.counts.total() - self.t_init
    }

    /// Records one identified realization.
    pub fn observe(&mut self, mode: usize) -> Result<()> {
        self.counts = update_counts(&self.counts, mode)?;
        Ok(())
    }
}

/// `Θ = {θ ∈ simplex : ‖θ − θ̂‖₁ ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceSet {
    pub theta_hat: Vec<f64>,
    pub radius: f64,
}

impl ConfidenceSet {
    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.theta_hat.len()
            && in_simplex(theta)
            && l1_distance(theta, &self.theta_hat) <= self.radius + SIMPLEX_TOL
    }
}

/// `θ̂ = c / Σc`.
pub fn mle_estimate(c: &CountVector) -> Result<Vec<f64>> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Precondition(
            "cannot estimate from empty counts; explore first".into(),
        ));
    }
    let total = total as f64;
    Ok(c.as_slice().iter().map(|&ci| ci as f64 / total).collect())
}

/// `sqrt((2/τ) · log₂((τ+1)^p / δ))`, clamped at zero when the logarithm is negative.
pub fn confidence_radius(tau: u64, p: usize, delta: f64) -> Result<f64> {
    if tau == 0 {
        return Err(Error::Precondition("tau must be >= 1".into()));
    }
    if p == 0 {
        return Err(Error::Precondition("p must be >= 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Precondition(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let tau_f = tau as f64;
    let ratio = (tau_f + 1.0).powi(p as i32) / delta;
    let log_term = if ratio.is_finite() && ratio > 0.0 {
        ratio.log2()
    } else {
        p as f64 * (tau_f + 1.0).log2() - delta.log2()
    };
    Ok((2.0 / tau_f * log_term).max(0.0).sqrt())
}

pub fn confidence_set(b: &BeliefState) -> Result<ConfidenceSet> {
    let theta_hat = mle_estimate(&b.counts)?;
    let radius = confidence_radius(b.counts.total(), b.num_modes(), b.delta)?;
    Ok(ConfidenceSet { theta_hat, radius })
}

/// Minimizes `Σ θᵢ Jᵢ` over the confidence set.
///
/// Moves up to `radius / 2` probability mass from the most expensive modes
/// onto the cheapest one (lowest index on ties). Infeasible costs count as
/// `+∞`, so mass only ever leaves them.
pub fn optimistic_theta(cs: &ConfidenceSet, mode_costs: &[CostValue]) -> Result<Vec<f64>> {
    let p = cs.theta_hat.len();
    if mode_costs.len() != p {
        return Err(Error::dims("optimistic_theta", p, mode_costs.len()));
    }
    let costs: Vec<f64> = mode_costs.iter().map(CostValue::as_f64).collect();
    let cheapest = argmin_lowest_index(&costs);
    if !costs[cheapest].is_finite() {
        return Err(Error::Infeasible(
            "every mode cost is infeasible; no finite direction".into(),
        ));
    }

    let mut order: Vec<usize> = (0..p).filter(|&i| costs[i] > costs[cheapest]).collect();
    order.sort_by(|&i, &j| costs[j].total_cmp(&costs[i]).then(i.cmp(&j)));

    let mut theta = cs.theta_hat.clone();
    let mut budget = 0.5 * cs.radius.max(0.0);
    for i in order {
        if budget <= 0.0 {
            break;
        }
        let moved = theta[i].min(budget);
        theta[i] -= moved;
        theta[cheapest] += moved;
        budget -= moved;
    }
    Ok(theta)
}

/// Returns `c` with coordinate `mode` (0-based) incremented.
pub fn update_counts(c: &CountVector, mode: usize) -> Result<CountVector> {
    if mode >= c.len() {
        return Err(Error::Precondition(format!(
            "mode index {mode} out of range for {} modes",
            c.len()
        )));
    }
    let mut next = c.0.clone();
    next[mode] += 1;
    Ok(CountVector(next))
}

pub fn in_simplex(theta: &[f64]) -> bool {
    !theta.is_empty()
        && theta.iter().all(|&t| t >= -SIMPLEX_TOL && t.is_finite())
        && (theta.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL * theta.len().max(1) as f64
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn argmin_lowest_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}
