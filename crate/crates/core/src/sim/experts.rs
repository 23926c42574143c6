use rand::Rng;

use super::{sample_mode, SwitchedSystem};
use crate::error::{Error, Result};
use crate::identify::mode_costs;
use crate::lqr::Controller;

/// Randomized weighted majority over fixed expert gains.
///
/// Losses are `cost(mode_j, K_e) / L_max`, where `L_max` is the largest entry
/// of the precomputed mode × expert cost table, so every loss lies in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct ExpertsState {
    gains: Vec<Controller>,
    /// `losses[mode][expert]`
    losses: Vec<Vec<f64>>,
    weights: Vec<f64>,
    eta: f64,
}

impl ExpertsState {
    pub fn new(system: &SwitchedSystem, gains: Vec<Controller>, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 0.5) {
            return Err(Error::Precondition(format!(
                "eta must lie in (0, 0.5], got {eta}"
            )));
        }
        if gains.is_empty() {
            return Err(Error::Precondition(
                "experts baseline needs at least one gain".into(),
            ));
        }
        let mut table = vec![Vec::with_capacity(gains.len()); system.num_modes()];
        for (e, k) in gains.iter().enumerate() {
            for (i, c) in mode_costs(system, k)?.into_iter().enumerate() {
                let v = c.value().ok_or_else(|| {
                    Error::Infeasible(format!(
                        "expert {} does not stabilize mode {}; experts need cross-stabilization",
                        e + 1,
                        i + 1
                    ))
                })?;
                table[i].push(v);
            }
        }
        let l_max = table.iter().flatten().copied().fold(0.0, f64::max);
        let losses = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| if l_max > 0.0 { v / l_max } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(Self {
            weights: vec![1.0; gains.len()],
            gains,
            losses,
            eta,
        })
    }

    pub fn gains(&self) -> &[Controller] {
        &self.gains
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn loss(&self, mode: usize, expert: usize) -> f64 {
        self.losses[mode][expert]
    }

    /// Samples an expert with probability proportional to its weight.
    pub fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total: f64 = self.weights.iter().sum();
        let probs: Vec<f64> = self.weights.iter().map(|w| w / total).collect();
        sample_mode(&probs, rng)
    }

    /// Full-information update after mode `realized` (0-based) was observed.
    pub fn update(&mut self, realized: usize) -> Result<()> {
        let row = self
            .losses
            .get(realized)
            .ok_or_else(|| Error::Precondition(format!("mode index {realized} out of range")))?;
        for (w, &l) in self.weights.iter_mut().zip(row) {
            *w *= (1.0 - self.eta).powf(l);
        }
        let total: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= total);
        Ok(())
    }

    /// One round: choose before the outcome, then update on `realized`.
    pub fn step<R: Rng + ?Sized>(&mut self, realized: usize, rng: &mut R) -> Result<usize> {
        let chosen = self.choose(rng);
        self.update(realized)?;
        Ok(chosen)
    }
}
