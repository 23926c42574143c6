use crate::error::{Error, Result};
use crate::lqr::{solve_care, CareSolution, CostWeights, SystemMode};

/// The p candidate plants of a switched system plus the shared cost weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedSystem {
    modes: Vec<SystemMode>,
    weights: CostWeights,
}

impl SwitchedSystem {
    pub fn new(modes: Vec<SystemMode>, weights: CostWeights) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::Precondition("a switched system needs p >= 1 modes".into()))?;
        let (n, m) = (first.state_dim(), first.input_dim());
        for (i, mode) in modes.iter().enumerate() {
            if mode.state_dim() != n || mode.input_dim() != m {
                return Err(Error::dims(
                    "SwitchedSystem::modes",
                    format!("n={n}, m={m} for every mode"),
                    format!("mode {i}: n={}, m={}", mode.state_dim(), mode.input_dim()),
                ));
            }
        }
        if weights.state_dim() != n || weights.input_dim() != m {
            return Err(Error::dims(
                "SwitchedSystem::weights",
                format!("Q {n}x{n}, R {m}x{m}"),
                format!(
                    "Q {0}x{0}, R {1}x{1}",
                    weights.state_dim(),
                    weights.input_dim()
                ),
            ));
        }
        Ok(Self { modes, weights })
    }

    pub fn modes(&self) -> &[SystemMode] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> &SystemMode {
        &self.modes[i]
    }

    pub fn weights(&self) -> &CostWeights {
        &self.weights
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn state_dim(&self) -> usize {
        self.modes[0].state_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.modes[0].input_dim()
    }

    /// Per-mode LQR optimum; an entry is an error where the Riccati solve fails.
    pub fn care_solutions(&self) -> Vec<Result<CareSolution>> {
        self.modes
            .iter()
            .map(|mode| solve_care(mode, &self.weights))
            .collect()
    }
}
