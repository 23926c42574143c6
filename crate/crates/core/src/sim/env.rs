use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SwitchedSystem;
use crate::belief::in_simplex;
use crate::error::{Error, Result};
use crate::lqr::{cost, Controller, CostValue};

/// Per-purpose random streams derived from one episode seed.
///
/// Every stream is the ChaCha8 generator seeded with the episode seed and
/// switched to a fixed stream id, so streams never overlap and adding a
/// consumer does not perturb the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Mode realizations of the learning rounds; shared by every agent.
    Realization = 0,
    /// Expert choices of the weighted-majority baseline.
    Experts = 1,
    /// Mode realizations of the exploration rounds.
    Exploration = 2,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// The repeated-operation environment. `theta_true` is hidden from agents.
#[derive(Debug, Clone)]
pub struct Environment {
    pub system: SwitchedSystem,
    theta_true: Vec<f64>,
    pub seed: u64,
}

impl Environment {
    pub fn new(system: SwitchedSystem, theta_true: Vec<f64>, seed: u64) -> Result<Self> {
        if theta_true.len() != system.num_modes() {
            return Err(Error::dims(
                "theta_true",
                system.num_modes(),
                theta_true.len(),
            ));
        }
        if !in_simplex(&theta_true) {
            return Err(Error::Precondition(format!(
                "theta_true {theta_true:?} is not in the simplex"
            )));
        }
        Ok(Self {
            system,
            theta_true,
            seed,
        })
    }

    pub fn theta_true(&self) -> &[f64] {
        &self.theta_true
    }

    /// The first `rounds` learning-round realizations (0-based mode indices).
    pub fn realizations(&self, rounds: usize) -> Vec<usize> {
        let mut rng = stream_rng(self.seed, Stream::Realization);
        (0..rounds)
            .map(|_| sample_mode(&self.theta_true, &mut rng))
            .collect()
    }
}

/// Inverse-CDF draw of a 0-based index with probability `theta[i]`, using one uniform.
pub fn sample_mode<R: Rng + ?Sized>(theta: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (i, &t) in theta.iter().enumerate() {
        cumulative += t;
        if u < cumulative {
            return i;
        }
    }
    // rounding left u above the total mass
    theta.iter().rposition(|&t| t > 0.0).unwrap_or(0)
}

/// The revealed cost `J(K, ω)` of applying `k` when mode `i` is realized.
pub fn realized_cost(env: &Environment, i: usize, k: &Controller) -> Result<f64> {
    if i >= env.system.num_modes() {
        return Err(Error::Precondition(format!("mode index {i} out of range")));
    }
    match cost(env.system.mode(i), k, env.system.weights())? {
        CostValue::Finite(v) => Ok(v),
        CostValue::Infeasible => Err(Error::EpisodeFault(format!(
            "gain {k} does not stabilize realized mode {}",
            i + 1
        ))),
    }
}
