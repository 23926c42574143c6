#![allow(dead_code)]

use nalgebra::DMatrix;
use ofulqr_core::lqr::{is_stabilizing, solve_care, spectral_abscissa};
use ofulqr_core::{Controller, CostWeights, SwitchedSystem, SystemMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Real parts of all eigenvalues at most `-0.1`.
pub fn hurwitz(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = uniform(rng, n, n) * 2.0;
    let shift = spectral_abscissa(&m).unwrap() + 0.1 + rng.gen_range(0.0..1.0);
    m - DMatrix::identity(n, n) * shift
}

pub fn psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = uniform(rng, n, n);
    &g * g.transpose()
}

pub fn pd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    psd(rng, n) + DMatrix::identity(n, n) * 0.5
}

pub fn weights(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CostWeights {
    CostWeights::new(pd(rng, n), pd(rng, m)).unwrap()
}

/// A mode with an unstructured (generally unstable) drift and full-rank input.
pub fn stabilizable_mode(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SystemMode {
    SystemMode::new(
        uniform(rng, n, n) * 1.5,
        uniform(rng, n, m) + DMatrix::identity(n, m),
    )
    .unwrap()
}

/// `center` perturbed by up to `scale` per entry, kept stabilizing.
pub fn perturbed(
    rng: &mut ChaCha8Rng,
    mode: &SystemMode,
    center: &Controller,
    scale: f64,
) -> Controller {
    loop {
        let delta = uniform(rng, mode.input_dim(), mode.state_dim()) * scale;
        let k = Controller::new(center.gain() + delta).unwrap();
        if is_stabilizing(mode, &k).unwrap() {
            return k;
        }
    }
}

/// The LQR gain perturbed by up to `scale` per entry, kept stabilizing.
pub fn stabilizing_gain(
    rng: &mut ChaCha8Rng,
    mode: &SystemMode,
    w: &CostWeights,
    scale: f64,
) -> Controller {
    perturbed(rng, mode, &solve_care(mode, w).unwrap().k_star, scale)
}

pub fn benchmark_system() -> SwitchedSystem {
    let b = DMatrix::from_row_slice(3, 1, &[0., 1., 1.]);
    let a1 = DMatrix::from_row_slice(3, 3, &[0., 1., -1., 0., 0., 1., 0., 0., 0.]);
    let a2 = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 0., 0., 1., 0., 0., 0.]);
    SwitchedSystem::new(
        vec![
            SystemMode::new(a1, b.clone()).unwrap(),
            SystemMode::new(a2, b).unwrap(),
        ],
        CostWeights::new(DMatrix::identity(3, 3), DMatrix::identity(1, 1)).unwrap(),
    )
    .unwrap()
}

pub fn scalar_system(drifts: &[f64]) -> SwitchedSystem {
    let modes = drifts
        .iter()
        .map(|&a| {
            SystemMode::new(
                DMatrix::from_element(1, 1, a),
                DMatrix::from_element(1, 1, 1.0),
            )
            .unwrap()
        })
        .collect();
    SwitchedSystem::new(
        modes,
        CostWeights::new(DMatrix::identity(1, 1), DMatrix::identity(1, 1)).unwrap(),
    )
    .unwrap()
}

/// `p` modes of state dimension `n` sharing one input matrix, each a small
/// perturbation of a common stable drift, so every per-mode LQR gain
/// stabilizes every mode.
pub fn random_switched(rng: &mut ChaCha8Rng, p: usize, n: usize, m: usize) -> SwitchedSystem {
    let base = hurwitz(rng, n);
    let b = uniform(rng, n, m) + DMatrix::identity(n, m);
    let modes = (0..p)
        .map(|_| SystemMode::new(&base + uniform(rng, n, n) * 0.05, b.clone()).unwrap())
        .collect();
    SwitchedSystem::new(modes, weights(rng, n, m)).unwrap()
}
