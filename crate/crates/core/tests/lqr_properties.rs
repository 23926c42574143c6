mod common;

use common::*;
use nalgebra::DMatrix;
use ofulqr_core::lqr::{
    care_residual, closed_loop, cost, cost_gradient, is_hurwitz, is_stabilizing, lyapunov_residual,
    simulate_cost_oracle, solve_care, solve_lyapunov, spectral_abscissa,
};
use ofulqr_core::{Controller, CostWeights, SystemMode};
use rand::Rng;

#[test]
fn lyapunov_residual_on_random_hurwitz_matrices() {
    let mut rng = rng(1);
    for trial in 0..100 {
        let n = 1 + trial % 8;
        let m = hurwitz(&mut rng, n);
        let s = psd(&mut rng, n);
        let p = solve_lyapunov(&m, &s).unwrap();
        assert!(lyapunov_residual(&m, &s, &p) <= 1e-9, "n={n}");
        let min_eig = p.clone().symmetric_eigen().eigenvalues.min();
        assert!(min_eig >= -1e-10, "min eigenvalue {min_eig}");
    }
}

#[test]
fn cost_matches_time_domain_integral() {
    let mut rng = rng(2);
    for trial in 0..20 {
        let n = 1 + trial % 4;
        let m = 1 + trial % 2;
        let mode = stabilizable_mode(&mut rng, n, m);
        let w = weights(&mut rng, n, m);
        let k = stabilizing_gain(&mut rng, &mode, &w, 0.3);
        let decay = spectral_abscissa(&closed_loop(&mode, &k).unwrap())
            .unwrap()
            .abs();
        let exact = cost(&mode, &k, &w).unwrap().value().unwrap();
        let simulated = simulate_cost_oracle(&mode, &k, &w, 100.0 / decay, 1e-3).unwrap();
        assert!(
            (exact - simulated).abs() / exact <= 1e-4,
            "{exact} vs {simulated}"
        );
    }
}

fn fd_gradient(mode: &SystemMode, k: &Controller, w: &CostWeights, h: f64) -> DMatrix<f64> {
    let g = k.gain();
    DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
        let mut plus = g.clone();
        plus[(i, j)] += h;
        let mut minus = g.clone();
        minus[(i, j)] -= h;
        let jp = cost(mode, &Controller::new(plus).unwrap(), w)
            .unwrap()
            .value()
            .unwrap();
        let jm = cost(mode, &Controller::new(minus).unwrap(), w)
            .unwrap()
            .value()
            .unwrap();
        (jp - jm) / (2.0 * h)
    })
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = rng(3);
    for trial in 0..50 {
        let n = 1 + trial % 5;
        let m = 1 + trial % 3;
        let mode = SystemMode::new(hurwitz(&mut rng, n), uniform(&mut rng, n, m)).unwrap();
        let w = weights(&mut rng, n, m);
        let k = perturbed(&mut rng, &mode, &Controller::zeros(m, n), 0.5);
        let analytic = cost_gradient(&mode, &k, &w).unwrap();
        let numeric = fd_gradient(&mode, &k, &w, 1e-6);
        let err = (&analytic - &numeric).norm() / analytic.norm().max(1e-12);
        assert!(err <= 1e-5, "relative error {err}");
    }
}

#[test]
fn care_gain_is_locally_optimal() {
    let mut rng = rng(4);
    let mode = stabilizable_mode(&mut rng, 4, 2);
    let w = weights(&mut rng, 4, 2);
    let sol = solve_care(&mode, &w).unwrap();
    assert!(care_residual(&mode, &w, &sol.p) <= 1e-8);
    assert!(is_hurwitz(&closed_loop(&mode, &sol.k_star).unwrap()).unwrap());
    let best = cost(&mode, &sol.k_star, &w).unwrap().value().unwrap();
    assert!((best - sol.p.trace()).abs() <= 1e-9 * best);
    let mut checked = 0;
    while checked < 100 {
        let d = uniform(&mut rng, 2, 4);
        let k = Controller::new(sol.k_star.gain() + d.clone() * (1e-3 / d.norm())).unwrap();
        if !is_stabilizing(&mode, &k).unwrap() {
            continue;
        }
        let perturbed = cost(&mode, &k, &w).unwrap().value().unwrap();
        assert!(best <= perturbed, "{best} > {perturbed}");
        checked += 1;
    }
}

#[test]
fn care_on_random_stabilizable_systems() {
    let mut rng = rng(5);
    for trial in 0..20 {
        let n = 2 + trial % 5;
        let m = 1 + trial % 3;
        let mode = stabilizable_mode(&mut rng, n, m);
        let w = weights(&mut rng, n, m);
        let sol = solve_care(&mode, &w).unwrap();
        assert!(care_residual(&mode, &w, &sol.p) <= 1e-8);
        assert!(is_stabilizing(&mode, &sol.k_star).unwrap());
        assert!(cost_gradient(&mode, &sol.k_star, &w).unwrap().norm() <= 1e-6);
    }
}

#[test]
fn cost_is_linear_in_the_weights() {
    let mut rng = rng(6);
    for _ in 0..20 {
        let mode = stabilizable_mode(&mut rng, 3, 2);
        let w = weights(&mut rng, 3, 2);
        let k = stabilizing_gain(&mut rng, &mode, &w, 0.2);
        let c = rng.gen_range(0.1..10.0);
        let base = cost(&mode, &k, &w).unwrap().value().unwrap();
        let scaled = cost(&mode, &k, &w.scaled(c).unwrap())
            .unwrap()
            .value()
            .unwrap();
        assert!(
            (scaled - c * base).abs() <= 1e-10 * scaled,
            "{scaled} vs {}",
            c * base
        );
    }
}
