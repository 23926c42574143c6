mod common;

use common::*;
use ofulqr_core::belief::{confidence_set, in_simplex, l1_distance};
use ofulqr_core::lqr::{cost_gradient, solve_care};
use ofulqr_core::select::{mixture_cost, optimistic_select, stabilizes_all};
use ofulqr_core::{BeliefState, CountVector, SelectionConfig};
use rand::Rng;

fn random_belief(rng: &mut impl Rng, p: usize) -> BeliefState {
    let t_init = p.max(2) as u64;
    let mut initial = vec![0u64; p];
    for j in 0..t_init as usize {
        initial[j % p] += 1;
    }
    let mut b = BeliefState::new(CountVector::new(initial).unwrap(), t_init, 0.1).unwrap();
    for _ in 0..rng.gen_range(0..60) {
        b.observe(rng.gen_range(0..p)).unwrap();
    }
    b
}

#[test]
fn alternation_is_monotone_feasible_and_optimistic() {
    let mut rng = rng(31);
    let cfg = SelectionConfig::default();
    let mut converged = 0;
    for trial in 0..30 {
        let p = 2 + trial % 3;
        let system = random_switched(&mut rng, p, 1 + trial % 3, 1);
        let belief = random_belief(&mut rng, p);
        let sel = optimistic_select(&system, &belief, None, &cfg).unwrap();
        for w in sel.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "trace {:?}", sel.trace);
        }
        assert!(stabilizes_all(&system, &sel.k).unwrap());
        let cs = confidence_set(&belief).unwrap();
        assert!(in_simplex(&sel.theta_opt));
        assert!(l1_distance(&sel.theta_opt, &cs.theta_hat) <= cs.radius + 1e-12);
        let at_hat = mixture_cost(&system, &cs.theta_hat, &sel.k)
            .unwrap()
            .as_f64();
        assert!(sel.objective <= at_hat + 1e-10);
        let at_opt = mixture_cost(&system, &sel.theta_opt, &sel.k)
            .unwrap()
            .as_f64();
        assert!((sel.objective - at_opt).abs() <= 1e-10 * at_opt);
        if sel.converged {
            let grad = sel
                .theta_opt
                .iter()
                .enumerate()
                .map(|(i, &t)| cost_gradient(system.mode(i), &sel.k, system.weights()).unwrap() * t)
                .fold(nalgebra::DMatrix::zeros(1, system.state_dim()), |acc, g| {
                    acc + g
                });
            assert!(grad.norm() <= cfg.grad_tol);
            converged += 1;
        }
    }
    assert!(converged > 0);
}

#[test]
fn benchmark_selection_is_monotone() {
    let system = benchmark_system();
    let cfg = SelectionConfig::default();
    let mut rng = rng(32);
    for _ in 0..10 {
        let belief = random_belief(&mut rng, 2);
        let sel = optimistic_select(&system, &belief, None, &cfg).unwrap();
        assert!(sel.trace.windows(2).all(|w| w[1] <= w[0] + 1e-10));
        assert!(stabilizes_all(&system, &sel.k).unwrap());
    }
}

#[test]
fn single_mode_selection_reaches_the_lqr_cost() {
    let mut rng = rng(33);
    let cfg = SelectionConfig::default();
    for trial in 0..10 {
        let system = random_switched(&mut rng, 1, 1 + trial % 4, 1 + trial % 2);
        let belief = BeliefState::new(CountVector::new(vec![2]).unwrap(), 2, 0.1).unwrap();
        let start = solve_care(system.mode(0), system.weights()).unwrap();
        let perturbed = ofulqr_core::Controller::new(
            start.k_star.gain() + uniform(&mut rng, system.input_dim(), system.state_dim()) * 0.05,
        )
        .unwrap();
        let sel = optimistic_select(&system, &belief, Some(&perturbed), &cfg).unwrap();
        let optimum = start.p.trace();
        assert!((sel.objective - optimum).abs() <= 1e-6 * optimum);
    }
}
