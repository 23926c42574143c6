mod common;

use common::*;
use ofulqr_core::identify::{identify_realization, mode_costs};
use ofulqr_core::lqr::solve_care;
use ofulqr_core::select::stabilizes_all;
use ofulqr_core::sim::realized_cost;
use ofulqr_core::{Controller, CostValue, Environment, SwitchedSystem};
use rand::Rng;

fn distinct(costs: &[CostValue]) -> bool {
    let v: Vec<f64> = costs.iter().filter_map(CostValue::value).collect();
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| (v[i] - v[j]).abs() > 1e-6 * v[i].abs().max(1.0)))
}

fn draw(rng: &mut rand_chacha::ChaCha8Rng) -> (SwitchedSystem, Controller) {
    loop {
        let p = rng.gen_range(2..5);
        let n = rng.gen_range(1..4);
        let m = rng.gen_range(1..3);
        let system = random_switched(rng, p, n, m);
        let k_star = solve_care(system.mode(0), system.weights()).unwrap().k_star;
        let k = Controller::new(k_star.gain() + uniform(rng, m, n) * 0.2).unwrap();
        if stabilizes_all(&system, &k).unwrap() {
            return (system, k);
        }
    }
}

#[test]
fn exact_feedback_is_identified_exactly() {
    let mut rng = rng(21);
    let mut checked = 0;
    while checked < 1000 {
        let (system, k) = draw(&mut rng);
        let costs = mode_costs(&system, &k).unwrap();
        if !distinct(&costs) {
            continue;
        }
        let p = system.num_modes();
        let theta = vec![1.0 / p as f64; p];
        let env = Environment::new(system, theta, 0).unwrap();
        let j = rng.gen_range(0..p);
        let observed = realized_cost(&env, j, &k).unwrap();
        let id = identify_realization(observed, &costs).unwrap();
        assert_eq!(id.mode_index, j);
        assert!(id.residual <= 1e-9);
        assert!(!id.ambiguous);
        checked += 1;
    }
}

#[test]
fn permuting_modes_permutes_the_answer() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let (system, k) = draw(&mut rng);
        let costs = mode_costs(&system, &k).unwrap();
        if !distinct(&costs) {
            continue;
        }
        let p = costs.len();
        let j = rng.gen_range(0..p);
        let observed = costs[j].as_f64();
        let shift = rng.gen_range(1..p);
        let rotated: Vec<CostValue> = (0..p).map(|i| costs[(i + shift) % p]).collect();
        let id = identify_realization(observed, &rotated).unwrap();
        assert_eq!((id.mode_index + shift) % p, j);
    }
}
