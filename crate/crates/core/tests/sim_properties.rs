mod common;

use common::*;
use ofulqr_core::belief::mle_estimate;
use ofulqr_core::identify::mode_costs;
use ofulqr_core::lqr::solve_care;
use ofulqr_core::select::robust_controller;
use ofulqr_core::sim::{
    explore_init, realized_cost, run_episode, sample_mode, stream_rng, ExpertsState, Stream,
};
use ofulqr_core::{AgentKind, AgentSpec, Controller, CountVector, Environment, SelectionConfig};

fn agents() -> Vec<AgentSpec> {
    let cfg = SelectionConfig::default();
    let system = benchmark_system();
    let care: Vec<Controller> = system
        .care_solutions()
        .into_iter()
        .map(|s| s.unwrap().k_star)
        .collect();
    vec![
        AgentSpec::new(
            "Kproposed",
            AgentKind::Ofu {
                delta: 0.1,
                t_init: 2,
                selection: cfg.clone(),
            },
        ),
        AgentSpec::new("K1", AgentKind::Static(care[0].clone())),
        AgentSpec::new("K2", AgentKind::Static(care[1].clone())),
        AgentSpec::new(
            "Krobust",
            AgentKind::Static(robust_controller(&system, &cfg).unwrap()),
        ),
        AgentSpec::new("Experts", AgentKind::Experts { eta: 0.3 }),
        AgentSpec::new("Oracle", AgentKind::Oracle { selection: cfg }),
    ]
}

#[test]
fn sampling_examples() {
    let mut rng = stream_rng(5, Stream::Realization);
    assert!((0..1000).all(|_| sample_mode(&[1.0, 0.0], &mut rng) == 0));
    assert!((0..1000).all(|_| sample_mode(&[0.0, 1.0], &mut rng) == 1));
    let first = (0..100_000)
        .filter(|_| sample_mode(&[0.5, 0.5], &mut rng) == 0)
        .count() as f64
        / 100_000.0;
    assert!((0.49..=0.51).contains(&first), "{first}");
}

#[test]
fn realized_cost_examples() {
    let env = Environment::new(scalar_system(&[0.0]), vec![1.0], 0).unwrap();
    let k = Controller::from_row_slice(1, 1, &[-1.0]).unwrap();
    assert_eq!(realized_cost(&env, 0, &k).unwrap(), 1.0);
    assert_eq!(
        realized_cost(&env, 0, &k).unwrap(),
        realized_cost(&env, 0, &k).unwrap()
    );

    let env = Environment::new(benchmark_system(), vec![0.5, 0.5], 0).unwrap();
    let sol = solve_care(env.system.mode(1), env.system.weights()).unwrap();
    let j = realized_cost(&env, 1, &sol.k_star).unwrap();
    assert!((j - sol.p.trace()).abs() <= 1e-9);
    let bad = Controller::from_row_slice(1, 3, &[0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        realized_cost(&env, 0, &bad),
        Err(ofulqr_core::Error::EpisodeFault(_))
    ));
}

#[test]
fn exploration_examples() {
    let cfg = SelectionConfig::default();
    let env = Environment::new(benchmark_system(), vec![0.5, 0.5], 9).unwrap();
    let care: Vec<Controller> = env
        .system
        .care_solutions()
        .into_iter()
        .map(|s| s.unwrap().k_star)
        .collect();
    let ex = explore_init(&env, 2, "x", &cfg).unwrap();
    assert_eq!(ex.counts.total(), 2);
    assert_eq!(ex.records[0].k, care[0]);
    assert_eq!(ex.records[1].k, care[1]);
    assert_eq!(
        ex.records.iter().map(|r| r.t).collect::<Vec<_>>(),
        vec![-1, 0]
    );

    let env = Environment::new(scalar_system(&[0.0, 0.5, 1.0]), vec![1.0, 0.0, 0.0], 1).unwrap();
    let ex = explore_init(&env, 3, "x", &cfg).unwrap();
    assert_eq!(ex.counts, CountVector::new(vec![3, 0, 0]).unwrap());

    let env = Environment::new(benchmark_system(), vec![0.5, 0.5], 4).unwrap();
    let a = explore_init(&env, 10, "x", &cfg).unwrap();
    let b = explore_init(&env, 10, "x", &cfg).unwrap();
    assert_eq!(a.counts, b.counts);
    assert_eq!(a.records, b.records);
}

#[test]
fn single_mode_episode_has_no_uncertainty() {
    for a in [-1.0, 0.0, 0.7] {
        let env = Environment::new(scalar_system(&[a]), vec![1.0], 3).unwrap();
        let optimum = solve_care(env.system.mode(0), env.system.weights())
            .unwrap()
            .p
            .trace();
        let agent = AgentSpec::new(
            "ofu",
            AgentKind::Ofu {
                delta: 0.1,
                t_init: 2,
                selection: SelectionConfig::default(),
            },
        );
        let records = run_episode(&env, &agent, 5).unwrap();
        let total = records.last().unwrap().cum_cost;
        assert!((total - 5.0 * optimum).abs() <= 1e-6 * 5.0 * optimum);
    }
}

#[test]
fn static_episode_is_a_plain_sum() {
    let env = Environment::new(benchmark_system(), vec![0.3, 0.7], 17).unwrap();
    let k = robust_controller(&env.system, &SelectionConfig::default()).unwrap();
    let costs = mode_costs(&env.system, &k).unwrap();
    let records = run_episode(&env, &AgentSpec::new("s", AgentKind::Static(k)), 40).unwrap();
    let expected: f64 = env
        .realizations(40)
        .iter()
        .map(|&i| costs[i].as_f64())
        .sum();
    assert!((records.last().unwrap().cum_cost - expected).abs() <= 1e-9 * expected);
}

#[test]
fn benchmark_episodes_are_deterministic_paired_and_consistent() {
    let env = Environment::new(benchmark_system(), vec![0.5, 0.5], 2024).unwrap();
    let t_rounds = 30;
    let mut omegas = Vec::new();
    for agent in agents() {
        let records = run_episode(&env, &agent, t_rounds).unwrap();
        assert_eq!(
            records,
            run_episode(&env, &agent, t_rounds).unwrap(),
            "{}",
            agent.label
        );

        let learning: Vec<_> = records.iter().filter(|r| !r.is_exploration()).collect();
        assert_eq!(learning.len(), t_rounds);
        omegas.push(learning.iter().map(|r| r.omega).collect::<Vec<_>>());

        for phase in [true, false] {
            let costs: Vec<_> = records
                .iter()
                .filter(|r| r.is_exploration() == phase)
                .collect();
            assert!(costs.windows(2).all(|w| w[1].cum_cost >= w[0].cum_cost));
        }
        for r in &records {
            if let Some(id) = r.identified {
                if !r.ambiguity_flag {
                    assert_eq!(id, r.omega, "{} round {}", agent.label, r.t);
                }
            }
        }
        if agent.uses_exploration() {
            let mut counts = vec![0u64; 2];
            for (t, r) in records.iter().enumerate() {
                counts[r.identified.unwrap()] += 1;
                assert_eq!(counts.iter().sum::<u64>(), t as u64 + 1);
                let hat = mle_estimate(&CountVector::new(counts.clone()).unwrap()).unwrap();
                assert_eq!(r.theta_hat.as_ref().unwrap(), &hat);
            }
        }
    }
    assert!(omegas.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn experts_examples() {
    let mut rng = stream_rng(0, Stream::Experts);
    let single = scalar_system(&[0.3]);
    let k = solve_care(single.mode(0), single.weights()).unwrap().k_star;
    let mut experts = ExpertsState::new(&single, vec![k], 0.3).unwrap();
    for _ in 0..10 {
        assert_eq!(experts.step(0, &mut rng).unwrap(), 0);
        assert_eq!(experts.weights(), &[1.0]);
    }

    let twin = scalar_system(&[0.3, 0.3]);
    let k = solve_care(twin.mode(0), twin.weights()).unwrap().k_star;
    let mut experts = ExpertsState::new(&twin, vec![k.clone(), k], 0.3).unwrap();
    for round in 0..50 {
        experts.step(round % 2, &mut rng).unwrap();
        assert_eq!(experts.weights()[0], experts.weights()[1]);
    }

    let system = benchmark_system();
    let gains: Vec<Controller> = system
        .care_solutions()
        .into_iter()
        .map(|s| s.unwrap().k_star)
        .collect();
    let table: Vec<Vec<f64>> = (0..2)
        .map(|i| {
            gains
                .iter()
                .map(|k| mode_costs(&system, k).unwrap()[i].as_f64())
                .collect()
        })
        .collect();
    assert!(table[0][0] < table[0][1]);
    let l_max = table.iter().flatten().copied().fold(0.0, f64::max);
    let mut experts = ExpertsState::new(&system, gains, 0.3).unwrap();
    let mut oracle = [1.0f64, 1.0];
    for _ in 0..50 {
        experts.step(0, &mut rng).unwrap();
        for e in 0..2 {
            oracle[e] *= 0.7f64.powf(table[0][e] / l_max);
        }
    }
    let share = oracle[0] / (oracle[0] + oracle[1]);
    assert!(share > 0.9, "{share}");
    assert!((experts.weights()[0] - share).abs() <= 1e-12);
}
