use super::{realized_cost, sample_mode, stream_rng, Environment, ExpertsState, Stream};
use crate::belief::{confidence_set, mle_estimate, BeliefState, CountVector};
use crate::error::{Error, Result};
use crate::identify::{identify_realization, mode_costs, IdentificationResult};
use crate::lqr::Controller;
use crate::select::{
    optimistic_select, oracle_controller, robust_controller, stabilizes_all, SelectionConfig,
};

/// How an agent chooses its gain each round.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentKind {
    /// Optimistic learner: explore for `t_init` rounds, then select optimistically.
    Ofu {
        delta: f64,
        t_init: u64,
        selection: SelectionConfig,
    },
    Static(Controller),
    /// Randomized weighted majority over the per-mode LQR gains.
    Experts {
        eta: f64,
    },
    /// Best static gain for the true distribution.
    Oracle {
        selection: SelectionConfig,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub label: String,
}

impl AgentSpec {
    pub fn new(label: impl Into<String>, kind: AgentKind) -> Self {
        Self {
            kind,
            label: label.into(),
        }
    }

    pub fn uses_exploration(&self) -> bool {
        matches!(self.kind, AgentKind::Ofu { .. })
    }
}

/// Diagnostics of the optimistic selection made in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub objective_trace: Vec<f64>,
    pub theta_opt: Vec<f64>,
    pub outer_iters: usize,
    pub converged: bool,
}

/// One round of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// Learning rounds are `1..=T`; exploration rounds are `1-t_init..=0`.
    pub t: i64,
    pub agent: String,
    pub k: Controller,
    /// Realized mode, 0-based.
    pub omega: usize,
    /// Mode inferred from the revealed cost, for agents that identify.
    pub identified: Option<usize>,
    pub cost: f64,
    /// Running cost within the record's phase (exploration or learning).
    pub cum_cost: f64,
    /// Belief after this round's update.
    pub theta_hat: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub ambiguity_flag: bool,
    /// Selection failed and the robust gain was applied instead.
    pub fallback_flag: bool,
    pub selection: Option<SelectionTrace>,
}

impl RoundRecord {
    pub fn is_exploration(&self) -> bool {
        self.t <= 0
    }
}

/// Counts and log of the exploration phase.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub counts: CountVector,
    pub last: Controller,
    pub records: Vec<RoundRecord>,
}

/// Gains applied round-robin during exploration: each per-mode LQR gain that
/// stabilizes every mode, with the robust gain substituted for the others.
pub fn exploration_gains(
    env: &Environment,
    selection: &SelectionConfig,
) -> Result<Vec<Controller>> {
    let system = &env.system;
    let mut robust = None;
    let mut gains = Vec::with_capacity(system.num_modes());
    for sol in system.care_solutions() {
        let usable = match sol {
            Ok(s) if stabilizes_all(system, &s.k_star)? => Some(s.k_star),
            _ => None,
        };
        let k = match usable {
            Some(k) => k,
            None => {
                if robust.is_none() {
                    robust = Some(robust_controller(system, selection).map_err(|e| {
                        Error::Infeasible(format!("no feasible exploration controller: {e}"))
                    })?);
                }
                robust.clone().expect("robust gain computed above")
            }
        };
        gains.push(k);
    }
    Ok(gains)
}

/// Explores for `t_init` rounds, identifying and counting each realization.
pub fn explore_init(
    env: &Environment,
    t_init: u64,
    label: &str,
    selection: &SelectionConfig,
) -> Result<Exploration> {
    if t_init == 0 {
        return Err(Error::Precondition("t_init must be >= 1".into()));
    }
    let gains = exploration_gains(env, selection)?;
    let p = env.system.num_modes();
    let mut rng = stream_rng(env.seed, Stream::Exploration);
    let mut counts = CountVector::zeros(p)?;
    let mut records = Vec::with_capacity(t_init as usize);
    let mut cum_cost = 0.0;
    for j in 0..t_init {
        let k = gains[(j as usize) % p].clone();
        let omega = sample_mode(env.theta_true(), &mut rng);
        let cost = realized_cost(env, omega, &k)?;
        let id = identify(env, &k, cost)?;
        counts = crate::belief::update_counts(&counts, id.mode_index)?;
        cum_cost += cost;
        records.push(RoundRecord {
            t: j as i64 + 1 - t_init as i64,
            agent: label.to_string(),
            k,
            omega,
            identified: Some(id.mode_index),
            cost,
            cum_cost,
            theta_hat: Some(mle_estimate(&counts)?),
            radius: None,
            ambiguity_flag: id.ambiguous,
            fallback_flag: false,
            selection: None,
        });
    }
    let last = records.last().expect("t_init >= 1").k.clone();
    Ok(Exploration {
        counts,
        last,
        records,
    })
}

fn identify(env: &Environment, k: &Controller, observed: f64) -> Result<IdentificationResult> {
    identify_realization(observed, &mode_costs(&env.system, k)?)
}

/// Runs one agent for `t_rounds` learning rounds (plus exploration for OFU).
///
/// All agents driven by the same environment see the same realization
/// sequence in their learning rounds.
pub fn run_episode(
    env: &Environment,
    agent: &AgentSpec,
    t_rounds: usize,
) -> Result<Vec<RoundRecord>> {
    if t_rounds == 0 {
        return Err(Error::Precondition("t_rounds must be >= 1".into()));
    }
    let omegas = env.realizations(t_rounds);
    let label = agent.label.as_str();
    let blank = |t: usize, k: Controller, omega: usize, cost: f64, cum_cost: f64| RoundRecord {
        t: t as i64,
        agent: label.to_string(),
        k,
        omega,
        identified: None,
        cost,
        cum_cost,
        theta_hat: None,
        radius: None,
        ambiguity_flag: false,
        fallback_flag: false,
        selection: None,
    };

    let mut records = Vec::with_capacity(t_rounds);
    let mut cum_cost = 0.0;
    match &agent.kind {
        AgentKind::Static(k) => {
            for (t, &omega) in omegas.iter().enumerate() {
                let cost = realized_cost(env, omega, k)?;
                cum_cost += cost;
                records.push(blank(t + 1, k.clone(), omega, cost, cum_cost));
            }
        }
        AgentKind::Oracle { selection } => {
            let k = oracle_controller(&env.system, env.theta_true(), selection)?;
            for (t, &omega) in omegas.iter().enumerate() {
                let cost = realized_cost(env, omega, &k)?;
                cum_cost += cost;
                records.push(blank(t + 1, k.clone(), omega, cost, cum_cost));
            }
        }
        AgentKind::Experts { eta } => {
            let gains = env
                .system
                .care_solutions()
                .into_iter()
                .map(|s| s.map(|s| s.k_star))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Infeasible(format!("experts setup: {e}")))?;
            let mut experts = ExpertsState::new(&env.system, gains, *eta)?;
            let mut rng = stream_rng(env.seed, Stream::Experts);
            for (t, &omega) in omegas.iter().enumerate() {
                let chosen = experts.choose(&mut rng);
                let k = experts.gains()[chosen].clone();
                let cost = realized_cost(env, omega, &k)?;
                let id = identify(env, &k, cost)?;
                experts.update(id.mode_index)?;
                cum_cost += cost;
                let mut rec = blank(t + 1, k, omega, cost, cum_cost);
                rec.identified = Some(id.mode_index);
                rec.ambiguity_flag = id.ambiguous;
                records.push(rec);
            }
        }
        AgentKind::Ofu {
            delta,
            t_init,
            selection,
        } => {
            let exploration = explore_init(env, *t_init, label, selection)?;
            records.extend(exploration.records);
            let mut belief = BeliefState::new(exploration.counts, *t_init, *delta)?;
            let mut warm = exploration.last;
            let mut robust: Option<Controller> = None;
            for (t, &omega) in omegas.iter().enumerate() {
                let (k, fallback, trace) =
                    match optimistic_select(&env.system, &belief, Some(&warm), selection) {
                        Ok(sel) => (
                            sel.k,
                            false,
                            Some(SelectionTrace {
                                objective_trace: sel.trace,
                                theta_opt: sel.theta_opt,
                                outer_iters: sel.outer_iters,
                                converged: sel.converged,
                            }),
                        ),
                        Err(Error::Infeasible(_)) => {
                            if robust.is_none() {
                                robust = Some(robust_controller(&env.system, selection)?);
                            }
                            (robust.clone().expect("set above"), true, None)
                        }
                        Err(e) => return Err(e),
                    };
                let cost = realized_cost(env, omega, &k)?;
                let id = identify(env, &k, cost)?;
                belief.observe(id.mode_index)?;
                let cs = confidence_set(&belief)?;
                cum_cost += cost;
                let mut rec = blank(t + 1, k.clone(), omega, cost, cum_cost);
                rec.identified = Some(id.mode_index);
                rec.ambiguity_flag = id.ambiguous;
                rec.fallback_flag = fallback;
                rec.theta_hat = Some(cs.theta_hat);
                rec.radius = Some(cs.radius);
                rec.selection = trace;
                records.push(rec);
                warm = k;
            }
        }
    }
    Ok(records)
}
