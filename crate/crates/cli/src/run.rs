use std::path::Path;

use ofulqr_core::select::robust_controller;
use ofulqr_core::sim::run_episode;
use ofulqr_core::{AgentKind, AgentSpec, Controller, Environment, Error, RoundRecord};
use rayon::prelude::*;

use crate::config::{AgentDescriptor, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{write_rounds, write_summary};

pub const ROUNDS_FILE: &str = "rounds.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_ECHO_FILE: &str = "config.toml";

/// One agent on one seed.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub agent: String,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
}

impl EpisodeResult {
    pub fn learning_records(&self) -> impl Iterator<Item = &RoundRecord> {
        self.records.iter().filter(|r| !r.is_exploration())
    }

    pub fn total_cost(&self) -> f64 {
        self.learning_records().last().map_or(0.0, |r| r.cum_cost)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run_id: String,
    pub agent: String,
    pub seed: u64,
    pub total_cost: f64,
    pub mean_round_cost: f64,
    pub fallback_rounds: usize,
    pub ambiguous_rounds: usize,
    pub final_theta_hat: Option<Vec<f64>>,
    pub final_radius: Option<f64>,
}

impl SummaryRow {
    fn from_episode(run_id: &str, ep: &EpisodeResult) -> Self {
        let learning: Vec<&RoundRecord> = ep.learning_records().collect();
        let total_cost = ep.total_cost();
        let last = learning.last();
        Self {
            run_id: run_id.to_string(),
            agent: ep.agent.clone(),
            seed: ep.seed,
            total_cost,
            mean_round_cost: total_cost / learning.len().max(1) as f64,
            fallback_rounds: ep.records.iter().filter(|r| r.fallback_flag).count(),
            ambiguous_rounds: ep.records.iter().filter(|r| r.ambiguity_flag).count(),
            final_theta_hat: last.and_then(|r| r.theta_hat.clone()),
            final_radius: last.and_then(|r| r.radius),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Ordered by (agent in config order, seed in config order).
    pub episodes: Vec<EpisodeResult>,
    pub summary: Vec<SummaryRow>,
}

/// Turns configured agents into concrete specs; static gains are computed once.
pub fn resolve_agents(cfg: &ExperimentConfig) -> Result<Vec<AgentSpec>> {
    let mut robust: Option<Controller> = None;
    let mut care: Option<Vec<ofulqr_core::Result<Controller>>> = None;
    cfg.agents
        .iter()
        .map(|agent| {
            let label = agent.label().to_string();
            let kind = match agent {
                AgentDescriptor::Ofu { .. } => AgentKind::Ofu {
                    delta: cfg.delta,
                    t_init: cfg.t_init,
                    selection: cfg.selection.clone(),
                },
                AgentDescriptor::Care { mode, .. } => {
                    let gains = care.get_or_insert_with(|| {
                        cfg.system
                            .care_solutions()
                            .into_iter()
                            .map(|s| s.map(|s| s.k_star))
                            .collect()
                    });
                    AgentKind::Static(gains[*mode].clone()?)
                }
                AgentDescriptor::Robust { .. } => {
                    if robust.is_none() {
                        robust = Some(robust_controller(&cfg.system, &cfg.selection)?);
                    }
                    AgentKind::Static(robust.clone().expect("set above"))
                }
                AgentDescriptor::Static { gain, .. } => {
                    AgentKind::Static(Controller::new(gain.clone())?)
                }
                AgentDescriptor::Experts { eta, .. } => AgentKind::Experts { eta: *eta },
                AgentDescriptor::Oracle { .. } => AgentKind::Oracle {
                    selection: cfg.selection.clone(),
                },
            };
            Ok(AgentSpec::new(label, kind))
        })
        .collect()
}

/// Runs every (agent, seed) episode. Episodes execute in parallel; the
/// output order is fixed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let agents = resolve_agents(cfg)?;
    let jobs: Vec<(&AgentSpec, u64)> = agents
        .iter()
        .flat_map(|a| cfg.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let episodes = jobs
        .par_iter()
        .map(
            |&(agent, seed)| -> std::result::Result<EpisodeResult, Error> {
                let env = Environment::new(cfg.system.clone(), cfg.theta_true.clone(), seed)?;
                Ok(EpisodeResult {
                    agent: agent.label.clone(),
                    seed,
                    records: run_episode(&env, agent, cfg.rounds)?,
                })
            },
        )
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let summary = episodes
        .iter()
        .map(|ep| SummaryRow::from_episode(&cfg.name, ep))
        .collect();
    Ok(RunOutput { episodes, summary })
}

pub fn write_run(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = cfg.system.num_modes();
    write_rounds(&dir.join(ROUNDS_FILE), &cfg.name, p, &out.episodes)?;
    write_summary(&dir.join(SUMMARY_FILE), p, &out.summary)?;
    let echo_path = dir.join(CONFIG_ECHO_FILE);
    std::fs::write(&echo_path, cfg.echo()?).map_err(|e| CliError::io(echo_path, e))
}

/// `run <config>`: simulate and write `rounds.csv`, `summary.csv` and the
/// effective configuration into the configured output directory.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    // fail on an unwritable directory before spending time on episodes
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let out = run_experiment(cfg)?;
    write_run(cfg, &out, &cfg.output_dir)?;
    Ok(out)
}
