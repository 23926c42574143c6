//! Experiment configuration files (TOML).
//!
//! ```toml
//! name = "demo"            # run_id column; default "run"
//! rounds = 30
//! t_init = 2               # default max(p, 2)
//! delta = 0.1              # default 0.1
//! seeds = [0, 1, 2]        # default [0]
//! output_dir = "out"       # default "out"
//! theta_true = [0.5, 0.5]
//!
//! [system]
//! Q = { rows = 3, cols = 3, data = [1, 0, 0, 0, 1, 0, 0, 0, 1] }   # row-major
//! R = { rows = 1, cols = 1, data = [1] }
//!
//! [[system.modes]]
//! A = { rows = 3, cols = 3, data = [...] }
//! B = { rows = 3, cols = 1, data = [...] }
//!
//! [[agents]]
//! kind = "ofu"             # ofu | care | robust | static | experts | oracle
//! label = "Kproposed"
//!
//! [[agents]]
//! kind = "care"
//! mode = 1                 # 1-based mode whose LQR gain is applied
//!
//! [selection]              # optional overrides of the descent settings
//! max_inner_iters = 500
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use ofulqr_core::belief::in_simplex;
use ofulqr_core::{CostWeights, SelectionConfig, SwitchedSystem, SystemMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().iter().copied().collect(),
        }
    }

    fn to_matrix(&self, field: &str) -> Result<DMatrix<f64>> {
        if self.rows * self.cols != self.data.len() || self.rows == 0 || self.cols == 0 {
            return Err(CliError::validation(
                field,
                format!(
                    "{}x{} matrix needs {} entries, got {}",
                    self.rows,
                    self.cols,
                    self.rows * self.cols,
                    self.data.len()
                ),
            ));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    #[serde(rename = "A")]
    pub a: Option<MatrixSpec>,
    #[serde(rename = "B")]
    pub b: Option<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "Q")]
    pub q: Option<MatrixSpec>,
    #[serde(rename = "R")]
    pub r: Option<MatrixSpec>,
    pub modes: Option<Vec<ModeSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub kind: String,
    pub label: Option<String>,
    /// 1-based mode for `care` agents.
    pub mode: Option<usize>,
    pub gain: Option<MatrixSpec>,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionOverrides {
    pub max_outer_iters: Option<usize>,
    pub outer_tol: Option<f64>,
    pub max_inner_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub backtrack_shrink: Option<f64>,
    pub armijo_c: Option<f64>,
    pub init_step: Option<f64>,
}

impl SelectionOverrides {
    fn apply(&self) -> SelectionConfig {
        let d = SelectionConfig::default();
        SelectionConfig {
            max_outer_iters: self.max_outer_iters.unwrap_or(d.max_outer_iters),
            outer_tol: self.outer_tol.unwrap_or(d.outer_tol),
            max_inner_iters: self.max_inner_iters.unwrap_or(d.max_inner_iters),
            grad_tol: self.grad_tol.unwrap_or(d.grad_tol),
            backtrack_shrink: self.backtrack_shrink.unwrap_or(d.backtrack_shrink),
            armijo_c: self.armijo_c.unwrap_or(d.armijo_c),
            init_step: self.init_step.unwrap_or(d.init_step),
        }
    }

    fn full(cfg: &SelectionConfig) -> Self {
        Self {
            max_outer_iters: Some(cfg.max_outer_iters),
            outer_tol: Some(cfg.outer_tol),
            max_inner_iters: Some(cfg.max_inner_iters),
            grad_tol: Some(cfg.grad_tol),
            backtrack_shrink: Some(cfg.backtrack_shrink),
            armijo_c: Some(cfg.armijo_c),
            init_step: Some(cfg.init_step),
        }
    }
}

/// The file as written by the user; every field optional so that missing
/// ones are reported by path during validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: Option<String>,
    pub rounds: Option<i64>,
    pub t_init: Option<i64>,
    pub delta: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<String>,
    pub theta_true: Option<Vec<f64>>,
    pub system: Option<SystemSpec>,
    pub agents: Option<Vec<AgentEntry>>,
    pub selection: Option<SelectionOverrides>,
}

/// A comparison scheme as configured, before gains are computed.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentDescriptor {
    Ofu {
        label: String,
    },
    /// LQR-optimal gain of one mode (0-based).
    Care {
        label: String,
        mode: usize,
    },
    Robust {
        label: String,
    },
    Static {
        label: String,
        gain: DMatrix<f64>,
    },
    Experts {
        label: String,
        eta: f64,
    },
    Oracle {
        label: String,
    },
}

impl AgentDescriptor {
    pub fn label(&self) -> &str {
        match self {
            AgentDescriptor::Ofu { label }
            | AgentDescriptor::Care { label, .. }
            | AgentDescriptor::Robust { label }
            | AgentDescriptor::Static { label, .. }
            | AgentDescriptor::Experts { label, .. }
            | AgentDescriptor::Oracle { label } => label,
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub system: SwitchedSystem,
    pub theta_true: Vec<f64>,
    pub agents: Vec<AgentDescriptor>,
    pub rounds: usize,
    pub t_init: u64,
    pub delta: f64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub selection: SelectionConfig,
    /// The configuration with all defaults filled in.
    pub effective: ConfigFile,
}

impl ExperimentConfig {
    /// Serialized effective configuration; loading it reproduces this config.
    pub fn echo(&self) -> Result<String> {
        toml::to_string(&self.effective).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self.effective.output_dir = Some(self.output_dir.display().to_string());
        self
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    validate(file)
}

pub fn validate(file: ConfigFile) -> Result<ExperimentConfig> {
    let system_spec = file
        .system
        .as_ref()
        .ok_or_else(|| CliError::validation("system", "missing"))?;
    let q = system_spec
        .q
        .as_ref()
        .ok_or_else(|| CliError::validation("system.Q", "missing"))?
        .to_matrix("system.Q")?;
    let r = system_spec
        .r
        .as_ref()
        .ok_or_else(|| CliError::validation("system.R", "missing"))?
        .to_matrix("system.R")?;
    CostWeights::new(q.clone(), DMatrix::identity(1, 1))
        .map_err(|e| CliError::validation("system.Q", e))?;
    CostWeights::new(DMatrix::identity(1, 1), r.clone())
        .map_err(|e| CliError::validation("system.R", e))?;

    let mode_specs = system_spec
        .modes
        .as_ref()
        .filter(|m| !m.is_empty())
        .ok_or_else(|| CliError::validation("system.modes", "at least one mode is required"))?;
    let mut modes = Vec::with_capacity(mode_specs.len());
    for (i, spec) in mode_specs.iter().enumerate() {
        let field = |x: &str| format!("system.modes[{i}].{x}");
        let a = spec
            .a
            .as_ref()
            .ok_or_else(|| CliError::validation(field("A"), "missing"))?
            .to_matrix(&field("A"))?;
        let b = spec
            .b
            .as_ref()
            .ok_or_else(|| CliError::validation(field("B"), "missing"))?
            .to_matrix(&field("B"))?;
        modes.push(
            SystemMode::new(a, b)
                .map_err(|e| CliError::validation(format!("system.modes[{i}]"), e))?,
        );
    }
    let weights = CostWeights::new(q, r).map_err(|e| CliError::validation("system", e))?;
    let system =
        SwitchedSystem::new(modes, weights).map_err(|e| CliError::validation("system", e))?;
    let p = system.num_modes();

    let theta_true = file
        .theta_true
        .clone()
        .ok_or_else(|| CliError::validation("theta_true", "missing"))?;
    if theta_true.len() != p {
        return Err(CliError::validation(
            "theta_true",
            format!("expected {p} entries, got {}", theta_true.len()),
        ));
    }
    if !in_simplex(&theta_true) {
        return Err(CliError::validation(
            "theta_true",
            format!("{theta_true:?} is not in the probability simplex"),
        ));
    }

    let rounds = file
        .rounds
        .ok_or_else(|| CliError::validation("rounds", "missing"))?;
    if rounds < 1 {
        return Err(CliError::validation(
            "rounds",
            format!("must be >= 1, got {rounds}"),
        ));
    }
    let t_init = file.t_init.unwrap_or(p.max(2) as i64);
    if t_init < 1 {
        return Err(CliError::validation(
            "t_init",
            format!("must be >= 1, got {t_init}"),
        ));
    }
    let delta = file.delta.unwrap_or(DEFAULT_DELTA);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::validation(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ));
    }
    let seeds = file.seeds.clone().unwrap_or_else(|| vec![0]);
    if seeds.is_empty() {
        return Err(CliError::validation(
            "seeds",
            "at least one seed is required",
        ));
    }
    let selection_overrides = file.selection.clone().unwrap_or_default();
    let selection = selection_overrides.apply();
    selection
        .validate()
        .map_err(|e| CliError::validation("selection", e))?;

    let entries = file
        .agents
        .as_ref()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| CliError::validation("agents", "at least one agent is required"))?;
    let mut agents = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let agent = parse_agent(i, entry, &system)?;
        if agents
            .iter()
            .any(|a: &AgentDescriptor| a.label() == agent.label())
        {
            return Err(CliError::validation(
                format!("agents[{i}].label"),
                format!("duplicate label {:?}", agent.label()),
            ));
        }
        agents.push(agent);
    }

    let name = file.name.clone().unwrap_or_else(|| "run".to_string());
    let output_dir = file.output_dir.clone().unwrap_or_else(|| "out".to_string());
    let effective = ConfigFile {
        name: Some(name.clone()),
        rounds: Some(rounds),
        t_init: Some(t_init),
        delta: Some(delta),
        seeds: Some(seeds.clone()),
        output_dir: Some(output_dir.clone()),
        theta_true: Some(theta_true.clone()),
        system: file.system.clone(),
        agents: Some(agents.iter().map(agent_entry).collect()),
        selection: Some(SelectionOverrides::full(&selection)),
    };

    Ok(ExperimentConfig {
        name,
        system,
        theta_true,
        agents,
        rounds: rounds as usize,
        t_init: t_init as u64,
        delta,
        seeds,
        output_dir: PathBuf::from(output_dir),
        selection,
        effective,
    })
}

fn parse_agent(i: usize, entry: &AgentEntry, system: &SwitchedSystem) -> Result<AgentDescriptor> {
    let field = |x: &str| format!("agents[{i}].{x}");
    let label = |default: String| entry.label.clone().unwrap_or(default);
    let agent = match entry.kind.as_str() {
        "ofu" => AgentDescriptor::Ofu {
            label: label("Kproposed".into()),
        },
        "care" => {
            let mode = entry
                .mode
                .ok_or_else(|| CliError::validation(field("mode"), "missing"))?;
            if mode == 0 || mode > system.num_modes() {
                return Err(CliError::validation(
                    field("mode"),
                    format!("must lie in 1..={}, got {mode}", system.num_modes()),
                ));
            }
            AgentDescriptor::Care {
                label: label(format!("K{mode}")),
                mode: mode - 1,
            }
        }
        "robust" => AgentDescriptor::Robust {
            label: label("Krobust".into()),
        },
        "static" => {
            let gain = entry
                .gain
                .as_ref()
                .ok_or_else(|| CliError::validation(field("gain"), "missing"))?
                .to_matrix(&field("gain"))?;
            if gain.shape() != (system.input_dim(), system.state_dim()) {
                return Err(CliError::validation(
                    field("gain"),
                    format!("expected {}x{}", system.input_dim(), system.state_dim()),
                ));
            }
            AgentDescriptor::Static {
                label: label(format!("static{i}")),
                gain,
            }
        }
        "experts" => {
            let eta = entry.eta.unwrap_or(DEFAULT_ETA);
            if !(eta > 0.0 && eta <= 0.5) {
                return Err(CliError::validation(
                    field("eta"),
                    format!("must lie in (0, 0.5], got {eta}"),
                ));
            }
            AgentDescriptor::Experts {
                label: label("Experts".into()),
                eta,
            }
        }
        "oracle" => AgentDescriptor::Oracle {
            label: label("Oracle".into()),
        },
        other => {
            return Err(CliError::validation(
                field("kind"),
                format!("unknown agent kind {other:?}"),
            ))
        }
    };
    Ok(agent)
}

fn agent_entry(agent: &AgentDescriptor) -> AgentEntry {
    let mut entry = AgentEntry {
        kind: String::new(),
        label: Some(agent.label().to_string()),
        mode: None,
        gain: None,
        eta: None,
    };
    entry.kind = match agent {
        AgentDescriptor::Ofu { .. } => "ofu",
        AgentDescriptor::Care { mode, .. } => {
            entry.mode = Some(mode + 1);
            "care"
        }
        AgentDescriptor::Robust { .. } => "robust",
        AgentDescriptor::Static { gain, .. } => {
            entry.gain = Some(MatrixSpec::from_matrix(gain));
            "static"
        }
        AgentDescriptor::Experts { eta, .. } => {
            entry.eta = Some(*eta);
            "experts"
        }
        AgentDescriptor::Oracle { .. } => "oracle",
    }
    .to_string();
    entry
}
