//! Parameter sweeps over `delta`, `t_init` and `rounds`.
//!
//! ```toml
//! delta = [0.05, 0.1, 0.2]   # any list may be omitted; the base value is used
//! t_init = [2, 4]
//! rounds = [30]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::config::{validate, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{fmt_num, write_table};
use crate::run::{run_experiment, write_run};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub delta: Option<Vec<f64>>,
    pub t_init: Option<Vec<i64>>,
    pub rounds: Option<Vec<i64>>,
}

impl SweepGrid {
    pub fn parse(text: &str) -> Result<Self> {
        let grid: SweepGrid = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        for (field, empty) in [
            ("delta", grid.delta.as_ref().is_some_and(Vec::is_empty)),
            ("t_init", grid.t_init.as_ref().is_some_and(Vec::is_empty)),
            ("rounds", grid.rounds.as_ref().is_some_and(Vec::is_empty)),
        ] {
            if empty {
                return Err(CliError::validation(format!("grid.{field}"), "empty list"));
            }
        }
        Ok(grid)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Cartesian product in (delta, t_init, rounds) order, the last varying fastest.
    pub fn points(&self, base: &ExperimentConfig) -> Vec<GridPoint> {
        let deltas = self.delta.clone().unwrap_or_else(|| vec![base.delta]);
        let t_inits = self
            .t_init
            .clone()
            .unwrap_or_else(|| vec![base.t_init as i64]);
        let rounds = self
            .rounds
            .clone()
            .unwrap_or_else(|| vec![base.rounds as i64]);
        let mut points = Vec::new();
        for &delta in &deltas {
            for &t_init in &t_inits {
                for &rounds in &rounds {
                    points.push(GridPoint {
                        index: points.len(),
                        delta,
                        t_init,
                        rounds,
                    });
                }
            }
        }
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub delta: f64,
    pub t_init: i64,
    pub rounds: i64,
}

impl GridPoint {
    pub fn dir_name(&self) -> String {
        format!(
            "point{:03}_delta{}_tinit{}_rounds{}",
            self.index,
            fmt_num(self.delta),
            self.t_init,
            self.rounds
        )
    }

    /// The base configuration with this point's values, revalidated.
    pub fn apply(&self, base: &ExperimentConfig, output_dir: &Path) -> Result<ExperimentConfig> {
        let mut file = base.effective.clone();
        file.delta = Some(self.delta);
        file.t_init = Some(self.t_init);
        file.rounds = Some(self.rounds);
        file.output_dir = Some(output_dir.display().to_string());
        validate(file).map_err(|e| match e {
            CliError::Validation { field, message } => CliError::Validation {
                field: format!("grid point {}: {field}", self.index),
                message,
            },
            other => other,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub point: GridPoint,
    pub dir: PathBuf,
}

/// `sweep <config> <grid>`: one full run per grid point, each in its own
/// subdirectory of the base output directory, plus `manifest.csv`.
pub fn cmd_sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<Vec<SweepEntry>> {
    let root = &base.output_dir;
    std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    let points = grid.points(base);
    let configs = points
        .iter()
        .map(|pt| pt.apply(base, &root.join(pt.dir_name())))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(points.len());
    for (pt, cfg) in points.iter().zip(&configs) {
        let out = run_experiment(cfg)?;
        write_run(cfg, &out, &cfg.output_dir)?;
        entries.push(SweepEntry {
            point: *pt,
            dir: cfg.output_dir.clone(),
        });
    }
    write_table(
        &root.join(MANIFEST_FILE),
        &["point", "delta", "t_init", "rounds", "dir"],
        &entries,
        |e| {
            vec![
                e.point.index.to_string(),
                fmt_num(e.point.delta),
                e.point.t_init.to_string(),
                e.point.rounds.to_string(),
                e.point.dir_name(),
            ]
        },
    )?;
    Ok(entries)
}
