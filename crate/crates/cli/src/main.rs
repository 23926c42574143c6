use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ofulqr_cli::reproduce::DEFAULT_SEEDS;
use ofulqr_cli::sweep::SweepGrid;
use ofulqr_cli::{cmd_reproduce_paper, cmd_run, cmd_sweep, load_config, CliError, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "ofulqr",
    version,
    about = "Online personalization of LQR gains on switched linear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long, env = OUTPUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Run the three-state two-mode benchmark and write comparison tables.
    ReproducePaper {
        #[arg(long, default_value_t = DEFAULT_SEEDS)]
        seeds: usize,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "out/reproduce-paper")]
        out: PathBuf,
    },
    /// Run a base config over a grid of delta / t_init / rounds values.
    Sweep {
        config: PathBuf,
        grid: PathBuf,
        #[arg(long, env = OUTPUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(dir) = out {
                cfg = cfg.with_output_dir(dir);
            }
            let result = cmd_run(&cfg)?;
            eprintln!(
                "wrote {} episodes to {}",
                result.episodes.len(),
                cfg.output_dir.display()
            );
        }
        Command::ReproducePaper { seeds, out } => {
            if seeds == 0 {
                return Err(CliError::validation("--seeds", "must be >= 1"));
            }
            let result = cmd_reproduce_paper(&out, seeds)?;
            for row in &result.compare {
                println!(
                    "{:<10} mean {:>10.4}  std {:>8.4}  wins/losses/ties vs Kproposed {}/{}/{}",
                    row.agent,
                    row.mean_total_cost,
                    row.std_total_cost,
                    row.wins,
                    row.losses,
                    row.ties
                );
            }
            eprintln!("wrote results to {}", out.display());
        }
        Command::Sweep { config, grid, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(dir) = out {
                cfg = cfg.with_output_dir(dir);
            }
            let grid = SweepGrid::load(&grid)?;
            let entries = cmd_sweep(&cfg, &grid)?;
            eprintln!(
                "wrote {} grid points to {}",
                entries.len(),
                cfg.output_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
