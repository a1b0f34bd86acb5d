//! Batch driver for the `qdisc` command: discord sweeps over anisotropy and
//! temperature grids, low-lying spectra, and finite-size-scaling reports.
//!
//! Sweeps write one CSV row per computed quantity (see [`record::HEADER`]);
//! `scaling` reads such files and writes a JSON report.

pub mod config;
pub mod error;
pub mod grid;
pub mod record;
pub mod run;
pub mod scaling;
pub mod sink;

pub use config::{Args, Command, Kind, RunConfig};
pub use error::{CliError, CliResult};
pub use record::ResultRecord;

/// Executes a resolved configuration.
pub fn execute(cfg: &RunConfig) -> CliResult<()> {
    match cfg.command {
        Command::Scaling => {
            let report = scaling::run_scaling(&cfg.scaling, cfg.out.as_deref())?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        _ => run::run_grid(cfg),
    }
}
