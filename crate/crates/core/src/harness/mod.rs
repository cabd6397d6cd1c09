//! Experiment runner: TOML configs, per-trial CSV transcripts, JSON
//! summaries, bound checks and risk-coverage sweeps.

mod bounds;
mod config;
mod output;
mod run;
mod sweep;

pub use bounds::{BoundKind, BoundReport, STATISTICAL_SLACK};
pub use config::{
    AdversaryKind, AlgorithmConfig, ExperimentConfig, OutputConfig, RunConfig, SweepConfig, SweepParam,
};
pub use output::{read_csv, trial_csv_name, write_csv, write_json, CsvRow, CSV_HEADER};
pub use run::{run_experiment, ExperimentOutput, RunSummary, Totals, TrialSummary};
pub use sweep::{sweep_risk_coverage, SweepOutput, SweepPoint};

use crate::error::Result;

/// Bound reports of `cfg`: those of its sweep when one is configured,
/// otherwise those of a single run.
pub fn verify_bounds(cfg: &ExperimentConfig) -> Result<Vec<BoundReport>> {
    match &cfg.sweep {
        Some(s) => Ok(sweep_risk_coverage(cfg, s.param, &s.values)?.bounds),
        None => Ok(run_experiment(cfg)?.summary.bounds),
    }
}
