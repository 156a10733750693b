//! Experiment harness for the private distance-release mechanisms:
//! configuration, batch runner, CSV output and plots.

pub mod config;
pub mod experiment;
pub mod plot;
pub mod report;

pub use config::{ExperimentConfig, Family, Mechanism};
pub use experiment::{run_experiment, ErrorRecord, Panel};

use std::path::PathBuf;

use anyhow::{Context, Result};

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "APSP_DP_OUTPUT_DIR";

/// Runs the experiment and writes `errors.csv`, `errors.svg` and
/// `errors.dat` into the output directory. Returns that directory.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<(PathBuf, Vec<Panel>)> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| cfg.output_dir.clone());
    let panels = run_experiment(cfg)?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let all: Vec<ErrorRecord> = panels.iter().flat_map(|p| p.records.iter().cloned()).collect();
    if panels.len() == 1 {
        report::emit_csv(&all, &dir.join("errors.csv"))?;
    } else {
        for (i, p) in panels.iter().enumerate() {
            report::emit_csv(&p.records, &dir.join(format!("errors_panel{i}.csv")))?;
        }
    }
    plot::emit_plot(&panels, &dir, "errors")?;
    Ok((dir, panels))
}
