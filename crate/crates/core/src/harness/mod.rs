//! Experiment harness: declarative configs, seeded runs, reports and a
//! self-test.

mod config;
mod run;
mod selftest;

use std::fs;
use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{run, ExperimentReport, RunOutput, SurrogateReport};
pub use selftest::{random_piecewise_linear, selftest, Check};

use crate::error::Result;

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn write_levels(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["value", "level"])?;
    let n = values.len() as f64;
    for (i, v) in sorted(values).iter().enumerate() {
        w.write_record([v.to_string(), ((i + 1) as f64 / n).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Both empirical CDFs evaluated on the pooled sorted values.
fn write_overlay(path: &Path, stat: &[f64], limit: &[f64]) -> Result<()> {
    let (a, b) = (sorted(stat), sorted(limit));
    let mut pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["value", "stat_level", "limit_level"])?;
    let level = |s: &[f64], x: f64| s.partition_point(|&v| v <= x) as f64 / s.len() as f64;
    for x in pooled {
        w.write_record([
            x.to_string(),
            level(&a, x).to_string(),
            level(&b, x).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, the two replicate sets and their ECDF overlay into
/// `dir` (created if missing).
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let report = serde_json::to_string_pretty(&out.report)?;
    fs::write(dir.join("report.json"), report + "\n")?;
    write_levels(&dir.join("stat_replicates.csv"), &out.statistic)?;
    write_levels(&dir.join("limit_replicates.csv"), &out.limit)?;
    write_overlay(&dir.join("ecdf_overlay.csv"), &out.statistic, &out.limit)?;
    Ok(())
}
