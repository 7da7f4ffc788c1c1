// `!(x >= lo)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod pool;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use manifest::{CriterionResult, RunManifest};

use experiments::TAIL_HEADER;
use manifest::MANIFEST_NAME;
use output::{write_file, write_json};
use pool::Pool;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory: explicit, then the config's, then `out/<experiment>`.
pub fn output_dir(cfg: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.out_dir.as_ref().map(|d| if d.is_absolute() { d.clone() } else { cfg.base_dir.join(d) }))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.experiment))
}

/// Runs the configured experiment with `threads` workers and writes every
/// table, the summary, optional plots and the manifest into `out`.
pub fn execute(cfg: &ExperimentConfig, threads: usize, out: &Path) -> Result<RunManifest> {
    let started = Instant::now();
    let pool = Pool::new(threads)?;
    let result = experiments::run(&cfg.experiment, cfg, &pool)?;
    let mut files = Vec::new();
    for t in &result.tables {
        let name = format!("{}.csv", t.name);
        files.push(write_file(out, &name, &t.to_bytes())?);
        if cfg.plots && t.header.iter().map(String::as_str).eq(TAIL_HEADER.iter().copied()) {
            let csv = plot::read_csv(&out.join(&name))?;
            let svg = plot::render(&csv, &out.join(&name), false)?;
            files.push(write_file(out, &format!("{}.svg", t.name), svg.as_bytes())?);
        }
    }
    let summary = json!({
        "experiment": cfg.experiment,
        "artifact_version": ARTIFACT_VERSION,
        "master_seed": cfg.master_seed,
        "samples": cfg.samples,
        "n": cfg.ns(),
        "resolution": cfg.resolution,
        "criteria": result.criteria,
        "summary": result.summary,
    });
    files.push(write_json(out, "summary.json", &summary)?);
    let manifest = RunManifest {
        config: cfg.clone(),
        artifact_version: ARTIFACT_VERSION.into(),
        threads: pool.threads(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        seed_rule: experiments::SEED_RULE.into(),
        criteria: result.criteria,
        files,
    };
    write_json(out, MANIFEST_NAME, &manifest)?;
    Ok(manifest)
}
