//! How often some optimal rewarded polymer to `(-1, 1)` starts left of
//! `-(R+1)`, or one to `(1, 1)` starts right of `R+1`.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::initcond::regfluc;
use blpp_core::scaled::CompatibleTriple;
use blpp_core::stats::wilson_interval;
use serde_json::json;

use super::{Ctx, ExperimentOutput};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub const FINAL_LIMIT: f64 = 0.05;

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let radii = cfg.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0]);
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    // one window for every R, wide enough for the largest
    let half = cfg.window.map_or(rmax + 3.0, |r| r.max(rmax + 3.0));
    let window = (-half, half);
    let fs = cfg.initial_conditions(&["flat"])?;
    let mut table = Table::new("regfluc", &["n", "initial", "index", "seed", "radius", "argmax_left", "argmax_right", "holds"]);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for n in cfg.ns() {
        let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
        let grid = required_grid(n, (-half - cfg.resolution, half + cfg.resolution), (0.0, 1.0), cfg.resolution)?;
        for f in &fs {
            let rows = ctx.pool.map(cfg.samples, |i| {
                let seed = ctx.seed(i);
                let env = sample_environment(seed, n as usize + 1, grid)?;
                let w = super::weights(cfg, &env);
                let reps = radii
                    .iter()
                    .map(|&r| regfluc(&w, &triple, f, r, window))
                    .collect::<blpp_core::Result<Vec<_>>>()?;
                Ok((seed, reps))
            })?;
            let mut fails = vec![0u64; radii.len()];
            for (i, (seed, reps)) in rows.iter().enumerate() {
                for (k, rep) in reps.iter().enumerate() {
                    if !rep.outcome {
                        fails[k] += 1;
                    }
                    table.push(vec![
                        Cell::from(n),
                        f.label().into(),
                        i.into(),
                        (*seed).into(),
                        radii[k].into(),
                        rep.location.0.into(),
                        rep.location.1.into(),
                        rep.outcome.into(),
                    ]);
                }
            }
            let total = cfg.samples as u64;
            let probs: Vec<f64> = fails.iter().map(|&k| k as f64 / total as f64).collect();
            let cis: Vec<(f64, f64)> = fails.iter().map(|&k| wilson_interval(k, total)).collect();
            let monotone = probs.windows(2).all(|p| p[1] <= p[0]);
            let last = *probs.last().unwrap_or(&1.0);
            let pass = monotone && last < FINAL_LIMIT;
            criteria.push(CriterionResult::new(
                "13",
                "RegFluc failure probability decays in R",
                pass,
                format!(
                    "n = {n}, f = {}: P(not RegFluc) = {:?} over R = {:?} (nonincreasing: {monotone}; need < {FINAL_LIMIT} at R = {rmax})",
                    f.label(),
                    probs.iter().map(|p| (p * 1e4).round() / 1e4).collect::<Vec<_>>(),
                    radii
                ),
            ));
            results.push(json!({
                "n": n,
                "initial": f.label(),
                "radii": radii,
                "failures": fails,
                "total": total,
                "failure_probability": probs,
                "ci_low": cis.iter().map(|c| c.0).collect::<Vec<_>>(),
                "ci_high": cis.iter().map(|c| c.1).collect::<Vec<_>>(),
                "nonincreasing": monotone,
                "pass": pass,
            }));
        }
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "property": "every optimal f-rewarded polymer ending in [-1,1] begins within distance R+1 of the origin, except with probability decaying like exp(-O(R^3))",
            "window": [window.0, window.1],
            "argmax_rule": "smallest optimal start for the end point -1, largest for the end point 1",
            "results": results,
        }),
        criteria,
    })
}
