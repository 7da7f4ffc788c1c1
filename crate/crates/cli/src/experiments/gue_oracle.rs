//! DP samples of `M(0, 0 -> 1, n)` against the top particle of Dyson
//! Brownian motion with `n + 1` particles at time 1.

use blpp_core::env::{derive_seed, Environment};
use blpp_core::lpp::{continuity_correction, max_energy};
use blpp_core::stats::{dyson_top_oracle, ks_distance};
use serde_json::json;

use super::{aligned_grid, mean, Ctx, ExperimentOutput};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub const KS_THRESHOLD: f64 = 0.06;

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let mut table = Table::new("gue_oracle", &["lines_minus_one", "index", "seed", "dp_energy", "oracle_top"]);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    let mut ns = cfg.ns();
    ns.sort_unstable();
    for &n in &ns {
        // the resolution is in scaled units of this n
        let grid = aligned_grid(n, 1.0, cfg.resolution)?;
        let corr = if cfg.continuity_correction { n as f64 * continuity_correction(grid.step) } else { 0.0 };
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            let env = Environment::streamed(seed, n as usize + 1, grid)?;
            let m = max_energy(&env, (0.0, 0), (1.0, n as usize))? + corr;
            let top = dyson_top_oracle(n as usize + 1, 1.0, derive_seed(&[seed, 1]))?;
            Ok((seed, m, top))
        })?;
        let dp: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let oracle: Vec<f64> = rows.iter().map(|r| r.2).collect();
        for (i, (seed, m, t)) in rows.iter().enumerate() {
            table.push(vec![Cell::from(n), i.into(), (*seed).into(), (*m).into(), (*t).into()]);
        }
        let ks = ks_distance(&dp, &oracle)?;
        let pass = ks < KS_THRESHOLD;
        let label = if n == 1 { "normalization pin (2 particles)" } else { "Dyson cross-oracle" };
        criteria.push(CriterionResult::new(
            "7",
            label,
            pass,
            format!("n + 1 = {} particles: KS {ks:.4} (need < {KS_THRESHOLD}); means dp {:.4}, oracle {:.4}", n + 1, mean(&dp), mean(&oracle)),
        ));
        results.push(json!({
            "particles": n + 1,
            "grid_step": grid.step,
            "ks_distance": ks,
            "threshold": KS_THRESHOLD,
            "pass": pass,
            "dp_mean": mean(&dp),
            "oracle_mean": mean(&oracle),
        }));
    }
    // the cross-oracle result only counts once the normalization pin holds
    if ns.first() == Some(&1) && ns.len() > 1 && !criteria[0].pass {
        for c in criteria.iter_mut().skip(1) {
            c.pass = false;
            c.detail.push_str("; normalization pin failed");
        }
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "property": "the maximal energy across n+1 lines over unit time has the law of the top particle of Dyson Brownian motion with n+1 particles",
            "continuity_correction": cfg.continuity_correction,
            "ks_distance": results.last().map(|r| r["ks_distance"].clone()),
            "pass": criteria.iter().all(|c| c.pass),
            "results": results,
        }),
        criteria,
    })
}
