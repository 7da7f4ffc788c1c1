//! `M(0, 0 -> n, n) / n`, which grows at rate 2.

use blpp_core::env::Environment;
use blpp_core::lpp::{continuity_correction, max_energy};
use serde_json::json;

use super::{aligned_grid, mean, std_dev, Ctx, ExperimentOutput};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub const BAND: (f64, f64) = (1.8, 2.2);

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let mut table = Table::new("growth", &["n", "index", "seed", "energy", "energy_over_n"]);
    let mut per_n = Vec::new();
    let mut criteria = Vec::new();
    for n in cfg.ns() {
        let grid = aligned_grid(n, n as f64, cfg.resolution)?;
        let corr = if cfg.continuity_correction { n as f64 * continuity_correction(grid.step) } else { 0.0 };
        let nf = n as f64;
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            // streamed: one line in memory at a time
            let env = Environment::streamed(seed, n as usize + 1, grid)?;
            let m = max_energy(&env, (0.0, 0), (nf, n as usize))? + corr;
            Ok((seed, m))
        })?;
        let ratios: Vec<f64> = rows.iter().map(|r| r.1 / nf).collect();
        for (i, (seed, m)) in rows.iter().enumerate() {
            table.push(vec![Cell::from(n), i.into(), (*seed).into(), (*m).into(), (m / nf).into()]);
        }
        let m = mean(&ratios);
        let se = std_dev(&ratios) / (ratios.len() as f64).sqrt();
        let pass = (BAND.0..=BAND.1).contains(&m);
        criteria.push(CriterionResult::new(
            "6",
            "linear growth at rate 2",
            pass,
            format!("n = {n}: mean M/n = {m:.4} +- {se:.4} (need [{}, {}])", BAND.0, BAND.1),
        ));
        per_n.push(json!({"n": n, "mean_energy_over_n": m, "stderr": se, "grid_step": grid.step, "pass": pass}));
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "property": "the maximal energy from (0,0) to (n,n) grows linearly at rate 2n",
            "continuity_correction": cfg.continuity_correction,
            "results": per_n,
        }),
        criteria,
    })
}
