//! One-point tails of the parabolically adjusted narrow-wedge profile
//! `NrL(z) + 2^{-1/2} z^2`, upper and lower, against `exp(-c s^{3/2})`.

use blpp_core::env::{required_grid, Environment};
use blpp_core::scaled::CompatibleTriple;
use blpp_core::stats::estimate_tail;
use serde_json::json;

use super::{exponent_criterion, push_tail, reference_overlay, tail_json, Ctx, ExperimentOutput, TAIL_HEADER};
use crate::error::Result;
use crate::output::{Cell, Table};

pub const EXPONENT_BAND: (f64, f64) = (1.0, 2.25);

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let zs = cfg.points.clone().unwrap_or_else(|| vec![0.0, 1.0]);
    let levels = ctx.levels_or(&[0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0]);
    let constants = ctx.constants()?;
    let mut table = Table::new("reg_tails", &["n", "index", "seed", "z", "adjusted"]);
    let mut tails = Table::new("reg_tails_tail", TAIL_HEADER);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    let zlo = zs.iter().cloned().fold(0.0, f64::min);
    let zhi = zs.iter().cloned().fold(0.0, f64::max);
    for n in cfg.ns() {
        let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
        let grid = required_grid(n, (zlo - cfg.resolution, zhi + cfg.resolution), (0.0, 1.0), cfg.resolution)?;
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            let env = Environment::streamed(seed, n as usize + 1, grid)?.materialize();
            let w = super::weights(cfg, &env);
            let vals = zs.iter().map(|&z| w.adjusted(&triple, 0.0, z)).collect::<blpp_core::Result<Vec<f64>>>()?;
            Ok((seed, vals))
        })?;
        let mut per_z = Vec::new();
        for (k, &z) in zs.iter().enumerate() {
            for (i, (seed, v)) in rows.iter().enumerate() {
                table.push(vec![Cell::from(n), i.into(), (*seed).into(), z.into(), v[k].into()]);
            }
            let up: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            let down: Vec<f64> = up.iter().map(|v| -v).collect();
            let cu = estimate_tail(&up, &levels)?;
            let cd = estimate_tail(&down, &levels)?;
            push_tail(&mut tails, &format!("n={n},z={z},upper"), &cu);
            push_tail(&mut tails, &format!("n={n},z={z},lower"), &cd);
            let (mut a, fa) = exponent_criterion("11", "one-point upper tail exponent", &cu, EXPONENT_BAND, None);
            let (mut b, fb) = exponent_criterion("11", "one-point lower tail exponent", &cd, EXPONENT_BAND, None);
            a.detail = format!("n = {n}, z = {z}: {}", a.detail);
            b.detail = format!("n = {n}, z = {z}: {}", b.detail);
            per_z.push(json!({
                "z": z,
                "upper": {"tail": tail_json(&cu), "fit": fa, "pass": a.pass},
                "lower": {"tail": tail_json(&cd), "fit": fb, "pass": b.pass},
            }));
            criteria.push(a);
            criteria.push(b);
        }
        results.push(json!({"n": n, "points": per_z}));
    }
    Ok(ExperimentOutput {
        tables: vec![table, tails],
        summary: json!({
            "property": "the normalized narrow-wedge profile plus 2^(-1/2) z^2 has one-point upper and lower tails exp(-c s^(3/2)), as for the top curve of a regular line ensemble",
            "points": zs,
            "exponent_target": 1.5,
            "exponent_band": [EXPONENT_BAND.0, EXPONENT_BAND.1],
            "reference": reference_overlay(&constants, &levels, 1.5),
            "results": results,
        }),
        criteria,
    })
}
