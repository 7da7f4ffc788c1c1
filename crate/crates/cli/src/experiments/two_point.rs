//! Two-point increments of the adjusted narrow-wedge profile at gap `eps`,
//! jointly with the global bound `G_{K/4}` on `[x - 2, x + 2]`: the joint
//! tail in `K` is sub-Gaussian.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::scaled::CompatibleTriple;
use blpp_core::stats::{estimate_tail, two_point_record, two_point_tail};
use serde_json::json;

use super::{exponent_criterion, push_tail, reference_overlay, tail_json, Ctx, ExperimentOutput, TAIL_HEADER};
use crate::error::Result;
use crate::output::{Cell, Table};

pub const EXPONENT_BAND: (f64, f64) = (1.5, 2.5);

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let eps = ctx.epsilons_or(&[0.0625]);
    let x = cfg.points.as_ref().and_then(|p| p.first().copied()).unwrap_or(0.0);
    let levels = ctx.levels_or(&[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0]);
    let constants = ctx.constants()?;
    let mut table = Table::new("two_point", &["n", "index", "seed", "eps", "scaled_diff", "global_sup"]);
    let mut tails = Table::new("two_point_tail", TAIL_HEADER);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for n in cfg.ns() {
        let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
        let pad = 2.0 * cfg.resolution;
        let window = (x - 2.0 - pad, x + 2.0 + pad);
        let grid = required_grid(n, (window.0.min(0.0), window.1.max(0.0)), (0.0, 1.0), cfg.resolution)?;
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            let env = sample_environment(seed, n as usize + 1, grid)?;
            let w = super::weights(cfg, &env);
            let p = w.forward_profile(&triple, 0.0, Some(window))?;
            let recs = eps
                .iter()
                .map(|&e| two_point_record(&p.ys, &p.weights, x, e))
                .collect::<blpp_core::Result<Vec<_>>>()?;
            Ok((seed, recs))
        })?;
        let mut per_eps = Vec::new();
        for (k, &e) in eps.iter().enumerate() {
            for (i, (seed, r)) in rows.iter().enumerate() {
                table.push(vec![
                    Cell::from(n),
                    i.into(),
                    (*seed).into(),
                    e.into(),
                    r[k].scaled_diff.into(),
                    r[k].global_sup.into(),
                ]);
            }
            let recs: Vec<_> = rows.iter().map(|r| r.1[k]).collect();
            let joint = two_point_tail(&recs, &levels)?;
            let diffs: Vec<f64> = recs.iter().map(|r| r.scaled_diff).collect();
            let marginal = estimate_tail(&diffs, &levels)?;
            push_tail(&mut tails, &format!("n={n},eps={e},joint"), &joint);
            push_tail(&mut tails, &format!("n={n},eps={e},increment"), &marginal);
            let (mut c, fit) = exponent_criterion("12", "two-point sub-Gaussian decay", &joint, EXPONENT_BAND, None);
            c.detail = format!("n = {n}, eps = {e}: {}", c.detail);
            let (_, marginal_fit) = exponent_criterion("12", "", &marginal, EXPONENT_BAND, None);
            per_eps.push(json!({
                "eps": e,
                "joint_tail": tail_json(&joint),
                "joint_fit": fit,
                "increment_tail": tail_json(&marginal),
                "increment_fit": marginal_fit,
                "pass": c.pass,
            }));
            criteria.push(c);
        }
        results.push(json!({"n": n, "per_eps": per_eps}));
    }
    Ok(ExperimentOutput {
        tables: vec![table, tails],
        summary: json!({
            "property": "for the narrow-wedge profile, the probability that the adjusted increment over a gap eps exceeds K eps^(1/2) while the profile stays within K/4 on a window of radius 2 decays like exp(-O(K^2))",
            "x": x,
            "exponent_target": 2.0,
            "exponent_band": [EXPONENT_BAND.0, EXPONENT_BAND.1],
            "reference": reference_overlay(&constants, &levels, 2.0),
            "results": results,
        }),
        criteria,
    })
}
