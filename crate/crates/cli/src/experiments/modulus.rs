//! The modulus statistic `S_n` of the f-rewarded profile on `[-1, 1]`:
//! stable in `n`, with a polynomially decaying tail.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::initcond::{f_rewarded_profile, InitialCondition};
use blpp_core::scaled::CompatibleTriple;
use blpp_core::stats::{estimate_tail, modulus_statistic};
use serde_json::{json, Value};

use super::{push_tail, quantile, tail_json, Ctx, ExperimentOutput, TAIL_HEADER};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub const DEFAULT_CUTOFF: f64 = 1.0 / 256.0;
pub const DEFAULT_R: f64 = 3.0;
pub const RATIO_LIMIT: f64 = 2.0;
pub const FINAL_LIMIT: f64 = 0.1;
pub const PERCENTILES: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

pub fn cutoff_for(ctx: &Ctx, n: u32) -> f64 {
    let floor = 2.0 * ctx.cfg.resolution;
    match (ctx.cfg.cutoff, ctx.cfg.modulus_constants.and_then(|m| m.c_prime)) {
        (Some(c), _) => c,
        (None, Some(cp)) => (2.0 * (-cp * (n as f64).powf(1.0 / 12.0)).exp()).max(floor),
        (None, None) => DEFAULT_CUTOFF.max(floor),
    }
}

/// `S_n` samples of `f` at `n`, in index order.
pub fn sample_statistic(ctx: &Ctx, n: u32, f: &InitialCondition, cutoff: f64) -> Result<Vec<(u64, f64)>> {
    let cfg = ctx.cfg;
    let r = cfg.window.unwrap_or(DEFAULT_R);
    let xw = (-(r + 1.0), r + 1.0);
    let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
    let pad = 2.0 * cfg.resolution;
    let grid = required_grid(n, (xw.0 - pad, xw.1 + pad), (0.0, 1.0), cfg.resolution)?;
    ctx.pool.map(cfg.samples, |i| {
        let seed = ctx.seed(i);
        let env = sample_environment(seed, n as usize + 1, grid)?;
        let w = super::weights(cfg, &env);
        let p = f_rewarded_profile(&w, &triple, f, xw, (-1.0 - pad, 1.0 + pad))?;
        Ok((seed, modulus_statistic(&p.ys, &p.weights, cutoff)?))
    })
}

pub fn percentile_table(vals: &[f64]) -> Value {
    Value::Object(PERCENTILES.iter().map(|&q| (format!("p{}", (q * 100.0).round()), json!(quantile(vals, q)))).collect())
}

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let fs = cfg.initial_conditions(&["flat", "narrow-wedge"])?;
    let levels = ctx.levels_or(&[1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0]);
    let constants = ctx.constants()?;
    let mut table = Table::new("modulus", &["initial", "n", "index", "seed", "cutoff", "s_n"]);
    let mut tails = Table::new("modulus_tail", TAIL_HEADER);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for f in &fs {
        let mut p90s = Vec::new();
        let mut per_n = Vec::new();
        let mut tail_ok = true;
        let mut tail_notes = Vec::new();
        for n in cfg.ns() {
            let cutoff = cutoff_for(ctx, n);
            let rows = sample_statistic(ctx, n, f, cutoff)?;
            for (i, (seed, s)) in rows.iter().enumerate() {
                table.push(vec![Cell::from(f.label()), n.into(), i.into(), (*seed).into(), cutoff.into(), (*s).into()]);
            }
            let vals: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let curve = estimate_tail(&vals, &levels)?;
            push_tail(&mut tails, &format!("{},n={n}", f.label()), &curve);
            let last = *curve.probabilities.last().unwrap_or(&1.0);
            let ok = curve.is_nonincreasing() && last < FINAL_LIMIT;
            tail_ok &= ok;
            tail_notes.push(format!("n = {n}: P(S >= {}) = {last:.4}", levels.last().unwrap_or(&f64::NAN)));
            p90s.push((n, quantile(&vals, 0.9)));
            per_n.push(json!({
                "n": n,
                "cutoff": cutoff,
                "percentiles": percentile_table(&vals),
                "tail": tail_json(&curve),
                "tail_pass": ok,
            }));
        }
        let ratio = p90s
            .windows(2)
            .map(|w| (w[1].1 / w[0].1).max(w[0].1 / w[1].1))
            .fold(1.0, f64::max);
        let ratio_ok = ratio < RATIO_LIMIT;
        criteria.push(CriterionResult::new(
            "10",
            "modulus statistic stable in n with decaying tail",
            ratio_ok && tail_ok,
            format!(
                "f = {}: 90th percentiles {:?}, worst ratio {ratio:.3} (need < {RATIO_LIMIT}); tails nonincreasing with {} (need < {FINAL_LIMIT})",
                f.label(),
                p90s.iter().map(|(n, p)| format!("n={n}: {p:.3}")).collect::<Vec<_>>(),
                tail_notes.join(", ")
            ),
        ));
        results.push(json!({"initial": f.label(), "per_n": per_n, "p90_ratio": ratio, "pass": ratio_ok && tail_ok}));
    }
    let envelope: Vec<f64> = levels
        .iter()
        .map(|&r| 2f64.powi(47) * constants.c.powf(-4.0 / 3.0) * r.powi(-2) * r.ln().max(0.0).powf(4.0 / 3.0))
        .collect();
    Ok(ExperimentOutput {
        tables: vec![table, tails],
        summary: json!({
            "property": "the f-rewarded weight profile on [-1,1] has modulus of continuity of order z^(1/2) (log 1/z)^(2/3), uniformly in n and in the initial condition, with P(S_n >= r) at most of order r^(-2) (log r)^(4/3)",
            "window_r": cfg.window.unwrap_or(DEFAULT_R),
            "modulus_constants": cfg.modulus_constants,
            "reference": {
                "label": blpp_core::stats::TheoremConstants::LABEL,
                "form": "2^47 c^(-4/3) r^(-2) (log r)^(4/3)",
                "levels": levels,
                "values": envelope,
            },
            "results": results,
        }),
        criteria,
    })
}
