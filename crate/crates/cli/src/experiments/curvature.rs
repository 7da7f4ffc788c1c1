//! Supremum and infimum of `Wgt(x+u -> y+v) + Q(y+v-x-u)` over
//! `u, v in [0, 1]`: the weight hews to the parabola `-Q`, with
//! `exp(-O(t^{3/2}))` tails on both sides.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::initcond::grid_points;
use blpp_core::scaled::{q, CompatibleTriple, Weights};
use blpp_core::stats::estimate_tail;
use serde_json::json;

use super::{exponent_criterion, push_tail, reference_overlay, tail_json, Ctx, ExperimentOutput, TAIL_HEADER};
use crate::error::Result;
use crate::output::{Cell, Table};

pub const EXPONENT_BAND: (f64, f64) = (1.0, 2.0);
pub const MIN_R2: f64 = 0.9;
pub const LEVELS: [f64; 19] = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0, 4.25, 4.5, 4.75, 5.0];

/// `(sup, inf)` of the adjusted weight over the unit square at `base`.
pub fn square_extremes(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    base: (f64, f64),
) -> blpp_core::Result<(f64, f64)> {
    let (x, y) = base;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for u in grid_points(w, triple, (x, x + 1.0), triple.line1())? {
        let p = w.forward_profile(triple, u, Some((y, y + 1.0)))?;
        for (&v, &wt) in p.ys.iter().zip(&p.weights) {
            let a = wt + q(v - u);
            hi = hi.max(a);
            lo = lo.min(a);
        }
    }
    Ok((hi, lo))
}

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let base = match cfg.points.as_deref() {
        Some([x, y, ..]) => (*x, *y),
        Some([x]) => (*x, *x),
        _ => (0.0, 0.0),
    };
    let levels = ctx.levels_or(&LEVELS);
    let constants = ctx.constants()?;
    let mut table = Table::new("curvature", &["n", "index", "seed", "sup_adjusted", "inf_adjusted"]);
    let mut tails = Table::new("curvature_tail", TAIL_HEADER);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for n in cfg.ns() {
        let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
        let span = (base.0.min(base.1) - cfg.resolution, base.0.max(base.1) + 1.0 + cfg.resolution);
        let grid = required_grid(n, span, (0.0, 1.0), cfg.resolution)?;
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            let env = sample_environment(seed, n as usize + 1, grid)?;
            let w = super::weights(cfg, &env);
            Ok((seed, square_extremes(&w, &triple, base)?))
        })?;
        for (i, (seed, (hi, lo))) in rows.iter().enumerate() {
            table.push(vec![Cell::from(n), i.into(), (*seed).into(), (*hi).into(), (*lo).into()]);
        }
        let sups: Vec<f64> = rows.iter().map(|r| r.1 .0).collect();
        let neg_infs: Vec<f64> = rows.iter().map(|r| -r.1 .1).collect();
        let up = estimate_tail(&sups, &levels)?;
        let down = estimate_tail(&neg_infs, &levels)?;
        push_tail(&mut tails, &format!("n={n},sup"), &up);
        push_tail(&mut tails, &format!("n={n},-inf"), &down);
        let (c_up, f_up) = exponent_criterion("8", "curvature tail exponent (supremum)", &up, EXPONENT_BAND, Some(MIN_R2));
        let (c_dn, f_dn) = exponent_criterion("8", "curvature tail exponent (infimum)", &down, EXPONENT_BAND, Some(MIN_R2));
        results.push(json!({
            "n": n,
            "sup": {"tail": tail_json(&up), "fit": f_up, "pass": c_up.pass},
            "inf": {"tail": tail_json(&down), "fit": f_dn, "pass": c_dn.pass},
        }));
        for mut c in [c_up, c_dn] {
            c.detail = format!("n = {n}: {}", c.detail);
            criteria.push(c);
        }
    }
    Ok(ExperimentOutput {
        tables: vec![table, tails],
        summary: json!({
            "property": "the point-to-point weight profile hews to the parabola -Q: the supremum and infimum of Wgt + Q over a unit square of endpoints have tails exp(-O(t^(3/2)))",
            "base": [base.0, base.1],
            "exponent_target": 1.5,
            "exponent_band": [EXPONENT_BAND.0, EXPONENT_BAND.1],
            "reference": reference_overlay(&constants, &levels, 1.5),
            "results": results,
        }),
        criteria,
    })
}
