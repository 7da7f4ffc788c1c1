//! Largest change of the parabolically adjusted weight
//! `Wgt(u -> v) + Q(v - u)` as `u` and `v` range over `[x, x + eps]` and
//! `[y, y + eps]`; its typical size scales like `eps^{1/2}`.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::initcond::grid_points;
use blpp_core::scaled::{q, CompatibleTriple, Weights};
use blpp_core::stats::{estimate_tail, holder_fit};
use serde_json::json;

use super::{fit_json, push_tail, quantile, tail_json, Ctx, ExperimentOutput, TAIL_HEADER};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub const SLOPE_BAND: (f64, f64) = (0.40, 0.60);
pub const DEFAULT_EPSILONS: [f64; 5] = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125];

/// `max - min` of the adjusted weight over each square `[x, x+eps] x [y, y+eps]`,
/// one forward sweep per grid start.
pub fn square_oscillations(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    base: (f64, f64),
    epsilons: &[f64],
) -> blpp_core::Result<Vec<f64>> {
    let big = epsilons.iter().cloned().fold(0.0, f64::max);
    let (x0, y0) = base;
    let mut hi = vec![f64::NEG_INFINITY; epsilons.len()];
    let mut lo = vec![f64::INFINITY; epsilons.len()];
    for u in grid_points(w, triple, (x0, x0 + big), triple.line1())? {
        let p = w.forward_profile(triple, u, Some((y0, y0 + big)))?;
        for (&v, &wt) in p.ys.iter().zip(&p.weights) {
            let a = wt + q(v - u);
            for (k, &e) in epsilons.iter().enumerate() {
                if u - x0 <= e && v - y0 <= e {
                    hi[k] = hi[k].max(a);
                    lo[k] = lo[k].min(a);
                }
            }
        }
    }
    Ok(hi.iter().zip(&lo).map(|(h, l)| h - l).collect())
}

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let eps = ctx.epsilons_or(&DEFAULT_EPSILONS);
    let big = eps.iter().cloned().fold(0.0, f64::max);
    let base = match cfg.points.as_deref() {
        Some([x, y, ..]) => (*x, *y),
        Some([x]) => (*x, *x),
        _ => (0.0, 0.0),
    };
    let levels = ctx.levels_or(&[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]);
    let mut table = Table::new("weight_diff", &["n", "index", "seed", "eps", "sup_abs_delta"]);
    let mut tails = Table::new("weight_diff_tail", TAIL_HEADER);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for n in cfg.ns() {
        let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
        let lo = base.0.min(base.1);
        let grid = required_grid(n, (lo - cfg.resolution, base.0.max(base.1) + big + cfg.resolution), (0.0, 1.0), cfg.resolution)?;
        let rows = ctx.pool.map(cfg.samples, |i| {
            let seed = ctx.seed(i);
            let env = sample_environment(seed, n as usize + 1, grid)?;
            let w = super::weights(cfg, &env);
            Ok((seed, square_oscillations(&w, &triple, base, &eps)?))
        })?;
        let mut medians = Vec::new();
        let mut per_eps = Vec::new();
        for (k, &e) in eps.iter().enumerate() {
            let vals: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            for (i, (seed, v)) in rows.iter().enumerate() {
                table.push(vec![Cell::from(n), i.into(), (*seed).into(), e.into(), v[k].into()]);
            }
            let med = quantile(&vals, 0.5);
            medians.push((e, med));
            let scaled: Vec<f64> = vals.iter().map(|v| v / e.sqrt()).collect();
            let curve = estimate_tail(&scaled, &levels)?;
            push_tail(&mut tails, &format!("n={n},eps={e}"), &curve);
            per_eps.push(json!({"eps": e, "median": med, "p90": quantile(&vals, 0.9), "tail_of_sup_over_sqrt_eps": tail_json(&curve)}));
        }
        let fit = holder_fit(&medians);
        let (pass, detail) = match &fit {
            Ok(f) => (
                f.slope >= SLOPE_BAND.0 && f.slope <= SLOPE_BAND.1,
                format!("n = {n}: Holder slope {:.3} (need [{}, {}]), r2 {:.3}", f.slope, SLOPE_BAND.0, SLOPE_BAND.1, f.r_squared),
            ),
            Err(e) => (false, format!("n = {n}: no fit: {e}")),
        };
        criteria.push(CriterionResult::new("9", "eps^(1/2) weight-difference law", pass, detail));
        results.push(json!({"n": n, "holder_fit": fit_json(&fit), "per_eps": per_eps, "pass": pass}));
    }
    Ok(ExperimentOutput {
        tables: vec![table, tails],
        summary: json!({
            "property": "the maximum difference of the parabolically adjusted point-to-point weight over endpoint boxes of side eps is of order eps^(1/2), with tail exp(-O(R^(3/2))) in the multiple R",
            "base": [base.0, base.1],
            "epsilons": eps,
            "slope_band": [SLOPE_BAND.0, SLOPE_BAND.1],
            "results": results,
        }),
        criteria,
    })
}
