//! Distributional stability of the f-rewarded profile on `[-1, 1]` as `n`
//! grows: one-point laws, the uniform bound and `S_n` compared across `n`.

use blpp_core::env::{required_grid, sample_environment};
use blpp_core::initcond::{f_rewarded_profile, unifbd};
use blpp_core::scaled::CompatibleTriple;
use blpp_core::stats::{ks_distance, modulus_statistic};
use serde_json::json;

use super::modulus::{cutoff_for, percentile_table, DEFAULT_R, RATIO_LIMIT};
use super::{quantile, Ctx, ExperimentOutput};
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};

pub fn run(ctx: &Ctx) -> Result<ExperimentOutput> {
    let cfg = ctx.cfg;
    let fs = cfg.initial_conditions(&["flat", "narrow-wedge"])?;
    let ys = cfg.points.clone().unwrap_or_else(|| vec![-0.5, 0.0, 0.5]);
    let r = cfg.window.unwrap_or(DEFAULT_R);
    let xw = (-(r + 1.0), r + 1.0);
    let mut header = vec!["initial", "n", "index", "seed", "sup_abs", "s_n"];
    let names: Vec<String> = ys.iter().map(|y| format!("value_at_{y}")).collect();
    header.extend(names.iter().map(String::as_str));
    let mut table = Table::new("limit_stability", &header);
    let mut results = Vec::new();
    let mut criteria = Vec::new();
    for f in &fs {
        let mut per_n = Vec::new();
        for n in cfg.ns() {
            let triple = CompatibleTriple::new(n, 0.0, 1.0)?;
            let pad = 2.0 * cfg.resolution;
            let grid = required_grid(n, (xw.0 - pad, xw.1 + pad), (0.0, 1.0), cfg.resolution)?;
            let cutoff = cutoff_for(ctx, n);
            let rows = ctx.pool.map(cfg.samples, |i| {
                let seed = ctx.seed(i);
                let env = sample_environment(seed, n as usize + 1, grid)?;
                let w = super::weights(cfg, &env);
                let p = f_rewarded_profile(&w, &triple, f, xw, (-1.0 - pad, 1.0 + pad))?;
                let sup = unifbd(&p, f64::INFINITY).value;
                let s = modulus_statistic(&p.ys, &p.weights, cutoff)?;
                let vals: Vec<f64> = ys
                    .iter()
                    .map(|&y| {
                        let k = p.ys.partition_point(|&v| v < y).min(p.ys.len() - 1);
                        let k = if k > 0 && (p.ys[k - 1] - y).abs() <= (p.ys[k] - y).abs() { k - 1 } else { k };
                        p.weights[k]
                    })
                    .collect();
                Ok((seed, sup, s, vals))
            })?;
            for (i, (seed, sup, s, vals)) in rows.iter().enumerate() {
                let mut row = vec![Cell::from(f.label()), n.into(), i.into(), (*seed).into(), (*sup).into(), (*s).into()];
                row.extend(vals.iter().map(|&v| Cell::from(v)));
                table.push(row);
            }
            per_n.push((n, rows));
        }
        let mut comparisons = Vec::new();
        let mut worst_ratio: f64 = 1.0;
        for pair in per_n.windows(2) {
            let (na, a) = (&pair[0].0, &pair[0].1);
            let (nb, b) = (&pair[1].0, &pair[1].1);
            let col = |rows: &Vec<(u64, f64, f64, Vec<f64>)>, k: usize| -> Vec<f64> {
                rows.iter().map(|r| if k == 0 { r.1 } else if k == 1 { r.2 } else { r.3[k - 2] }).collect()
            };
            let mut ks = serde_json::Map::new();
            ks.insert("sup_abs".into(), json!(ks_distance(&col(a, 0), &col(b, 0))?));
            ks.insert("s_n".into(), json!(ks_distance(&col(a, 1), &col(b, 1))?));
            for (k, name) in names.iter().enumerate() {
                ks.insert(name.clone(), json!(ks_distance(&col(a, k + 2), &col(b, k + 2))?));
            }
            let (pa, pb) = (quantile(&col(a, 1), 0.9), quantile(&col(b, 1), 0.9));
            worst_ratio = worst_ratio.max((pa / pb).max(pb / pa));
            comparisons.push(json!({"n": [na, nb], "ks_distance": ks, "s_n_p90": [pa, pb]}));
        }
        let pass = worst_ratio < RATIO_LIMIT;
        criteria.push(CriterionResult::new(
            "10",
            "modulus statistic stable in n",
            pass,
            format!("f = {}: worst 90th-percentile ratio of S_n across n = {worst_ratio:.3} (need < {RATIO_LIMIT})", f.label()),
        ));
        let tables: Vec<_> = per_n
            .iter()
            .map(|(n, rows)| {
                let s: Vec<f64> = rows.iter().map(|r| r.2).collect();
                json!({"n": n, "s_n_percentiles": percentile_table(&s)})
            })
            .collect();
        results.push(json!({"initial": f.label(), "per_n": tables, "comparisons": comparisons, "pass": pass}));
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "property": "the laws of the f-rewarded profiles on [-1,1] are tight as n grows, and any weak limit point has modulus of continuity of order z^(1/2) (log 1/z)^(2/3)",
            "points": ys,
            "window_r": r,
            "results": results,
        }),
        criteria,
    })
}
