//! Named experiments. Each one draws its samples through the pool, returns
//! estimator tables in sample-index order, a JSON summary, and the
//! acceptance criteria it decides.

use blpp_core::env::{derive_seed, Environment, GridSpec};
use blpp_core::scaled::Weights;
use blpp_core::stats::{fit_exponent, ExponentFit, TailCurve, TheoremConstants};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::manifest::CriterionResult;
use crate::output::{Cell, Table};
use crate::pool::Pool;

pub mod curvature;
pub mod growth;
pub mod gue_oracle;
pub mod limit_stability;
pub mod modulus;
pub mod reg_tails;
pub mod regfluc;
pub mod two_point;
pub mod weight_diff;

pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub criteria: Vec<CriterionResult>,
}

pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub pool: &'a Pool,
}

impl Ctx<'_> {
    /// `derive(master, experiment_id, index)`.
    pub fn seed(&self, index: usize) -> u64 {
        derive_seed(&[self.cfg.master_seed, experiment_id(&self.cfg.experiment), index as u64])
    }

    pub fn levels_or(&self, default: &[f64]) -> Vec<f64> {
        if self.cfg.levels.is_empty() {
            default.to_vec()
        } else {
            self.cfg.levels.clone()
        }
    }

    pub fn epsilons_or(&self, default: &[f64]) -> Vec<f64> {
        if self.cfg.epsilons.is_empty() {
            default.to_vec()
        } else {
            self.cfg.epsilons.clone()
        }
    }

    pub fn constants(&self) -> Result<TheoremConstants> {
        match self.cfg.theorem_constants {
            Some(c) => Ok(TheoremConstants::new(c.c, c.big_c)?),
            None => Ok(TheoremConstants::default()),
        }
    }
}

/// Stable 64-bit identifier of an experiment name.
pub fn experiment_id(name: &str) -> u64 {
    let d = Sha256::digest(name.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

pub const SEED_RULE: &str = "sample seed = derive_seed([master_seed, sha256(experiment)[0..8] as u64 le, sample_index])";

pub fn run(name: &str, cfg: &ExperimentConfig, pool: &Pool) -> Result<ExperimentOutput> {
    let ctx = Ctx { cfg, pool };
    match name {
        "growth" => growth::run(&ctx),
        "gue-oracle" => gue_oracle::run(&ctx),
        "weight-diff" => weight_diff::run(&ctx),
        "modulus" => modulus::run(&ctx),
        "curvature" => curvature::run(&ctx),
        "reg-tails" => reg_tails::run(&ctx),
        "two-point" => two_point::run(&ctx),
        "regfluc" => regfluc::run(&ctx),
        "limit-stability" => limit_stability::run(&ctx),
        "verify" => crate::verify::run(&ctx),
        other => Err(crate::error::CliError::Config(format!("unknown experiment {other:?}"))),
    }
}

/// Linear-interpolation quantile (`q` in `[0, 1]`) of unsorted data.
/// Grid on `[0, horizon]` whose step is the largest divisor of `horizon`
/// not exceeding `n`'s spatial unit times `resolution`, so both ends are
/// grid points.
pub fn aligned_grid(n: u32, horizon: f64, resolution: f64) -> Result<GridSpec> {
    let target = 2.0 * (n as f64).cbrt().powi(2) * resolution;
    let cells = (horizon / target).ceil().max(1.0);
    Ok(GridSpec::new(0.0, horizon / cells, cells as usize + 1)?)
}

/// Point-to-point weights, continuity-corrected when the config asks.
pub fn weights<'a>(cfg: &ExperimentConfig, env: &'a Environment) -> Weights<'a> {
    if cfg.continuity_correction {
        Weights::with_continuity_correction(env)
    } else {
        Weights::new(env)
    }
}

pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let n = values.len() as f64;
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt()
}

pub const TAIL_HEADER: &[&str] = &["series", "level", "exceed", "total", "probability", "ci_low", "ci_high"];

pub fn push_tail(table: &mut Table, series: &str, curve: &TailCurve) {
    for k in 0..curve.len() {
        table.push(vec![
            Cell::from(series),
            curve.levels[k].into(),
            curve.exceed_counts[k].into(),
            curve.total.into(),
            curve.probabilities[k].into(),
            curve.ci_low[k].into(),
            curve.ci_high[k].into(),
        ]);
    }
}

pub fn tail_json(curve: &TailCurve) -> Value {
    json!({
        "levels": curve.levels,
        "exceed_counts": curve.exceed_counts,
        "total": curve.total,
        "probabilities": curve.probabilities,
        "ci_low": curve.ci_low,
        "ci_high": curve.ci_high,
        "nonincreasing": curve.is_nonincreasing(),
    })
}

pub fn fit_json(fit: &blpp_core::Result<ExponentFit>) -> Value {
    match fit {
        Ok(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
            "slope_stderr": f.slope_stderr,
            "points": f.points,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Fits the decay exponent over the usable band and decides
/// `lo <= slope <= hi` (and `r2 >= min_r2` when given).
pub fn exponent_criterion(
    id: &str,
    name: &str,
    curve: &TailCurve,
    band: (f64, f64),
    min_r2: Option<f64>,
) -> (CriterionResult, Value) {
    let fit = fit_exponent(curve, true);
    let (pass, detail) = match &fit {
        Ok(f) => {
            let in_band = f.slope >= band.0 && f.slope <= band.1;
            let r2_ok = min_r2.is_none_or(|m| f.r_squared >= m);
            let r2_txt = min_r2.map_or(String::new(), |m| format!(", r2 {:.3} (need >= {m})", f.r_squared));
            (
                in_band && r2_ok,
                format!("fitted exponent {:.3} (need [{}, {}]){r2_txt} over {} levels", f.slope, band.0, band.1, f.points),
            )
        }
        Err(e) => (false, format!("no fit: {e}")),
    };
    (CriterionResult::new(id, name, pass, detail), fit_json(&fit))
}

/// The "shape only" reference overlay `C exp(-c1 t^{3/2})`, with the
/// configured (by default unit) constants.
pub fn reference_overlay(constants: &TheoremConstants, levels: &[f64], power: f64) -> Value {
    let values: Vec<f64> = levels.iter().map(|t| constants.big_c * (-constants.c1 * t.powf(power)).exp()).collect();
    json!({
        "label": TheoremConstants::LABEL,
        "form": format!("C exp(-c1 t^{power})"),
        "c": constants.c,
        "C": constants.big_c,
        "c1": constants.c1,
        "levels": levels,
        "values": values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert!((quantile(&v, 0.9) - 3.7).abs() < 1e-12);
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let names = crate::config::EXPERIMENTS;
        let ids: std::collections::BTreeSet<u64> = names.iter().map(|n| experiment_id(n)).collect();
        assert_eq!(ids.len(), names.len());
        assert_eq!(experiment_id("growth"), experiment_id("growth"));
    }
}
