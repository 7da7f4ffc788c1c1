//! The normalized modulus `sup |W(z) - W(y)| / ((z - y)^{1/2} (log 1/(z - y))^{2/3})`
//! over `-1 <= y < z <= 1` with `cutoff < z - y <= 1/e`.

use crate::error::{Error, Result};

/// Full scans are used up to this many points in `[-1, 1]`.
pub const FULL_SCAN_LIMIT: usize = 4096;

struct Prepared<'a> {
    vals: &'a [f64],
    h: f64,
    max_gap: usize,
    min_gap: usize,
}

fn prepare<'a>(ys: &[f64], ws: &'a [f64], cutoff: f64) -> Result<(usize, Prepared<'a>)> {
    if ys.len() != ws.len() {
        return Err(Error::Input("coordinates and values differ in length".into()));
    }
    let tol = 1e-9;
    let a = ys.partition_point(|&y| y < -1.0 - tol);
    let b = ys.partition_point(|&y| y <= 1.0 + tol);
    if b < a + 2 || ys[a] > -1.0 + tol + (ys[a + 1] - ys[a]) || ys[b - 1] < 1.0 - tol - (ys[a + 1] - ys[a]) {
        return Err(Error::Coverage("profile does not cover [-1, 1]".into()));
    }
    let h = (ys[b - 1] - ys[a]) / (b - a - 1) as f64;
    if cutoff < 2.0 * h * (1.0 - 1e-9) {
        return Err(Error::Precondition(format!(
            "cutoff {cutoff} is below twice the grid spacing {h}"
        )));
    }
    let inv_e = (-1.0f64).exp();
    let max_gap = ((inv_e / h) * (1.0 + 1e-12)).floor() as usize;
    let min_gap = ((cutoff / h) * (1.0 + 1e-12)).floor() as usize + 1;
    Ok((a, Prepared { vals: &ws[a..b], h, max_gap, min_gap }))
}

fn denominator(d: f64) -> f64 {
    d.sqrt() * (-d.ln()).powf(2.0 / 3.0)
}

/// Exact supremum over all admissible grid pairs.
pub fn modulus_full(ys: &[f64], ws: &[f64], cutoff: f64) -> Result<f64> {
    let (_, p) = prepare(ys, ws, cutoff)?;
    let n = p.vals.len();
    let mut best = 0.0f64;
    for g in p.min_gap..=p.max_gap.min(n - 1) {
        let inv = 1.0 / denominator(g as f64 * p.h);
        let mut m = 0.0f64;
        for k in 0..n - g {
            m = m.max((p.vals[k + g] - p.vals[k]).abs());
        }
        best = best.max(m * inv);
    }
    Ok(best)
}

/// Supremum over pairs separated by dyadic gaps `2^{-k}` only.
pub fn modulus_dyadic(ys: &[f64], ws: &[f64], cutoff: f64) -> Result<f64> {
    let (_, p) = prepare(ys, ws, cutoff)?;
    let n = p.vals.len();
    let mut best = 0.0f64;
    let mut k = 1;
    loop {
        let d = 2f64.powi(-k);
        k += 1;
        let g = (d / p.h).round() as usize;
        if g > p.max_gap {
            continue;
        }
        if g < p.min_gap || g == 0 {
            break;
        }
        if g >= n {
            continue;
        }
        let inv = 1.0 / denominator(g as f64 * p.h);
        for i in 0..n - g {
            best = best.max((p.vals[i + g] - p.vals[i]).abs() * inv);
        }
    }
    Ok(best)
}

/// Exact scan on small grids, dyadic scheme on large ones.
pub fn modulus_statistic(ys: &[f64], ws: &[f64], cutoff: f64) -> Result<f64> {
    let (_, p) = prepare(ys, ws, cutoff)?;
    if p.vals.len() <= FULL_SCAN_LIMIT {
        modulus_full(ys, ws, cutoff)
    } else {
        modulus_dyadic(ys, ws, cutoff)
    }
}
