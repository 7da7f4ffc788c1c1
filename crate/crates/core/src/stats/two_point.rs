//! Two-point differences of a parabolically adjusted profile, jointly with
//! the global boundedness event `G_t(x)`: `|A(z)| <= t` for `|z - x| <= 2`.

use crate::error::{Error, Result};
use crate::scaled::q;
use crate::stats::tail::TailCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointRecord {
    /// `|A(x + eps) - A(x)| / eps^{1/2}`.
    pub scaled_diff: f64,
    /// `sup_{|z - x| <= 2} |A(z)|`: `G_t(x)` holds iff this is at most `t`.
    pub global_sup: f64,
}

fn nearest(zs: &[f64], z: f64) -> Option<usize> {
    let k = zs.partition_point(|&v| v < z);
    [k.wrapping_sub(1), k]
        .into_iter()
        .filter(|&i| i < zs.len())
        .min_by(|&a, &b| (zs[a] - z).abs().total_cmp(&(zs[b] - z).abs()))
}

/// One sample's record from a profile `P` on coordinates `zs`, adjusted as
/// `A(z) = P(z) + Q(z)`. Coordinates are matched to the nearest grid point.
pub fn two_point_record(zs: &[f64], vals: &[f64], x: f64, eps: f64) -> Result<TwoPointRecord> {
    if zs.len() != vals.len() || zs.len() < 2 {
        return Err(Error::Input("profile needs matching coordinates and values".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1], got {eps}")));
    }
    let h = zs[1] - zs[0];
    if zs[0] > x - 2.0 + 0.5 * h || zs[zs.len() - 1] < x + 2.0 - 0.5 * h {
        return Err(Error::Coverage(format!("profile does not cover [{}, {}]", x - 2.0, x + 2.0)));
    }
    let adj = |i: usize| vals[i] + q(zs[i]);
    let a = nearest(zs, x).expect("nonempty");
    let b = nearest(zs, x + eps).expect("nonempty");
    let lo = zs.partition_point(|&z| z < x - 2.0 - 0.5 * h);
    let hi = zs.partition_point(|&z| z <= x + 2.0 + 0.5 * h);
    let global_sup = (lo..hi).map(|i| adj(i).abs()).fold(0.0, f64::max);
    Ok(TwoPointRecord { scaled_diff: (adj(b) - adj(a)).abs() / eps.sqrt(), global_sup })
}

/// `P(scaled_diff >= K, G_{K/4})` at each level `K`.
pub fn two_point_tail(records: &[TwoPointRecord], levels: &[f64]) -> Result<TailCurve> {
    if records.is_empty() {
        return Err(Error::Input("no records".into()));
    }
    let counts = levels
        .iter()
        .map(|&k| records.iter().filter(|r| r.scaled_diff >= k && r.global_sup <= k / 4.0).count() as u64)
        .collect();
    TailCurve::from_counts(levels.to_vec(), counts, records.len() as u64)
}
