//! KPZ-scaled coordinates and polymer weights.
//!
//! A scaled point `(x, t)` sits at unscaled location `n t + 2 n^{2/3} x` on
//! line `n t`. The weight between `(x, t1)` and `(y, t2)` is the maximal
//! energy with its linear growth and spatial drift removed and the result
//! brought to unit order:
//!
//! ```text
//! Wgt = 2^{-1/2} n^{-1/3} (M - 2 n t12 - 2 n^{2/3} (y - x))
//! ```
//!
//! Endpoints are snapped to the grid before anything else, and the snapped
//! locations enter the centering too, so every identity between weights that
//! holds for `M` holds for the computed weights as well.

use crate::env::{GridSpec, LineSource, Reflected};
use crate::error::{Error, Result};
use crate::lpp::{self, SweepStats};

/// `Q(z) = 2^{-1/2} z^2`.
pub fn q(z: f64) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 * z * z
}

/// `R_n(v1, v2) = (2^{-1} n^{-2/3} (v1 - v2), v2 / n)`.
pub fn scaling_map(n: u32, v: (f64, f64)) -> (f64, f64) {
    let nf = n as f64;
    (0.5 * (v.0 - v.1) / nf.cbrt().powi(2), v.1 / nf)
}

pub fn inverse_scaling_map(n: u32, p: (f64, f64)) -> (f64, f64) {
    let nf = n as f64;
    let v2 = nf * p.1;
    (v2 + 2.0 * nf.cbrt().powi(2) * p.0, v2)
}

/// `(n, t1, t2)` with `n t1` and `n t2` integers, stored as the line indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompatibleTriple {
    n: u32,
    line1: usize,
    line2: usize,
}

impl CompatibleTriple {
    pub fn new(n: u32, t1: f64, t2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("n must be at least 1".into()));
        }
        if !(t1 < t2) {
            return Err(Error::Precondition(format!("need t1 < t2, got {t1} and {t2}")));
        }
        let nf = n as f64;
        let l1 = integral(nf * t1)
            .ok_or_else(|| Error::Precondition(format!("n t1 = {} is not an integer", nf * t1)))?;
        let l2 = integral(nf * t2)
            .ok_or_else(|| Error::Precondition(format!("n t2 = {} is not an integer", nf * t2)))?;
        if l1 < 0 {
            return Err(Error::Precondition("times before zero are not represented".into()));
        }
        Ok(Self { n, line1: l1 as usize, line2: l2 as usize })
    }

    pub fn from_lines(n: u32, line1: usize, line2: usize) -> Result<Self> {
        if n == 0 || line1 >= line2 {
            return Err(Error::Precondition(format!(
                "need n >= 1 and line1 < line2, got n = {n}, lines {line1}..{line2}"
            )));
        }
        Ok(Self { n, line1, line2 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn t1(&self) -> f64 {
        self.line1 as f64 / self.n as f64
    }
    pub fn t2(&self) -> f64 {
        self.line2 as f64 / self.n as f64
    }
    pub fn t12(&self) -> f64 {
        (self.line2 - self.line1) as f64 / self.n as f64
    }
    pub fn line1(&self) -> usize {
        self.line1
    }
    pub fn line2(&self) -> usize {
        self.line2
    }
    /// Number of line changes `n t12` made by every zigzag.
    pub fn jumps(&self) -> usize {
        self.line2 - self.line1
    }
    /// `2 n^{2/3}`: unscaled length of one scaled spatial unit.
    pub fn spatial_unit(&self) -> f64 {
        2.0 * (self.n as f64).cbrt().powi(2)
    }
    fn prefactor(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2 / (self.n as f64).cbrt()
    }
}

fn integral(v: f64) -> Option<i64> {
    let r = v.round();
    ((v - r).abs() <= 1e-9 * r.abs().max(1.0)).then_some(r as i64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPoint {
    pub x: f64,
    pub t: f64,
}

impl ScaledPoint {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValue {
    pub value: f64,
    /// Total scaled distance moved by snapping both endpoints.
    pub snap_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    Scaled,
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileBase {
    Point(ScaledPoint),
    /// A line-to-point profile; the label names the initial condition.
    Initial(String),
}

impl ProfileBase {
    /// Spatial reference used by normalization; zero for line-to-point profiles.
    pub fn anchor(&self) -> f64 {
        match self {
            ProfileBase::Point(p) => p.x,
            ProfileBase::Initial(_) => 0.0,
        }
    }
}

/// Weights as a function of the free endpoint: `y` for forward profiles,
/// `x` for backward ones. The free coordinates are grid points, so
/// `snap_errors` records the snap of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub triple: CompatibleTriple,
    pub base: ProfileBase,
    pub direction: Direction,
    pub coords: Coordinates,
    pub ys: Vec<f64>,
    pub weights: Vec<f64>,
    pub snap_errors: Vec<f64>,
}

impl WeightProfile {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Weight at an exact output coordinate.
    pub fn at(&self, y: f64) -> Option<f64> {
        let k = self.ys.partition_point(|&v| v < y);
        (k < self.ys.len() && (self.ys[k] - y).abs() <= 1e-12 * y.abs().max(1.0))
            .then(|| self.weights[k])
    }

    /// Restricts the profile to coordinates inside `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> WeightProfile {
        let a = self.ys.partition_point(|&v| v < lo);
        let b = self.ys.partition_point(|&v| v <= hi);
        WeightProfile {
            ys: self.ys[a..b].to_vec(),
            weights: self.weights[a..b].to_vec(),
            snap_errors: self.snap_errors[a..b].to_vec(),
            base: self.base.clone(),
            ..*self
        }
    }
}

/// `NrL(z) = t12^{-1/3} L(x + t12^{2/3} z)`.
pub fn normalized_profile(p: &WeightProfile) -> WeightProfile {
    if p.coords == Coordinates::Normalized {
        return p.clone();
    }
    let t12 = p.triple.t12();
    let x = p.base.anchor();
    let (sz, sw) = (t12.powf(-2.0 / 3.0), t12.powf(-1.0 / 3.0));
    WeightProfile {
        ys: p.ys.iter().map(|&y| (y - x) * sz).collect(),
        weights: p.weights.iter().map(|&w| w * sw).collect(),
        snap_errors: p.snap_errors.iter().map(|&e| e * sz).collect(),
        coords: Coordinates::Normalized,
        base: p.base.clone(),
        ..*p
    }
}

pub fn denormalize(p: &WeightProfile) -> WeightProfile {
    if p.coords == Coordinates::Scaled {
        return p.clone();
    }
    let t12 = p.triple.t12();
    let x = p.base.anchor();
    let (sz, sw) = (t12.powf(2.0 / 3.0), t12.powf(1.0 / 3.0));
    WeightProfile {
        ys: p.ys.iter().map(|&z| x + z * sz).collect(),
        weights: p.weights.iter().map(|&w| w * sw).collect(),
        snap_errors: p.snap_errors.iter().map(|&e| e * sz).collect(),
        coords: Coordinates::Scaled,
        base: p.base.clone(),
        ..*p
    }
}

/// A profile with `Q(free - base)` added to every weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicView {
    pub profile: WeightProfile,
    pub adjusted: Vec<f64>,
}

impl ParabolicView {
    pub fn new(profile: WeightProfile) -> Self {
        let x = profile.base.anchor();
        let adjusted = profile.ys.iter().zip(&profile.weights).map(|(&y, &w)| w + q(y - x)).collect();
        Self { profile, adjusted }
    }
}

/// Snapped endpoint: grid column and scaled snap distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapped {
    pub column: usize,
    /// The scaled coordinate of the grid point actually used.
    pub x: f64,
    pub error: f64,
}

/// Weight evaluation against one environment.
#[derive(Clone, Copy)]
pub struct Weights<'e> {
    env: &'e dyn LineSource,
    corrected: bool,
}

impl<'e> Weights<'e> {
    pub fn new(env: &'e dyn LineSource) -> Self {
        Self { env, corrected: false }
    }

    /// Adds the expected grid-maximum deficit back to every `M`, which removes
    /// most of the discretization bias in distributional comparisons. All
    /// weight identities are unaffected.
    pub fn with_continuity_correction(env: &'e dyn LineSource) -> Self {
        Self { env, corrected: true }
    }

    pub fn env(&self) -> &'e dyn LineSource {
        self.env
    }

    pub fn is_corrected(&self) -> bool {
        self.corrected
    }

    pub fn grid(&self) -> &GridSpec {
        self.env.grid()
    }

    fn check_lines(&self, triple: &CompatibleTriple) -> Result<()> {
        if triple.line2 >= self.env.line_count() {
            return Err(Error::Coverage(format!(
                "line {} needed, environment has {}",
                triple.line2,
                self.env.line_count()
            )));
        }
        Ok(())
    }

    /// Snaps scaled `x` on the line with index `line`.
    pub fn snap(&self, triple: &CompatibleTriple, x: f64, line: usize) -> Result<Snapped> {
        let unit = triple.spatial_unit();
        let grid = self.env.grid();
        let xx = line as f64 + unit * x;
        let (column, err) = grid.snap(xx).ok_or_else(|| {
            Error::Coverage(format!(
                "scaled point {x} at line {line} maps to {xx}, outside [{}, {}]",
                grid.origin,
                grid.last_point()
            ))
        })?;
        Ok(Snapped { column, x: self.scaled_x(triple, column, line), error: err / unit })
    }

    /// Scaled coordinate of grid column `c` on line `line`.
    pub fn scaled_x(&self, triple: &CompatibleTriple, c: usize, line: usize) -> f64 {
        (self.env.grid().point(c) - line as f64) / triple.spatial_unit()
    }

    /// Weight from raw `M` between snapped columns; the single place the
    /// centering is applied.
    pub fn weight_from_energy(&self, triple: &CompatibleTriple, m: f64, ix: usize, iy: usize) -> f64 {
        let step = self.env.grid().step;
        let jumps = triple.jumps() as f64;
        let corr = if self.corrected { jumps * lpp::continuity_correction(step) } else { 0.0 };
        let drift = (iy as f64 - ix as f64) * step;
        triple.prefactor() * ((m + corr) - drift - jumps)
    }

    /// `Wgt(x, t1 -> y, t2)`.
    pub fn weight(&self, triple: &CompatibleTriple, x: f64, y: f64) -> Result<WeightValue> {
        self.check_lines(triple)?;
        let sx = self.snap(triple, x, triple.line1)?;
        let sy = self.snap(triple, y, triple.line2)?;
        if sy.column < sx.column {
            return Err(Error::Precondition(format!(
                "weight undefined: y = {y} is below x - n^(1/3) t12 / 2 for x = {x}"
            )));
        }
        let mut st = SweepStats::default();
        let row = lpp::sweep_from_point(self.env, sx.column, triple.line1, triple.line2, sy.column, &mut st);
        Ok(WeightValue {
            value: self.weight_from_energy(triple, row[sy.column - sx.column], sx.column, sy.column),
            snap_error: sx.error + sy.error,
        })
    }

    /// Weights from `(x, t1)` to every grid `y` allowed by the domain
    /// condition, optionally restricted to `window`, from one sweep.
    pub fn forward_profile(
        &self,
        triple: &CompatibleTriple,
        x: f64,
        window: Option<(f64, f64)>,
    ) -> Result<WeightProfile> {
        self.check_lines(triple)?;
        let sx = self.snap(triple, x, triple.line1)?;
        let grid = *self.env.grid();
        let unit = triple.spatial_unit();
        let l2 = triple.line2 as f64;
        let (mut lo, mut hi) = (sx.column, grid.count - 1);
        if let Some((a, b)) = window {
            match grid.indices_within(l2 + unit * a, l2 + unit * b) {
                Some((wa, wb)) => {
                    lo = lo.max(wa);
                    hi = hi.min(wb);
                }
                None => return Err(Error::Coverage(format!("window [{a}, {b}] misses the grid"))),
            }
        }
        if hi < lo {
            return Err(Error::Coverage(format!("no admissible endpoint for base {x}")));
        }
        let mut st = SweepStats::default();
        let row = lpp::sweep_from_point(self.env, sx.column, triple.line1, triple.line2, hi, &mut st);
        let ys = (lo..=hi).map(|c| self.scaled_x(triple, c, triple.line2)).collect();
        let weights = (lo..=hi)
            .map(|c| self.weight_from_energy(triple, row[c - sx.column], sx.column, c))
            .collect();
        Ok(WeightProfile {
            triple: *triple,
            base: ProfileBase::Point(ScaledPoint::new(x, triple.t1())),
            direction: Direction::Forward,
            coords: Coordinates::Scaled,
            ys,
            weights,
            snap_errors: vec![sx.error; hi - lo + 1],
        })
    }

    /// Raw backward energies `M(X_c, t1 -> Y, t2)` for columns `c` in
    /// `lo..=iy`, in ascending column order, via the forward sweep on the
    /// reflected environment.
    pub fn backward_energies(&self, triple: &CompatibleTriple, lo: usize, iy: usize) -> Vec<f64> {
        let refl = Reflected::new(self.env);
        let count = self.env.grid().count;
        let start = count - 1 - iy;
        let end = count - 1 - lo;
        let (ri, rj) = (refl.line_index(triple.line2), refl.line_index(triple.line1));
        let mut st = SweepStats::default();
        let mut row = lpp::sweep_from_point(&refl, start, ri, rj, end, &mut st);
        row.reverse();
        row
    }

    /// Weights from every grid `x` (restricted to `window`) to `(y, t2)`.
    pub fn backward_profile(
        &self,
        triple: &CompatibleTriple,
        y: f64,
        window: Option<(f64, f64)>,
    ) -> Result<WeightProfile> {
        self.check_lines(triple)?;
        let sy = self.snap(triple, y, triple.line2)?;
        let grid = *self.env.grid();
        let unit = triple.spatial_unit();
        let l1 = triple.line1 as f64;
        let (mut lo, mut hi) = (0, sy.column);
        if let Some((a, b)) = window {
            match grid.indices_within(l1 + unit * a, l1 + unit * b) {
                Some((wa, wb)) => {
                    lo = lo.max(wa);
                    hi = hi.min(wb);
                }
                None => return Err(Error::Coverage(format!("window [{a}, {b}] misses the grid"))),
            }
        }
        if hi < lo {
            return Err(Error::Coverage(format!("no admissible start for base {y}")));
        }
        let row = self.backward_energies(triple, lo, sy.column);
        let ys = (lo..=hi).map(|c| self.scaled_x(triple, c, triple.line1)).collect();
        let weights = (lo..=hi)
            .map(|c| self.weight_from_energy(triple, row[c - lo], c, sy.column))
            .collect();
        Ok(WeightProfile {
            triple: *triple,
            base: ProfileBase::Point(ScaledPoint::new(y, triple.t2())),
            direction: Direction::Backward,
            coords: Coordinates::Scaled,
            ys,
            weights,
            snap_errors: vec![sy.error; hi - lo + 1],
        })
    }

    /// `(Wgt(x2 -> y2) + Q(y2 - x2)) - (Wgt(x1 -> y1) + Q(y1 - x1))`, with the
    /// parabola evaluated at the snapped coordinates.
    pub fn parabolic_delta(
        &self,
        triple: &CompatibleTriple,
        xs: (f64, f64),
        ys: (f64, f64),
    ) -> Result<f64> {
        let a = self.adjusted(triple, xs.0, ys.0)?;
        let b = self.adjusted(triple, xs.1, ys.1)?;
        Ok(b - a)
    }

    /// `Wgt(x -> y) + Q(y - x)` at snapped coordinates.
    pub fn adjusted(&self, triple: &CompatibleTriple, x: f64, y: f64) -> Result<f64> {
        let sx = self.snap(triple, x, triple.line1)?;
        let sy = self.snap(triple, y, triple.line2)?;
        Ok(self.weight(triple, x, y)?.value + q(sy.x - sx.x))
    }
}

/// Convenience wrapper: `Wgt` on an uncorrected environment with the times
/// of `from` and `to` checked against the triple.
pub fn scaled_weight(
    env: &dyn LineSource,
    triple: &CompatibleTriple,
    from: ScaledPoint,
    to: ScaledPoint,
) -> Result<f64> {
    check_time(triple.t1(), from.t)?;
    check_time(triple.t2(), to.t)?;
    Weights::new(env).weight(triple, from.x, to.x).map(|w| w.value)
}

fn check_time(expected: f64, got: f64) -> Result<()> {
    if (expected - got).abs() > 1e-12 * expected.abs().max(1.0) {
        return Err(Error::Precondition(format!("time {got} does not match triple time {expected}")));
    }
    Ok(())
}

/// `|Wgt_n(x, t1 -> y, t2) - t12^{1/3} Wgt_{n t12}(x t12^{-2/3}, k -> y t12^{-2/3}, k + 1)|`
/// with `k = t1 / t12`. Both sides see the same unscaled endpoints.
pub fn verify_scaling_principle(w: &Weights<'_>, triple: &CompatibleTriple, x: f64, y: f64) -> Result<f64> {
    let t12 = triple.t12();
    let lhs = w.weight(triple, x, y)?.value;
    let rescaled = CompatibleTriple::from_lines(triple.jumps() as u32, triple.line1, triple.line2)?;
    let s = t12.powf(-2.0 / 3.0);
    let rhs = w.weight(&rescaled, x * s, y * s)?.value;
    Ok((lhs - t12.powf(1.0 / 3.0) * rhs).abs())
}

/// `Wgt(x, t1 -> y, t2) - Wgt(x, t1 -> z, t) - Wgt(z, t -> y, t2)`.
pub fn verify_superadditivity(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    x: f64,
    y: f64,
    z: f64,
    t_mid: f64,
) -> Result<f64> {
    let first = CompatibleTriple::new(triple.n, triple.t1(), t_mid)?;
    let second = CompatibleTriple::new(triple.n, t_mid, triple.t2())?;
    if first.line1 != triple.line1 || second.line2 != triple.line2 {
        return Err(Error::Precondition("intermediate time outside (t1, t2)".into()));
    }
    let sx = w.snap(triple, x, triple.line1)?;
    let sz = w.snap(triple, z, first.line2)?;
    let sy = w.snap(triple, y, triple.line2)?;
    if !(sx.column <= sz.column && sz.column <= sy.column) {
        return Err(Error::Precondition(format!(
            "domain conditions fail for x = {x}, z = {z}, y = {y}"
        )));
    }
    let whole = w.weight(triple, x, y)?.value;
    let a = w.weight(&first, x, z)?.value;
    let b = w.weight(&second, z, y)?.value;
    Ok(whole - a - b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewireOutcome {
    NotApplicable,
    /// `|(old pair) - (rewired pair)|` of summed rewarded weights.
    Residual(f64),
}

/// Rewarded weights `Wgt(x -> y) + f(x)` over every rewarded grid start.
/// Returns `(column, value)` pairs.
fn rewarded_starts(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    y: f64,
    f: &dyn Fn(f64) -> Option<f64>,
) -> Result<Vec<(usize, f64)>> {
    let prof = w.backward_profile(triple, y, None)?;
    let sy = w.snap(triple, y, triple.line2)?;
    let first = sy.column + 1 - prof.len();
    Ok(prof
        .ys
        .iter()
        .zip(&prof.weights)
        .enumerate()
        .filter_map(|(k, (&x, &v))| f(x).map(|r| (first + k, v + r)))
        .collect())
}

fn optimal_columns(vals: &[(usize, f64)]) -> Vec<usize> {
    let best = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    vals.iter().filter(|v| v.1 == best).map(|v| v.0).collect()
}

/// Checks the rewiring identity for two crossing rewarded polymers: if the
/// start `x2` is optimal for `y1` and `x1 < x2` is optimal for `y2 > y1`,
/// then `x1` is optimal for `y1` and `x2` for `y2`, so the two pairings carry
/// the same total rewarded weight. Crossing is detected from the sets of
/// optimal starts, which on a grid can contain several points.
pub fn verify_crossing_rewire(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    starts: (f64, f64),
    ends: (f64, f64),
    f: &dyn Fn(f64) -> Option<f64>,
) -> Result<RewireOutcome> {
    let (x1, x2) = starts;
    let (y1, y2) = ends;
    let c1 = w.snap(triple, x1, triple.line1)?.column;
    let c2 = w.snap(triple, x2, triple.line1)?.column;
    let d1 = w.snap(triple, y1, triple.line2)?.column;
    let d2 = w.snap(triple, y2, triple.line2)?.column;
    if c1 >= c2 || d1 >= d2 {
        return Ok(RewireOutcome::NotApplicable);
    }
    let at1 = rewarded_starts(w, triple, y1, f)?;
    let at2 = rewarded_starts(w, triple, y2, f)?;
    let opt1 = optimal_columns(&at1);
    let opt2 = optimal_columns(&at2);
    if !opt1.contains(&c2) || !opt2.contains(&c1) {
        return Ok(RewireOutcome::NotApplicable);
    }
    let get = |vals: &[(usize, f64)], c: usize| vals.iter().find(|v| v.0 == c).map(|v| v.1);
    let (Some(a), Some(b), Some(c), Some(d)) =
        (get(&at1, c2), get(&at2, c1), get(&at1, c1), get(&at2, c2))
    else {
        return Ok(RewireOutcome::NotApplicable);
    };
    Ok(RewireOutcome::Residual(((a + b) - (c + d)).abs()))
}

/// Searches the given endpoints for a crossing pair of rewarded polymers and
/// returns `((x1, x2), (y1, y2))` for the first one found.
pub fn find_crossing(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    ends: &[f64],
    f: &dyn Fn(f64) -> Option<f64>,
) -> Result<Option<((f64, f64), (f64, f64))>> {
    let mut sets = Vec::with_capacity(ends.len());
    for &y in ends {
        sets.push(optimal_columns(&rewarded_starts(w, triple, y, f)?));
    }
    for a in 0..ends.len() {
        for b in 0..ends.len() {
            if ends[a] >= ends[b] {
                continue;
            }
            let hi1 = sets[a].iter().max();
            let lo2 = sets[b].iter().min();
            if let (Some(&c2), Some(&c1)) = (hi1, lo2) {
                if c1 < c2 {
                    let x1 = w.scaled_x(triple, c1, triple.line1);
                    let x2 = w.scaled_x(triple, c2, triple.line1);
                    return Ok(Some(((x1, x2), (ends[a], ends[b]))));
                }
            }
        }
    }
    Ok(None)
}
