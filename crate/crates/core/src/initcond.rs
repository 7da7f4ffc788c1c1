//! Initial conditions and line-to-point weights.
//!
//! An initial condition `f` rewards a polymer for where it starts: the
//! f-rewarded weight to `(y, t2)` is `sup_x (Wgt(x, t1 -> y, t2) + f(x))`.
//! Unrewarded starts (`f = -inf`) are represented by `None` and never enter a
//! supremum. All suprema run over the grid points of a finite window.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lpp::{self, SweepStats};
use crate::scaled::{
    q, CompatibleTriple, Coordinates, Direction, ProfileBase, WeightProfile, Weights,
};

/// Growth and reach bounds `(psi1, psi2, psi3)`: `f(x) <= psi1 (1 + |x|)`
/// everywhere, and `sup f > -psi3` on `[-psi2, psi2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiTriple {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
}

impl PsiTriple {
    pub fn new(psi1: f64, psi2: f64, psi3: f64) -> Result<Self> {
        if !(psi1 > 0.0 && psi2 > 0.0 && psi3 > 0.0) {
            return Err(Error::Config(format!(
                "psi components must be positive, got ({psi1}, {psi2}, {psi3})"
            )));
        }
        Ok(Self { psi1, psi2, psi3 })
    }
}

impl Default for PsiTriple {
    fn default() -> Self {
        Self { psi1: 1.0, psi2: 1.0, psi3: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    NarrowWedge,
    Flat,
    Table,
    Expression,
}

type Evaluator = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

#[derive(Clone)]
enum Rule {
    NarrowWedge,
    Flat,
    Table { xs: Vec<f64>, fs: Vec<Option<f64>>, extend_linear: bool },
    Expression(Evaluator),
}

#[derive(Clone)]
pub struct InitialCondition {
    kind: InitialKind,
    label: String,
    psi: PsiTriple,
    rule: Rule,
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialCondition")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("psi", &self.psi)
            .finish()
    }
}

impl InitialCondition {
    pub fn narrow_wedge() -> Self {
        Self {
            kind: InitialKind::NarrowWedge,
            label: "narrow-wedge".into(),
            psi: PsiTriple::default(),
            rule: Rule::NarrowWedge,
        }
    }

    pub fn flat() -> Self {
        Self { kind: InitialKind::Flat, label: "flat".into(), psi: PsiTriple::default(), rule: Rule::Flat }
    }

    /// Piecewise-linear through `points` (sorted by abscissa). A segment
    /// touching an unrewarded node is unrewarded. Outside the table `f` is
    /// unrewarded unless `extend_linear`, which continues the end segments.
    pub fn table(points: Vec<(f64, Option<f64>)>, extend_linear: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("table initial condition needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Input("table abscissae must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || p.1.is_some_and(|v| !v.is_finite())) {
            return Err(Error::Input("table entries must be finite or -inf".into()));
        }
        let (xs, fs) = points.into_iter().unzip();
        Ok(Self {
            kind: InitialKind::Table,
            label: "table".into(),
            psi: PsiTriple::default(),
            rule: Rule::Table { xs, fs, extend_linear },
        })
    }

    /// Parses two whitespace- or comma-separated columns `x f(x)`; `#` starts
    /// a comment and `-inf` marks an unrewarded point.
    pub fn parse_table(text: &str, extend_linear: bool) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Input(format!("line {}: expected two columns", lineno + 1)));
            }
            let x: f64 = cols[0]
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad abscissa {:?}", lineno + 1, cols[0])))?;
            let v: f64 = cols[1]
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad value {:?}", lineno + 1, cols[1])))?;
            let f = if v == f64::NEG_INFINITY {
                None
            } else if v.is_finite() {
                Some(v)
            } else {
                return Err(Error::Input(format!("line {}: value must be finite or -inf", lineno + 1)));
            };
            points.push((x, f));
        }
        Self::table(points, extend_linear)
    }

    pub fn expression(label: impl Into<String>, f: impl Fn(f64) -> Option<f64> + Send + Sync + 'static) -> Self {
        Self {
            kind: InitialKind::Expression,
            label: label.into(),
            psi: PsiTriple::default(),
            rule: Rule::Expression(Arc::new(f)),
        }
    }

    pub fn with_psi(mut self, psi: PsiTriple) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> InitialKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn psi(&self) -> PsiTriple {
        self.psi
    }

    /// `f(x)`, or `None` where unrewarded.
    pub fn value(&self, x: f64) -> Option<f64> {
        match &self.rule {
            Rule::NarrowWedge => (x == 0.0).then_some(0.0),
            Rule::Flat => Some(0.0),
            Rule::Expression(f) => f(x).filter(|v| v.is_finite()),
            Rule::Table { xs, fs, extend_linear } => table_value(xs, fs, *extend_linear, x),
        }
    }

    /// Rewards at the given increasing grid abscissae. The narrow wedge
    /// rewards the single grid point nearest zero.
    pub fn rewards(&self, xs: &[f64]) -> Vec<Option<f64>> {
        match self.rule {
            Rule::NarrowWedge => {
                let mut out = vec![None; xs.len()];
                if xs.len() >= 2 {
                    let spacing = xs[1] - xs[0];
                    let k = xs.partition_point(|&x| x < 0.0);
                    let best = [k.wrapping_sub(1), k]
                        .into_iter()
                        .filter(|&c| c < xs.len())
                        .min_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()));
                    if let Some(c) = best.filter(|&c| xs[c].abs() <= 0.5 * spacing + 1e-12) {
                        out[c] = Some(0.0);
                    }
                } else if xs.len() == 1 && xs[0] == 0.0 {
                    out[0] = Some(0.0);
                }
                out
            }
            _ => xs.iter().map(|&x| self.value(x)).collect(),
        }
    }

    /// Checks the two growth conditions on the grid points `xs` only.
    pub fn check_membership(&self, xs: &[f64]) -> EventReport {
        let rewards = self.rewards(xs);
        let p = self.psi;
        let mut worst = (f64::NAN, f64::NEG_INFINITY);
        for (&x, r) in xs.iter().zip(&rewards) {
            if let Some(v) = r {
                let excess = v - p.psi1 * (1.0 + x.abs());
                if excess > worst.1 {
                    worst = (x, excess);
                }
            }
        }
        if worst.1 > 0.0 {
            return EventReport::new("growth-bound", false, (worst.0, 0.0), worst.1);
        }
        let reach = xs
            .iter()
            .zip(&rewards)
            .filter(|(x, _)| x.abs() <= p.psi2)
            .filter_map(|(&x, r)| r.map(|v| (x, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match reach {
            Some((x, v)) if v > -p.psi3 => EventReport::new("growth-bound", true, (x, 0.0), v),
            Some((x, v)) => EventReport::new("growth-bound", false, (x, 0.0), v),
            None => EventReport::new("growth-bound", false, (f64::NAN, 0.0), f64::NEG_INFINITY),
        }
    }
}

fn table_value(xs: &[f64], fs: &[Option<f64>], extend: bool, x: f64) -> Option<f64> {
    let n = xs.len();
    let lerp = |a: usize, b: usize| -> Option<f64> {
        let (fa, fb) = (fs[a]?, fs[b]?);
        let w = (x - xs[a]) / (xs[b] - xs[a]);
        Some(fa + w * (fb - fa))
    };
    if x < xs[0] || x > xs[n - 1] {
        if !extend {
            return None;
        }
        if n == 1 {
            return fs[0];
        }
        return if x < xs[0] { lerp(0, 1) } else { lerp(n - 2, n - 1) };
    }
    let k = xs.partition_point(|&v| v < x);
    if xs[k] == x {
        return fs[k];
    }
    lerp(k - 1, k)
}

/// Outcome of an event on one sample, with the location and value that
/// decided it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventReport {
    pub name: String,
    pub outcome: bool,
    pub location: (f64, f64),
    pub value: f64,
}

impl EventReport {
    fn new(name: &str, outcome: bool, location: (f64, f64), value: f64) -> Self {
        Self { name: name.into(), outcome, location, value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardedWeight {
    pub weight: f64,
    /// Smallest maximizing start.
    pub argmax_x: f64,
    /// Largest maximizing start; differs from `argmax_x` only on ties.
    pub argmax_x_last: f64,
    /// The maximizing start sits on the edge of the window, so a wider window
    /// might give a larger value.
    pub boundary_hit: bool,
}

fn window_check(w: &Weights<'_>, triple: &CompatibleTriple, window: (f64, f64), line: usize) -> Result<()> {
    if !(window.0 <= window.1) {
        return Err(Error::Precondition(format!("empty window [{}, {}]", window.0, window.1)));
    }
    w.snap(triple, window.0, line)?;
    w.snap(triple, window.1, line)?;
    Ok(())
}

/// `sup_x (Wgt(x, t1 -> y, t2) + f(x))` over grid `x` in `window`.
pub fn f_rewarded_weight(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    f: &InitialCondition,
    y: f64,
    window: (f64, f64),
) -> Result<RewardedWeight> {
    window_check(w, triple, window, triple.line1())?;
    let prof = w.backward_profile(triple, y, Some(window))?;
    let rewards = f.rewards(&prof.ys);
    let mut best: Option<(usize, f64)> = None;
    let mut last = 0;
    for (k, (r, &v)) in rewards.iter().zip(&prof.weights).enumerate() {
        if let Some(r) = r {
            let total = v + r;
            match best {
                Some((_, b)) if total < b => {}
                Some((_, b)) if total == b => last = k,
                _ => {
                    best = Some((k, total));
                    last = k;
                }
            }
        }
    }
    let (k, weight) = best.ok_or(Error::NoReward)?;
    let step = w.grid().step / triple.spatial_unit();
    let near = |x: f64, edge: f64| (x - edge).abs() < step * (1.0 - 1e-9);
    let (xa, xb) = (prof.ys[k], prof.ys[last]);
    Ok(RewardedWeight {
        weight,
        argmax_x: xa,
        argmax_x_last: xb,
        boundary_hit: near(xa, window.0) || near(xb, window.1),
    })
}

/// `y -> sup_x (Wgt(x, t1 -> y, t2) + f(x))` for grid `y` in `ys`, with
/// starts restricted to `x_window`, from a single line-to-point sweep.
pub fn f_rewarded_profile(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    f: &InitialCondition,
    x_window: (f64, f64),
    ys: (f64, f64),
) -> Result<WeightProfile> {
    window_check(w, triple, x_window, triple.line1())?;
    window_check(w, triple, ys, triple.line2())?;
    if triple.line2() >= w.env().line_count() {
        return Err(Error::Coverage(format!("line {} needed", triple.line2())));
    }
    let grid = *w.grid();
    let unit = triple.spatial_unit();
    let (l1, l2) = (triple.line1() as f64, triple.line2() as f64);
    let (xa, xb) = grid
        .indices_within(l1 + unit * x_window.0, l1 + unit * x_window.1)
        .ok_or_else(|| Error::Coverage("start window contains no grid point".into()))?;
    let (ya, yb) = grid
        .indices_within(l2 + unit * ys.0, l2 + unit * ys.1)
        .ok_or_else(|| Error::Coverage("end window contains no grid point".into()))?;
    let lo = xa;
    let hi = xb.max(yb);
    let starts: Vec<f64> = (xa..=xb).map(|c| w.scaled_x(triple, c, triple.line1())).collect();
    let rewards = f.rewards(&starts);
    if rewards.iter().all(Option::is_none) {
        return Err(Error::NoReward);
    }
    // In energy units, Wgt + f = p (M - (Y - X) - J) + f
    //                        = p ((M + f / p + (X - X_lo)) - (Y - X_lo) - J),
    // so the bracketed start terms seed the sweep and the centering relative
    // to the window's first column is applied at the end.
    let inv_p = std::f64::consts::SQRT_2 * (triple.n() as f64).cbrt();
    let mut init = vec![f64::NEG_INFINITY; hi - lo + 1];
    for (c, r) in (xa..=xb).zip(&rewards) {
        if let Some(r) = r {
            init[c - lo] = r * inv_p + (c - lo) as f64 * grid.step;
        }
    }
    let mut st = SweepStats::default();
    let row = lpp::sweep_from_line(w.env(), lo, &init, triple.line1(), triple.line2(), &mut st);
    let first = ya.max(lo);
    let mut out_y = Vec::new();
    let mut out_w = Vec::new();
    for c in first..=yb {
        let g = row[c - lo];
        if g == f64::NEG_INFINITY {
            continue;
        }
        out_y.push(w.scaled_x(triple, c, triple.line2()));
        out_w.push(w.weight_from_energy(triple, g, lo, c));
    }
    let len = out_y.len();
    Ok(WeightProfile {
        triple: *triple,
        base: ProfileBase::Initial(f.label().to_string()),
        direction: Direction::Forward,
        coords: Coordinates::Scaled,
        ys: out_y,
        weights: out_w,
        snap_errors: vec![0.0; len],
    })
}

/// Every optimal rewarded polymer ending at `(-1, t2)` starts at or right of
/// `-(R + 1)`, and every one ending at `(1, t2)` starts at or left of `R + 1`.
/// Optimal starts are searched over `window`, which must contain
/// `[-(R + 3), R + 3]`.
pub fn regfluc(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    f: &InitialCondition,
    r: f64,
    window: (f64, f64),
) -> Result<EventReport> {
    if window.0 > -(r + 3.0) || window.1 < r + 3.0 {
        return Err(Error::Coverage(format!(
            "window [{}, {}] does not contain [-{}, {}]",
            window.0,
            window.1,
            r + 3.0,
            r + 3.0
        )));
    }
    let left = f_rewarded_weight(w, triple, f, -1.0, window)?;
    let right = f_rewarded_weight(w, triple, f, 1.0, window)?;
    let ok_left = left.argmax_x >= -(r + 1.0);
    let ok_right = right.argmax_x_last <= r + 1.0;
    let margin = (left.argmax_x + r + 1.0).min(r + 1.0 - right.argmax_x_last);
    Ok(EventReport::new(
        "regfluc",
        ok_left && ok_right,
        (left.argmax_x, right.argmax_x_last),
        margin,
    ))
}

/// `|t12^{-1/3} Wgt(u -> v) + 2^{-1/2} t12^{-4/3} (v - u)^2| <= r` for all grid
/// `u` in `xs`, `v` in `ys`.
pub fn poly_wgt_reg(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    xs: (f64, f64),
    ys: (f64, f64),
    r: f64,
) -> Result<EventReport> {
    window_check(w, triple, xs, triple.line1())?;
    window_check(w, triple, ys, triple.line2())?;
    let t12 = triple.t12();
    let (a, b) = (t12.powf(-1.0 / 3.0), t12.powf(-4.0 / 3.0));
    let mut worst = ((f64::NAN, f64::NAN), f64::NEG_INFINITY);
    for u in grid_points(w, triple, xs, triple.line1())? {
        let prof = match w.forward_profile(triple, u, Some(ys)) {
            Ok(p) => p,
            Err(Error::Coverage(_)) => continue,
            Err(e) => return Err(e),
        };
        for (&v, &wt) in prof.ys.iter().zip(&prof.weights) {
            let val = (a * wt + b * q(v - u)).abs();
            if val > worst.1 {
                worst = ((u, v), val);
            }
        }
    }
    Ok(EventReport::new("poly-wgt-reg", worst.1 <= r, worst.0, worst.1))
}

/// Scaled coordinates of the grid points inside `range` on line `line`.
pub fn grid_points(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    range: (f64, f64),
    line: usize,
) -> Result<Vec<f64>> {
    let unit = triple.spatial_unit();
    let l = line as f64;
    let (a, b) = w
        .grid()
        .indices_within(l + unit * range.0, l + unit * range.1)
        .ok_or_else(|| Error::Coverage(format!("[{}, {}] contains no grid point", range.0, range.1)))?;
    Ok((a..=b).map(|c| w.scaled_x(triple, c, line)).collect())
}

/// `sup |Wgt(x2 -> y2) - Wgt(x1 -> y1)| <= r eps^{1/2}` over `x1, x2` in
/// `[x, x + eps]` and `y1, y2` in `[y, y + eps]`. The reported value is the
/// supremum itself.
pub fn loc_wgt_reg(
    w: &Weights<'_>,
    triple: &CompatibleTriple,
    x: f64,
    y: f64,
    eps: f64,
    r: f64,
) -> Result<EventReport> {
    if !(eps > 0.0) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    window_check(w, triple, (x, x + eps), triple.line1())?;
    window_check(w, triple, (y, y + eps), triple.line2())?;
    let mut hi = ((f64::NAN, f64::NAN), f64::NEG_INFINITY);
    let mut lo = f64::INFINITY;
    for u in grid_points(w, triple, (x, x + eps), triple.line1())? {
        let prof = w.forward_profile(triple, u, Some((y, y + eps)))?;
        for (&v, &wt) in prof.ys.iter().zip(&prof.weights) {
            if wt > hi.1 {
                hi = ((u, v), wt);
            }
            lo = lo.min(wt);
        }
    }
    let sup = hi.1 - lo;
    Ok(EventReport::new("loc-wgt-reg", sup <= r * eps.sqrt(), hi.0, sup))
}

/// `sup |h(a) - h(b)|` over profile points in `[-1, 1]` with `|a - b| <= eps`.
/// When `eps` exceeds the width of the sampled domain this is the full
/// oscillation.
pub fn modulus_of_continuity(ys: &[f64], vals: &[f64], eps: f64) -> (f64, (f64, f64)) {
    let idx: Vec<usize> = (0..ys.len()).filter(|&k| (-1.0..=1.0).contains(&ys[k])).collect();
    let mut best = (0.0, (f64::NAN, f64::NAN));
    for (p, &a) in idx.iter().enumerate() {
        for &b in &idx[p + 1..] {
            if ys[b] - ys[a] > eps + 1e-12 {
                break;
            }
            let d = (vals[b] - vals[a]).abs();
            if d > best.0 {
                best = (d, (ys[a], ys[b]));
            }
        }
    }
    best
}

/// The modulus of continuity of the profile on `[-1, 1]` at scale `eps` is
/// below `rho`.
pub fn equicty(profile: &WeightProfile, rho: f64, eps: f64) -> EventReport {
    let (omega, at) = modulus_of_continuity(&profile.ys, &profile.weights, eps);
    EventReport::new("equicty", omega < rho, at, omega)
}

/// `sup |profile|` on `[-1, 1]` is at most `k`.
pub fn unifbd(profile: &WeightProfile, k: f64) -> EventReport {
    let mut best = (f64::NAN, 0.0_f64);
    for (&y, &v) in profile.ys.iter().zip(&profile.weights) {
        if (-1.0..=1.0).contains(&y) && v.abs() >= best.1 {
            best = (y, v.abs());
        }
    }
    EventReport::new("unifbd", best.1 <= k, (best.0, 0.0), best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{required_grid, sample_environment, Environment};

    fn env_for(n: u32, seed: u64, res: f64, half: f64) -> Environment {
        let g = required_grid(n, (-half, half), (0.0, 1.0), res).unwrap();
        sample_environment(seed, n as usize + 1, g).unwrap()
    }

    #[test]
    fn psi_must_be_positive() {
        assert!(PsiTriple::new(1.0, 1.0, 0.0).is_err());
        assert!(PsiTriple::new(1.0, 2.0, 3.0).is_ok());
    }

    #[test]
    fn named_conditions() {
        let nw = InitialCondition::narrow_wedge();
        assert_eq!(nw.value(0.0), Some(0.0));
        assert_eq!(nw.value(0.1), None);
        assert_eq!(InitialCondition::flat().value(-7.0), Some(0.0));
        let r = nw.rewards(&[-0.2, -0.05, 0.15, 0.35]);
        assert_eq!(r, vec![None, Some(0.0), None, None]);
    }

    #[test]
    fn table_interpolation_and_extension() {
        let t = InitialCondition::parse_table("# x f\n-1 0\n0, 1\n1 -inf\n2 2\n", false).unwrap();
        assert_eq!(t.value(-0.5), Some(0.5));
        assert_eq!(t.value(0.0), Some(1.0));
        assert_eq!(t.value(0.5), None);
        assert_eq!(t.value(1.5), None);
        assert_eq!(t.value(3.0), None);
        let e = InitialCondition::parse_table("0 0\n1 2\n", true).unwrap();
        assert_eq!(e.value(2.0), Some(4.0));
        assert_eq!(e.value(-1.0), Some(-2.0));
        assert!(InitialCondition::parse_table("0 0 0\n", false).is_err());
        assert!(InitialCondition::parse_table("1 0\n0 0\n", false).is_err());
        assert!(InitialCondition::parse_table("", false).is_err());
    }

    #[test]
    fn membership_on_window() {
        let xs: Vec<f64> = (-8..=8).map(|k| k as f64 / 4.0).collect();
        assert!(InitialCondition::flat().check_membership(&xs).outcome);
        let steep = InitialCondition::expression("steep", |x: f64| Some(3.0 * x.abs()));
        assert!(!steep.check_membership(&xs).outcome);
        let far = InitialCondition::expression("far", |x: f64| if x.abs() > 1.5 { Some(0.0) } else { Some(-5.0) });
        assert!(!far.check_membership(&xs).outcome);
    }

    #[test]
    fn narrow_wedge_reduces_to_point_weight() {
        let env = env_for(8, 1, 1.0 / 32.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        for y in [-0.5, 0.0, 0.75] {
            let r = f_rewarded_weight(&w, &t, &InitialCondition::narrow_wedge(), y, (-2.0, 2.0)).unwrap();
            assert_eq!(r.argmax_x, 0.0);
            assert_eq!(r.weight, w.weight(&t, 0.0, y).unwrap().value);
        }
    }

    #[test]
    fn flat_is_max_of_backward_profile() {
        let env = env_for(8, 2, 1.0 / 32.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let r = f_rewarded_weight(&w, &t, &InitialCondition::flat(), 0.25, (-2.0, 2.0)).unwrap();
        let p = w.backward_profile(&t, 0.25, Some((-2.0, 2.0))).unwrap();
        let m = p.weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.weight, m);
    }

    #[test]
    fn no_reward_on_window() {
        let env = env_for(8, 3, 1.0 / 16.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let f = InitialCondition::table(vec![(5.0, Some(0.0)), (6.0, Some(0.0))], false).unwrap();
        assert_eq!(f_rewarded_weight(&w, &t, &f, 0.0, (-1.0, 1.0)).unwrap_err(), Error::NoReward);
    }

    #[test]
    fn profile_route_agrees_with_pointwise_route() {
        let env = env_for(8, 4, 1.0 / 32.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        for w in [Weights::new(&env), Weights::with_continuity_correction(&env)] {
            let f = InitialCondition::expression("bump", |x: f64| Some(-0.3 * x * x));
            let prof = f_rewarded_profile(&w, &t, &f, (-2.0, 2.0), (-1.0, 1.0)).unwrap();
            assert!(!prof.is_empty());
            for (&y, &v) in prof.ys.iter().zip(&prof.weights) {
                let r = f_rewarded_weight(&w, &t, &f, y, (-2.0, 2.0)).unwrap();
                assert!((r.weight - v).abs() < 1e-10, "{y}: {} vs {v}", r.weight);
            }
        }
    }

    #[test]
    fn regfluc_cases() {
        let env = env_for(8, 5, 1.0 / 16.0, 6.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let nw = InitialCondition::narrow_wedge();
        for r in [0.0, 1.0, 2.0] {
            assert!(regfluc(&w, &t, &nw, r, (-(r + 3.0), r + 3.0)).unwrap().outcome);
        }
        assert!(matches!(
            regfluc(&w, &t, &nw, 2.0, (-3.0, 3.0)),
            Err(Error::Coverage(_))
        ));
        // R beyond the window's reach is vacuous for flat data
        assert!(regfluc(&w, &t, &InitialCondition::flat(), 2.5, (-5.5, 5.5)).unwrap().outcome);
    }

    #[test]
    fn poly_wgt_reg_extremes() {
        let env = env_for(8, 6, 1.0 / 16.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        assert!(poly_wgt_reg(&w, &t, (0.0, 1.0), (0.0, 1.0), 1e9).unwrap().outcome);
        assert!(!poly_wgt_reg(&w, &t, (0.0, 1.0), (0.0, 1.0), 0.0).unwrap().outcome);
    }

    #[test]
    fn equicty_and_unifbd_on_constant_profile() {
        let env = env_for(8, 7, 1.0 / 16.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let mut p = Weights::new(&env).forward_profile(&t, 0.0, Some((-1.0, 1.0))).unwrap();
        p.weights.iter_mut().for_each(|v| *v = 0.7);
        assert!(equicty(&p, 1e-9, 0.5).outcome);
        assert!(unifbd(&p, 0.7).outcome);
        assert!(!unifbd(&p, 0.69).outcome);
    }

    #[test]
    fn modulus_with_large_eps_is_oscillation() {
        let ys: Vec<f64> = (-4..=4).map(|k| k as f64 / 4.0).collect();
        let vals: Vec<f64> = ys.iter().map(|y| y * y).collect();
        assert_eq!(modulus_of_continuity(&ys, &vals, 10.0).0, 1.0);
        assert_eq!(modulus_of_continuity(&ys, &vals, 0.25).0, 1.0 - 0.5625);
    }

    #[test]
    fn loc_wgt_reg_reports_oscillation() {
        let env = env_for(8, 8, 1.0 / 32.0, 3.0);
        let t = CompatibleTriple::new(8, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let rep = loc_wgt_reg(&w, &t, 0.0, 0.0, 0.25, 1e6).unwrap();
        assert!(rep.outcome && rep.value > 0.0);
        assert!(!loc_wgt_reg(&w, &t, 0.0, 0.0, 0.25, 0.0).unwrap().outcome);
    }
}
