use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Exceedance probabilities `P(X >= level)` with Wilson intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub levels: Vec<f64>,
    pub exceed_counts: Vec<u64>,
    pub total: u64,
    pub probabilities: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
}

impl TailCurve {
    pub fn from_counts(levels: Vec<f64>, exceed_counts: Vec<u64>, total: u64) -> Result<Self> {
        if levels.len() != exceed_counts.len() {
            return Err(Error::Input("levels and counts differ in length".into()));
        }
        if total == 0 {
            return Err(Error::Input("tail curve needs at least one sample".into()));
        }
        if exceed_counts.iter().any(|&c| c > total) {
            return Err(Error::Input("count exceeds total".into()));
        }
        let probabilities = exceed_counts.iter().map(|&c| c as f64 / total as f64).collect();
        let (ci_low, ci_high) = exceed_counts.iter().map(|&c| wilson_interval(c, total)).unzip();
        Ok(Self { levels, exceed_counts, total, probabilities, ci_low, ci_high })
    }

    /// A noise-free curve, e.g. for checking estimators against a planted law.
    /// Counts are the rounded expectations.
    pub fn from_probabilities(levels: Vec<f64>, probabilities: Vec<f64>, total: u64) -> Result<Self> {
        if levels.len() != probabilities.len() {
            return Err(Error::Input("levels and probabilities differ in length".into()));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Input("probabilities must lie in [0, 1]".into()));
        }
        let counts: Vec<u64> = probabilities.iter().map(|p| (p * total as f64).round() as u64).collect();
        let mut curve = Self::from_counts(levels, counts, total)?;
        curve.probabilities = probabilities;
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Nonincreasing as the level increases.
    pub fn is_nonincreasing(&self) -> bool {
        self.probabilities.windows(2).all(|w| w[1] <= w[0])
    }
}

pub fn estimate_tail(samples: &[f64], levels: &[f64]) -> Result<TailCurve> {
    if samples.is_empty() {
        return Err(Error::Input("no samples".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Input("samples contain NaN".into()));
    }
    if levels.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Input("levels must be sorted".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let counts = levels.iter().map(|&l| (n - sorted.partition_point(|&v| v < l)) as u64).collect();
    TailCurve::from_counts(levels.to_vec(), counts, n as u64)
}
