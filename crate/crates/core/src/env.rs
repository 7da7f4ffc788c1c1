//! The discretized Brownian environment `B(k, ·)` on a uniform grid.
//!
//! Every line is a two-sided Brownian motion sampled at `origin + j * step`,
//! anchored so that `B(k, point(0)) = 0`. Increments are drawn from a keyed
//! ChaCha8 stream (key from the master seed, stream id = line index, word
//! position from the block index), so any line, and any block inside a line,
//! regenerates independently and in any order.
//!
//! Values live on the dyadic lattice `2^-32 Z`. With magnitudes far below
//! `2^21`, every sum and difference of environment values is exact in `f64`,
//! which makes the max-plus recursion associative: the forward sweep, the
//! reflected sweep and brute-force enumeration agree bit for bit.

use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Increments per independently seekable block.
pub const BLOCK_LEN: usize = 4096;

const LATTICE_SCALE: f64 = 4_294_967_296.0; // 2^32
const LATTICE_INV: f64 = 1.0 / LATTICE_SCALE;
/// Largest magnitude for which lattice sums stay exact.
const LATTICE_LIMIT: f64 = 1_048_576.0; // 2^20

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministically mixes a list of words into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x6a09_e667_f3bc_c909_u64;
    let mut out = splitmix64(&mut state);
    for &p in parts {
        state ^= p.wrapping_mul(0xd6e8_feb8_6659_fd93);
        out = splitmix64(&mut state) ^ out.rotate_left(17);
    }
    out
}

/// Rounds a real onto the `2^-32` lattice used for environment values.
pub fn to_lattice(x: f64) -> f64 {
    (x * LATTICE_SCALE).round() * LATTICE_INV
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(origin: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        if count < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {count}")));
        }
        if !origin.is_finite() {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self { origin, step, count })
    }

    /// `origin + j * step`, never accumulated.
    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.step
    }

    pub fn last_point(&self) -> f64 {
        self.point(self.count - 1)
    }

    /// Nearest grid index to `x` and the absolute snap distance, or `None`
    /// when `x` lies more than half a step outside the grid.
    pub fn snap(&self, x: f64) -> Option<(usize, f64)> {
        let r = ((x - self.origin) / self.step).round();
        if !(r >= 0.0) || r > (self.count - 1) as f64 {
            return None;
        }
        let j = r as usize;
        Some((j, (x - self.point(j)).abs()))
    }

    /// Index of an on-grid coordinate (within `1e-9` steps).
    pub fn index_of(&self, x: f64) -> Result<usize> {
        match self.snap(x) {
            Some((j, err)) if err <= 1e-9 * self.step => Ok(j),
            Some(_) => Err(Error::Precondition(format!("coordinate {x} is not a grid point"))),
            None => Err(Error::Coverage(format!(
                "coordinate {x} outside grid [{}, {}]",
                self.origin,
                self.last_point()
            ))),
        }
    }

    /// Grid indices `lo..=hi` of the points inside `[a, b]`, if any.
    pub fn indices_within(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        let tol = 1e-9 * self.step;
        let lo = ((a - self.origin - tol) / self.step).ceil().max(0.0);
        let hi = ((b - self.origin + tol) / self.step).floor().min((self.count - 1) as f64);
        if lo > hi || hi < 0.0 {
            return None;
        }
        Some((lo as usize, hi as usize))
    }

    /// The grid mirrored through zero: point `j` maps to `-point(count - 1 - j)`.
    pub fn reflected(&self) -> GridSpec {
        GridSpec { origin: -self.last_point(), step: self.step, count: self.count }
    }
}

/// Produces the grid needed to evaluate scaled endpoints `n t + 2 n^{2/3} x`
/// for `x` in `scaled_x` and `t` in `t_range`, with adjacent grid points
/// `scaled_resolution` apart in scaled units. The origin is an integer
/// multiple of the step, so unscaled zero is always a grid point.
pub fn required_grid(
    n: u32,
    scaled_x: (f64, f64),
    t_range: (f64, f64),
    scaled_resolution: f64,
) -> Result<GridSpec> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if !(scaled_resolution > 0.0) {
        return Err(Error::Precondition("scaled resolution must be positive".into()));
    }
    if scaled_x.0 > scaled_x.1 || t_range.0 > t_range.1 {
        return Err(Error::Precondition("empty coordinate range".into()));
    }
    let nf = n as f64;
    let spatial = 2.0 * nf.cbrt().powi(2);
    let step = spatial * scaled_resolution;
    let lo = nf * t_range.0 + spatial * scaled_x.0;
    let hi = nf * t_range.1 + spatial * scaled_x.1;
    let first = (lo / step).floor();
    let last = (hi / step).ceil();
    let count = ((last - first) as usize + 1).max(2);
    GridSpec::new(first * step, step, count)
}

/// Read access to environment lines, by value or by regeneration.
pub trait LineSource: Sync {
    fn line_count(&self) -> usize;
    fn grid(&self) -> &GridSpec;
    /// Values of line `k` on the grid. Panics if `k` is out of range.
    fn line(&self, k: usize) -> Cow<'_, [f64]>;
}

#[derive(Debug, Clone)]
pub struct Environment {
    lines: usize,
    grid: GridSpec,
    master_seed: u64,
    values: Option<Vec<Vec<f64>>>,
}

/// Samples a materialized environment.
pub fn sample_environment(master_seed: u64, lines: usize, grid: GridSpec) -> Result<Environment> {
    let env = Environment::streamed(master_seed, lines, grid)?;
    Ok(env.materialize())
}

impl Environment {
    /// An environment whose lines are regenerated on every access; nothing
    /// beyond the parameters is held in memory.
    pub fn streamed(master_seed: u64, lines: usize, grid: GridSpec) -> Result<Self> {
        GridSpec::new(grid.origin, grid.step, grid.count)?;
        if lines == 0 {
            return Err(Error::Config("environment needs at least one line".into()));
        }
        Ok(Self { lines, grid, master_seed, values: None })
    }

    /// Builds an environment from explicit line values. Each line is shifted
    /// so its first value is zero and rounded onto the value lattice.
    pub fn from_lines(grid: GridSpec, values: Vec<Vec<f64>>) -> Result<Self> {
        GridSpec::new(grid.origin, grid.step, grid.count)?;
        if values.is_empty() {
            return Err(Error::Config("environment needs at least one line".into()));
        }
        let mut lines = Vec::with_capacity(values.len());
        for (k, line) in values.into_iter().enumerate() {
            if line.len() != grid.count {
                return Err(Error::Config(format!(
                    "line {k} has {} values, grid has {} points",
                    line.len(),
                    grid.count
                )));
            }
            let anchor = to_lattice(line[0]);
            let mut out = Vec::with_capacity(line.len());
            for v in line {
                let q = to_lattice(v) - anchor;
                if !q.is_finite() || q.abs() >= LATTICE_LIMIT {
                    return Err(Error::Config(format!("line {k} value {v} out of range")));
                }
                out.push(q);
            }
            lines.push(out);
        }
        Ok(Self { lines: lines.len(), grid, master_seed: 0, values: Some(lines) })
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn is_materialized(&self) -> bool {
        self.values.is_some()
    }

    /// Returns a copy with every line held in memory.
    pub fn materialize(&self) -> Environment {
        match &self.values {
            Some(_) => self.clone(),
            None => {
                let values = (0..self.lines).map(|k| self.generate_line(k)).collect();
                Environment { values: Some(values), ..self.clone() }
            }
        }
    }

    /// `B(k, ·)` on the grid.
    pub fn line_values(&self, k: usize) -> Result<Cow<'_, [f64]>> {
        if k >= self.lines {
            return Err(Error::Index { index: k, lines: self.lines });
        }
        Ok(self.line(k))
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        for (w, chunk) in key.chunks_mut(8).enumerate() {
            let word = derive_seed(&[self.master_seed, w as u64]);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        key
    }

    fn generate_line(&self, k: usize) -> Vec<f64> {
        let key = self.key();
        let increments = self.grid.count - 1;
        let sd = self.grid.step.sqrt();
        let mut out = Vec::with_capacity(self.grid.count);
        out.push(0.0);
        let mut acc: i64 = 0;
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(k as u64);
        for (b, start) in (0..increments).step_by(BLOCK_LEN).enumerate() {
            rng.set_word_pos((b as u128) << 32);
            let end = (start + BLOCK_LEN).min(increments);
            for _ in start..end {
                let z: f64 = StandardNormal.sample(&mut rng);
                acc += (z * sd * LATTICE_SCALE).round() as i64;
                out.push(acc as f64 * LATTICE_INV);
            }
        }
        debug_assert!(out.iter().all(|v| v.abs() < LATTICE_LIMIT));
        out
    }
}

impl LineSource for Environment {
    fn line_count(&self) -> usize {
        self.lines
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn line(&self, k: usize) -> Cow<'_, [f64]> {
        assert!(k < self.lines, "line {k} out of range");
        match &self.values {
            Some(v) => Cow::Borrowed(&v[k]),
            None => Cow::Owned(self.generate_line(k)),
        }
    }
}

/// The environment seen with line order reversed and space negated:
/// line `k` becomes `lines - 1 - k` and `B'(k', w) = B(k, last) - B(k, -w)`.
/// A staircase `(x, i) -> (y, j)` in the original has the same energy as the
/// staircase `(-y, L-1-j) -> (-x, L-1-i)` here.
pub struct Reflected<'a> {
    inner: &'a dyn LineSource,
    grid: GridSpec,
}

impl<'a> Reflected<'a> {
    pub fn new(inner: &'a dyn LineSource) -> Self {
        let grid = inner.grid().reflected();
        Self { inner, grid }
    }

    /// Maps an original line index to its reflected index.
    pub fn line_index(&self, k: usize) -> usize {
        self.inner.line_count() - 1 - k
    }

    /// Maps an original grid index to its reflected index.
    pub fn grid_index(&self, j: usize) -> usize {
        self.grid.count - 1 - j
    }
}

impl LineSource for Reflected<'_> {
    fn line_count(&self) -> usize {
        self.inner.line_count()
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn line(&self, k: usize) -> Cow<'_, [f64]> {
        let orig = self.inner.line(self.inner.line_count() - 1 - k);
        let c = orig.len();
        let last = orig[c - 1];
        Cow::Owned((0..c).map(|j| last - orig[c - 1 - j]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(count: usize) -> GridSpec {
        GridSpec::new(0.0, 0.01, count).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(GridSpec::new(0.0, 0.0, 10), Err(Error::Config(_))));
        assert!(matches!(GridSpec::new(0.0, -1.0, 10), Err(Error::Config(_))));
        assert!(matches!(GridSpec::new(0.0, 1.0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_values() {
        let a = sample_environment(7, 2, grid(500)).unwrap();
        let b = sample_environment(7, 2, grid(500)).unwrap();
        for k in 0..2 {
            assert_eq!(a.line_values(k).unwrap(), b.line_values(k).unwrap());
        }
        let c = sample_environment(8, 2, grid(500)).unwrap();
        assert_ne!(a.line_values(0).unwrap(), c.line_values(0).unwrap());
    }

    #[test]
    fn anchored_at_zero() {
        for seed in 0..5 {
            let env = sample_environment(seed, 3, grid(100)).unwrap();
            for k in 0..3 {
                assert_eq!(env.line_values(k).unwrap()[0], 0.0);
            }
        }
    }

    #[test]
    fn line_index_out_of_range() {
        let env = sample_environment(7, 2, grid(10)).unwrap();
        assert_eq!(env.line_values(2).unwrap_err(), Error::Index { index: 2, lines: 2 });
    }

    #[test]
    fn streamed_line_matches_materialized() {
        let g = grid(3 * BLOCK_LEN + 17);
        let streamed = Environment::streamed(11, 3, g).unwrap();
        // line 1 first, without touching line 0
        let l1 = streamed.line_values(1).unwrap().into_owned();
        let full = sample_environment(11, 3, g).unwrap();
        assert_eq!(l1, full.line_values(1).unwrap().as_ref());
        assert_eq!(streamed.line_values(0).unwrap(), full.line_values(0).unwrap());
    }

    #[test]
    fn prefix_grids_share_values() {
        // block seeking makes a shorter grid a prefix of a longer one
        let short = sample_environment(3, 1, grid(BLOCK_LEN + 5)).unwrap();
        let long = sample_environment(3, 1, grid(2 * BLOCK_LEN + 9)).unwrap();
        let s = short.line_values(0).unwrap();
        let l = long.line_values(0).unwrap();
        assert_eq!(&l[..s.len()], s.as_ref());
    }

    #[test]
    fn increment_variance_matches_step() {
        let env = sample_environment(7, 1, GridSpec::new(0.0, 0.01, 100_000).unwrap()).unwrap();
        let v = env.line_values(0).unwrap();
        let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        let n = inc.len() as f64;
        let mean = inc.iter().sum::<f64>() / n;
        let var = inc.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // 3 standard errors of a chi-square variance estimate: 3 * sqrt(2/n) ~ 1.3%
        assert!((var / 0.01 - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn lattice_values() {
        let env = sample_environment(1, 2, grid(1000)).unwrap();
        for k in 0..2 {
            for &v in env.line_values(k).unwrap().iter() {
                assert_eq!(to_lattice(v), v);
            }
        }
    }

    #[test]
    fn required_grid_examples() {
        let g = required_grid(8, (0.0, 0.0), (0.0, 1.0), 1.0 / 16.0).unwrap();
        assert!(g.origin <= 0.0);
        assert!(g.last_point() >= 8.0);
        assert_eq!(g.step, 0.5);

        let g = required_grid(1, (-1.0, 1.0), (0.0, 1.0), 1.0 / 64.0).unwrap();
        assert!(g.origin <= -2.0 && g.last_point() >= 3.0);
        assert_eq!(g.index_of(0.0).map(|j| g.point(j)), Ok(0.0));
    }

    #[test]
    fn required_grid_snap_error_within_half_resolution() {
        for &n in &[1u32, 5, 8, 27, 100] {
            let res = 1.0 / 128.0;
            let g = required_grid(n, (-2.0, 2.0), (0.0, 1.0), res).unwrap();
            let nf = n as f64;
            let spatial = 2.0 * nf.cbrt().powi(2);
            for ti in 0..=4 {
                let t = ti as f64 / 4.0;
                for xi in 0..=97 {
                    let x = -2.0 + 4.0 * xi as f64 / 97.0;
                    let (_, err) = g.snap(nf * t + spatial * x).expect("covered");
                    assert!(err / spatial <= res / 2.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn reflection_is_an_involution_on_increments() {
        let env = sample_environment(4, 3, GridSpec::new(-1.0, 0.25, 9).unwrap()).unwrap();
        let r = Reflected::new(&env);
        assert_eq!(r.grid().origin, -1.0);
        let twice = Reflected::new(&r);
        for k in 0..3 {
            assert_eq!(twice.line(k).as_ref(), env.line(k).as_ref());
        }
        let l = env.line(0);
        let rl = r.line(2);
        for j in 0..8 {
            assert_eq!(l[j + 1] - l[j], rl[8 - j] - rl[7 - j]);
        }
    }

    #[test]
    fn from_lines_anchors_and_checks_length() {
        let g = GridSpec::new(0.0, 1.0, 3).unwrap();
        let env = Environment::from_lines(g, vec![vec![2.0, 3.0, 1.0]]).unwrap();
        assert_eq!(env.line(0).as_ref(), &[0.0, 1.0, -1.0]);
        assert!(Environment::from_lines(g, vec![vec![0.0; 2]]).is_err());
    }

    #[test]
    fn derive_seed_separates_inputs() {
        assert_ne!(derive_seed(&[1, 2]), derive_seed(&[2, 1]));
        assert_ne!(derive_seed(&[0]), derive_seed(&[0, 0]));
        assert_eq!(derive_seed(&[5, 6, 7]), derive_seed(&[5, 6, 7]));
    }
}
