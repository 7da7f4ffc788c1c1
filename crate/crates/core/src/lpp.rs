//! Unscaled last passage percolation on the grid.
//!
//! A staircase from `(x, i)` to `(y, j)` walks right along line `i` from `x`
//! to `z_{i+1}`, climbs to line `i + 1`, walks to `z_{i+2}`, and so on until
//! it reaches `y` on line `j`. Its energy is the sum of the Brownian
//! increments collected along the horizontal pieces. `M` is the maximum over
//! grid-aligned staircases and is computed by a running prefix-max sweep
//! holding one row in memory.

use crate::env::{GridSpec, LineSource};
use crate::error::{Error, Result};

/// `-zeta(1/2) / sqrt(2 pi)`: the leading constant in the gap between the
/// maximum of a Brownian path and its maximum over a grid of mesh `h`,
/// which is `BETA * sigma * sqrt(h)` to first order.
pub const GRID_MAX_BETA: f64 = 0.582_597_157_939_010_6;

/// Expected per-jump deficit of a grid sweep with mesh `step`. Each jump
/// maximizes a difference of two independent Brownian paths, which has
/// variance rate 2. Every staircase between two lines makes the same number
/// of jumps, so the correction is a constant shift added after the sweep.
pub fn continuity_correction(step: f64) -> f64 {
    GRID_MAX_BETA * (2.0 * step).sqrt()
}

/// Enumeration cap for the brute-force oracle.
pub const BRUTE_FORCE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    pub x: f64,
    pub i: usize,
    pub y: f64,
    pub j: usize,
    /// `z_{i+1}, ..., z_j`: the location of the climb from line `k - 1` to `k`.
    pub jumps: Vec<f64>,
}

impl Staircase {
    pub fn new(start: (f64, usize), end: (f64, usize), jumps: Vec<f64>) -> Result<Self> {
        let (x, i) = start;
        let (y, j) = end;
        if i > j {
            return Err(Error::Precondition(format!("start line {i} above end line {j}")));
        }
        if x > y {
            return Err(Error::Precondition(format!("start {x} right of end {y}")));
        }
        if jumps.len() != j - i {
            return Err(Error::Precondition(format!(
                "expected {} jumps, got {}",
                j - i,
                jumps.len()
            )));
        }
        let mut prev = x;
        for &z in &jumps {
            if z < prev || z > y {
                return Err(Error::Precondition("jumps must be nondecreasing within [x, y]".into()));
            }
            prev = z;
        }
        Ok(Self { x, i, y, j, jumps })
    }

    /// Location where the path enters line `k` (`z_i = x`).
    fn enter(&self, k: usize) -> f64 {
        if k == self.i {
            self.x
        } else {
            self.jumps[k - self.i - 1]
        }
    }

    /// Location where the path leaves line `k` (`z_{j+1} = y`).
    fn leave(&self, k: usize) -> f64 {
        if k == self.j {
            self.y
        } else {
            self.jumps[k - self.i]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult {
    pub value: f64,
    pub endpoint: (f64, usize),
}

/// Operation counts for a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub flops: u64,
    pub cells: u64,
}

/// Energy of a staircase, summed line by line in ascending order.
pub fn energy(env: &dyn LineSource, s: &Staircase) -> Result<f64> {
    let grid = env.grid();
    if s.j >= env.line_count() {
        return Err(Error::Precondition(format!(
            "line {} out of range for {} lines",
            s.j,
            env.line_count()
        )));
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for k in s.i..=s.j {
        let a = on_grid(grid, s.enter(k))?;
        let b = on_grid(grid, s.leave(k))?;
        let line = env.line(k);
        let term = line[b] - line[a];
        // Neumaier compensation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

fn on_grid(grid: &GridSpec, x: f64) -> Result<usize> {
    grid.index_of(x).map_err(|e| match e {
        Error::Coverage(m) => Error::Precondition(m),
        other => other,
    })
}

fn check_endpoints(
    env: &dyn LineSource,
    start: (f64, usize),
    end: (f64, usize),
) -> Result<(usize, usize)> {
    let (x, i) = start;
    let (y, j) = end;
    if i > j || j >= env.line_count() {
        return Err(Error::Precondition(format!(
            "need 0 <= i <= j < {}, got i = {i}, j = {j}",
            env.line_count()
        )));
    }
    if x > y {
        return Err(Error::Precondition(format!("end {y} is left of start {x}")));
    }
    Ok((on_grid(env.grid(), x)?, on_grid(env.grid(), y)?))
}

/// Pushes `row` (values on the line below `k`, over grid columns
/// `lo..lo + row.len()`) through line `k`:
/// `row[t] <- max_{s <= t} (row[s] - B(k, s)) + B(k, t)`.
fn advance(line: &[f64], lo: usize, row: &mut [f64], stats: &mut SweepStats) {
    let b = &line[lo..lo + row.len()];
    let mut run = f64::NEG_INFINITY;
    for (r, &bt) in row.iter_mut().zip(b) {
        let v = *r - bt;
        if v > run {
            run = v;
        }
        *r = run + bt;
    }
    stats.flops += 3 * row.len() as u64;
    stats.cells += row.len() as u64;
}

/// `M(x, i -> t, j)` for every grid column `t` in `ix..=hi`, by grid index.
pub fn sweep_from_point(
    env: &dyn LineSource,
    ix: usize,
    i: usize,
    j: usize,
    hi: usize,
    stats: &mut SweepStats,
) -> Vec<f64> {
    assert!(ix <= hi && hi < env.grid().count && i <= j && j < env.line_count());
    let first = env.line(i);
    let bx = first[ix];
    let mut row: Vec<f64> = first[ix..=hi].iter().map(|&b| b - bx).collect();
    stats.flops += row.len() as u64;
    stats.cells += row.len() as u64;
    drop(first);
    for k in i + 1..=j {
        let line = env.line(k);
        advance(&line, ix, &mut row, stats);
    }
    row
}

/// Line-to-point sweep: given a reward `init[s]` for starting at grid
/// column `lo + s` on line `i`, returns for each `t` the maximum over `s <= t`
/// of `init[s] + M(s, i -> t, j)`. Unrewarded starts carry `-inf`.
pub fn sweep_from_line(
    env: &dyn LineSource,
    lo: usize,
    init: &[f64],
    i: usize,
    j: usize,
    stats: &mut SweepStats,
) -> Vec<f64> {
    assert!(lo + init.len() <= env.grid().count && i <= j && j < env.line_count());
    let mut row = init.to_vec();
    let first = env.line(i);
    advance(&first, lo, &mut row, stats);
    drop(first);
    for k in i + 1..=j {
        let line = env.line(k);
        advance(&line, lo, &mut row, stats);
    }
    row
}

pub fn max_energy(env: &dyn LineSource, start: (f64, usize), end: (f64, usize)) -> Result<f64> {
    let (ix, iy) = check_endpoints(env, start, end)?;
    let mut stats = SweepStats::default();
    let row = sweep_from_point(env, ix, start.1, end.1, iy, &mut stats);
    Ok(row[iy - ix])
}

/// `(y, M(x, i -> y, j))` for every grid `y >= x`, from one sweep.
pub fn max_energy_profile(
    env: &dyn LineSource,
    start: (f64, usize),
    j: usize,
) -> Result<Vec<(f64, f64)>> {
    max_energy_profile_instrumented(env, start, j).map(|(p, _)| p)
}

pub fn max_energy_profile_instrumented(
    env: &dyn LineSource,
    start: (f64, usize),
    j: usize,
) -> Result<(Vec<(f64, f64)>, SweepStats)> {
    let grid = *env.grid();
    let (ix, _) = check_endpoints(env, start, (start.0, j))?;
    let mut stats = SweepStats::default();
    let row = sweep_from_point(env, ix, start.1, j, grid.count - 1, &mut stats);
    let out = row.into_iter().enumerate().map(|(d, m)| (grid.point(ix + d), m)).collect();
    Ok((out, stats))
}

/// A maximizing staircase; among ties, the lexicographically smallest jump
/// list.
pub fn geodesic(env: &dyn LineSource, start: (f64, usize), end: (f64, usize)) -> Result<Staircase> {
    let (ix, iy) = check_endpoints(env, start, end)?;
    let (i, j) = (start.1, end.1);
    let grid = *env.grid();
    let width = iy - ix + 1;
    let lines: Vec<Vec<f64>> = (i..=j).map(|k| env.line(k)[ix..=iy].to_vec()).collect();

    // back[k - i][s]: best energy from (s, k) to (y, j), entering line k at s.
    let mut back = vec![vec![0.0; width]; j - i + 1];
    {
        let top = &lines[j - i];
        for s in 0..width {
            back[j - i][s] = top[width - 1] - top[s];
        }
    }
    for k in (i..j).rev() {
        let b = &lines[k - i];
        let mut run = f64::NEG_INFINITY;
        for s in (0..width).rev() {
            let v = b[s] + back[k - i + 1][s];
            if v > run {
                run = v;
            }
            back[k - i][s] = run - b[s];
        }
    }

    // Forward pass: on each line, climb at the first column that still
    // attains the optimum.
    let mut jumps = Vec::with_capacity(j - i);
    let mut cur = 0;
    for k in i..j {
        let b = &lines[k - i];
        let nxt = &back[k - i + 1];
        let mut arg = cur;
        let mut val = f64::NEG_INFINITY;
        for t in cur..width {
            let v = b[t] - b[cur] + nxt[t];
            if v > val {
                val = v;
                arg = t;
            }
        }
        debug_assert!(val == back[k - i][cur]);
        jumps.push(grid.point(ix + arg));
        cur = arg;
    }
    Staircase::new(start, end, jumps)
}

fn multiset_count(points: usize, len: usize) -> u128 {
    // C(points + len - 1, len), saturating
    let mut c: u128 = 1;
    for m in 0..len as u128 {
        c = c.saturating_mul(points as u128 - 1 + m + 1) / (m + 1);
        if c > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    c
}

fn enumerate(
    lines: &[Vec<f64>],
    depth: usize,
    from: usize,
    acc: f64,
    jumps: &mut Vec<usize>,
    visit: &mut dyn FnMut(f64, &[usize]),
) {
    let width = lines[0].len();
    let b = &lines[depth];
    if depth + 1 == lines.len() {
        let total = acc + (b[width - 1] - b[from]);
        visit(total, jumps);
        return;
    }
    for t in from..width {
        jumps.push(t);
        enumerate(lines, depth + 1, t, acc + (b[t] - b[from]), jumps, visit);
        jumps.pop();
    }
}

fn brute_force_setup(
    env: &dyn LineSource,
    start: (f64, usize),
    end: (f64, usize),
) -> Result<(usize, Vec<Vec<f64>>)> {
    let (ix, iy) = check_endpoints(env, start, end)?;
    let lists = multiset_count(iy - ix + 1, end.1 - start.1);
    if lists > BRUTE_FORCE_CAP {
        return Err(Error::Capacity { lists, cap: BRUTE_FORCE_CAP });
    }
    let lines = (start.1..=end.1).map(|k| env.line(k)[ix..=iy].to_vec()).collect();
    Ok((ix, lines))
}

/// Maximum energy by enumerating every nondecreasing jump list.
pub fn brute_force_max_energy(
    env: &dyn LineSource,
    start: (f64, usize),
    end: (f64, usize),
) -> Result<f64> {
    let (_, lines) = brute_force_setup(env, start, end)?;
    let mut best = f64::NEG_INFINITY;
    enumerate(&lines, 0, 0, 0.0, &mut Vec::new(), &mut |e, _| best = best.max(e));
    Ok(best)
}

/// The maximum energy and every jump list attaining it, in enumeration
/// (lexicographic) order.
pub fn brute_force_optima(
    env: &dyn LineSource,
    start: (f64, usize),
    end: (f64, usize),
) -> Result<(f64, Vec<Vec<f64>>)> {
    let (ix, lines) = brute_force_setup(env, start, end)?;
    let grid = *env.grid();
    let mut best = f64::NEG_INFINITY;
    let mut optima: Vec<Vec<usize>> = Vec::new();
    enumerate(&lines, 0, 0, 0.0, &mut Vec::new(), &mut |e, js| {
        if e > best {
            best = e;
            optima.clear();
        }
        if e == best {
            optima.push(js.to_vec());
        }
    });
    let lists = optima
        .into_iter()
        .map(|js| js.into_iter().map(|t| grid.point(ix + t)).collect())
        .collect();
    Ok((best, lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_environment, Environment};

    fn small_env(seed: u64, lines: usize, count: usize) -> Environment {
        sample_environment(seed, lines, GridSpec::new(0.0, 0.25, count).unwrap()).unwrap()
    }

    #[test]
    fn degenerate_staircase_has_zero_energy() {
        let env = small_env(1, 3, 8);
        let s = Staircase::new((0.5, 0), (0.5, 2), vec![0.5, 0.5]).unwrap();
        assert_eq!(energy(&env, &s).unwrap(), 0.0);
    }

    #[test]
    fn single_line_energy_is_an_increment() {
        let env = small_env(2, 2, 8);
        let s = Staircase::new((0.25, 1), (1.5, 1), vec![]).unwrap();
        let l = env.line(1);
        assert_eq!(energy(&env, &s).unwrap(), l[6] - l[1]);
        assert_eq!(max_energy(&env, (0.25, 1), (1.5, 1)).unwrap(), l[6] - l[1]);
    }

    #[test]
    fn energy_matches_hand_sum() {
        let env = small_env(3, 3, 10);
        let s = Staircase::new((0.25, 0), (2.0, 2), vec![0.75, 1.5]).unwrap();
        let (a, b, c) = (env.line(0), env.line(1), env.line(2));
        let hand = (a[3] - a[1]) + (b[6] - b[3]) + (c[8] - c[6]);
        assert!((energy(&env, &s).unwrap() - hand).abs() <= 1e-12);
    }

    #[test]
    fn energy_rejects_off_grid() {
        let env = small_env(3, 2, 10);
        let s = Staircase::new((0.1, 0), (1.0, 1), vec![0.5]).unwrap();
        assert!(matches!(energy(&env, &s), Err(Error::Precondition(_))));
    }

    #[test]
    fn staircase_invariants() {
        assert!(Staircase::new((0.0, 0), (1.0, 2), vec![0.5, 0.25]).is_err());
        assert!(Staircase::new((0.0, 2), (1.0, 1), vec![]).is_err());
        assert!(Staircase::new((1.0, 0), (0.0, 1), vec![0.5]).is_err());
        assert!(Staircase::new((0.0, 0), (1.0, 1), vec![1.5]).is_err());
    }

    #[test]
    fn max_energy_trivial_cases() {
        let env = small_env(4, 4, 10);
        assert_eq!(max_energy(&env, (0.5, 0), (0.5, 3)).unwrap(), 0.0);
        assert!(matches!(max_energy(&env, (1.0, 0), (0.5, 3)), Err(Error::Precondition(_))));
        assert!(matches!(max_energy(&env, (0.0, 0), (0.5, 4)), Err(Error::Precondition(_))));
        assert!(matches!(max_energy(&env, (0.0, 2), (0.5, 1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn profile_matches_pointwise_and_counts_flops() {
        let env = small_env(5, 4, 12);
        let (prof, stats) = max_energy_profile_instrumented(&env, (0.5, 0), 3).unwrap();
        assert_eq!(prof[0], (0.5, 0.0));
        for &(y, m) in &prof {
            assert_eq!(m.to_bits(), max_energy(&env, (0.5, 0), (y, 3)).unwrap().to_bits());
        }
        assert!(stats.flops <= 3 * 4 * 12);
    }

    #[test]
    fn geodesic_trivial_cases() {
        let env = small_env(6, 3, 8);
        let g = geodesic(&env, (0.5, 0), (0.5, 2)).unwrap();
        assert_eq!(g.jumps, vec![0.5, 0.5]);
        let g = geodesic(&env, (0.0, 1), (1.0, 1)).unwrap();
        assert!(g.jumps.is_empty());
    }

    #[test]
    fn brute_force_capacity_guard() {
        let env = sample_environment(1, 30, GridSpec::new(0.0, 1.0, 100).unwrap()).unwrap();
        assert!(matches!(
            brute_force_max_energy(&env, (0.0, 0), (99.0, 29)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn brute_force_trivial_cases() {
        let env = small_env(7, 3, 6);
        assert_eq!(brute_force_max_energy(&env, (0.5, 0), (0.5, 2)).unwrap(), 0.0);
        let l = env.line(1);
        assert_eq!(brute_force_max_energy(&env, (0.0, 1), (1.0, 1)).unwrap(), l[4] - l[0]);
    }

    #[test]
    fn multiset_count_values() {
        assert_eq!(multiset_count(10, 0), 1);
        assert_eq!(multiset_count(10, 1), 10);
        assert_eq!(multiset_count(10, 3), 220);
        assert_eq!(multiset_count(2, 5), 6);
    }

    #[test]
    fn line_to_point_matches_maximum_over_starts() {
        let env = small_env(8, 3, 9);
        let init: Vec<f64> = (0..9).map(|s| if s % 3 == 0 { -(s as f64) * 0.25 } else { f64::NEG_INFINITY }).collect();
        let mut st = SweepStats::default();
        let row = sweep_from_line(&env, 0, &init, 0, 2, &mut st);
        let g = *env.grid();
        for t in 0..9 {
            let mut best = f64::NEG_INFINITY;
            for s in (0..=t).filter(|s| s % 3 == 0) {
                let m = max_energy(&env, (g.point(s), 0), (g.point(t), 2)).unwrap();
                best = best.max(init[s] + m);
            }
            assert_eq!(row[t], best);
        }
    }
}
