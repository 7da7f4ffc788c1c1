//! The prefix-max sweep against exhaustive enumeration, and exact per-sample
//! structure of the maximal energy.

use blpp_core::env::{derive_seed, sample_environment, Environment, GridSpec, LineSource};
use blpp_core::lpp::{
    brute_force_max_energy, brute_force_optima, energy, geodesic, max_energy, max_energy_profile, Staircase,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    env: Environment,
    start: (f64, usize),
    end: (f64, usize),
}

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 77]));
    let lines = rng.random_range(1..=4);
    let span = rng.random_range(1..=10);
    let count = (span + rng.random_range(0..4)).max(2);
    let step = [0.5, 0.25, 1.0][rng.random_range(0..3)];
    let grid = GridSpec::new(-1.0, step, count).unwrap();
    let env = sample_environment(seed, lines, grid).unwrap();
    let ix = rng.random_range(0..=count - span);
    let iy = ix + span - 1;
    let i = rng.random_range(0..lines);
    let j = rng.random_range(i..lines);
    Instance { env, start: (grid.point(ix), i), end: (grid.point(iy), j) }
}

#[test]
fn sweep_equals_enumeration() {
    for seed in 0..200 {
        let inst = instance(seed);
        let dp = max_energy(&inst.env, inst.start, inst.end).unwrap();
        let bf = brute_force_max_energy(&inst.env, inst.start, inst.end).unwrap();
        assert!((dp - bf).abs() <= 1e-10, "seed {seed}: {dp} vs {bf}");
    }
}

#[test]
fn geodesic_is_optimal_and_lexicographically_first() {
    for seed in 0..200 {
        let inst = instance(seed);
        let g = geodesic(&inst.env, inst.start, inst.end).unwrap();
        let m = max_energy(&inst.env, inst.start, inst.end).unwrap();
        assert!((energy(&inst.env, &g).unwrap() - m).abs() <= 1e-9, "seed {seed}");
        let (_, optima) = brute_force_optima(&inst.env, inst.start, inst.end).unwrap();
        for other in &optima {
            assert!(g.jumps.as_slice() <= other.as_slice(), "seed {seed}");
        }
        assert_eq!(&g.jumps, &optima[0]);
    }
}

#[test]
fn geodesic_ties_on_integer_environment() {
    // constant lines make every staircase optimal
    let grid = GridSpec::new(0.0, 1.0, 5).unwrap();
    let env = Environment::from_lines(grid, vec![vec![0.0; 5]; 3]).unwrap();
    let g = geodesic(&env, (1.0, 0), (4.0, 2)).unwrap();
    assert_eq!(g.jumps, vec![1.0, 1.0]);
}

#[test]
fn hand_rolled_energy_sum() {
    let env = sample_environment(42, 3, GridSpec::new(0.0, 0.5, 9).unwrap()).unwrap();
    let s = Staircase::new((0.5, 0), (3.5, 2), vec![1.0, 2.5]).unwrap();
    let l: Vec<Vec<f64>> = (0..3).map(|k| env.line(k).into_owned()).collect();
    let mut hand = 0.0;
    for (k, (a, b)) in [(1, 2), (2, 5), (5, 7)].into_iter().enumerate() {
        hand += l[k][b] - l[k][a];
    }
    assert!((energy(&env, &s).unwrap() - hand).abs() <= 1e-12);
}

#[test]
fn profile_agrees_with_single_endpoint_calls() {
    for seed in 0..20 {
        let env = sample_environment(seed, 5, GridSpec::new(0.0, 0.1, 40).unwrap()).unwrap();
        let prof = max_energy_profile(&env, (0.5, 1), 4).unwrap();
        for &(y, m) in &prof {
            assert_eq!(m.to_bits(), max_energy(&env, (0.5, 1), (y, 4)).unwrap().to_bits());
        }
    }
}

#[test]
fn concatenated_staircases_never_beat_the_maximum() {
    for seed in 0..50 {
        let env = sample_environment(seed, 6, GridSpec::new(0.0, 0.25, 20).unwrap()).unwrap();
        let grid = *env.grid();
        let (x, z, y) = (grid.point(2), grid.point(9), grid.point(17));
        let a = geodesic(&env, (x, 0), (z, 2)).unwrap();
        let b = geodesic(&env, (z, 3), (y, 5)).unwrap();
        let total = energy(&env, &a).unwrap() + energy(&env, &b).unwrap();
        let mut jumps = a.jumps.clone();
        jumps.push(z);
        jumps.extend(&b.jumps);
        let joined = Staircase::new((x, 0), (y, 5), jumps).unwrap();
        assert!((energy(&env, &joined).unwrap() - total).abs() < 1e-12);
        assert!(total <= max_energy(&env, (x, 0), (y, 5)).unwrap() + 1e-12);
    }
}

#[test]
fn raising_an_interior_point_never_lowers_the_maximum() {
    for seed in 0..100 {
        let grid = GridSpec::new(0.0, 0.5, 10).unwrap();
        let env = sample_environment(seed, 3, grid).unwrap();
        let g = geodesic(&env, (0.0, 0), (4.5, 2)).unwrap();
        let before = max_energy(&env, (0.0, 0), (4.5, 2)).unwrap();
        // pick a line whose horizontal piece has interior grid points
        let bounds: Vec<(f64, f64)> = (0..3)
            .map(|k| {
                let a = if k == 0 { 0.0 } else { g.jumps[k - 1] };
                let b = if k == 2 { 4.5 } else { g.jumps[k] };
                (a, b)
            })
            .collect();
        let Some((k, (a, b))) = bounds.iter().enumerate().find(|(_, (a, b))| b - a > 0.75) else {
            continue;
        };
        let t = grid.index_of(a + 0.5).unwrap();
        assert!(grid.point(t) < *b);
        let mut lines: Vec<Vec<f64>> = (0..3).map(|l| env.line(l).into_owned()).collect();
        lines[k][t] += 0.75;
        let bumped = Environment::from_lines(grid, lines).unwrap();
        assert!(max_energy(&bumped, (0.0, 0), (4.5, 2)).unwrap() >= before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extra_line_never_lowers_the_maximum(seed in 0u64..1_000_000, m in 1usize..12, a in 0usize..20, w in 0usize..20) {
        let grid = GridSpec::new(0.0, 0.2, 41).unwrap();
        let env = Environment::streamed(seed, m + 1, grid).unwrap();
        let (x, y) = (grid.point(a), grid.point(a + w));
        let lo = max_energy(&env, (x, 0), (y, m - 1)).unwrap();
        let hi = max_energy(&env, (x, 0), (y, m)).unwrap();
        prop_assert!(lo <= hi);
    }
}
