//! Exact identities between scaled weights, checked sample by sample.

use blpp_core::env::{derive_seed, required_grid, sample_environment, Environment, GridSpec, LineSource, Reflected};
use blpp_core::lpp::geodesic;
use blpp_core::scaled::{
    find_crossing, verify_crossing_rewire, verify_scaling_principle, verify_superadditivity, CompatibleTriple,
    RewireOutcome, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn env_for(n: u32, lines: usize, t_max: f64, seed: u64, res: f64) -> Environment {
    let g = required_grid(n, (-3.0, 3.0), (0.0, t_max), res).unwrap();
    sample_environment(seed, lines, g).unwrap()
}

#[test]
fn backward_on_reflection_is_forward_on_original() {
    for seed in 0..20 {
        let n = 8;
        let env = env_for(n, 9, 1.0, seed, 1.0 / 32.0);
        let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
        let fwd = Weights::new(&env).forward_profile(&t, 0.25, None).unwrap();

        // lines 0..=8 map onto themselves under k -> 8 - k
        let refl = Reflected::new(&env);
        let rw = Weights::new(&refl);
        let unit = t.spatial_unit();
        let big_x = 0.0 + unit * 0.25;
        let y_refl = (-big_x - 8.0) / unit;
        let bwd = rw.backward_profile(&t, y_refl, None).unwrap();
        let mut vals = bwd.weights.clone();
        vals.reverse();
        assert_eq!(vals.len(), fwd.weights.len(), "seed {seed}");
        for (a, b) in vals.iter().zip(&fwd.weights) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn scaling_principle_holds_per_sample() {
    // t12 = 1/2 on a triple of n = 16, and t12 = 2 on n = 8
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 4]));
        for (n, t1, t2) in [(16u32, 0.0, 0.5), (16, 0.5, 1.0), (8, 0.0, 2.0)] {
            let env = env_for(n, (n as f64 * t2) as usize + 1, t2, seed, 1.0 / 32.0);
            let t = CompatibleTriple::new(n, t1, t2).unwrap();
            // y must stay at or above x - n^(1/3) t12 / 2
            let reach = (n as f64).cbrt() * (t2 - t1) / 2.0;
            let x = rng.random_range(-0.4..0.4);
            let y = x + rng.random_range(-0.9 * reach..0.6);
            let r = verify_scaling_principle(&Weights::new(&env), &t, x, y).unwrap();
            assert!(r <= 1e-9, "seed {seed}: residual {r}");
        }
    }
}

#[test]
fn superadditivity_random_middles() {
    let n = 20u32;
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 5]));
        let env = env_for(n, 21, 1.0, seed, 1.0 / 32.0);
        let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
        let x = rng.random_range(-1.0..1.0);
        let y = rng.random_range(-1.0..1.0);
        let z = rng.random_range(-1.5..1.5);
        let mid = rng.random_range(1..20) as f64 / 20.0;
        let w = Weights::new(&env);
        match verify_superadditivity(&w, &t, x, y, z, mid) {
            Ok(slack) => assert!(slack >= -1e-9, "seed {seed}: {slack}"),
            Err(blpp_core::Error::Precondition(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn superadditivity_is_tight_on_the_geodesic() {
    let n = 20u32;
    for seed in 0..50 {
        let env = env_for(n, 21, 1.0, seed, 1.0 / 32.0);
        let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let unit = t.spatial_unit();
        let (x, y) = (-0.25, 0.5);
        let sx = w.snap(&t, x, 0).unwrap();
        let sy = w.snap(&t, y, 20).unwrap();
        let grid = *env.grid();
        let g = geodesic(&env, (grid.point(sx.column), 0), (grid.point(sy.column), 20)).unwrap();
        let k = 10;
        let big_z = g.jumps[k - 1]; // where the path enters line k
        let z = (big_z - k as f64) / unit;
        let slack = verify_superadditivity(&w, &t, x, y, z, 0.5).unwrap();
        assert!(slack.abs() <= 1e-9, "seed {seed}: {slack}");
    }
}

#[test]
fn superadditivity_with_coincident_points() {
    let n = 20u32;
    for seed in 0..20 {
        let env = env_for(n, 21, 1.0, seed, 1.0 / 32.0);
        let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
        let w = Weights::new(&env);
        let slack = verify_superadditivity(&w, &t, 0.0, 0.0, 0.0, 0.5).unwrap();
        let whole = w.weight(&t, 0.0, 0.0).unwrap().value;
        let a = w.weight(&CompatibleTriple::new(n, 0.0, 0.5).unwrap(), 0.0, 0.0).unwrap().value;
        let b = w.weight(&CompatibleTriple::new(n, 0.5, 1.0).unwrap(), 0.0, 0.0).unwrap().value;
        assert!(slack >= -1e-12, "seed {seed}: {slack}");
        assert!((slack - (whole - a - b)).abs() < 1e-12);
    }
}

#[test]
fn superadditivity_domain_violation() {
    let env = env_for(20, 21, 1.0, 1, 1.0 / 16.0);
    let t = CompatibleTriple::new(20, 0.0, 1.0).unwrap();
    let w = Weights::new(&env);
    // z far left of x: the first weight is undefined
    assert!(matches!(
        verify_superadditivity(&w, &t, 1.0, 1.0, -2.5, 0.5),
        Err(blpp_core::Error::Precondition(_))
    ));
    assert!(matches!(
        verify_superadditivity(&w, &t, 0.0, 0.0, 0.0, 0.53),
        Err(blpp_core::Error::Precondition(_))
    ));
}

fn integer_walk_env(seed: u64, lines: usize, grid: GridSpec) -> Environment {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 6]));
    let values = (0..lines)
        .map(|_| {
            let mut acc = 0.0;
            (0..grid.count)
                .map(|j| {
                    if j > 0 {
                        acc += if rng.random::<bool>() { 1.0 } else { -1.0 };
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Environment::from_lines(grid, values).unwrap()
}

#[test]
fn rewiring_crossing_polymers_preserves_weight() {
    // integer increments make ties, and therefore crossing optimal pairs, common
    let n = 8u32;
    let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
    let grid = GridSpec::new(-40.0, 1.0, 89).unwrap();
    let flat = |_: f64| Some(0.0);
    let ends: Vec<f64> = (0..=16).map(|k| (k as f64 - 8.0) / 8.0).collect();
    let mut found = 0;
    for seed in 0..300 {
        let env = integer_walk_env(seed, 9, grid);
        let w = Weights::new(&env);
        if let Some((xs, ys)) = find_crossing(&w, &t, &ends, &flat).unwrap() {
            match verify_crossing_rewire(&w, &t, xs, ys, &flat).unwrap() {
                RewireOutcome::Residual(r) => assert!(r <= 1e-9, "seed {seed}: {r}"),
                RewireOutcome::NotApplicable => panic!("seed {seed}: detected crossing not applicable"),
            }
            found += 1;
        }
    }
    assert!(found > 0, "no crossing configuration found");
}

#[test]
fn narrow_wedge_never_crosses() {
    let n = 8u32;
    let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
    let grid = GridSpec::new(-40.0, 1.0, 89).unwrap();
    let wedge = |x: f64| (x.abs() < 1e-12).then_some(0.0);
    let ends: Vec<f64> = (0..=16).map(|k| (k as f64 - 8.0) / 8.0).collect();
    for seed in 0..30 {
        let env = integer_walk_env(seed, 9, grid);
        assert_eq!(find_crossing(&Weights::new(&env), &t, &ends, &wedge).unwrap(), None);
    }
}

#[test]
fn adjacent_differences_shrink_with_resolution() {
    let n = 64u32;
    let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
    for seed in 0..4 {
        for k in [8, 10, 12] {
            let h = 2f64.powi(-k);
            let g = required_grid(n, (-1.5, 1.5), (0.0, 1.0), h).unwrap();
            let env = Environment::streamed(seed, 65, g).unwrap();
            let p = Weights::new(&env).forward_profile(&t, 0.0, Some((-1.0, 1.0))).unwrap();
            let d = p.weights.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            assert!(d <= 8.0 * (h * (1.0 / h).ln()).sqrt(), "seed {seed}, h = 2^-{k}: {d}");
        }
    }
}

#[test]
fn shifting_a_whole_line_changes_nothing() {
    let n = 8u32;
    let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
    let env = env_for(n, 9, 1.0, 3, 1.0 / 16.0);
    let mut lines: Vec<Vec<f64>> = (0..9).map(|k| env.line(k).into_owned()).collect();
    lines[4].iter_mut().for_each(|v| *v += 3.25);
    let shifted = Environment::from_lines(*env.grid(), lines).unwrap();
    let (a, b) = (Weights::new(&env), Weights::new(&shifted));
    let d1 = a.parabolic_delta(&t, (0.0, 0.25), (-0.5, 0.5)).unwrap();
    let d2 = b.parabolic_delta(&t, (0.0, 0.25), (-0.5, 0.5)).unwrap();
    assert_eq!(d1, d2);
}

#[test]
fn parabolic_delta_antisymmetry() {
    let n = 8u32;
    let t = CompatibleTriple::new(n, 0.0, 1.0).unwrap();
    let env = env_for(n, 9, 1.0, 9, 1.0 / 32.0);
    let w = Weights::new(&env);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let xs = (rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45));
        let ys = (rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45));
        let a = w.parabolic_delta(&t, xs, ys).unwrap();
        let b = w.parabolic_delta(&t, (xs.1, xs.0), (ys.1, ys.0)).unwrap();
        assert_eq!(a, -b);
    }
}
