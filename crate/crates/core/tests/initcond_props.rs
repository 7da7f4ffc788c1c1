//! Properties of f-rewarded weights under changes of the initial condition.

use blpp_core::env::{required_grid, sample_environment, Environment};
use blpp_core::initcond::{f_rewarded_profile, f_rewarded_weight, InitialCondition};
use blpp_core::scaled::{CompatibleTriple, Weights};
use proptest::prelude::*;

fn env_for(n: u32, seed: u64) -> Environment {
    let g = required_grid(n, (-6.0, 6.0), (0.0, 1.0), 1.0 / 32.0).unwrap();
    sample_environment(seed, n as usize + 1, g).unwrap()
}

const N: u32 = 8;
const WIN: (f64, f64) = (-4.0, 4.0);

fn triple() -> CompatibleTriple {
    CompatibleTriple::new(N, 0.0, 1.0).unwrap()
}

#[test]
fn narrow_wedge_is_the_point_weight() {
    for seed in 0..10 {
        let env = env_for(N, seed);
        let w = Weights::new(&env);
        for y in [-1.0, 0.0, 0.5] {
            let r = f_rewarded_weight(&w, &triple(), &InitialCondition::narrow_wedge(), y, WIN).unwrap();
            let p = w.weight(&triple(), 0.0, y).unwrap().value;
            assert!((r.weight - p).abs() < 1e-12);
            assert_eq!(r.argmax_x, 0.0);
        }
    }
}

#[test]
fn larger_f_gives_larger_weight() {
    for seed in 0..10 {
        let env = env_for(N, seed);
        let w = Weights::new(&env);
        let f = InitialCondition::expression("sin", |x: f64| Some(x.sin()));
        let g = InitialCondition::expression("sin+bump", |x: f64| Some(x.sin() + (-x * x).exp()));
        for y in [-1.0, 0.0, 1.0] {
            let a = f_rewarded_weight(&w, &triple(), &f, y, WIN).unwrap().weight;
            let b = f_rewarded_weight(&w, &triple(), &g, y, WIN).unwrap().weight;
            assert!(b >= a);
        }
    }
}

#[test]
fn constant_shift_moves_value_not_argmax() {
    for seed in 0..10 {
        let env = env_for(N, seed);
        let w = Weights::new(&env);
        let f = InitialCondition::expression("cos", |x: f64| Some(-0.3 * x * x + x.cos()));
        let g = InitialCondition::expression("cos+c", |x: f64| Some(-0.3 * x * x + x.cos() + 2.5));
        for y in [-1.0, 0.25, 1.0] {
            let a = f_rewarded_weight(&w, &triple(), &f, y, WIN).unwrap();
            let b = f_rewarded_weight(&w, &triple(), &g, y, WIN).unwrap();
            assert_eq!(a.argmax_x, b.argmax_x);
            // floating-point addition is not associative, so only near-exact
            assert!((b.weight - a.weight - 2.5).abs() < 1e-12);
        }
    }
}

#[test]
fn wider_window_does_not_change_an_interior_optimum() {
    for seed in 0..10 {
        let env = env_for(N, seed);
        let w = Weights::new(&env);
        let f = InitialCondition::expression("well", |x: f64| Some(-x * x));
        let a = f_rewarded_weight(&w, &triple(), &f, 0.0, (-2.0, 2.0)).unwrap();
        let b = f_rewarded_weight(&w, &triple(), &f, 0.0, (-5.0, 5.0)).unwrap();
        if !a.boundary_hit {
            assert_eq!(a, b);
        }
        assert!(b.weight >= a.weight);
    }
}


#[test]
fn profile_agrees_with_pointwise_sweeps() {
    let env = env_for(N, 3);
    let w = Weights::new(&env);
    let f = InitialCondition::flat();
    let p = f_rewarded_profile(&w, &triple(), &f, (-3.0, 3.0), (-1.0, 1.0)).unwrap();
    for (&y, &v) in p.ys.iter().zip(&p.weights).step_by(7) {
        let r = f_rewarded_weight(&w, &triple(), &f, y, (-3.0, 3.0)).unwrap();
        assert!((r.weight - v).abs() < 1e-10, "y = {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn table_condition_matches_brute_force(
        seed in 0u64..1000,
        vals in proptest::collection::vec(proptest::option::weighted(0.7, -2.0f64..2.0), 10),
        y in -1.0f64..1.0,
    ) {
        prop_assume!(vals.iter().any(Option::is_some));
        let env = env_for(N, seed);
        let w = Weights::new(&env);
        let t = triple();
        // grid points of the start line inside [-0.5, 0.5]
        let xs = blpp_core::initcond::grid_points(&w, &t, (-0.5, 0.5), 0).unwrap();
        let picks: Vec<(f64, Option<f64>)> =
            xs.iter().step_by(xs.len() / 10).take(10).copied().zip(vals.iter().copied()).collect();
        let f = InitialCondition::table(picks.clone(), false).unwrap();
        let window = (picks[0].0, picks[picks.len() - 1].0);
        let got = f_rewarded_weight(&w, &t, &f, y, window).unwrap().weight;
        let mut want = f64::NEG_INFINITY;
        // the table interpolates between knots, so every grid start counts
        for &x in xs.iter().filter(|&&x| x >= window.0 && x <= window.1) {
            if let Some(r) = f.value(x) {
                if let Ok(v) = w.weight(&t, x, y) {
                    want = want.max(v.value + r);
                }
            }
        }
        prop_assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}
