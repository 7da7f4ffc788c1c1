//! Jacobi eigenvalues against an inertia-bisection oracle, and the GUE edge.

use blpp_core::stats::{sample_gue, sample_gue_top_eigenvalue, HermitianMatrix};

/// Number of eigenvalues below `sigma`: negative pivots of the complex
/// LDL^H factorization of `H - sigma I` (Sylvester's law of inertia).
fn count_below(h: &HermitianMatrix, sigma: f64) -> usize {
    let n = h.size;
    let mut re = h.re.clone();
    let mut im = h.im.clone();
    for i in 0..n {
        re[i * n + i] -= sigma;
    }
    let mut neg = 0;
    for k in 0..n {
        let mut d = re[k * n + k];
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            // l = a_ik / d; a_ij -= l * a_kj
            let (lr, li) = (re[i * n + k] / d, im[i * n + k] / d);
            for j in k + 1..n {
                let (ar, ai) = (re[k * n + j], im[k * n + j]);
                re[i * n + j] -= lr * ar - li * ai;
                im[i * n + j] -= lr * ai + li * ar;
            }
        }
    }
    neg
}

fn bisect_top(h: &HermitianMatrix) -> f64 {
    let n = h.size;
    let radius: f64 = (0..n)
        .map(|i| (0..n).map(|j| h.re[i * n + j].hypot(h.im[i * n + j])).sum::<f64>())
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(h, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn jacobi_matches_bisection_for_small_sizes() {
    for m in 1..=8 {
        for seed in 0..25 {
            let h = sample_gue(m, seed);
            let a = h.top_eigenvalue().unwrap();
            let b = bisect_top(&h);
            assert!((a - b).abs() < 1e-8, "m = {m}, seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn every_eigenvalue_is_bracketed_by_inertia() {
    for seed in 0..10 {
        let h = sample_gue(8, seed);
        let ev = h.eigenvalues().unwrap();
        for (k, &e) in ev.iter().enumerate() {
            assert_eq!(count_below(&h, e - 1e-7), k);
            assert_eq!(count_below(&h, e + 1e-7), k + 1);
        }
    }
}

#[test]
fn top_eigenvalue_sits_near_the_edge() {
    let m = 50;
    let draws = 2000;
    let mean = (0..draws).map(|s| sample_gue_top_eigenvalue(m, s).unwrap()).sum::<f64>() / draws as f64;
    let r = mean / (m as f64).sqrt();
    assert!((1.85..=2.05).contains(&r), "{r}");
}

#[test]
fn edge_fluctuations_scale_like_m_to_the_minus_one_sixth() {
    // (lambda_max - 2 sqrt m) m^{1/6} has an m-independent mean, about -1.77
    let draws = 400;
    let means: Vec<f64> = [25usize, 50, 100]
        .iter()
        .map(|&m| {
            let s: f64 = (0..draws)
                .map(|k| {
                    let l = sample_gue_top_eigenvalue(m, 1_000 + k).unwrap();
                    (l - 2.0 * (m as f64).sqrt()) * (m as f64).powf(1.0 / 6.0)
                })
                .sum();
            s / draws as f64
        })
        .collect();
    for &v in &means {
        assert!((-2.4..=-1.2).contains(&v), "{means:?}");
    }
}
