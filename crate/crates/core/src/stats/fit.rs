use crate::error::{Error, Result};
use crate::stats::tail::TailCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    /// Number of points entering the regression.
    pub points: usize,
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::Estimation(format!("need at least 3 usable points, have {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Estimation("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let slope_stderr = (sse / (nf - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, intercept, r_squared, slope_stderr, points: n })
}

/// Fits `beta` in `p(t) ~ exp(-a t^beta)` by regressing `log(-log p)` on
/// `log t`. Only positive levels with `0 < p < 1` are used; with `drop_zero`
/// the band is narrowed to `p in [5/N, 1/2]`, which discards levels whose
/// estimate rests on a handful of exceedances or sits in the bulk.
pub fn fit_exponent(curve: &TailCurve, drop_zero: bool) -> Result<ExponentFit> {
    let floor = 5.0 / curve.total as f64;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&t, &p) in curve.levels.iter().zip(&curve.probabilities) {
        let usable = t > 0.0 && p > 0.0 && p < 1.0 && (!drop_zero || (p >= floor && p <= 0.5));
        if usable {
            xs.push(t.ln());
            ys.push((-p.ln()).ln());
        }
    }
    ols(&xs, &ys)
}

/// Slope of `log value` against `log eps`.
pub fn holder_fit(medians: &[(f64, f64)]) -> Result<ExponentFit> {
    if medians.iter().any(|&(e, v)| !(e > 0.0 && v > 0.0)) {
        return Err(Error::Estimation("scales and values must be positive".into()));
    }
    let xs: Vec<f64> = medians.iter().map(|m| m.0.ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|m| m.1.ln()).collect();
    ols(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::tail::estimate_tail;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn planted(beta: f64, levels: &[f64]) -> TailCurve {
        let p = levels.iter().map(|t| (-t.powf(beta)).exp()).collect();
        TailCurve::from_probabilities(levels.to_vec(), p, 1_000_000).unwrap()
    }

    #[test]
    fn recovers_planted_exponents() {
        let fit = fit_exponent(&planted(2.0, &[1.0, 1.5, 2.0]), false).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        let fit = fit_exponent(&planted(1.5, &[1.0, 1.5, 2.0]), false).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-9);
        for beta in [1.0, 1.5, 2.0, 3.0] {
            let fit = fit_exponent(&planted(beta, &[0.8, 1.0, 1.2, 1.4, 1.6]), false).unwrap();
            assert!((fit.slope - beta).abs() < 1e-9);
            assert!(fit.r_squared > 1.0 - 1e-12);
        }
    }

    #[test]
    fn monte_carlo_weibull() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s: Vec<f64> = (0..10_000)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                (-u.ln()).powf(2.0 / 3.0)
            })
            .collect();
        let levels: Vec<f64> = (2..=12).map(|k| k as f64 * 0.25).collect();
        let fit = fit_exponent(&estimate_tail(&s, &levels).unwrap(), true).unwrap();
        assert!((fit.slope - 1.5).abs() <= 0.2, "{fit:?}");
    }

    #[test]
    fn too_few_levels() {
        let c = TailCurve::from_probabilities(vec![1.0, 2.0], vec![0.3, 0.1], 100).unwrap();
        assert!(matches!(fit_exponent(&c, false), Err(Error::Estimation(_))));
        let c = TailCurve::from_probabilities(vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 0.0], 100).unwrap();
        assert!(matches!(fit_exponent(&c, false), Err(Error::Estimation(_))));
    }

    #[test]
    fn holder_exact_data() {
        let eps: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
        let half: Vec<(f64, f64)> = eps.iter().map(|&e| (e, e.sqrt())).collect();
        assert!((holder_fit(&half).unwrap().slope - 0.5).abs() < 1e-12);
        let lin: Vec<(f64, f64)> = eps.iter().map(|&e| (e, e)).collect();
        assert!((holder_fit(&lin).unwrap().slope - 1.0).abs() < 1e-12);
        assert!(holder_fit(&half[..2]).is_err());
    }

    #[test]
    fn holder_brownian_increments() {
        // median |B(eps)| over 2000 draws per scale
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = Vec::new();
        for k in 3..=7 {
            let e = 2f64.powi(-k);
            let mut v: Vec<f64> = (0..2000)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (z * e.sqrt()).abs()
                })
                .collect();
            v.sort_by(f64::total_cmp);
            pts.push((e, 0.5 * (v[999] + v[1000])));
        }
        let fit = holder_fit(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() <= 0.05, "{fit:?}");
    }
}
