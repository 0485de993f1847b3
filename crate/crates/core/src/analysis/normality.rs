//! Goodness of fit to the normal family with estimated mean and variance:
//! Kolmogorov–Smirnov with Lilliefors p-values, and Anderson–Darling (case 3).

use super::stats::{mean, variance};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// (x − x̄)/s with the unbiased s.
pub fn studentize(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.len() < 3 {
        return Err(Error::Precondition("studentizing needs at least 3 samples".into()));
    }
    let (m, s) = (mean(xs), variance(xs).sqrt());
    if !(s > 0.0) {
        return Err(Error::Precondition("studentizing a constant sample".into()));
    }
    Ok(xs.iter().map(|x| (x - m) / s).collect())
}

fn sorted_studentized(xs: &[f64]) -> Result<Vec<f64>> {
    let mut z = studentize(xs)?;
    z.sort_by(f64::total_cmp);
    Ok(z)
}

/// sup |F_n − Φ| of the studentized sample.
pub fn ks_statistic(xs: &[f64]) -> Result<f64> {
    let z = sorted_studentized(xs)?;
    let n = z.len() as f64;
    Ok(z.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = normal_cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// Dallal–Wilkinson approximation to the Lilliefors p-value. Accurate for
/// p ≤ 0.1; larger values are indicative only.
pub fn lilliefors_pvalue(d: f64, n: usize) -> f64 {
    let (mut d, mut n) = (d, n as f64);
    if n > 100.0 {
        d *= (n / 100.0).powf(0.49);
        n = 100.0;
    }
    let p = (-7.01256 * d * d * (n + 2.78019) + 2.99587 * d * (n + 2.78019).sqrt() - 0.122119
        + 0.974598 / n.sqrt()
        + 1.67997 / n)
        .exp();
    p.min(1.0)
}

/// Anderson–Darling A² of the studentized sample.
pub fn anderson_darling(xs: &[f64]) -> Result<f64> {
    let z = sorted_studentized(xs)?;
    let n = z.len();
    let s: f64 = (0..n)
        .map(|i| {
            // ln(1 − Φ(x)) = ln Φ(−x) keeps precision in the upper tail
            let lo = normal_cdf(z[i]).ln();
            let hi = normal_cdf(-z[n - 1 - i]).ln();
            (2 * i + 1) as f64 * (lo + hi)
        })
        .sum();
    Ok(-(n as f64) - s / n as f64)
}

/// Small-sample adjusted statistic A*.
pub fn ad_adjusted(a2: f64, n: usize) -> f64 {
    let n = n as f64;
    a2 * (1.0 + 0.75 / n + 2.25 / (n * n))
}

/// D'Agostino–Stephens p-value for the adjusted statistic.
pub fn ad_pvalue(a_star: f64) -> f64 {
    let a = a_star;
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    p.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub samples: usize,
    pub ks_statistic: f64,
    pub ks_pvalue: f64,
    pub ad_statistic: f64,
    pub ad_pvalue: f64,
}

impl NormalityResult {
    pub fn ks_passes(&self, alpha: f64) -> bool {
        self.ks_pvalue >= alpha
    }

    pub fn ad_passes(&self, alpha: f64) -> bool {
        self.ad_pvalue >= alpha
    }
}

pub fn normality_tests(xs: &[f64]) -> Result<NormalityResult> {
    let d = ks_statistic(xs)?;
    let a2 = anderson_darling(xs)?;
    Ok(NormalityResult {
        samples: xs.len(),
        ks_statistic: d,
        ks_pvalue: lilliefors_pvalue(d, xs.len()),
        ad_statistic: a2,
        ad_pvalue: ad_pvalue(ad_adjusted(a2, xs.len())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::walk_rng;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    const SMALL: [f64; 15] = [
        0.31, -1.2, 2.05, 0.77, -0.4, 0.02, 1.33, -2.1, 0.5, -0.66, 0.9, 1.7, -0.05, 0.21, -1.45,
    ];

    // Reference values below come from statsmodels (`lilliefors` with the
    // approximate p-value and `normal_ad`).

    #[test]
    fn reference_small_sample() {
        let r = normality_tests(&SMALL).unwrap();
        assert!((r.ks_statistic - 0.10565299895788077).abs() < 1e-12);
        assert!((r.ad_statistic - 0.1168091566227254).abs() < 1e-10);
        assert!((r.ad_pvalue - 0.9870030756653414).abs() < 1e-9);
    }

    #[test]
    fn reference_uniform_grid() {
        let u: Vec<f64> = (0..300).map(|i| (i as f64 + 0.5) / 300.0).collect();
        let r = normality_tests(&u).unwrap();
        assert!((r.ks_statistic - 0.058487051889400954).abs() < 1e-12);
        assert!((r.ks_pvalue - 0.014988865276020452).abs() < 1e-9);
        assert!((r.ad_statistic - 3.3030358234112214).abs() < 1e-9);
        assert!((r.ad_pvalue / 2.755745891554799e-08 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reference_skewed_sample() {
        let v: Vec<f64> = (1..=40).map(|i| ((i as f64 * 0.37) % 1.0).sqrt()).collect();
        let r = normality_tests(&v).unwrap();
        assert!((r.ks_statistic - 0.0983936180242937).abs() < 1e-12);
        assert!((r.ad_statistic - 0.6091673001720039).abs() < 1e-9);
        assert!((r.ad_pvalue - 0.1057210761752475).abs() < 1e-9);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        assert!((normal_cdf(-8.0) - 6.22096057427178e-16).abs() < 1e-28);
    }

    #[test]
    fn nominal_size_on_normal_input() {
        // 500 trials at α = 0.01: expect 5 rejections; allow the binomial 3σ band
        let mut rng = walk_rng(77);
        let (mut ks, mut ad) = (0, 0);
        for _ in 0..500 {
            let xs: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = normality_tests(&xs).unwrap();
            ks += usize::from(!r.ks_passes(0.01));
            ad += usize::from(!r.ad_passes(0.01));
        }
        let cap = (5.0 + 3.0 * (500.0f64 * 0.01 * 0.99).sqrt()).floor() as usize;
        assert!(ks <= cap && ad <= cap, "ks {ks}, ad {ad}, cap {cap}");
    }

    #[test]
    fn uniform_rejected() {
        let mut rng = walk_rng(5);
        let xs: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        let r = normality_tests(&xs).unwrap();
        assert!(!r.ks_passes(0.01) && !r.ad_passes(0.01), "{r:?}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(studentize(&[1.0, 1.0, 1.0]).is_err());
        assert!(studentize(&[1.0, 2.0]).is_err());
    }
}
