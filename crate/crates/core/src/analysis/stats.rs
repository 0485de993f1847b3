//! Moment estimators with jackknife standard errors, and least squares.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(value: f64, stderr: f64) -> Self {
        Estimate { value, stderr }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    covariance(xs, xs)
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let n = xs.len() as f64;
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0)
}

fn need(len: usize, min: usize, what: &str) -> Result<()> {
    if len < min {
        return Err(Error::Precondition(format!("{what} needs at least {min} samples, got {len}")));
    }
    Ok(())
}

pub fn mean_estimate(xs: &[f64]) -> Result<Estimate> {
    need(xs.len(), 2, "mean")?;
    Ok(Estimate::new(mean(xs), (variance(xs) / xs.len() as f64).sqrt()))
}

/// Jackknife standard error from the leave-one-out replicates.
pub fn jackknife_stderr(loo: &[f64]) -> f64 {
    let n = loo.len() as f64;
    let m = mean(loo);
    ((n - 1.0) / n * loo.iter().map(|v| (v - m) * (v - m)).sum::<f64>()).sqrt()
}

/// Generic jackknife: `stat` is re-evaluated on each leave-one-out subsample.
pub fn jackknife<F: Fn(&[f64]) -> f64>(xs: &[f64], stat: F) -> Result<Estimate> {
    need(xs.len(), 3, "jackknife")?;
    let mut buf = Vec::with_capacity(xs.len() - 1);
    let loo: Vec<f64> = (0..xs.len())
        .map(|i| {
            buf.clear();
            buf.extend(xs[..i].iter().chain(&xs[i + 1..]));
            stat(&buf)
        })
        .collect();
    Ok(Estimate::new(stat(xs), jackknife_stderr(&loo)))
}

/// Sample covariance with its jackknife standard error, in O(n).
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Result<Estimate> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition("covariance of samples of different size".into()));
    }
    need(xs.len(), 3, "covariance")?;
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sx += dx;
        sy += dy;
        sxy += dx * dy;
    }
    let full = (sxy - sx * sy / n) / (n - 1.0);
    let loo: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let (dx, dy) = (x - mx, y - my);
            let (ax, ay) = (sx - dx, sy - dy);
            (sxy - dx * dy - ax * ay / (n - 1.0)) / (n - 2.0)
        })
        .collect();
    Ok(Estimate::new(full, jackknife_stderr(&loo)))
}

pub fn variance_estimate(xs: &[f64]) -> Result<Estimate> {
    covariance_estimate(xs, xs)
}

/// Ordinary least squares y = intercept + slope x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition("regression on samples of different size".into()));
    }
    need(xs.len(), 2, "regression")?;
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("regression on a constant design".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn small_sample_by_hand() {
        let xs = [1.0, 2.0, 4.0];
        assert!((mean(&xs) - 7.0 / 3.0).abs() < 1e-15);
        // deviations -4/3, -1/3, 5/3; squares sum 42/9
        assert!((variance(&xs) - 21.0 / 9.0).abs() < 1e-14);
        let fit = ols(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14 && (fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn jackknife_of_mean_is_classical_stderr() {
        let xs = [0.3, -1.0, 2.5, 0.7, 1.1, -0.4];
        let jk = jackknife(&xs, mean).unwrap();
        let cl = mean_estimate(&xs).unwrap();
        assert!((jk.stderr - cl.stderr).abs() < 1e-13);
    }

    #[test]
    fn variance_stderr_near_normal_theory() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let xs: Vec<f64> = (0..20000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let e = variance_estimate(&xs).unwrap();
        let theory = (2.0 / 19999.0f64).sqrt();
        assert!((e.stderr / theory - 1.0).abs() < 0.05, "{e:?}");
        assert!((e.value - 1.0).abs() < 4.0 * theory);
    }

    proptest! {
        #[test]
        fn fast_jackknife_matches_generic(xs in prop::collection::vec(-10.0f64..10.0, 3..40), shift in -1e3f64..1e3) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * 0.5 + (i as f64).sin() + shift).collect();
            let fast = covariance_estimate(&xs, &ys).unwrap();
            let pairs: Vec<f64> = (0..xs.len()).map(|i| i as f64).collect();
            let slow = jackknife(&pairs, |idx| {
                let a: Vec<f64> = idx.iter().map(|&i| xs[i as usize]).collect();
                let b: Vec<f64> = idx.iter().map(|&i| ys[i as usize]).collect();
                covariance(&a, &b)
            }).unwrap();
            let scale = 1.0 + slow.value.abs() + slow.stderr;
            prop_assert!((fast.value - slow.value).abs() < 1e-9 * scale);
            prop_assert!((fast.stderr - slow.stderr).abs() < 1e-8 * scale);
        }
    }
}
