//! Annealed experiments: limit variance, marginal normality and the
//! Brownian covariance structure.

use super::{header, param};
use crate::analysis::ensemble::{annealed_seed, AnnealedEnsemble};
use crate::analysis::normality::{normality_tests, NormalityResult};
use crate::analysis::report::{Check, Row, StatReport, TestRecord};
use crate::analysis::setting::EnsembleConfig;
use crate::analysis::sigma::sigma_target;
use crate::analysis::stats::{covariance_estimate, mean_estimate, variance_estimate};
use crate::error::Result;
use crate::seed::{derive, walk_rng};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealedVarianceParams {
    pub replicas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    pub rel_tolerance: f64,
    /// Also require the relative error to shrink from the smallest to the largest n.
    pub require_trend: bool,
}

impl Default for AnnealedVarianceParams {
    fn default() -> Self {
        AnnealedVarianceParams {
            replicas: 5000,
            exponents: None,
            rel_tolerance: 0.2,
            require_trend: true,
        }
    }
}

impl AnnealedVarianceParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.replicas >= 100, "replicas", "at least 100 replicas are required")?;
        param(self.rel_tolerance > 0.0, "rel_tolerance", "must be positive")?;
        param(cfg.t_max >= 1.0, "kind", "needs T >= 1 to observe W_1")?;
        cfg.grid
            .points(self.exponents.as_deref())
            .map_err(|e| crate::Error::config("exponents", e.to_string()))?;
        Ok(())
    }

    pub fn needs(&self, cfg: &EnsembleConfig) -> Result<(usize, Vec<u64>, Vec<f64>)> {
        let ns = cfg.grid.points(self.exponents.as_deref())?.into_iter().map(|p| p.1).collect();
        Ok((self.replicas, ns, vec![1.0]))
    }
}

pub fn annealed_variance(cfg: &EnsembleConfig, p: &AnnealedVarianceParams, ens: &mut AnnealedEnsemble) -> Result<StatReport> {
    let (replicas, ns, times) = p.needs(cfg)?;
    ens.ensure(cfg, replicas, &ns, &times)?;
    let target = sigma_target(&cfg.walk)?.sigma_sq;
    let mut report = header(cfg, "annealed_variance", annealed_seed(cfg.master_seed), p);
    let mut errors = Vec::new();
    for &n in &ns {
        let xs = ens.samples(replicas, n, 1.0)?;
        let v = variance_estimate(&xs)?;
        let rel = (v.value / target - 1.0).abs();
        errors.push(rel);
        report.rows.push(Row::new(n, "variance", v.value).with_stderr(v.stderr).with_target(target));
        report
            .rows
            .push(Row::new(n, "relative_error", rel).with_stderr(v.stderr / target).with_target(0.0));
        let m = mean_estimate(&xs)?;
        report.diagnostics.push(Row::new(n, "mean", m.value).with_stderr(m.stderr).with_target(0.0));
    }
    let last = *errors.last().expect("grid is nonempty");
    report.check(Check::new(
        "variance_within_tolerance",
        format!("|variance/sigma^2 - 1| <= tolerance at n = {}", ns[ns.len() - 1]),
        last,
        p.rel_tolerance,
        last <= p.rel_tolerance,
    ));
    if p.require_trend && ns.len() >= 2 {
        let ratio = last / errors[0];
        report.check(Check::new(
            "error_shrinks",
            format!("relative error at n = {} over that at n = {} is < tolerance", ns[ns.len() - 1], ns[0]),
            ratio,
            1.0,
            ratio < 1.0,
        ));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalityParams {
    pub replicas: usize,
    /// Grid exponent to test at; the largest grid point when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    pub alpha: f64,
}

impl Default for NormalityParams {
    fn default() -> Self {
        NormalityParams {
            replicas: 2000,
            exponent: None,
            alpha: 0.01,
        }
    }
}

fn single_point(cfg: &EnsembleConfig, exponent: Option<u32>) -> Result<u64> {
    let j = exponent.unwrap_or(cfg.grid.n_max_exp);
    Ok(cfg.grid.points(Some(&[j]))?[0].1)
}

impl NormalityParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.replicas >= 2000, "replicas", "at least 2000 replicas are required")?;
        param(self.alpha > 0.0 && self.alpha < 1.0, "alpha", "must lie in (0, 1)")?;
        param(cfg.t_max >= 1.0, "kind", "needs T >= 1 to observe W_1")?;
        single_point(cfg, self.exponent).map_err(|e| crate::Error::config("exponent", e.to_string()))?;
        Ok(())
    }

    pub fn needs(&self, cfg: &EnsembleConfig) -> Result<(usize, Vec<u64>, Vec<f64>)> {
        Ok((self.replicas, vec![single_point(cfg, self.exponent)?], vec![1.0]))
    }
}

fn test_records(r: &NormalityResult, n: u64, alpha: f64, prefix: &str) -> [TestRecord; 2] {
    [
        TestRecord {
            name: format!("{prefix}kolmogorov_smirnov"),
            n,
            samples: r.samples,
            statistic: r.ks_statistic,
            p_value: r.ks_pvalue,
            alpha,
            rejected: !r.ks_passes(alpha),
        },
        TestRecord {
            name: format!("{prefix}anderson_darling"),
            n,
            samples: r.samples,
            statistic: r.ad_statistic,
            p_value: r.ad_pvalue,
            alpha,
            rejected: !r.ad_passes(alpha),
        },
    ]
}

pub fn marginal_normality(cfg: &EnsembleConfig, p: &NormalityParams, ens: &mut AnnealedEnsemble) -> Result<StatReport> {
    let (replicas, ns, times) = p.needs(cfg)?;
    ens.ensure(cfg, replicas, &ns, &times)?;
    let n = ns[0];
    let seed = annealed_seed(cfg.master_seed);
    let mut report = header(cfg, "marginal_normality", seed, p);
    let xs = ens.samples(replicas, n, 1.0)?;
    let m = mean_estimate(&xs)?;
    let v = variance_estimate(&xs)?;
    report.rows.push(Row::new(n, "mean", m.value).with_stderr(m.stderr).with_target(0.0));
    report.rows.push(Row::new(n, "variance", v.value).with_stderr(v.stderr));
    let r = normality_tests(&xs)?;
    report.tests.extend(test_records(&r, n, p.alpha, ""));
    report.check(Check::new(
        "kolmogorov_smirnov_not_rejected",
        "Lilliefors p-value >= alpha",
        r.ks_pvalue,
        p.alpha,
        r.ks_passes(p.alpha),
    ));
    report.check(Check::new(
        "anderson_darling_not_rejected",
        "Anderson-Darling p-value >= alpha",
        r.ad_pvalue,
        p.alpha,
        r.ad_passes(p.alpha),
    ));

    // harness self-tests on samples of the same size
    let mut rng = walk_rng(derive(seed, "self_test", &[n]));
    let normal: Vec<f64> = (0..replicas).map(|_| StandardNormal.sample(&mut rng)).collect();
    let uniform: Vec<f64> = (0..replicas).map(|_| rng.gen::<f64>()).collect();
    let rn = normality_tests(&normal)?;
    let ru = normality_tests(&uniform)?;
    report.tests.extend(test_records(&rn, n, p.alpha, "self_test_normal_"));
    report.tests.extend(test_records(&ru, n, p.alpha, "self_test_uniform_"));
    let normal_ok = rn.ks_passes(p.alpha) && rn.ad_passes(p.alpha);
    report.check(Check::new(
        "self_test_normal_accepted",
        "both tests accept a true normal sample (smallest p-value >= alpha)",
        rn.ks_pvalue.min(rn.ad_pvalue),
        p.alpha,
        normal_ok,
    ));
    let uniform_ok = !ru.ks_passes(p.alpha) && !ru.ad_passes(p.alpha);
    report.check(Check::new(
        "self_test_uniform_rejected",
        "both tests reject a uniform sample (largest p-value < alpha)",
        ru.ks_pvalue.max(ru.ad_pvalue),
        p.alpha,
        uniform_ok,
    ));
    report
        .notes
        .push("samples are studentized; Lilliefors p-values are accurate below 0.1".into());
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceParams {
    pub replicas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    /// Time pairs (s, t) with 0 ≤ s ≤ t ≤ T.
    pub pairs: Vec<[f64; 2]>,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

impl Default for CovarianceParams {
    fn default() -> Self {
        CovarianceParams {
            replicas: 5000,
            exponent: None,
            pairs: vec![[0.25, 0.5], [0.5, 1.0]],
            ratio_min: 0.7,
            ratio_max: 1.3,
        }
    }
}

impl CovarianceParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.replicas >= 100, "replicas", "at least 100 replicas are required")?;
        param(!self.pairs.is_empty(), "pairs", "at least one (s, t) pair is required")?;
        for [s, t] in &self.pairs {
            param(
                0.0 <= *s && s <= t && *t <= cfg.t_max,
                "pairs",
                &format!("pair ({s}, {t}) must satisfy 0 <= s <= t <= T = {}", cfg.t_max),
            )?;
        }
        param(self.ratio_min < self.ratio_max, "ratio_min", "must be below ratio_max")?;
        single_point(cfg, self.exponent).map_err(|e| crate::Error::config("exponent", e.to_string()))?;
        Ok(())
    }

    pub fn needs(&self, cfg: &EnsembleConfig) -> Result<(usize, Vec<u64>, Vec<f64>)> {
        let times = self.pairs.iter().flat_map(|p| p.iter().copied()).collect();
        Ok((self.replicas, vec![single_point(cfg, self.exponent)?], times))
    }
}

pub fn covariance_structure(cfg: &EnsembleConfig, p: &CovarianceParams, ens: &mut AnnealedEnsemble) -> Result<StatReport> {
    let (replicas, ns, times) = p.needs(cfg)?;
    ens.ensure(cfg, replicas, &ns, &times)?;
    let n = ns[0];
    let sigma_sq = sigma_target(&cfg.walk)?.sigma_sq;
    let mut report = header(cfg, "covariance_structure", annealed_seed(cfg.master_seed), p);
    for &[s, t] in &p.pairs {
        let (a, b) = (ens.samples(replicas, n, s)?, ens.samples(replicas, n, t)?);
        let c = covariance_estimate(&a, &b)?;
        let target = sigma_sq * s.min(t);
        let label = format!("({s}, {t})");
        report
            .rows
            .push(Row::new(n, format!("covariance{label}"), c.value).with_stderr(c.stderr).with_target(target));
        if s == 0.0 {
            // W_0 = 0 identically
            report.check(Check::new(
                format!("covariance_zero{label}"),
                "covariance with W_0 is exactly 0",
                c.value.abs(),
                0.0,
                c.value == 0.0,
            ));
            continue;
        }
        let ratio = c.value / target;
        report
            .rows
            .push(Row::new(n, format!("ratio{label}"), ratio).with_stderr(c.stderr / target).with_target(1.0));
        report.check(Check::new(
            format!("ratio_min{label}"),
            "Cov(W_s, W_t)/(sigma^2 min(s,t)) >= tolerance",
            ratio,
            p.ratio_min,
            ratio >= p.ratio_min,
        ));
        report.check(Check::new(
            format!("ratio_max{label}"),
            "Cov(W_s, W_t)/(sigma^2 min(s,t)) <= tolerance",
            ratio,
            p.ratio_max,
            ratio <= p.ratio_max,
        ));
    }
    Ok(report)
}
