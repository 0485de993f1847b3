//! Truncation exactness and the deterministic recentering drift.

use super::{header, param};
use crate::analysis::report::{Check, Row, StatReport};
use crate::analysis::setting::EnsembleConfig;
use crate::analysis::stats::ols;
use crate::error::Result;
use crate::numeric::CompensatedSum;
use crate::rwrs::{grid_len, recentering_drift};
use crate::scenery::{truncate_value, QuenchedField};
use crate::seed::derive;
use crate::walk::{StepSampler, Walker};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationParams {
    pub replicas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    /// Required drop of the touch frequency, in combined standard errors.
    pub margin: f64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams {
            replicas: 500,
            exponents: None,
            margin: 2.0,
        }
    }
}

impl TruncationParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.replicas >= 2, "replicas", "at least 2 replicas are required")?;
        param(self.margin >= 0.0, "margin", "must be non-negative")?;
        let points = cfg
            .grid
            .points(self.exponents.as_deref())
            .map_err(|e| crate::Error::config("exponents", e.to_string()))?;
        param(
            grid_len(points[0].1, cfg.t_max) >= 1,
            "exponents",
            "smallest grid point has nT < 1",
        )
    }
}

/// Per grid point: was a visited site above M_n, and did Z^{(n)} differ from Z.
fn truncation_replica(
    walker: Walker,
    field: &QuenchedField,
    lasts: &[usize],
    thresholds: &[f64],
) -> Vec<(bool, bool)> {
    let mut walker = walker;
    let mut raw = CompensatedSum::new();
    let mut truncated = vec![CompensatedSum::new(); lasts.len()];
    let mut out = vec![(false, false); lasts.len()];
    let mut peak = 0.0f64;
    let mut first = 0;
    let total = lasts.iter().copied().max().unwrap_or(0);
    for k in 1..=total {
        let v = field.eval(walker.advance());
        peak = peak.max(v.abs());
        raw.add(v);
        while first < lasts.len() && lasts[first] < k {
            first += 1;
        }
        for i in first..lasts.len() {
            truncated[i].add(truncate_value(v, thresholds[i]));
            out[i].1 |= truncated[i].value().to_bits() != raw.value().to_bits();
            if k == lasts[i] {
                out[i].0 = peak > thresholds[i];
            }
        }
    }
    out
}

pub fn truncation(cfg: &EnsembleConfig, p: &TruncationParams) -> Result<StatReport> {
    let ns: Vec<u64> = cfg.grid.points(p.exponents.as_deref())?.into_iter().map(|q| q.1).collect();
    let schedule = cfg.schedule();
    let thresholds: Vec<f64> = ns.iter().map(|&n| schedule.threshold(n)).collect::<Result<_>>()?;
    let lasts: Vec<usize> = ns.iter().map(|&n| grid_len(n, cfg.t_max)).collect();
    let sampler = StepSampler::new(&cfg.walk)?;
    let base = derive(cfg.master_seed, "truncation", &[]);
    let outcomes: Vec<Vec<(bool, bool)>> = (0..p.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let field = QuenchedField::new(cfg.scenery.with_seed(derive(base, "scenery", &[r])));
            let walker = Walker::new(sampler.clone(), derive(base, "walk", &[r]));
            truncation_replica(walker, &field, &lasts, &thresholds)
        })
        .collect();

    let mut report = header(cfg, "truncation", base, p);
    let reps = p.replicas as f64;
    let mut freqs = Vec::new();
    let mut violations = 0usize;
    for (i, &n) in ns.iter().enumerate() {
        let touched = outcomes.iter().filter(|o| o[i].0).count();
        violations += outcomes.iter().filter(|o| !o[i].0 && o[i].1).count();
        let f = touched as f64 / reps;
        let se = (f * (1.0 - f) / reps).sqrt();
        freqs.push((f, se));
        report.rows.push(Row::new(n, "threshold", thresholds[i]));
        report.rows.push(Row::new(n, "touch_frequency", f).with_stderr(se));
        let differ = outcomes.iter().filter(|o| o[i].1).count() as f64 / reps;
        report.rows.push(Row::new(n, "truncated_differs_frequency", differ));
    }
    report.check(Check::new(
        "exact_when_untouched",
        "replicas with no visited site above M_n whose Z^(n) differs bitwise from Z (must be 0)",
        violations as f64,
        0.0,
        violations == 0,
    ));
    match cfg.scenery.law.bound() {
        Some(bound) => {
            let active: Vec<usize> = (0..ns.len()).filter(|&i| thresholds[i] > bound).collect();
            let worst = active.iter().map(|&i| freqs[i].0).fold(0.0, f64::max);
            report.check(Check::new(
                "bounded_scenery_never_truncated",
                format!("touch frequency over grid points with M_n > {bound} (must be 0)"),
                worst,
                0.0,
                worst == 0.0,
            ));
            if active.len() < ns.len() {
                report.notes.push(format!(
                    "{} grid points have M_n <= {bound} and are excluded from the bounded-scenery check",
                    ns.len() - active.len()
                ));
            }
        }
        None if ns.len() >= 2 => {
            let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
            let ys: Vec<f64> = freqs.iter().map(|f| f.0).collect();
            let fit = ols(&logs, &ys)?;
            report
                .rows
                .push(Row::new(0, "touch_frequency_slope_vs_log_n", fit.slope).with_stderr(fit.slope_stderr));
            let (a, b) = (freqs[0], freqs[freqs.len() - 1]);
            let combined = a.1.hypot(b.1);
            let z = if combined > 0.0 { (a.0 - b.0) / combined } else { 0.0 };
            report.check(Check::new(
                "touch_frequency_slope_negative",
                "OLS slope of touch frequency against ln n < tolerance",
                fit.slope,
                0.0,
                fit.slope < 0.0,
            ));
            report.check(Check::new(
                "touch_frequency_decreasing",
                "(frequency at smallest n - at largest n) / combined stderr > tolerance",
                z,
                p.margin,
                z > p.margin,
            ));
        }
        None => {}
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    /// Allowed growth of the scaled drift in the upper half of the grid
    /// relative to the lower half.
    pub growth_tolerance: f64,
}

impl Default for DriftParams {
    fn default() -> Self {
        DriftParams {
            exponents: None,
            growth_tolerance: 0.0,
        }
    }
}

impl DriftParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.growth_tolerance >= 0.0, "growth_tolerance", "must be non-negative")?;
        let points = cfg
            .grid
            .points(self.exponents.as_deref())
            .map_err(|e| crate::Error::config("exponents", e.to_string()))?;
        param(points.len() >= 2, "exponents", "at least two grid points are required")
    }
}

pub fn recentering_drift_experiment(cfg: &EnsembleConfig, p: &DriftParams) -> Result<StatReport> {
    let ns: Vec<u64> = cfg.grid.points(p.exponents.as_deref())?.into_iter().map(|q| q.1).collect();
    let schedule = cfg.schedule();
    let law = cfg.scenery.law;
    let exponent = 0.75 * cfg.scenery.chi;
    let mut report = header(cfg, "recentering_drift", 0, p);
    let mut scaled = Vec::new();
    for &n in &ns {
        let d = recentering_drift(&law, &schedule, n, cfg.t_max)?;
        let s = d * (n as f64).ln().powf(exponent);
        report.rows.push(Row::new(n, "truncated_mean", law.truncated_mean(schedule.threshold(n)?)));
        report.rows.push(Row::new(n, "drift", d));
        report.rows.push(Row::new(n, "drift_times_log_power", s));
        scaled.push(s);
    }
    let constant = scaled.iter().copied().fold(0.0, f64::max);
    report.rows.push(Row::new(0, "envelope_constant", constant));
    let half = scaled.len() / 2;
    let lower = scaled[..half].iter().copied().fold(0.0, f64::max);
    let upper = scaled[half..].iter().copied().fold(0.0, f64::max);
    let growth = if lower > 0.0 { upper / lower - 1.0 } else if upper > 0.0 { f64::INFINITY } else { 0.0 };
    report.check(Check::new(
        "envelope_bounded",
        "max of drift*(ln n)^(3chi/4) over the upper half of the grid / max over the lower half - 1 <= tolerance",
        growth,
        p.growth_tolerance,
        growth <= p.growth_tolerance,
    ));
    report.notes.push(format!("envelope exponent 3chi/4 = {exponent}"));
    report.notes.push("deterministic: m_n is exact, no random draws (seed 0)".into());
    Ok(report)
}
