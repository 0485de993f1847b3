//! Quenched concentration of E[F(𝒲̂^{(n)}) | ξ] across scenery draws.

use super::{header, param};
use crate::analysis::ensemble::recentered_probes;
use crate::analysis::report::{Check, Row, StatReport};
use crate::analysis::setting::EnsembleConfig;
use crate::analysis::stats::{jackknife, mean, mean_estimate, variance};
use crate::error::Result;
use crate::rwrs::{FunctionalId, FunctionalSpec, ProcessProbe};
use crate::scenery::QuenchedField;
use crate::seed::derive;
use crate::walk::{StepSampler, Walker};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationParams {
    pub sceneries: usize,
    pub walks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    pub functional: FunctionalId,
    /// B₀ for the capped/clipped functionals.
    pub cap: f64,
    /// Required drop of the spread, in combined standard errors.
    pub margin: f64,
}

impl Default for ConcentrationParams {
    fn default() -> Self {
        ConcentrationParams {
            sceneries: 20,
            walks: 2000,
            exponents: None,
            functional: FunctionalId::EndpointCosine,
            cap: 1.0,
            margin: 2.0,
        }
    }
}

impl ConcentrationParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.sceneries >= 10, "sceneries", "at least 10 sceneries are required")?;
        param(self.walks >= 500, "walks", "at least 500 walks per scenery are required")?;
        param(self.margin >= 0.0, "margin", "must be non-negative")?;
        FunctionalSpec::new(self.functional, self.cap).map_err(|e| crate::Error::config("cap", e.to_string()))?;
        cfg.grid
            .points(self.exponents.as_deref())
            .map_err(|e| crate::Error::config("exponents", e.to_string()))?;
        Ok(())
    }
}

/// Sums of squares of a K × M table: total = within + between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub total: f64,
    pub within: f64,
    pub between: f64,
}

impl VarianceDecomposition {
    pub fn of(groups: &[Vec<f64>]) -> Self {
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let grand = mean(&all);
        let total = all.iter().map(|x| (x - grand).powi(2)).sum();
        let mut within = 0.0;
        let mut between = 0.0;
        for g in groups {
            let m = mean(g);
            within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
            between += g.len() as f64 * (m - grand).powi(2);
        }
        VarianceDecomposition { total, within, between }
    }

    pub fn relative_defect(&self) -> f64 {
        if self.total == 0.0 {
            (self.within + self.between).abs()
        } else {
            ((self.within + self.between - self.total) / self.total).abs()
        }
    }
}

pub fn quenched_concentration(cfg: &EnsembleConfig, p: &ConcentrationParams) -> Result<StatReport> {
    let points = cfg.grid.points(p.exponents.as_deref())?;
    let ns: Vec<u64> = points.iter().map(|q| q.1).collect();
    let functional = FunctionalSpec::new(p.functional, p.cap)?;
    let schedule = cfg.schedule();
    let levels: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let m = schedule.threshold(n)?;
            Ok((m, cfg.scenery.law.truncated_mean(m)))
        })
        .collect::<Result<_>>()?;
    let sampler = StepSampler::new(&cfg.walk)?;
    let base = derive(cfg.master_seed, "quenched_concentration", &[]);
    let scenery_seeds: Vec<u64> = (0..p.sceneries as u64).map(|k| derive(base, "scenery", &[k])).collect();
    let (k_count, m_count) = (p.sceneries, p.walks);

    // values[k * M + m][n]
    let values: Vec<Vec<f64>> = (0..(k_count * m_count) as u64)
        .into_par_iter()
        .map(|i| {
            let (k, m) = (i / m_count as u64, i % m_count as u64);
            let field = QuenchedField::new(cfg.scenery.with_seed(scenery_seeds[k as usize]));
            let walker = Walker::new(sampler.clone(), derive(base, "walk", &[k, m]));
            let mut probes: Vec<ProcessProbe> =
                ns.iter().map(|&n| ProcessProbe::new(n, cfg.t_max, &[])).collect::<Result<_>>()?;
            recentered_probes(walker, &field, &levels, &mut probes);
            probes
                .into_iter()
                .map(|pr| pr.finish().map(|s| functional.eval_summary(&s)))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut report = header(cfg, "quenched_concentration", base, p);
    let mut spreads = Vec::new();
    let mut deviations = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let groups: Vec<Vec<f64>> = (0..k_count)
            .map(|k| (0..m_count).map(|m| values[k * m_count + m][i]).collect())
            .collect();
        let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
        let within_vars: Vec<f64> = groups.iter().map(|g| variance(g)).collect();
        for (k, g) in groups.iter().enumerate() {
            report.rows.push(
                Row::new(n, "quenched_mean", means[k])
                    .with_stderr((within_vars[k] / g.len() as f64).sqrt())
                    .with_scenery_seed(scenery_seeds[k]),
            );
        }
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        let annealed = mean_estimate(&all)?;
        report.rows.push(Row::new(n, "annealed_mean", annealed.value).with_stderr(annealed.stderr));
        let spread = jackknife(&means, |xs| variance(xs).sqrt())?;
        report.rows.push(Row::new(n, "between_sd", spread.value).with_stderr(spread.stderr));
        let noise_var = mean(&within_vars) / m_count as f64;
        let between_var = variance(&means);
        report.rows.push(Row::new(n, "between_variance", between_var));
        report.rows.push(Row::new(n, "quenched_mean_noise_variance", noise_var));
        report
            .rows
            .push(Row::new(n, "between_variance_corrected", between_var - noise_var));
        let d = VarianceDecomposition::of(&groups);
        report.rows.push(Row::new(n, "ss_total", d.total));
        report.rows.push(Row::new(n, "ss_within", d.within));
        report.rows.push(Row::new(n, "ss_between", d.between));
        report.check(Check::new(
            format!("decomposition_identity(n={n})"),
            "|SS_within + SS_between - SS_total| / SS_total <= tolerance",
            d.relative_defect(),
            1e-9,
            d.relative_defect() <= 1e-9,
        ));
        let noise_dominated = between_var <= 2.0 * noise_var;
        report
            .diagnostics
            .push(Row::new(n, "noise_dominated", if noise_dominated { 1.0 } else { 0.0 }));
        if noise_dominated {
            report.notes.push(format!(
                "n = {n}: between-scenery variance {between_var:.3e} is within a factor 2 of the quenched-mean noise {noise_var:.3e}; increase walks"
            ));
        }
        let max_dev = means.iter().map(|q| (q - annealed.value).abs()).fold(0.0, f64::max);
        report.rows.push(Row::new(n, "max_deviation_from_annealed", max_dev));
        spreads.push(spread);
        deviations.push(max_dev);
    }
    if ns.len() >= 2 {
        let (first, last) = (spreads[0], spreads[spreads.len() - 1]);
        let z = (first.value - last.value) / first.combined_stderr(&last);
        report.check(Check::new(
            "spread_decreases",
            format!(
                "(sd(n={}) - sd(n={})) / combined stderr > tolerance",
                ns[0],
                ns[ns.len() - 1]
            ),
            z,
            p.margin,
            z > p.margin,
        ));
        let ratio = deviations[deviations.len() - 1] / deviations[0];
        report.check(Check::new(
            "means_approach_annealed",
            "max_k |quenched mean - annealed mean| at the largest n over that at the smallest n < tolerance",
            ratio,
            1.0,
            ratio < 1.0,
        ));
    }
    report.notes.push(format!(
        "functional {} with b = {} exercised",
        p.functional, cfg.grid.b
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn decomposition_is_an_identity(
            groups in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 5), 2..8)
        ) {
            let d = VarianceDecomposition::of(&groups);
            prop_assert!(d.between >= 0.0 && d.within >= 0.0);
            prop_assert!((d.within + d.between - d.total).abs() <= 1e-9 * d.total.max(1e-300) + 1e-12);
        }
    }
}
