//! Single-site coupling bound on functionals of 𝒲̂^{(n)}.

use super::{header, param};
use crate::analysis::report::{Check, Row, StatReport};
use crate::analysis::setting::EnsembleConfig;
use crate::error::Result;
use crate::rwrs::{grid_len, site_index, site_influence, FunctionalId, FunctionalSpec, SiteInfluence};
use crate::scenery::{QuenchedField, ResampledField};
use crate::seed::{derive, walk_rng};
use crate::walk::sample_trajectory;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InfluenceParams {
    pub couplings: usize,
    /// Grid exponent of n; the smallest grid point when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
    /// B₀ for the capped/clipped functionals.
    pub cap: f64,
    /// Relative floating-point slack on the bound.
    pub slack: f64,
}

impl Default for InfluenceParams {
    fn default() -> Self {
        InfluenceParams {
            couplings: 1000,
            exponent: None,
            cap: 2.0,
            slack: 1e-12,
        }
    }
}

impl InfluenceParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.couplings >= 1, "couplings", "at least one coupling is required")?;
        param((0.0..1e-6).contains(&self.slack), "slack", "must lie in [0, 1e-6)")?;
        FunctionalSpec::new(FunctionalId::CappedSup, self.cap).map_err(|e| crate::Error::config("cap", e.to_string()))?;
        self.n(cfg).map_err(|e| crate::Error::config("exponent", e.to_string()))?;
        Ok(())
    }

    fn n(&self, cfg: &EnsembleConfig) -> Result<u64> {
        Ok(cfg.grid.points(Some(&[self.exponent.unwrap_or(cfg.grid.n_min_exp)]))?[0].1)
    }
}

pub fn influence_bound(cfg: &EnsembleConfig, p: &InfluenceParams) -> Result<StatReport> {
    let n = p.n(cfg)?;
    let horizon = grid_len(n, cfg.t_max) + 1;
    let schedule = cfg.schedule();
    let base = derive(cfg.master_seed, "influence_bound", &[]);
    let results: Vec<(FunctionalId, SiteInfluence)> = (0..p.couplings as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive(base, "coupling", &[i]);
            let traj = sample_trajectory(&cfg.walk, horizon, derive(s, "walk", &[]))?;
            let field = QuenchedField::new(cfg.scenery.with_seed(derive(s, "scenery", &[])));
            let mut rng = walk_rng(derive(s, "site", &[]));
            let site = traj.at(rng.gen_range(1..=horizon));
            let k = site_index(site)?;
            let coupled = ResampledField::new(&field, derive(s, "resample", &[]), site);
            let id = FunctionalId::ALL[(i % 3) as usize];
            let f = FunctionalSpec::new(id, p.cap)?;
            let r = site_influence(&traj, &field, &coupled, &cfg.scenery.law, k, n, cfg.t_max, &schedule, &f)?;
            Ok((id, r))
        })
        .collect::<Result<_>>()?;

    let mut report = header(cfg, "influence_bound", base, p);
    let holds = |r: &SiteInfluence| r.influence <= r.bound * (1.0 + p.slack);
    let violations = results.iter().filter(|(_, r)| !holds(r)).count();
    for id in FunctionalId::ALL {
        let of: Vec<&SiteInfluence> = results.iter().filter(|(f, _)| *f == id).map(|(_, r)| r).collect();
        if of.is_empty() {
            continue;
        }
        let ok = of.iter().filter(|r| holds(r)).count() as f64 / of.len() as f64;
        let worst = of
            .iter()
            .filter(|r| r.bound > 0.0)
            .map(|r| r.influence / r.bound)
            .fold(0.0, f64::max);
        report.rows.push(Row::new(n, format!("bound_holds_fraction[{id}]"), ok).with_target(1.0));
        report.rows.push(Row::new(n, format!("max_influence_over_bound[{id}]"), worst));
        let mean_visits = of.iter().map(|r| f64::from(r.visits)).sum::<f64>() / of.len() as f64;
        report.diagnostics.push(Row::new(n, format!("mean_visits[{id}]"), mean_visits));
    }
    let tight = results.iter().filter(|(_, r)| r.bound > 0.0 && r.influence > 0.5 * r.bound).count();
    report
        .diagnostics
        .push(Row::new(n, "couplings_above_half_the_bound", tight as f64));
    report.check(Check::new(
        "influence_bound_holds",
        "couplings with |F - F'| > L |xi_n - xi'_n| N / sqrt(n ln n) * (1 + slack) (must be 0)",
        violations as f64,
        p.slack,
        violations == 0,
    ));
    Ok(report)
}
