//! Occupation, intersection and range-exit statistics of the walk alone.

use super::{header, param};
use crate::analysis::report::{Check, Row, StatReport};
use crate::analysis::setting::EnsembleConfig;
use crate::analysis::stats::{mean_estimate, ols};
use crate::error::Result;
use crate::lattice::Site;
use crate::seed::derive;
use crate::walk::{PairIntersection, StepSampler, Walker};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaParams {
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    /// Exponents over which p̂_n · ln n must stay flat; grid exponents ≥ 12
    /// (or the whole grid if none) when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_exponents: Option<Vec<u32>>,
    pub occupation_min: f64,
    pub occupation_max: f64,
    pub intersection_max: f64,
    pub intersection_slope_max: f64,
    pub hit_ratio_max: f64,
    /// Half-width of the box around the origin for the occupation diagnostic.
    pub window: u32,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams {
            pairs: 1000,
            exponents: None,
            hit_exponents: None,
            occupation_min: 0.1,
            occupation_max: 1.0,
            intersection_max: 1.0,
            intersection_slope_max: 1.05,
            hit_ratio_max: 1.25,
            window: 8,
        }
    }
}

impl LemmaParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(self.pairs >= 2, "pairs", "at least 2 pairs are required")?;
        param(self.occupation_min < self.occupation_max, "occupation_min", "must be below occupation_max")?;
        param(self.window <= 64, "window", "must be at most 64")?;
        let points = cfg
            .grid
            .points(self.exponents.as_deref())
            .map_err(|e| crate::Error::config("exponents", e.to_string()))?;
        param(points.len() >= 2, "exponents", "at least two grid points are required")?;
        let hits = self.hit_points(cfg).map_err(|e| crate::Error::config("hit_exponents", e.to_string()))?;
        param(
            hits.iter().all(|h| points.contains(h)),
            "hit_exponents",
            "must be a subset of the experiment's exponents",
        )
    }

    fn hit_points(&self, cfg: &EnsembleConfig) -> Result<Vec<(u32, u64)>> {
        let points = cfg.grid.points(self.exponents.as_deref())?;
        match &self.hit_exponents {
            Some(h) => cfg.grid.points(Some(h)),
            None => {
                let high: Vec<(u32, u64)> = points.iter().copied().filter(|p| p.0 >= 12).collect();
                Ok(if high.is_empty() { points } else { high })
            }
        }
    }
}

/// What one walk of a pair records at one grid point.
#[derive(Clone, Debug, Default)]
struct Snapshot {
    origin: [u32; 2],
    exited: [bool; 2],
    intersection: u64,
    window: Vec<u32>,
}

fn lemma_pair(sampler: &StepSampler, seeds: [u64; 2], ns: &[u64], radius: i64) -> Vec<Snapshot> {
    let mut a = Walker::new(sampler.clone(), seeds[0]);
    let mut b = Walker::new(sampler.clone(), seeds[1]);
    let side = (2 * radius + 1) as usize;
    let mut window = vec![0u32; side * side];
    let mut origin = [0u32; 2];
    let mut pair = PairIntersection::new();
    let mut out = Vec::with_capacity(ns.len());
    let mut next = 0;
    let total = *ns.last().expect("nonempty grid");
    let count = |s: Site, window: &mut Vec<u32>| {
        if s.x.abs() <= radius && s.y.abs() <= radius {
            window[(s.y + radius) as usize * side + (s.x + radius) as usize] += 1;
        }
    };
    for k in 1..=total {
        let (sa, sb) = (a.advance(), b.advance());
        let (ca, cb) = pair.record_counts(sa, sb);
        origin[0] += u32::from(sa == Site::ORIGIN);
        origin[1] += u32::from(sb == Site::ORIGIN);
        count(sa, &mut window);
        count(sb, &mut window);
        if k == ns[next] {
            // S_k is outside {S_0, …, S_{k−1}} iff this is its first visit and it is not S_0
            out.push(Snapshot {
                origin,
                exited: [ca == 1 && sa != Site::ORIGIN, cb == 1 && sb != Site::ORIGIN],
                intersection: pair.value(),
                window: window.clone(),
            });
            next += 1;
        }
    }
    out
}

pub fn lemma_suite(cfg: &EnsembleConfig, p: &LemmaParams) -> Result<StatReport> {
    let points = cfg.grid.points(p.exponents.as_deref())?;
    let ns: Vec<u64> = points.iter().map(|q| q.1).collect();
    let sampler = StepSampler::new(&cfg.walk)?;
    let base = derive(cfg.master_seed, "lemma_suite", &[]);
    let radius = i64::from(p.window);
    let snaps: Vec<Vec<Snapshot>> = (0..p.pairs as u64)
        .into_par_iter()
        .map(|i| lemma_pair(&sampler, [derive(base, "walk", &[i, 0]), derive(base, "walk", &[i, 1])], &ns, radius))
        .collect();

    let mut report = header(cfg, "lemma_suite", base, p);
    let side = (2 * radius + 1) as usize;
    let walks = 2.0 * p.pairs as f64;
    let mut occupation = Vec::new();
    let mut intersection = Vec::new();
    let mut hits = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let ln = (n as f64).ln();
        let origin: Vec<f64> = snaps
            .iter()
            .flat_map(|s| s[i].origin.iter().map(|&c| f64::from(c) / ln))
            .collect();
        let occ = mean_estimate(&origin)?;
        report.rows.push(Row::new(n, "origin_occupation_over_log_n", occ.value).with_stderr(occ.stderr));
        occupation.push(occ.value);

        let js: Vec<f64> = snaps.iter().map(|s| s[i].intersection as f64 / n as f64).collect();
        let j = mean_estimate(&js)?;
        report.rows.push(Row::new(n, "intersection_over_n", j.value).with_stderr(j.stderr));
        intersection.push(j.value);

        let exits = snaps.iter().flat_map(|s| s[i].exited).filter(|&e| e).count() as f64;
        let ph = exits / walks;
        let se = (ph * (1.0 - ph) / walks).sqrt();
        report.rows.push(Row::new(n, "exit_probability", ph).with_stderr(se));
        report.rows.push(Row::new(n, "exit_probability_times_log_n", ph * ln).with_stderr(se * ln));
        hits.push((n, ph));

        let mut best = (0.0, 0usize);
        for cell in 0..side * side {
            let total: u64 = snaps.iter().map(|s| u64::from(s[i].window[cell])).sum();
            let m = total as f64 / walks;
            if m > best.0 {
                best = (m, cell);
            }
        }
        report.diagnostics.push(Row::new(n, "window_max_occupation_over_log_n", best.0 / ln));
        let (x, y) = ((best.1 % side) as i64 - radius, (best.1 / side) as i64 - radius);
        report
            .notes
            .push(format!("n = {n}: largest mean occupation in the |x| <= {radius} box at ({x}, {y})"));
    }

    let lo = occupation.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = occupation.iter().copied().fold(0.0, f64::max);
    report.check(Check::new(
        "origin_occupation_min",
        "min over n of E[N_n(0)]/ln n >= tolerance",
        lo,
        p.occupation_min,
        lo >= p.occupation_min,
    ));
    report.check(Check::new(
        "origin_occupation_max",
        "max over n of E[N_n(0)]/ln n <= tolerance",
        hi,
        p.occupation_max,
        hi <= p.occupation_max,
    ));

    let jmax = intersection.iter().copied().fold(0.0, f64::max);
    report.check(Check::new(
        "intersection_bounded",
        "max over n of E[J_n]/n <= tolerance",
        jmax,
        p.intersection_max,
        jmax <= p.intersection_max,
    ));
    let logn: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let logj: Vec<f64> = intersection.iter().zip(&ns).map(|(r, &n)| (r * n as f64).ln()).collect();
    let fit = ols(&logn, &logj)?;
    report
        .rows
        .push(Row::new(0, "intersection_loglog_slope", fit.slope).with_stderr(fit.slope_stderr));
    report.check(Check::new(
        "intersection_not_exploding",
        "OLS slope of ln E[J_n] against ln n <= tolerance",
        fit.slope,
        p.intersection_slope_max,
        fit.slope <= p.intersection_slope_max,
    ));

    let window = p.hit_points(cfg)?;
    let scaled: Vec<f64> = window
        .iter()
        .map(|&(_, n)| {
            let ph = hits.iter().find(|h| h.0 == n).expect("hit window within grid").1;
            ph * (n as f64).ln()
        })
        .collect();
    let smax = scaled.iter().copied().fold(0.0, f64::max);
    let smin = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = smax / smin;
    report.check(Check::new(
        "exit_probability_log_scaling",
        format!(
            "max/min of p_n * ln n over n in [{}, {}] <= tolerance",
            window[0].1,
            window[window.len() - 1].1
        ),
        ratio,
        p.hit_ratio_max,
        ratio <= p.hit_ratio_max,
    ));
    let xs: Vec<f64> = window.iter().map(|&(_, n)| -(n as f64).ln().ln()).collect();
    let ys: Vec<f64> = window
        .iter()
        .map(|&(_, n)| hits.iter().find(|h| h.0 == n).expect("hit window within grid").1.ln())
        .collect();
    if xs.len() >= 2 && ys.iter().all(|y| y.is_finite()) {
        let fit = ols(&xs, &ys)?;
        report
            .rows
            .push(Row::new(0, "exit_probability_exponent", fit.slope).with_stderr(fit.slope_stderr));
    }
    Ok(report)
}
