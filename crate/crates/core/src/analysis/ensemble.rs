//! Streaming Monte Carlo kernels. Replicas run in parallel on the current
//! rayon pool; results are collected in replica order.

use super::setting::EnsembleConfig;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rwrs::ProcessProbe;
use crate::scenery::QuenchedField;
use crate::seed::derive;
use crate::walk::{StepSampler, Walker};
use rayon::prelude::*;

/// Seed of the annealed ensemble shared by the variance, normality and
/// covariance experiments.
pub fn annealed_seed(master: u64) -> u64 {
    derive(master, "annealed", &[])
}

/// Values of 𝒲^{(n)} at fixed times for independent (walk, scenery) draws.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnealedEnsemble {
    replicas: usize,
    ns: Vec<u64>,
    times: Vec<f64>,
    /// [replica][n][time]
    values: Vec<Vec<Vec<f64>>>,
}

fn union_sorted<T: PartialOrd + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v: Vec<T> = a.iter().chain(b).copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).expect("no NaN"));
    v.dedup_by(|x, y| x == y);
    v
}

impl AnnealedEnsemble {
    pub fn covers(&self, replicas: usize, ns: &[u64], times: &[f64]) -> bool {
        replicas <= self.replicas
            && ns.iter().all(|n| self.ns.contains(n))
            && times.iter().all(|t| self.times.contains(t))
    }

    /// Make sure the ensemble holds at least `replicas` draws at the given
    /// grid points and times. Values of one replica do not depend on what
    /// else is requested, so enlarging the ensemble never changes results.
    pub fn ensure(&mut self, cfg: &EnsembleConfig, replicas: usize, ns: &[u64], times: &[f64]) -> Result<()> {
        if self.covers(replicas, ns, times) {
            return Ok(());
        }
        let replicas = replicas.max(self.replicas);
        let ns = union_sorted(&self.ns, ns);
        let times = union_sorted(&self.times, times);
        let values = annealed_paths(cfg, replicas, &ns, &times)?;
        *self = AnnealedEnsemble {
            replicas,
            ns,
            times,
            values,
        };
        Ok(())
    }

    /// 𝒲^{(n)}_t for the first `replicas` draws.
    pub fn samples(&self, replicas: usize, n: u64, t: f64) -> Result<Vec<f64>> {
        let i = self.ns.iter().position(|&m| m == n);
        let j = self.times.iter().position(|&s| s == t);
        match (i, j) {
            (Some(i), Some(j)) if replicas <= self.replicas => {
                Ok(self.values[..replicas].iter().map(|r| r[i][j]).collect())
            }
            _ => Err(Error::Precondition(format!(
                "ensemble does not hold {replicas} replicas at n = {n}, t = {t}"
            ))),
        }
    }
}

/// Run `replicas` annealed draws, returning 𝒲^{(n)}_t indexed [replica][n][t].
pub fn annealed_paths(cfg: &EnsembleConfig, replicas: usize, ns: &[u64], times: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let sampler = StepSampler::new(&cfg.walk)?;
    let base = annealed_seed(cfg.master_seed);
    // fail early on bad probe arguments
    for &n in ns {
        ProcessProbe::new(n, cfg.t_max, times)?;
    }
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let field = QuenchedField::new(cfg.scenery.with_seed(derive(base, "scenery", &[r])));
            let walker = Walker::new(sampler.clone(), derive(base, "walk", &[r]));
            let mut probes: Vec<ProcessProbe> = ns
                .iter()
                .map(|&n| ProcessProbe::new(n, cfg.t_max, times))
                .collect::<Result<_>>()?;
            run_probes(walker, &mut probes, &field);
            probes
                .into_iter()
                .map(|p| p.finish().map(|s| s.at_times))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Drive one walk through raw-Z probes sorted by n.
fn run_probes(mut walker: Walker, probes: &mut [ProcessProbe], field: &QuenchedField) {
    let total = probes.iter().map(ProcessProbe::steps_needed).max().unwrap_or(0);
    let mut z = CompensatedSum::new();
    let mut first = 0;
    for k in 1..=total {
        z.add(field.eval(walker.advance()));
        let v = z.value();
        while first < probes.len() && probes[first].steps_needed() < k {
            first += 1;
        }
        for p in &mut probes[first..] {
            p.push(v);
        }
    }
}

/// One walk feeding the truncated and recentered process Ẑ^{(n)} of every
/// grid point n (each with its own M_n, m_n) into probes.
pub fn recentered_probes(
    walker: Walker,
    field: &QuenchedField,
    levels: &[(f64, f64)],
    probes: &mut [ProcessProbe],
) {
    let total = probes.iter().map(ProcessProbe::steps_needed).max().unwrap_or(0);
    let mut sums = vec![CompensatedSum::new(); probes.len()];
    let mut walker = walker;
    let mut first = 0;
    for k in 1..=total {
        let v = field.eval(walker.advance());
        while first < probes.len() && probes[first].steps_needed() < k {
            first += 1;
        }
        for ((p, acc), &(threshold, mean)) in probes[first..].iter_mut().zip(&mut sums[first..]).zip(&levels[first..]) {
            acc.add(crate::scenery::truncate_value(v, threshold) - mean);
            p.push(acc.value());
        }
    }
}
