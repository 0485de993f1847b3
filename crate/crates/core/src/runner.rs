//! Sequential experiment execution on a dedicated worker pool.

use crate::analysis::{AnnealedEnsemble, ExperimentSpec, StatReport};
use crate::config::ResolvedConfig;
use crate::error::{Error, Result};
use std::time::{Duration, Instant};

/// Outcome of one finished experiment.
pub struct Finished<'a> {
    pub index: usize,
    pub spec: &'a ExperimentSpec,
    pub report: StatReport,
    pub elapsed: Duration,
}

/// Run every experiment in order. Replicas within an experiment run on a
/// pool of `threads` workers; reports do not depend on `threads`.
/// `on_finished` sees each report as soon as it is ready, so a caller can
/// persist partial results when a later experiment fails.
pub fn run_experiments<F>(resolved: &ResolvedConfig, threads: usize, mut on_finished: F) -> Result<Vec<StatReport>>
where
    F: FnMut(&Finished<'_>) -> Result<()>,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    let cfg = &resolved.ensemble;
    // one annealed ensemble serves every experiment that reads it
    let mut plan: Option<(usize, Vec<u64>, Vec<f64>)> = None;
    for spec in &resolved.experiments {
        if let Some((r, ns, ts)) = spec.annealed_needs(cfg)? {
            let p = plan.get_or_insert_with(|| (0, Vec::new(), Vec::new()));
            p.0 = p.0.max(r);
            p.1.extend(ns);
            p.2.extend(ts);
        }
    }
    let mut ensemble = AnnealedEnsemble::default();
    let mut reports = Vec::with_capacity(resolved.experiments.len());
    for (index, spec) in resolved.experiments.iter().enumerate() {
        let start = Instant::now();
        let report = pool.install(|| {
            if let (Some((r, ns, ts)), Some(_)) = (&plan, spec.annealed_needs(cfg)?) {
                let mut ns = ns.clone();
                ns.sort_unstable();
                ns.dedup();
                ensemble.ensure(cfg, *r, &ns, ts)?;
            }
            spec.run(cfg, &mut ensemble)
        })?;
        let finished = Finished {
            index,
            spec,
            report,
            elapsed: start.elapsed(),
        };
        on_finished(&finished)?;
        reports.push(finished.report);
    }
    Ok(reports)
}
