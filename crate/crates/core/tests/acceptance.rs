//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.
//!
//! Runs the configurations shipped in `configs/` at full size; expect
//! several minutes on a single core.

use rwrs_core::analysis::StatReport;
use rwrs_core::config::{ExperimentConfig, ResolvedConfig};
use rwrs_core::runner::run_experiments;

fn load(text: &str) -> ResolvedConfig {
    ExperimentConfig::from_toml_str(text).unwrap().resolve().unwrap()
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(resolved: &ResolvedConfig, threads: usize) -> Vec<StatReport> {
    run_experiments(resolved, threads, |_| Ok(())).unwrap()
}

fn report<'a>(reports: &'a [StatReport], kind: &str) -> &'a StatReport {
    reports.iter().find(|r| r.experiment == kind).unwrap_or_else(|| panic!("no {kind} report"))
}

struct Verdict {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

/// Verdict from named checks; a name ending in `(` matches every check with that prefix.
fn from_checks(id: usize, title: &'static str, r: &StatReport, names: &[&str]) -> Verdict {
    let mut passed = true;
    let mut detail = Vec::new();
    for name in names {
        let found: Vec<_> = r
            .checks
            .iter()
            .filter(|c| if name.ends_with('(') { c.name.starts_with(name) } else { c.name == *name })
            .collect();
        if found.is_empty() {
            passed = false;
            detail.push(format!("{name}: missing"));
        }
        for c in found {
            passed &= c.passed;
            detail.push(format!("{} obs={:.6} tol={}", c.name, c.observed, c.tolerance));
        }
    }
    Verdict {
        id,
        title,
        passed,
        detail: detail.join("; "),
    }
}

#[test]
fn acceptance() {
    let workers = threads();
    let mut verdicts = Vec::new();

    let gaussian = run(&load(include_str!("../../../configs/srw_gaussian.toml")), workers);
    verdicts.push(from_checks(
        1,
        "variance constant 2/pi (SRW, Gaussian)",
        report(&gaussian, "annealed_variance"),
        &["variance_within_tolerance", "error_shrinks"],
    ));
    verdicts.push(from_checks(
        2,
        "marginal normality (AD, KS, self-tests)",
        report(&gaussian, "marginal_normality"),
        &[
            "anderson_darling_not_rejected",
            "kolmogorov_smirnov_not_rejected",
            "self_test_normal_accepted",
            "self_test_uniform_rejected",
        ],
    ));
    verdicts.push(from_checks(
        3,
        "Brownian covariance ratios",
        report(&gaussian, "covariance_structure"),
        &["ratio_min(", "ratio_max("],
    ));
    let quenched = report(&gaussian, "quenched_concentration");
    let mut c4 = from_checks(
        4,
        "quenched concentration",
        quenched,
        &["spread_decreases", "decomposition_identity("],
    );
    let reported = ["ss_within", "ss_between", "ss_total"]
        .iter()
        .all(|q| quenched.rows_for(q).count() == 3);
    c4.passed &= reported;
    verdicts.push(c4);

    let rademacher = run(&load(include_str!("../../../configs/srw_rademacher.toml")), workers);
    let pareto = run(&load(include_str!("../../../configs/srw_pareto.toml")), workers);
    let bounded = from_checks(
        5,
        "",
        report(&rademacher, "truncation"),
        &["exact_when_untouched", "bounded_scenery_never_truncated"],
    );
    let heavy = from_checks(
        5,
        "",
        report(&pareto, "truncation"),
        &["exact_when_untouched", "touch_frequency_decreasing"],
    );
    verdicts.push(Verdict {
        id: 5,
        title: "truncation exactness and touch frequency",
        passed: bounded.passed && heavy.passed,
        detail: format!("rademacher: {}; pareto: {}", bounded.detail, heavy.detail),
    });
    let drift = report(&pareto, "recentering_drift");
    let mut c6 = from_checks(6, "recentering drift envelope", drift, &["envelope_bounded"]);
    if let Some(row) = drift.rows_for("envelope_constant").next() {
        c6.detail.push_str(&format!("; constant={:.6}", row.estimate));
    }
    verdicts.push(c6);

    verdicts.push(from_checks(
        7,
        "lemma suite",
        report(&gaussian, "lemma_suite"),
        &[
            "origin_occupation_min",
            "origin_occupation_max",
            "intersection_bounded",
            "intersection_not_exploding",
            "exit_probability_log_scaling",
        ],
    ));
    verdicts.push(from_checks(
        8,
        "single-site influence bound",
        report(&pareto, "influence_bound"),
        &["influence_bound_holds"],
    ));

    let ht = run(&load(include_str!("../../../configs/heavy_tail.toml")), workers);
    let oracle = from_checks(9, "", report(&ht, "cauchy_oracle"), &["oracle_stable", "series_cross_check"]);
    let variance = from_checks(9, "", report(&ht, "annealed_variance"), &["variance_within_tolerance"]);
    verdicts.push(Verdict {
        id: 9,
        title: "heavy-tailed walk: Cauchy oracle and variance 2/(pi a)",
        passed: oracle.passed && variance.passed,
        detail: format!("{}; {}", oracle.detail, variance.detail),
    });

    let small = load(include_str!("../../../configs/quick.toml"));
    let max = threads();
    let outputs: Vec<Vec<String>> = [1, 4, max]
        .iter()
        .map(|&t| run(&small, t).iter().map(StatReport::to_json).collect())
        .collect();
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    verdicts.push(Verdict {
        id: 10,
        title: "byte-identical reports across thread counts",
        passed: identical,
        detail: format!("threads 1, 4, {max}; {} reports", outputs[0].len()),
    });

    for v in &verdicts {
        println!(
            "criterion {:>2} {} {}: {}",
            v.id,
            if v.passed { "PASS" } else { "FAIL" },
            v.title,
            v.detail
        );
    }
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.passed).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
