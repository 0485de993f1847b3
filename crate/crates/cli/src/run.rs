use anyhow::{bail, Context, Result};
use rwrs_core::analysis::StatReport;
use rwrs_core::config::{resolve_threads, ExperimentConfig, ResolvedConfig, THREADS_ENV};
use rwrs_core::runner::run_experiments;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const MANIFEST: &str = "manifest.json";
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const CHECKS: &str = "checks.csv";
pub const FAILED: &str = "FAILED";

fn load(path: &Path) -> Result<ResolvedConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = ExperimentConfig::from_toml_str(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(config.resolve().with_context(|| format!("in {}", path.display()))?)
}

pub fn validate(path: &Path) -> Result<()> {
    let resolved = load(path)?;
    let threads = resolve_threads(resolved.config.threads, std::env::var(THREADS_ENV).ok().as_deref())?;
    println!("config ok: {}", path.display());
    println!("walk: {}", resolved.ensemble.walk_label());
    println!("scenery: {}", resolved.ensemble.scenery_label());
    println!("threads: {threads}");
    for (i, e) in resolved.experiments.iter().enumerate() {
        println!("experiment {i}: {}", e.kind());
    }
    Ok(())
}

/// Stem of the files written for experiment `index`.
pub fn report_stem(index: usize, kind: &str) -> String {
    format!("{index:02}-{kind}")
}

fn fresh_dir(base: &Path, name: &str) -> PathBuf {
    let mut dir = base.join(name);
    let mut k = 1;
    while dir.exists() {
        dir = base.join(format!("{name}-{k}"));
        k += 1;
    }
    dir
}

pub fn write_rows_csv(path: &Path, report: &StatReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "n", "quantity", "estimate", "stderr", "target", "scenery_seed"])?;
    for r in &report.rows {
        w.write_record([
            report.experiment.clone(),
            r.n.to_string(),
            r.quantity.clone(),
            r.estimate.to_string(),
            r.stderr.map(|v| v.to_string()).unwrap_or_default(),
            r.target.map(|v| v.to_string()).unwrap_or_default(),
            r.scenery_seed.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_checks_csv(path: &Path, reports: &[StatReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "check", "rule", "observed", "tolerance", "passed"])?;
    for report in reports {
        for c in &report.checks {
            w.write_record([
                report.experiment.clone(),
                c.name.clone(),
                c.rule.clone(),
                c.observed.to_string(),
                c.tolerance.to_string(),
                c.passed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Returns whether every verdict passed.
pub fn run(path: &Path, threads: Option<usize>, run_dir: Option<&Path>) -> Result<bool> {
    let resolved = load(path)?;
    let threads = match threads {
        Some(0) => bail!("--threads must be positive"),
        Some(n) => n,
        None => resolve_threads(resolved.config.threads, std::env::var(THREADS_ENV).ok().as_deref())?,
    };
    let config_text = resolved.config.to_toml_string();
    let hash = format!("{:x}", Sha256::digest(config_text.as_bytes()));
    let started = chrono::Utc::now();
    let dir = match run_dir {
        Some(d) => d.to_path_buf(),
        None => fresh_dir(
            Path::new(&resolved.config.output_dir),
            &format!("{}-{}", &hash[..16], started.format("%Y%m%dT%H%M%SZ")),
        ),
    };
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    fs::write(dir.join(RESOLVED_CONFIG), &config_text)?;
    eprintln!("run directory: {}", dir.display());

    let mut entries = Vec::new();
    let outcome = run_experiments(&resolved, threads, |f| {
        let stem = report_stem(f.index, f.spec.kind());
        let write = || -> Result<()> {
            fs::write(dir.join(format!("{stem}.json")), f.report.to_json())?;
            write_rows_csv(&dir.join(format!("{stem}.csv")), &f.report)
        };
        write().map_err(|e| rwrs_core::Error::Unsupported(format!("cannot write {stem}: {e:#}")))?;
        let secs = f.elapsed.as_secs_f64();
        println!("[{}] {stem} ({secs:.1}s)", if f.report.passed { "PASS" } else { "FAIL" });
        for c in f.report.checks.iter().filter(|c| !c.passed) {
            println!("    failed {}: observed {} ({})", c.name, c.observed, c.rule);
        }
        entries.push(json!({
            "index": f.index,
            "kind": f.spec.kind(),
            "report": format!("{stem}.json"),
            "seed": f.report.seed,
            "wall_seconds": secs,
            "passed": f.report.passed,
        }));
        Ok(())
    });

    let (reports, error) = match outcome {
        Ok(r) => (r, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    let passed = error.is_none() && reports.iter().all(|r| r.passed);
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": hash,
        "config_path": path.display().to_string(),
        "started": started.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "threads": threads,
        "complete": error.is_none(),
        "passed": passed,
        "experiments": entries,
        "resolved_config": config_text,
    });
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
    if let Some(e) = error {
        fs::write(dir.join(FAILED), format!("{e}\n"))?;
        return Err(e).context("run aborted; partial outputs kept");
    }
    write_checks_csv(&dir.join(CHECKS), &reports)?;
    Ok(passed)
}
