use crate::run::{report_stem, MANIFEST};
use anyhow::{bail, Context, Result};
use rwrs_core::analysis::StatReport;
use std::fs;
use std::path::Path;

pub const PLOTS_DIR: &str = "plots";

fn expected_files(report_dir: &Path) -> String {
    format!(
        "expected in {}: {MANIFEST} and one <index>-<kind>.json report per experiment (e.g. 00-annealed_variance.json)",
        report_dir.display()
    )
}

/// Writes `plots/<index>-<kind>.csv` for every report listed in the manifest.
pub fn emit(report_dir: &Path) -> Result<()> {
    let manifest_path = report_dir.join(MANIFEST);
    if !manifest_path.is_file() {
        bail!("no {MANIFEST} found; {}", expected_files(report_dir));
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest_path)?)
        .with_context(|| format!("malformed {}", manifest_path.display()))?;
    let entries = manifest["experiments"].as_array().cloned().unwrap_or_default();
    if entries.is_empty() {
        bail!("{MANIFEST} lists no finished experiments; {}", expected_files(report_dir));
    }
    let out = report_dir.join(PLOTS_DIR);
    fs::create_dir_all(&out)?;
    for entry in entries {
        let (Some(index), Some(kind)) = (entry["index"].as_u64(), entry["kind"].as_str()) else {
            bail!("malformed experiment entry in {MANIFEST}: {entry}");
        };
        let stem = report_stem(index as usize, kind);
        let path = report_dir.join(format!("{stem}.json"));
        let text = fs::read_to_string(&path)
            .with_context(|| format!("missing report {}; {}", path.display(), expected_files(report_dir)))?;
        let report: StatReport =
            serde_json::from_str(&text).with_context(|| format!("malformed report {}", path.display()))?;
        let target = out.join(format!("{stem}.csv"));
        write_plot_csv(&target, &report)?;
        println!("{}", target.display());
    }
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Columns n, log_n, quantity, estimate, stderr, target; reports with
/// per-scenery rows get a scenery_seed column after n (long format).
/// Rows with n = 0 summarize the whole grid and leave log_n empty.
fn write_plot_csv(path: &Path, report: &StatReport) -> Result<()> {
    let keyed = report.rows.iter().any(|r| r.scenery_seed.is_some());
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n"];
    if keyed {
        header.push("scenery_seed");
    }
    header.extend(["log_n", "quantity", "estimate", "stderr", "target"]);
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec = vec![r.n.to_string()];
        if keyed {
            rec.push(opt(r.scenery_seed));
        }
        rec.push(if r.n > 0 { (r.n as f64).ln().to_string() } else { String::new() });
        rec.extend([r.quantity.clone(), r.estimate.to_string(), opt(r.stderr), opt(r.target)]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rwrs_core::analysis::Row;

    #[test]
    fn concentration_rows_are_keyed_by_scenery() {
        let mut report = StatReport::new("quenched_concentration", 1, "simple".into(), "gaussian".into(), serde_json::json!({}));
        report.rows.push(Row::new(1024, "quenched_mean", 0.5).with_stderr(0.01).with_scenery_seed(77));
        report.rows.push(Row::new(1024, "between_variance", 0.2));
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("c.csv");
        write_plot_csv(&path, &report).unwrap();
        let text = fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,scenery_seed,log_n,quantity,estimate,stderr,target");
        assert!(lines[1].starts_with("1024,77,"));
        assert!(lines[2].starts_with("1024,,"));
    }
}
