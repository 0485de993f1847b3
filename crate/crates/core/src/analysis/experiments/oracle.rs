//! Cauchy scale oracle checks for the heavy-tailed walk.

use super::{header, param};
use crate::analysis::report::{Check, Row, StatReport};
use crate::analysis::setting::EnsembleConfig;
use crate::analysis::sigma::{cauchy_scale_oracle, direct_series_scale, ORACLE_STABILITY};
use crate::error::{Error, Result};
use crate::walk::WalkModel;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleParams {
    /// t and number of terms of the plain series used as a cross-check.
    pub cross_check_t: f64,
    pub cross_check_terms: u64,
    pub cross_check_tolerance: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            cross_check_t: 1e-3,
            cross_check_terms: 1_000_000,
            cross_check_tolerance: 0.02,
        }
    }
}

impl OracleParams {
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        param(
            matches!(cfg.walk, WalkModel::HeavyTail1D(_)),
            "kind",
            "the Cauchy oracle needs walk.kind = \"heavy_tail\"",
        )?;
        param(self.cross_check_t > 0.0 && self.cross_check_t < 1.0, "cross_check_t", "must lie in (0, 1)")?;
        param(
            (1..=100_000_000).contains(&self.cross_check_terms),
            "cross_check_terms",
            "must lie in [1, 1e8]",
        )?;
        param(self.cross_check_tolerance > 0.0, "cross_check_tolerance", "must be positive")
    }
}

pub fn cauchy_oracle(cfg: &EnsembleConfig, p: &OracleParams) -> Result<StatReport> {
    let WalkModel::HeavyTail1D(w) = &cfg.walk else {
        return Err(Error::Precondition("Cauchy oracle on a lattice walk".into()));
    };
    let mut report = header(cfg, "cauchy_oracle", 0, p);
    let oracle = match cauchy_scale_oracle(w) {
        Ok(o) => o,
        Err(e) => {
            report.notes.push(e.to_string());
            report.check(Check::new(
                "oracle_stable",
                "relative change over the last three t <= tolerance",
                f64::NAN,
                ORACLE_STABILITY,
                false,
            ));
            return Ok(report);
        }
    };
    for &(t, g, r) in &oracle.ladder {
        let j = (-t.log2()).round() as u64;
        report.rows.push(Row::new(j, "one_minus_phi_over_t", g));
        report.rows.push(Row::new(j, "richardson", r));
    }
    report.rows.push(Row::new(0, "cauchy_scale", oracle.scale));
    report.check(Check::new(
        "oracle_stable",
        "relative change over the last three t <= tolerance",
        oracle.relative_change,
        ORACLE_STABILITY,
        oracle.relative_change <= ORACLE_STABILITY,
    ));
    let direct = direct_series_scale(w, p.cross_check_t, p.cross_check_terms);
    let rel = (direct / oracle.scale - 1.0).abs();
    report.rows.push(Row::new(0, "direct_series", direct));
    report.check(Check::new(
        "series_cross_check",
        format!(
            "|series(t = {}, {} terms)/a - 1| <= tolerance",
            p.cross_check_t, p.cross_check_terms
        ),
        rel,
        p.cross_check_tolerance,
        rel <= p.cross_check_tolerance,
    ));
    if let Some(a) = w.cauchy_scale {
        report.notes.push(format!("walk carries cauchy_scale = {a}"));
    }
    report.notes.push("rows are indexed by j with t = 2^-j; n = 0 marks whole-ladder values".into());
    Ok(report)
}
