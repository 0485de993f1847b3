//! Experiment drivers. Each takes the ensemble configuration and its own
//! parameters and returns a [`StatReport`].

mod annealed;
mod influence;
mod lemmas;
mod oracle;
mod quenched;
mod truncation;

pub use annealed::{
    annealed_variance, covariance_structure, marginal_normality, AnnealedVarianceParams, CovarianceParams,
    NormalityParams,
};
pub use influence::{influence_bound, InfluenceParams};
pub use lemmas::{lemma_suite, LemmaParams};
pub use oracle::{cauchy_oracle, OracleParams};
pub use quenched::{quenched_concentration, ConcentrationParams, VarianceDecomposition};
pub use truncation::{recentering_drift_experiment, truncation, DriftParams, TruncationParams};

use super::ensemble::AnnealedEnsemble;
use super::report::StatReport;
use super::setting::EnsembleConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    AnnealedVariance(AnnealedVarianceParams),
    MarginalNormality(NormalityParams),
    CovarianceStructure(CovarianceParams),
    QuenchedConcentration(ConcentrationParams),
    Truncation(TruncationParams),
    RecenteringDrift(DriftParams),
    LemmaSuite(LemmaParams),
    InfluenceBound(InfluenceParams),
    CauchyOracle(OracleParams),
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::AnnealedVariance(_) => "annealed_variance",
            ExperimentSpec::MarginalNormality(_) => "marginal_normality",
            ExperimentSpec::CovarianceStructure(_) => "covariance_structure",
            ExperimentSpec::QuenchedConcentration(_) => "quenched_concentration",
            ExperimentSpec::Truncation(_) => "truncation",
            ExperimentSpec::RecenteringDrift(_) => "recentering_drift",
            ExperimentSpec::LemmaSuite(_) => "lemma_suite",
            ExperimentSpec::InfluenceBound(_) => "influence_bound",
            ExperimentSpec::CauchyOracle(_) => "cauchy_oracle",
        }
    }

    /// Errors are [`Error::Config`] with the path relative to the experiment table.
    pub fn validate(&self, cfg: &EnsembleConfig) -> Result<()> {
        match self {
            ExperimentSpec::AnnealedVariance(p) => p.validate(cfg),
            ExperimentSpec::MarginalNormality(p) => p.validate(cfg),
            ExperimentSpec::CovarianceStructure(p) => p.validate(cfg),
            ExperimentSpec::QuenchedConcentration(p) => p.validate(cfg),
            ExperimentSpec::Truncation(p) => p.validate(cfg),
            ExperimentSpec::RecenteringDrift(p) => p.validate(cfg),
            ExperimentSpec::LemmaSuite(p) => p.validate(cfg),
            ExperimentSpec::InfluenceBound(p) => p.validate(cfg),
            ExperimentSpec::CauchyOracle(p) => p.validate(cfg),
        }
    }

    /// Replicas, grid points and times this experiment reads from the shared
    /// annealed ensemble, if any.
    pub fn annealed_needs(&self, cfg: &EnsembleConfig) -> Result<Option<(usize, Vec<u64>, Vec<f64>)>> {
        Ok(match self {
            ExperimentSpec::AnnealedVariance(p) => Some(p.needs(cfg)?),
            ExperimentSpec::MarginalNormality(p) => Some(p.needs(cfg)?),
            ExperimentSpec::CovarianceStructure(p) => Some(p.needs(cfg)?),
            _ => None,
        })
    }

    pub fn run(&self, cfg: &EnsembleConfig, ensemble: &mut AnnealedEnsemble) -> Result<StatReport> {
        match self {
            ExperimentSpec::AnnealedVariance(p) => annealed_variance(cfg, p, ensemble),
            ExperimentSpec::MarginalNormality(p) => marginal_normality(cfg, p, ensemble),
            ExperimentSpec::CovarianceStructure(p) => covariance_structure(cfg, p, ensemble),
            ExperimentSpec::QuenchedConcentration(p) => quenched_concentration(cfg, p),
            ExperimentSpec::Truncation(p) => truncation(cfg, p),
            ExperimentSpec::RecenteringDrift(p) => recentering_drift_experiment(cfg, p),
            ExperimentSpec::LemmaSuite(p) => lemma_suite(cfg, p),
            ExperimentSpec::InfluenceBound(p) => influence_bound(cfg, p),
            ExperimentSpec::CauchyOracle(p) => cauchy_oracle(cfg, p),
        }
    }
}

fn header<P: Serialize>(cfg: &EnsembleConfig, kind: &str, seed: u64, params: &P) -> StatReport {
    let mut parameters = serde_json::to_value(params).expect("parameters serialize");
    if let serde_json::Value::Object(map) = &mut parameters {
        map.insert("grid_b".into(), cfg.grid.b.into());
        map.insert("t_max".into(), cfg.t_max.into());
    }
    StatReport::new(kind, seed, cfg.walk_label(), cfg.scenery_label(), parameters)
}

fn param(ok: bool, field: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, message))
    }
}
