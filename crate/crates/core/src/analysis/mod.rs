//! Estimators, goodness-of-fit tests and the experiment drivers that compare
//! simulation output against the limit theory.

pub mod ensemble;
pub mod experiments;
pub mod normality;
pub mod report;
pub mod setting;
pub mod sigma;
pub mod stats;

pub use ensemble::AnnealedEnsemble;
pub use experiments::ExperimentSpec;
pub use normality::{normality_tests, NormalityResult};
pub use report::{Check, Row, StatReport, TestRecord};
pub use setting::{EnsembleConfig, Grid};
pub use sigma::{cauchy_scale_oracle, sigma_target, CauchyScale, SigmaTarget};
pub use stats::Estimate;
