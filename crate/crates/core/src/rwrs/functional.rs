//! A small catalog of bounded Lipschitz functionals on C([0, T]).

use super::interp::{InterpolatedProcess, ProbeSummary};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalId {
    /// cos(w_T)
    EndpointCosine,
    /// min(sup_{t≤T} |w_t|, B₀)
    CappedSup,
    /// clip((1/T) ∫_0^T w_t dt, ±B₀)
    ClippedMean,
}

impl FunctionalId {
    pub const ALL: [FunctionalId; 3] = [
        FunctionalId::EndpointCosine,
        FunctionalId::CappedSup,
        FunctionalId::ClippedMean,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FunctionalId::EndpointCosine => "endpoint_cosine",
            FunctionalId::CappedSup => "capped_sup",
            FunctionalId::ClippedMean => "clipped_mean",
        }
    }
}

impl fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionalId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionalId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown functional `{s}`")))
    }
}

/// A catalog functional with its sup bound B and sup-norm Lipschitz constant L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    pub id: FunctionalId,
    pub bound: f64,
    pub lipschitz: f64,
}

impl FunctionalSpec {
    /// `cap` is B₀ for the capped/clipped members and ignored for the cosine.
    pub fn new(id: FunctionalId, cap: f64) -> Result<Self> {
        if id != FunctionalId::EndpointCosine && !(cap.is_finite() && cap > 0.0) {
            return Err(Error::Domain(format!("functional cap must be positive, got {cap}")));
        }
        let bound = match id {
            FunctionalId::EndpointCosine => 1.0,
            _ => cap,
        };
        Ok(FunctionalSpec {
            id,
            bound,
            lipschitz: 1.0,
        })
    }

    pub fn endpoint_cosine() -> Self {
        FunctionalSpec {
            id: FunctionalId::EndpointCosine,
            bound: 1.0,
            lipschitz: 1.0,
        }
    }

    pub fn parse(name: &str, cap: f64) -> Result<Self> {
        FunctionalSpec::new(name.parse()?, cap)
    }

    fn apply(&self, endpoint: f64, sup_abs: f64, mean: f64) -> f64 {
        match self.id {
            FunctionalId::EndpointCosine => endpoint.cos(),
            FunctionalId::CappedSup => sup_abs.min(self.bound),
            FunctionalId::ClippedMean => mean.clamp(-self.bound, self.bound),
        }
    }

    pub fn eval(&self, w: &InterpolatedProcess) -> f64 {
        let endpoint = w.eval(w.t_max()).expect("T lies in [0, T]");
        self.apply(endpoint, w.sup_abs(), w.integral() / w.t_max())
    }

    pub fn eval_summary(&self, s: &ProbeSummary) -> f64 {
        self.apply(s.endpoint, s.sup_abs, s.integral / s.t_max)
    }
}
