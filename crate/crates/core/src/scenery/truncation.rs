use super::field::{QuenchedField, Scenery};
use crate::error::{Error, Result};
use crate::lattice::Site;
use serde::{Deserialize, Serialize};

/// Truncation levels M_n = √(n / (ln n)^γ) with γ = 1 + χ/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationSchedule {
    chi: f64,
    gamma: f64,
}

impl TruncationSchedule {
    pub fn new(chi: f64) -> Result<Self> {
        if !(chi.is_finite() && chi > 0.0) {
            return Err(Error::Domain(format!("chi must be positive, got {chi}")));
        }
        Ok(TruncationSchedule {
            chi,
            gamma: 1.0 + chi / 2.0,
        })
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn threshold(&self, n: u64) -> Result<f64> {
        if n < 2 {
            return Err(Error::Domain(format!("truncation level needs n >= 2, got {n}")));
        }
        let n = n as f64;
        Ok((n / n.ln().powf(self.gamma)).sqrt())
    }
}

/// ξ_n(x) = ξ(x) 1{|ξ(x)| ≤ M_n}.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedView<S> {
    field: S,
    threshold: f64,
}

impl<S: Scenery> TruncatedView<S> {
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl<S: Scenery> Scenery for TruncatedView<S> {
    #[inline]
    fn value(&self, site: Site) -> f64 {
        truncate_value(self.field.value(site), self.threshold)
    }
}

/// ξ̂_n(x) = ξ_n(x) − E[ξ_n(0)].
#[derive(Clone, Copy, Debug)]
pub struct RecenteredView<S> {
    field: S,
    threshold: f64,
    mean: f64,
}

impl<S: Scenery> RecenteredView<S> {
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// m_n = E[ξ(0) 1{|ξ(0)| ≤ M_n}].
    pub fn truncated_mean(&self) -> f64 {
        self.mean
    }
}

impl<S: Scenery> Scenery for RecenteredView<S> {
    #[inline]
    fn value(&self, site: Site) -> f64 {
        truncate_value(self.field.value(site), self.threshold) - self.mean
    }
}

#[inline]
pub fn truncate_value(v: f64, threshold: f64) -> f64 {
    if v.abs() <= threshold {
        v
    } else {
        0.0
    }
}

pub fn truncate<'a>(
    field: &'a QuenchedField,
    n: u64,
    schedule: &TruncationSchedule,
) -> Result<TruncatedView<&'a QuenchedField>> {
    Ok(TruncatedView {
        field,
        threshold: schedule.threshold(n)?,
    })
}

pub fn recenter<'a>(
    field: &'a QuenchedField,
    n: u64,
    schedule: &TruncationSchedule,
) -> Result<RecenteredView<&'a QuenchedField>> {
    let threshold = schedule.threshold(n)?;
    Ok(RecenteredView {
        field,
        threshold,
        mean: field.law().truncated_mean(threshold),
    })
}

/// Truncate/recenter an arbitrary scenery whose law is `law`.
pub fn recenter_with<S: Scenery>(field: S, threshold: f64, mean: f64) -> RecenteredView<S> {
    RecenteredView { field, threshold, mean }
}
