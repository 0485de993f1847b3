use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::scenery::{truncate_value, QuenchedField, Scenery, TruncationSchedule};
use crate::walk::{local_times_upto, Trajectory};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Raw,
    Truncated,
    Recentered,
}

/// Z_0 = 0, Z_1, …, Z_m together with the normalization parameter n.
#[derive(Clone, Debug, PartialEq)]
pub struct RwrsPath {
    values: Vec<f64>,
    horizon_n: u64,
    variant: Variant,
}

impl RwrsPath {
    pub fn from_values(values: Vec<f64>, horizon_n: u64, variant: Variant) -> Result<Self> {
        match values.first() {
            Some(&z0) if z0 == 0.0 => Ok(RwrsPath { values, horizon_n, variant }),
            _ => Err(Error::Domain("RWRS path must start with Z_0 = 0".into())),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Z_k.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Largest available index m.
    pub fn len_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon_n(&self) -> u64 {
        self.horizon_n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
}

fn running_sum<S: Scenery, F: Fn(f64) -> f64>(traj: &Trajectory, field: &S, map: F) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    let mut values = Vec::with_capacity(traj.steps() + 1);
    values.push(0.0);
    for &site in &traj.positions()[1..] {
        acc.add(map(field.value(site)));
        values.push(acc.value());
    }
    values
}

/// Z_k = Σ_{i=1}^k ξ(S_i) for every k ≤ n.
pub fn accumulate<S: Scenery>(traj: &Trajectory, field: &S) -> RwrsPath {
    RwrsPath {
        values: running_sum(traj, field, |v| v),
        horizon_n: traj.steps() as u64,
        variant: Variant::Raw,
    }
}

/// Z_k computed the other way round, as Σ_x ξ(x) N_k(x).
pub fn site_sum<S: Scenery>(traj: &Trajectory, field: &S, k: usize) -> f64 {
    let lt = local_times_upto(traj, k);
    let mut terms: Vec<(crate::Site, u32)> = lt.iter().collect();
    terms.sort_unstable_by_key(|&(s, _)| s);
    let mut acc = CompensatedSum::new();
    for (site, count) in terms {
        acc.add(field.value(site) * f64::from(count));
    }
    acc.value()
}

/// (Z^{(n)}, Ẑ^{(n)}) along the whole trajectory for a scenery of known
/// truncation level and truncated mean.
pub fn truncated_accumulate_with<S: Scenery>(
    traj: &Trajectory,
    field: &S,
    n: u64,
    threshold: f64,
    truncated_mean: f64,
) -> (RwrsPath, RwrsPath) {
    let truncated = running_sum(traj, field, |v| truncate_value(v, threshold));
    let recentered = running_sum(traj, field, |v| truncate_value(v, threshold) - truncated_mean);
    (
        RwrsPath {
            values: truncated,
            horizon_n: n,
            variant: Variant::Truncated,
        },
        RwrsPath {
            values: recentered,
            horizon_n: n,
            variant: Variant::Recentered,
        },
    )
}

/// Z^{(n)}_k = Σ ξ_n(S_i) and Ẑ^{(n)}_k = Σ ξ̂_n(S_i) with M_n from `schedule`.
pub fn truncated_accumulate(
    traj: &Trajectory,
    field: &QuenchedField,
    n: u64,
    schedule: &TruncationSchedule,
) -> Result<(RwrsPath, RwrsPath)> {
    let threshold = schedule.threshold(n)?;
    let m = field.law().truncated_mean(threshold);
    Ok(truncated_accumulate_with(traj, field, n, threshold, m))
}
