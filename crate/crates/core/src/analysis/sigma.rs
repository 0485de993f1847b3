//! Limit variance of the rescaled RWRS and the Cauchy scale oracle.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::walk::{covariance_of, det2, SymmetricPmf, WalkModel};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaTarget {
    pub sigma_sq: f64,
}

/// σ² = 1/(π √det Σ) for lattice walks, 2/(π a) in the Cauchy case.
pub fn sigma_target(model: &WalkModel) -> Result<SigmaTarget> {
    model.validate_shape()?;
    let sigma_sq = match model {
        WalkModel::Lattice2D(_) => 1.0 / (PI * det2(&covariance_of(model)?).sqrt()),
        WalkModel::HeavyTail1D(w) => {
            let a = w.cauchy_scale.ok_or_else(|| {
                Error::Precondition("heavy-tailed walk has no Cauchy scale; run the oracle first".into())
            })?;
            2.0 / (PI * a)
        }
    };
    Ok(SigmaTarget { sigma_sq })
}

/// Output of [`cauchy_scale_oracle`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyScale {
    pub scale: f64,
    /// Largest relative change of the extrapolated value over the last three t.
    pub relative_change: f64,
    /// (t, (1 − φ(t))/t, Richardson value) for each t = 2^{−j}.
    pub ladder: Vec<(f64, f64, f64)>,
}

pub const ORACLE_STABILITY: f64 = 1e-4;
const LADDER: u32 = 10;
const TERMS_PER_UNIT: f64 = 4096.0;

/// (1 − φ(t))/t with the series truncated at ⌈TERMS_PER_UNIT/t⌉ and the
/// remainder replaced by its mean 2 P(X > K).
fn one_minus_phi_over_t(pmf: &dyn SymmetricPmf, t: f64) -> f64 {
    let k_max = (TERMS_PER_UNIT / t).ceil() as u64;
    let mut acc = CompensatedSum::new();
    for k in 1..=k_max {
        let p = pmf.mass(k);
        if p != 0.0 {
            // 1 − cos x = 2 sin²(x/2) avoids cancellation for small x
            let s = (0.5 * k as f64 * t).sin();
            acc.add(4.0 * p * s * s);
        }
    }
    acc.add(2.0 * pmf.upper_tail(k_max));
    acc.value() / t
}

/// Cauchy scale a = lim_{t→0} (1 − φ(t))/t, by Richardson extrapolation over
/// t = 2^{−j}. Errors when the limit does not stabilize to
/// [`ORACLE_STABILITY`] or vanishes (finite variance).
pub fn cauchy_scale_oracle(pmf: &dyn SymmetricPmf) -> Result<CauchyScale> {
    let mut ladder: Vec<(f64, f64, f64)> = Vec::new();
    let mut prev_g = None;
    for j in 1..=LADDER {
        let t = (-(j as f64)).exp2();
        let g = one_minus_phi_over_t(pmf, t);
        let r = prev_g.map_or(g, |pg| 2.0 * g - pg);
        ladder.push((t, g, r));
        prev_g = Some(g);
    }
    let tail: Vec<f64> = ladder[ladder.len() - 3..].iter().map(|e| e.2).collect();
    let scale = tail[2];
    let peak = ladder.iter().map(|e| e.1).fold(0.0f64, f64::max);
    if !(scale.abs() > 1e-6 * peak.max(f64::MIN_POSITIVE)) {
        return Err(Error::Domain(format!(
            "(1 − φ(t))/t extrapolates to {scale:.3e}: finite-variance law, not in the Cauchy domain"
        )));
    }
    let relative_change = tail
        .windows(2)
        .map(|w| ((w[1] - w[0]) / scale).abs())
        .fold(0.0, f64::max);
    if relative_change > ORACLE_STABILITY {
        return Err(Error::Domain(format!(
            "Cauchy scale did not stabilize (relative change {relative_change:.2e})"
        )));
    }
    Ok(CauchyScale {
        scale,
        relative_change,
        ladder,
    })
}

/// Plain truncated series Σ_{k≤K} 2 p_k (1 − cos kt)/t.
pub fn direct_series_scale(pmf: &dyn SymmetricPmf, t: f64, terms: u64) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 1..=terms {
        let s = (0.5 * k as f64 * t).sin();
        acc.add(4.0 * pmf.mass(k) * s * s);
    }
    acc.value() / t
}
