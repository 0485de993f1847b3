use super::field::ScenerySpec;
use super::law::SceneryLaw;
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_to_infinity};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Numerically verified (A2) moments of a scenery law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentAudit {
    pub mean: f64,
    pub variance: f64,
    pub chi: f64,
    /// E[|ξ|² (log⁺|ξ|)^χ]
    pub log_moment: f64,
}

const AUDIT_TOL: f64 = 1e-8;

fn log_weight(x: f64, chi: f64) -> f64 {
    let l = x.abs().ln();
    if l <= 0.0 {
        0.0
    } else {
        x * x * l.powf(chi)
    }
}

/// Verify E ξ = 0, E ξ² = 1 and report E[|ξ|²(log⁺|ξ|)^χ].
pub fn moment_audit(spec: &ScenerySpec) -> Result<MomentAudit> {
    spec.validate()?;
    let chi = spec.chi;
    let audit = match spec.law {
        SceneryLaw::Rademacher => MomentAudit {
            mean: 0.0,
            variance: 1.0,
            chi,
            log_moment: 0.0,
        },
        SceneryLaw::Gaussian => {
            let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
            let variance = 2.0 * integrate_to_infinity(|x| x * x * phi(x), 0.0);
            let log_moment = 2.0 * integrate_to_infinity(|x| log_weight(x, chi) * phi(x), 1.0);
            MomentAudit {
                mean: 0.0,
                variance,
                chi,
                log_moment,
            }
        }
        SceneryLaw::Pareto { .. } => {
            let shape = spec.law.pareto_shape().unwrap();
            let f = |x: f64| shape.density(x);
            // the density has a kink where Y = 0, i.e. x = −μ/σ
            let kink = -shape.mu / shape.sigma;
            let moment = |k: i32| {
                let g = |x: f64| x.powi(k) * f(x);
                integrate(g, kink - 1.0, kink)
                    + integrate(g, kink, kink + 1.0)
                    + integrate_to_infinity(g, kink + 1.0)
                    + integrate_to_infinity(|x| g(-x), 1.0 - kink)
            };
            let mass = moment(0);
            let mean = moment(1);
            let variance = moment(2) - mean * mean;
            if (mass - 1.0).abs() > 1e-7 {
                return Err(Error::InvalidScenery(format!("density integrates to {mass}")));
            }
            let lw = |x: f64| log_weight(x, chi) * f(x);
            let log_moment = integrate_to_infinity(lw, 1.0) + integrate_to_infinity(|x| lw(-x), 1.0);
            MomentAudit {
                mean,
                variance,
                chi,
                log_moment,
            }
        }
        SceneryLaw::Zero => {
            return Err(Error::MomentViolation {
                moment: "E[xi^2]",
                value: "0 (zero scenery is a diagnostic, not an (A2) law)".into(),
            })
        }
    };
    if audit.mean.abs() > AUDIT_TOL {
        return Err(Error::MomentViolation {
            moment: "E[xi]",
            value: audit.mean.to_string(),
        });
    }
    if (audit.variance - 1.0).abs() > AUDIT_TOL {
        return Err(Error::MomentViolation {
            moment: "E[xi^2]",
            value: audit.variance.to_string(),
        });
    }
    if !audit.log_moment.is_finite() {
        return Err(Error::MomentViolation {
            moment: "E[|xi|^2 (log+ |xi|)^chi]",
            value: audit.log_moment.to_string(),
        });
    }
    Ok(audit)
}
