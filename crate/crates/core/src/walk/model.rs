use super::aperiodic::{generates_line, generates_plane};
use crate::error::{Error, Result};
use crate::lattice::Site;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One admissible increment of a finite-support lattice walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub dx: i64,
    pub dy: i64,
    pub prob: f64,
}

impl Step {
    pub const fn new(dx: i64, dy: i64, prob: f64) -> Self {
        Step { dx, dy, prob }
    }

    pub fn site(&self) -> Site {
        Site::new(self.dx, self.dy)
    }
}

/// A centered walk on ℤ² with finitely supported increments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeWalk {
    pub label: String,
    pub steps: Vec<Step>,
}

/// Symmetric walk on ℤ with `P(step = ±span·j) = 3/(π² j²)` for `j ≥ 1`.
///
/// `cauchy_scale` is left empty until the characteristic-function oracle
/// has been run; it is never hard-coded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeavyTailWalk {
    pub span: i64,
    pub cauchy_scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkKind {
    Lattice2D,
    HeavyTail1D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WalkModel {
    Lattice2D(LatticeWalk),
    HeavyTail1D(HeavyTailWalk),
}

pub type Matrix2 = [[f64; 2]; 2];

const PROB_TOL: f64 = 1e-12;

impl WalkModel {
    /// Nearest-neighbour walk, each unit step with probability ¼.
    pub fn simple() -> Self {
        WalkModel::Lattice2D(LatticeWalk {
            label: "simple".into(),
            steps: vec![
                Step::new(1, 0, 0.25),
                Step::new(-1, 0, 0.25),
                Step::new(0, 1, 0.25),
                Step::new(0, -1, 0.25),
            ],
        })
    }

    /// Steps (±1, ±1) with probability ¼ each. Periodic: it never leaves
    /// the sublattice x + y ≡ 0 (mod 2), so `validate` rejects it.
    pub fn diagonal() -> Self {
        WalkModel::Lattice2D(LatticeWalk {
            label: "diagonal".into(),
            steps: vec![
                Step::new(1, 1, 0.25),
                Step::new(1, -1, 0.25),
                Step::new(-1, 1, 0.25),
                Step::new(-1, -1, 0.25),
            ],
        })
    }

    pub fn custom(label: impl Into<String>, steps: Vec<Step>) -> Result<Self> {
        let model = WalkModel::Lattice2D(LatticeWalk {
            label: label.into(),
            steps,
        });
        model.validate()?;
        Ok(model)
    }

    pub fn heavy_tail() -> Self {
        WalkModel::HeavyTail1D(HeavyTailWalk {
            span: 1,
            cauchy_scale: None,
        })
    }

    pub fn kind(&self) -> WalkKind {
        match self {
            WalkModel::Lattice2D(_) => WalkKind::Lattice2D,
            WalkModel::HeavyTail1D(_) => WalkKind::HeavyTail1D,
        }
    }

    pub fn label(&self) -> String {
        match self {
            WalkModel::Lattice2D(w) => w.label.clone(),
            WalkModel::HeavyTail1D(w) if w.span == 1 => "heavy_tail".into(),
            WalkModel::HeavyTail1D(w) => format!("heavy_tail_span{}", w.span),
        }
    }

    pub fn with_cauchy_scale(mut self, scale: f64) -> Self {
        if let WalkModel::HeavyTail1D(w) = &mut self {
            w.cauchy_scale = Some(scale);
        }
        self
    }

    /// Checks centering, non-singular covariance, normalization and
    /// aperiodicity.
    /// Everything [`WalkModel::validate`] checks except aperiodicity.
    pub fn validate_shape(&self) -> Result<()> {
        match self {
            WalkModel::Lattice2D(w) => {
                if w.steps.is_empty() {
                    return Err(Error::InvalidWalk("empty step distribution".into()));
                }
                if let Some(s) = w.steps.iter().find(|s| !(s.prob.is_finite() && s.prob > 0.0)) {
                    return Err(Error::InvalidWalk(format!(
                        "step ({}, {}) has non-positive probability {}",
                        s.dx, s.dy, s.prob
                    )));
                }
                let total: f64 = w.steps.iter().map(|s| s.prob).sum();
                if (total - 1.0).abs() > PROB_TOL {
                    return Err(Error::InvalidWalk(format!("probabilities sum to {total}")));
                }
                let mx: f64 = w.steps.iter().map(|s| s.prob * s.dx as f64).sum();
                let my: f64 = w.steps.iter().map(|s| s.prob * s.dy as f64).sum();
                if mx.abs() > PROB_TOL || my.abs() > PROB_TOL {
                    return Err(Error::InvalidWalk(format!("step mean ({mx}, {my}) is not zero")));
                }
                let sigma = lattice_covariance(w);
                let det = det2(&sigma);
                let scale = sigma[0][0].max(sigma[1][1]);
                if !(det > 1e-12 * scale * scale) {
                    return Err(Error::InvalidWalk(format!("covariance is singular (det = {det})")));
                }
                Ok(())
            }
            WalkModel::HeavyTail1D(w) => {
                if w.span < 1 {
                    return Err(Error::InvalidWalk(format!("span must be >= 1, got {}", w.span)));
                }
                if let Some(a) = w.cauchy_scale {
                    if !(a.is_finite() && a > 0.0) {
                        return Err(Error::InvalidWalk(format!("cauchy scale must be positive, got {a}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        match self {
            WalkModel::Lattice2D(w) => {
                let support: Vec<(i64, i64)> = w.steps.iter().map(|s| (s.dx, s.dy)).collect();
                if !generates_plane(&support) {
                    return Err(Error::InvalidWalk(format!(
                        "walk `{}` is periodic: its steps generate a proper subgroup of Z^2",
                        w.label
                    )));
                }
            }
            WalkModel::HeavyTail1D(w) => {
                if !generates_line(&[w.span, -w.span]) {
                    return Err(Error::InvalidWalk(format!(
                        "heavy-tailed walk is periodic: steps confined to {}Z",
                        w.span
                    )));
                }
            }
        }
        Ok(())
    }
}

fn lattice_covariance(w: &LatticeWalk) -> Matrix2 {
    let mut m = [[0.0; 2]; 2];
    for s in &w.steps {
        let (x, y) = (s.dx as f64, s.dy as f64);
        m[0][0] += s.prob * x * x;
        m[0][1] += s.prob * x * y;
        m[1][1] += s.prob * y * y;
    }
    m[1][0] = m[0][1];
    m
}

pub fn det2(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Exact step covariance Σ = Σ_s p(s) s sᵀ of a centered lattice walk.
pub fn covariance_of(model: &WalkModel) -> Result<Matrix2> {
    match model {
        WalkModel::Lattice2D(w) => Ok(lattice_covariance(w)),
        WalkModel::HeavyTail1D(_) => Err(Error::Unsupported(
            "heavy-tailed walk has infinite step variance".into(),
        )),
    }
}

/// One-sided law of a symmetric integer step: `mass(k) = P(step = k) = P(step = -k)`.
pub trait SymmetricPmf {
    fn mass(&self, k: u64) -> f64;
    /// `P(step > k)` for `k ≥ 0`.
    fn upper_tail(&self, k: u64) -> f64;
}

/// Trigamma ψ₁(x) for x > 0 via recurrence and the asymptotic series.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x
        + x2 / 2.0
        + (1.0 / x) * x2 * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)))
}

impl SymmetricPmf for HeavyTailWalk {
    fn mass(&self, k: u64) -> f64 {
        let span = self.span as u64;
        if k == 0 || k % span != 0 {
            return 0.0;
        }
        let j = (k / span) as f64;
        3.0 / (PI * PI * j * j)
    }

    fn upper_tail(&self, k: u64) -> f64 {
        // Σ_{j > k/span} 3/(π² j²) = (3/π²) ψ₁(⌊k/span⌋ + 1)
        let j0 = (k / self.span as u64) as f64 + 1.0;
        3.0 / (PI * PI) * trigamma(j0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_walk_covariance_is_half_identity() {
        let s = covariance_of(&WalkModel::simple()).unwrap();
        assert_eq!(s, [[0.5, 0.0], [0.0, 0.5]]);
        WalkModel::simple().validate().unwrap();
    }

    #[test]
    fn diagonal_walk_covariance_is_identity_but_periodic() {
        let s = covariance_of(&WalkModel::diagonal()).unwrap();
        assert_eq!(s, [[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(WalkModel::diagonal().validate(), Err(Error::InvalidWalk(_))));
    }

    #[test]
    fn heavy_tail_covariance_unsupported() {
        assert!(matches!(covariance_of(&WalkModel::heavy_tail()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_bad_custom_walks() {
        // drift
        assert!(WalkModel::custom("d", vec![Step::new(1, 0, 0.5), Step::new(0, 1, 0.5)]).is_err());
        // singular: steps on a line
        assert!(WalkModel::custom("l", vec![Step::new(1, 0, 0.5), Step::new(-1, 0, 0.5)]).is_err());
        // mass does not sum to one
        assert!(WalkModel::custom(
            "m",
            vec![
                Step::new(1, 0, 0.25),
                Step::new(-1, 0, 0.25),
                Step::new(0, 1, 0.25),
                Step::new(0, -1, 0.2)
            ]
        )
        .is_err());
        // confined to 2Z × Z
        assert!(WalkModel::custom(
            "p",
            vec![
                Step::new(2, 0, 0.25),
                Step::new(-2, 0, 0.25),
                Step::new(0, 1, 0.25),
                Step::new(0, -1, 0.25)
            ]
        )
        .is_err());
    }

    #[test]
    fn heavy_tail_span_two_is_periodic() {
        let m = WalkModel::HeavyTail1D(HeavyTailWalk { span: 2, cauchy_scale: None });
        assert!(m.validate().is_err());
        WalkModel::heavy_tail().validate().unwrap();
    }

    #[test]
    fn heavy_tail_tail_matches_partial_sums() {
        let w = HeavyTailWalk { span: 1, cauchy_scale: None };
        // total one-sided mass is 1/2
        assert!((w.upper_tail(0) - 0.5).abs() < 1e-13);
        let head: f64 = (1..=1000u64).map(|k| w.mass(k)).sum();
        assert!((w.upper_tail(1000) - (0.5 - head)).abs() < 1e-13);
    }

    #[test]
    fn trigamma_values() {
        // ψ₁(1) = π²/6, ψ₁(1/2) = π²/2
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
    }
}
