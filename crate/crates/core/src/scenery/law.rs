use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Marginal law of one scenery value. Every variant is centered with unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum SceneryLaw {
    Rademacher,
    Gaussian,
    /// Standardized two-sided Lomax tail: Y = +L with probability
    /// `p_positive`, −L otherwise, where P(L > y) = (1 + y)^(−β);
    /// the scenery value is (Y − E Y)/sd(Y).
    Pareto { beta: f64, p_positive: f64 },
    /// Identically zero. Diagnostic only: it is not a valid (A2) scenery.
    Zero,
}

/// Location/scale of the standardized Pareto law.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ParetoShape {
    pub beta: f64,
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl ParetoShape {
    pub fn new(beta: f64, p: f64) -> Self {
        let mu = (2.0 * p - 1.0) / (beta - 1.0);
        let second = 2.0 / ((beta - 1.0) * (beta - 2.0));
        let sigma = (second - mu * mu).sqrt();
        ParetoShape { beta, p, mu, sigma }
    }

    /// P(L > y), y ≥ 0.
    fn survival(&self, y: f64) -> f64 {
        (1.0 + y).powf(-self.beta)
    }

    /// E[L 1{L > y}], y ≥ 0.
    fn tail_moment(&self, y: f64) -> f64 {
        y * (1.0 + y).powf(-self.beta) + (1.0 + y).powf(1.0 - self.beta) / (self.beta - 1.0)
    }

    /// (E[Y 1{Y > c}], P(Y > c)).
    fn upper(&self, c: f64) -> (f64, f64) {
        if c >= 0.0 {
            (self.p * self.tail_moment(c), self.p * self.survival(c))
        } else {
            // complement of {Y ≤ c} = {L ≥ −c on the negative side}
            let (m, q) = self.lower(c);
            (self.mu - m, 1.0 - q)
        }
    }

    /// (E[Y 1{Y < c}], P(Y < c)).
    fn lower(&self, c: f64) -> (f64, f64) {
        if c <= 0.0 {
            let q = 1.0 - self.p;
            (-q * self.tail_moment(-c), q * self.survival(-c))
        } else {
            let (m, q) = self.upper(c);
            (self.mu - m, 1.0 - q)
        }
    }

    /// E[ξ 1{|ξ| > M}].
    pub fn outer_mean(&self, m: f64) -> f64 {
        let (hi_m, hi_p) = self.upper(self.mu + self.sigma * m);
        let (lo_m, lo_p) = self.lower(self.mu - self.sigma * m);
        (hi_m + lo_m - self.mu * (hi_p + lo_p)) / self.sigma
    }

    /// Density of the standardized value.
    pub fn density(&self, x: f64) -> f64 {
        let y = self.mu + self.sigma * x;
        let side = if y >= 0.0 { self.p } else { 1.0 - self.p };
        self.sigma * side * self.beta * (1.0 + y.abs()).powf(-self.beta - 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let l = u.powf(-1.0 / self.beta) - 1.0;
        let y = if rng.gen::<f64>() < self.p { l } else { -l };
        (y - self.mu) / self.sigma
    }
}

impl SceneryLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SceneryLaw::Pareto { beta, p_positive } => {
                if !beta.is_finite() || beta <= 2.0 {
                    return Err(Error::MomentViolation {
                        moment: "E[xi^2] (Pareto tail exponent beta must exceed 2)",
                        value: format!("infinite for beta = {beta}"),
                    });
                }
                if beta > 4.0 {
                    return Err(Error::InvalidScenery(format!(
                        "Pareto tail exponent beta = {beta} outside the supported range (2, 4]"
                    )));
                }
                if !(0.0..=1.0).contains(&p_positive) {
                    return Err(Error::InvalidScenery(format!(
                        "p_positive = {p_positive} is not a probability"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn pareto_shape(&self) -> Option<ParetoShape> {
        match *self {
            SceneryLaw::Pareto { beta, p_positive } => Some(ParetoShape::new(beta, p_positive)),
            _ => None,
        }
    }

    /// Draw one value from the law using `rng`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SceneryLaw::Rademacher => {
                if rng.next_u64() >> 63 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            SceneryLaw::Gaussian => StandardNormal.sample(rng),
            SceneryLaw::Pareto { beta, p_positive } => ParetoShape::new(*beta, *p_positive).sample(rng),
            SceneryLaw::Zero => 0.0,
        }
    }

    /// m(M) = E[ξ 1{|ξ| ≤ M}], in closed form.
    pub fn truncated_mean(&self, threshold: f64) -> f64 {
        match self {
            // symmetric laws
            SceneryLaw::Rademacher | SceneryLaw::Gaussian | SceneryLaw::Zero => 0.0,
            // centered, so E[ξ 1{|ξ| ≤ M}] = −E[ξ 1{|ξ| > M}]
            SceneryLaw::Pareto { .. } => -self.pareto_shape().unwrap().outer_mean(threshold),
        }
    }

    /// Largest attainable |ξ|, when bounded.
    pub fn bound(&self) -> Option<f64> {
        match self {
            SceneryLaw::Rademacher => Some(1.0),
            SceneryLaw::Zero => Some(0.0),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SceneryLaw::Rademacher => "rademacher",
            SceneryLaw::Gaussian => "gaussian",
            SceneryLaw::Pareto { .. } => "pareto",
            SceneryLaw::Zero => "zero",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_standardization() {
        for &(beta, p) in &[(3.0, 0.5), (3.0, 0.8), (2.5, 0.2), (4.0, 1.0)] {
            let s = ParetoShape::new(beta, p);
            // m(0+) = −E[ξ 1{|ξ|>0}] = −E ξ = 0
            assert!(s.outer_mean(0.0).abs() < 1e-12, "beta={beta} p={p}");
        }
    }

    #[test]
    fn symmetric_pareto_has_zero_truncated_mean() {
        let law = SceneryLaw::Pareto { beta: 3.0, p_positive: 0.5 };
        for m in [0.5, 1.0, 7.0, 100.0] {
            assert!(law.truncated_mean(m).abs() < 1e-15);
        }
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn asymmetric_truncated_mean_matches_quadrature() {
        for &(beta, p) in &[(3.0, 0.8), (2.5, 0.3), (4.0, 0.95)] {
            let law = SceneryLaw::Pareto { beta, p_positive: p };
            let shape = law.pareto_shape().unwrap();
            let kink = -shape.mu / shape.sigma;
            for m in [1.5, 4.0, 30.0, 200.0] {
                let g = |x: f64| x * shape.density(x);
                // stay off the jump at the kink so each piece sees one branch
                let eps = 1e-12;
                let oracle = simpson(g, -m, kink - eps, 200_000) + simpson(g, kink + eps, m, 200_000);
                let closed = law.truncated_mean(m);
                assert!(
                    (closed - oracle).abs() <= 1e-7 * oracle.abs() + 1e-11,
                    "beta={beta} p={p} M={m}: {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn truncated_mean_vanishes_with_threshold() {
        let law = SceneryLaw::Pareto { beta: 3.0, p_positive: 0.8 };
        let ms: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&m| law.truncated_mean(m).abs()).collect();
        assert!(ms[0] > ms[1] && ms[1] > ms[2]);
        // |m(M)| ~ M^(1−β)
        assert!((ms[1] / ms[2]).log10() > 1.9);
    }

    #[test]
    fn beta_two_rejected() {
        let err = SceneryLaw::Pareto { beta: 2.0, p_positive: 0.5 }.validate().unwrap_err();
        assert!(matches!(err, Error::MomentViolation { .. }));
        assert!(err.to_string().contains("A2"));
    }
}
