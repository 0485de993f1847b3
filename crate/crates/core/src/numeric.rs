//! Quadrature wrappers and compensated summation.

use quadrature::double_exponential;

const ABS_TOL: f64 = 1e-13;

/// ∫_a^b f by double-exponential quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    double_exponential::integrate(f, a, b, ABS_TOL).integral
}

/// ∫_a^∞ f for a ≥ 0, mapping [a+1, ∞) onto (0, 1] with x = (a+1)/t².
///
/// The squared map keeps integrands decaying like x^(−3/2) smooth at t = 0.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64) -> f64 {
    let c = a + 1.0;
    let head = integrate(&f, a, c);
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                f(c / (t * t)) * 2.0 * c / (t * t * t)
            }
        },
        0.0,
        1.0,
    );
    head + tail
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_integrals() {
        let v = integrate_to_infinity(|x| (-x).exp(), 0.0);
        assert!((v - 1.0).abs() < 1e-12);
        let v = integrate_to_infinity(|x| 1.0 / (x * x), 1.0);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
