//! Step samplers and the streaming walker.

use super::model::{HeavyTailWalk, SymmetricPmf, WalkModel};
use crate::error::Result;
use crate::lattice::Site;
use crate::seed::walk_rng;
use rand::distributions::Distribution;
use rand::RngCore;
use rand_distr::WeightedAliasIndex;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Cut-off between the alias-table body and the exact Pareto-rejection tail.
const HEAVY_BODY: u64 = 1024;

#[derive(Clone, Debug)]
enum Sampler {
    /// Equiprobable steps, power-of-two count: consume `bits` random bits per step.
    Uniform { steps: Vec<Site>, bits: u32 },
    Alias { steps: Vec<Site>, table: WeightedAliasIndex<f64> },
    HeavyTail { span: i64, body: WeightedAliasIndex<f64> },
}

#[derive(Clone, Debug)]
pub struct StepSampler {
    inner: Sampler,
}

impl StepSampler {
    pub fn new(model: &WalkModel) -> Result<Self> {
        model.validate()?;
        let inner = match model {
            WalkModel::Lattice2D(w) => {
                let steps: Vec<Site> = w.steps.iter().map(|s| s.site()).collect();
                let p0 = w.steps[0].prob;
                let equal = w.steps.iter().all(|s| s.prob == p0);
                if equal && steps.len().is_power_of_two() && steps.len() > 1 {
                    let bits = steps.len().trailing_zeros();
                    Sampler::Uniform { steps, bits }
                } else {
                    let weights = w.steps.iter().map(|s| s.prob).collect();
                    let table = WeightedAliasIndex::new(weights)
                        .expect("validated probabilities form an alias table");
                    Sampler::Alias { steps, table }
                }
            }
            WalkModel::HeavyTail1D(w) => {
                let unit = HeavyTailWalk { span: 1, cauchy_scale: None };
                // |j| in 1..=HEAVY_BODY, last bucket = everything beyond.
                let mut weights: Vec<f64> = (1..=HEAVY_BODY).map(|j| 2.0 * unit.mass(j)).collect();
                weights.push(2.0 * unit.upper_tail(HEAVY_BODY));
                let body = WeightedAliasIndex::new(weights).expect("positive weights");
                Sampler::HeavyTail { span: w.span, body }
            }
        };
        Ok(StepSampler { inner })
    }
}

#[inline]
fn unit_open_closed(rng: &mut Xoshiro256PlusPlus) -> f64 {
    // (0, 1] with 53-bit resolution
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// |j| ≥ HEAVY_BODY + 1 with P(|j| = k) ∝ 1/k².
///
/// Proposal k = ⌈B/u⌉ has P(k) = B/(k(k−1)); accepting with (k−1)/k
/// leaves exactly ∝ 1/k².
fn heavy_tail_magnitude(rng: &mut Xoshiro256PlusPlus) -> u64 {
    const LIMIT: f64 = (1u64 << 62) as f64;
    let b = HEAVY_BODY as f64;
    loop {
        let k = (b / unit_open_closed(rng)).ceil();
        if k <= b || k >= LIMIT {
            continue;
        }
        let accept = (k - 1.0) / k;
        if unit_open_closed(rng) <= accept {
            return k as u64;
        }
    }
}

/// Streaming walk S_1, S_2, … started at the origin.
#[derive(Clone, Debug)]
pub struct Walker {
    sampler: StepSampler,
    rng: Xoshiro256PlusPlus,
    position: Site,
    buf: u64,
    buf_bits: u32,
}

impl Walker {
    pub fn new(sampler: StepSampler, seed: u64) -> Self {
        Walker {
            sampler,
            rng: walk_rng(seed),
            position: Site::ORIGIN,
            buf: 0,
            buf_bits: 0,
        }
    }

    pub fn for_model(model: &WalkModel, seed: u64) -> Result<Self> {
        Ok(Walker::new(StepSampler::new(model)?, seed))
    }

    pub fn position(&self) -> Site {
        self.position
    }

    #[inline]
    pub fn next_step(&mut self) -> Site {
        match &self.sampler.inner {
            Sampler::Uniform { steps, bits } => {
                if self.buf_bits < *bits {
                    self.buf = self.rng.next_u64();
                    self.buf_bits = 64;
                }
                let idx = (self.buf & ((1u64 << bits) - 1)) as usize;
                self.buf >>= bits;
                self.buf_bits -= bits;
                steps[idx]
            }
            Sampler::Alias { steps, table } => steps[table.sample(&mut self.rng)],
            Sampler::HeavyTail { span, body } => {
                let bucket = body.sample(&mut self.rng) as u64;
                let magnitude = if bucket < HEAVY_BODY {
                    bucket + 1
                } else {
                    heavy_tail_magnitude(&mut self.rng)
                };
                let signed = if self.rng.next_u64() >> 63 == 0 {
                    magnitude as i64
                } else {
                    -(magnitude as i64)
                };
                Site::new(signed.wrapping_mul(*span), 0)
            }
        }
    }

    /// Advance one step and return the new position.
    #[inline]
    pub fn advance(&mut self) -> Site {
        let step = self.next_step();
        self.position = self.position.shifted(step);
        self.position
    }
}

impl Iterator for Walker {
    type Item = Site;

    #[inline]
    fn next(&mut self) -> Option<Site> {
        Some(self.advance())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::model::Step;

    #[test]
    fn uniform_sampler_uses_all_four_steps() {
        let mut w = Walker::for_model(&WalkModel::simple(), 3).unwrap();
        let mut counts = [0u32; 4];
        for _ in 0..40_000 {
            let s = w.next_step();
            let i = match (s.x, s.y) {
                (1, 0) => 0,
                (-1, 0) => 1,
                (0, 1) => 2,
                (0, -1) => 3,
                _ => panic!("unexpected step {s}"),
            };
            counts[i] += 1;
        }
        for c in counts {
            // binomial(40000, 1/4): sd ≈ 86.6
            assert!((f64::from(c) - 10_000.0).abs() < 5.0 * 86.6, "{counts:?}");
        }
    }

    #[test]
    fn alias_sampler_frequencies() {
        let model = WalkModel::custom(
            "lazy",
            vec![
                Step::new(0, 0, 0.4),
                Step::new(1, 0, 0.15),
                Step::new(-1, 0, 0.15),
                Step::new(0, 1, 0.15),
                Step::new(0, -1, 0.15),
            ],
        )
        .unwrap();
        let mut w = Walker::for_model(&model, 11).unwrap();
        let n = 100_000;
        let stays = (0..n).filter(|_| w.next_step() == Site::ORIGIN).count();
        let sd = (n as f64 * 0.4 * 0.6).sqrt();
        assert!((stays as f64 - 0.4 * n as f64).abs() < 5.0 * sd);
    }

    #[test]
    fn heavy_tail_magnitudes_follow_inverse_square() {
        let mut w = Walker::for_model(&WalkModel::heavy_tail(), 5).unwrap();
        let n = 400_000u64;
        let mut ones = 0u64;
        let mut beyond = 0u64;
        let mut positive = 0u64;
        for _ in 0..n {
            let s = w.next_step();
            assert_eq!(s.y, 0);
            assert_ne!(s.x, 0);
            let m = s.x.unsigned_abs();
            ones += u64::from(m == 1);
            beyond += u64::from(m > 2000);
            positive += u64::from(s.x > 0);
        }
        let unit = HeavyTailWalk { span: 1, cauchy_scale: None };
        let check = |count: u64, p: f64| {
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((count as f64 - n as f64 * p).abs() < 5.0 * sd, "{count} vs {}", n as f64 * p);
        };
        check(ones, 2.0 * unit.mass(1));
        check(beyond, 2.0 * unit.upper_tail(2000));
        check(positive, 0.5);
    }
}
