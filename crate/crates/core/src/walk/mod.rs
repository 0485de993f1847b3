//! Random walks on ℤ² (and heavy-tailed walks on ℤ), their local times,
//! ranges and intersection statistics.

pub mod aperiodic;
mod model;
mod sampler;
mod trajectory;

pub use model::{
    covariance_of, det2, HeavyTailWalk, LatticeWalk, Matrix2, Step, SymmetricPmf, WalkKind, WalkModel,
};
pub use sampler::{StepSampler, Walker};
pub use trajectory::{
    exit_of_range, local_times, local_times_upto, mutual_intersection_local_time, sample_trajectory,
    LocalTimeField, PairIntersection, RangeTracker, Trajectory,
};

use crate::error::Result;

/// Sample covariance of `samples` i.i.d. steps, with the standard error of each entry.
pub fn empirical_covariance(model: &WalkModel, samples: usize, seed: u64) -> Result<(Matrix2, Matrix2)> {
    covariance_of(model)?;
    let mut walker = Walker::for_model(model, seed)?;
    let n = samples as f64;
    // Known zero mean: second moments are unbiased for Σ.
    let mut sum = [[0.0f64; 2]; 2];
    let mut sum_sq = [[0.0f64; 2]; 2];
    for _ in 0..samples {
        let s = walker.next_step();
        let v = [s.x as f64, s.y as f64];
        for i in 0..2 {
            for j in 0..2 {
                let p = v[i] * v[j];
                sum[i][j] += p;
                sum_sq[i][j] += p * p;
            }
        }
    }
    let mut est = [[0.0; 2]; 2];
    let mut se = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let m = sum[i][j] / n;
            est[i][j] = m;
            se[i][j] = ((sum_sq[i][j] / n - m * m).max(0.0) / n).sqrt();
        }
    }
    Ok((est, se))
}
