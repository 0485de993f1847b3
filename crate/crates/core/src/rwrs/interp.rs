use super::path::RwrsPath;
use crate::error::{Error, Result};

/// √(n ln n).
pub fn normalizer(n: u64) -> f64 {
    let n = n as f64;
    (n * n.ln()).sqrt()
}

/// ⌊nT⌋.
pub fn grid_len(n: u64, t_max: f64) -> usize {
    (n as f64 * t_max).floor() as usize
}

/// Polygonal interpolation t ↦ (Z_⌊nt⌋ + (nt − ⌊nt⌋)(Z_⌊nt⌋+1 − Z_⌊nt⌋)) / √(n ln n) on [0, T].
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolatedProcess {
    values: Vec<f64>,
    n: u64,
    t_max: f64,
    norm: f64,
}

impl InterpolatedProcess {
    pub fn new(path: &RwrsPath, n: u64, t_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("normalization needs n >= 2, got {n}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Domain(format!("time horizon must be positive, got {t_max}")));
        }
        let needed = grid_len(n, t_max) + 1;
        if path.len_steps() < needed {
            return Err(Error::Domain(format!(
                "path has {} steps but interpolation on [0, {t_max}] with n = {n} needs {needed}",
                path.len_steps()
            )));
        }
        Ok(InterpolatedProcess {
            values: path.values()[..=needed].to_vec(),
            n,
            t_max,
            norm: normalizer(n),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Rescaled vertex value Z_k / √(n ln n).
    fn vertex(&self, k: usize) -> f64 {
        self.values[k] / self.norm
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.t_max)));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        let nt = self.n as f64 * t;
        let k = nt.floor() as usize;
        let frac = nt - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        (a + frac * (b - a)) / self.norm
    }

    /// sup_{t ≤ T} |w_t|: attained at a vertex k/n ≤ T or at T itself.
    pub fn sup_abs(&self) -> f64 {
        let last = grid_len(self.n, self.t_max);
        (0..=last)
            .map(|k| self.vertex(k).abs())
            .fold(self.eval_unchecked(self.t_max).abs(), f64::max)
    }

    /// ∫_0^T w_t dt, exact for the piecewise-linear path.
    pub fn integral(&self) -> f64 {
        let last = grid_len(self.n, self.t_max);
        let h = 1.0 / self.n as f64;
        let mut acc = crate::numeric::CompensatedSum::new();
        for k in 0..last {
            acc.add(0.5 * h * (self.vertex(k) + self.vertex(k + 1)));
        }
        let tail = self.t_max - last as f64 * h;
        acc.add(0.5 * tail * (self.vertex(last) + self.eval_unchecked(self.t_max)));
        acc.value()
    }
}

/// Streaming counterpart of [`InterpolatedProcess`]: fed Z_1, Z_2, … one at a
/// time, it records the values needed by the functional catalog without
/// storing the path.
#[derive(Clone, Debug)]
pub struct ProcessProbe {
    n: u64,
    t_max: f64,
    norm: f64,
    last: usize,
    k: usize,
    prev: f64,
    /// max |Z_j| over vertices 1 ≤ j ≤ ⌊nT⌋
    peak: f64,
    /// Σ (Z_j + Z_{j+1}) over full segments
    trapezoid: crate::numeric::CompensatedSum,
    tail: f64,
    /// (⌊nt⌋, nt − ⌊nt⌋, slot) sorted by ⌊nt⌋
    times: Vec<(usize, f64, usize)>,
    next_time: usize,
    at_times: Vec<f64>,
    endpoint: f64,
}

/// What a [`ProcessProbe`] retains about one path.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSummary {
    pub endpoint: f64,
    pub sup_abs: f64,
    pub integral: f64,
    pub t_max: f64,
    /// w at the requested times, in request order.
    pub at_times: Vec<f64>,
}

impl ProcessProbe {
    /// `times` must lie in [0, T].
    pub fn new(n: u64, t_max: f64, times: &[f64]) -> Result<Self> {
        if n < 2 || !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Domain(format!("invalid probe (n = {n}, T = {t_max})")));
        }
        if let Some(t) = times.iter().find(|t| !(0.0..=t_max).contains(*t)) {
            return Err(Error::Domain(format!("probe time {t} outside [0, {t_max}]")));
        }
        let nf = n as f64;
        let mut sorted: Vec<(usize, f64, usize)> = times
            .iter()
            .enumerate()
            .map(|(slot, &t)| {
                let nt = nf * t;
                (nt.floor() as usize, nt - nt.floor(), slot)
            })
            .collect();
        sorted.sort_by_key(|e| e.0);
        Ok(ProcessProbe {
            n,
            t_max,
            norm: normalizer(n),
            last: grid_len(n, t_max),
            k: 0,
            prev: 0.0,
            peak: 0.0,
            trapezoid: crate::numeric::CompensatedSum::new(),
            tail: 0.0,
            times: sorted,
            next_time: 0,
            at_times: vec![0.0; times.len()],
            endpoint: 0.0,
        })
    }

    /// Number of Z values the probe consumes: ⌊nT⌋ + 1.
    pub fn steps_needed(&self) -> usize {
        self.last + 1
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Feed Z_{k+1} given that Z_0..Z_k were fed before.
    #[inline]
    pub fn push(&mut self, z: f64) {
        let k = self.k;
        if k > self.last {
            return;
        }
        let a = self.prev;
        while let Some(&(idx, frac, slot)) = self.times.get(self.next_time) {
            if idx != k {
                break;
            }
            self.at_times[slot] = (a + frac * (z - a)) / self.norm;
            self.next_time += 1;
        }
        if k < self.last {
            self.trapezoid.add(a + z);
            self.peak = self.peak.max(z.abs());
        } else {
            let nt = self.n as f64 * self.t_max;
            let end = a + (nt - k as f64) * (z - a);
            let width = self.t_max - k as f64 / self.n as f64;
            self.tail = 0.5 * width * (a + end);
            self.endpoint = end / self.norm;
        }
        self.prev = z;
        self.k += 1;
    }

    pub fn is_complete(&self) -> bool {
        self.k > self.last
    }

    pub fn finish(self) -> Result<ProbeSummary> {
        if !self.is_complete() {
            return Err(Error::Domain(format!(
                "probe received {} of {} values",
                self.k,
                self.last + 1
            )));
        }
        let h = 1.0 / self.n as f64;
        Ok(ProbeSummary {
            endpoint: self.endpoint,
            sup_abs: (self.peak / self.norm).max(self.endpoint.abs()),
            integral: (0.5 * h * self.trapezoid.value() + self.tail) / self.norm,
            t_max: self.t_max,
            at_times: self.at_times,
        })
    }
}
