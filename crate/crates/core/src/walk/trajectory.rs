use super::model::WalkModel;
use super::sampler::Walker;
use crate::error::{Error, Result};
use crate::lattice::Site;
use rustc_hash::{FxHashMap, FxHashSet};

/// A sampled path S_0 = 0, S_1, …, S_n.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    positions: Vec<Site>,
    model_id: String,
    seed: u64,
}

impl Trajectory {
    /// Build from explicit positions; the first must be the origin.
    pub fn from_positions(positions: Vec<Site>) -> Result<Self> {
        match positions.first() {
            Some(&Site::ORIGIN) => Ok(Trajectory {
                positions,
                model_id: "explicit".into(),
                seed: 0,
            }),
            Some(s) => Err(Error::Domain(format!("trajectory must start at the origin, got {s}"))),
            None => Err(Error::Domain("empty trajectory".into())),
        }
    }

    /// Number of steps n.
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn positions(&self) -> &[Site] {
        &self.positions
    }

    /// S_k.
    pub fn at(&self, k: usize) -> Site {
        self.positions[k]
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample n steps of `model` from the origin. Deterministic in `(model, n, seed)`.
pub fn sample_trajectory(model: &WalkModel, n: usize, seed: u64) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::Domain("trajectory length n must be >= 1".into()));
    }
    let walker = Walker::for_model(model, seed)?;
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(Site::ORIGIN);
    positions.extend(walker.take(n));
    Ok(Trajectory {
        positions,
        model_id: model.label(),
        seed,
    })
}

/// Occupation counts N_n(x) = #{1 ≤ k ≤ n : S_k = x}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LocalTimeField {
    counts: FxHashMap<Site, u32>,
    n: usize,
}

impl LocalTimeField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register one more time step spent at `site`.
    #[inline]
    pub fn record(&mut self, site: Site) -> u32 {
        self.n += 1;
        let c = self.counts.entry(site).or_insert(0);
        *c += 1;
        *c
    }

    #[inline]
    pub fn get(&self, site: Site) -> u32 {
        self.counts.get(&site).copied().unwrap_or(0)
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    /// Number of distinct sites visited during times 1..n.
    pub fn range_size(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, u32)> + '_ {
        self.counts.iter().map(|(s, c)| (*s, *c))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    /// Σ_x N(x)².
    pub fn self_intersection(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c) * u64::from(c)).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

pub fn local_times(traj: &Trajectory) -> LocalTimeField {
    local_times_upto(traj, traj.steps())
}

/// Local times over times 1..=k.
pub fn local_times_upto(traj: &Trajectory, k: usize) -> LocalTimeField {
    let mut field = LocalTimeField::new();
    for &s in &traj.positions[1..=k] {
        field.record(s);
    }
    field
}

/// Whether S_k is a site not in {S_0, …, S_{k−1}} (the origin counts as visited).
pub fn exit_of_range(traj: &Trajectory, k: usize) -> Result<bool> {
    if k == 0 || k > traj.steps() {
        return Err(Error::IndexOutOfBounds {
            index: k,
            steps: traj.steps(),
        });
    }
    let target = traj.positions[k];
    Ok(!traj.positions[..k].contains(&target))
}

/// Incremental range {S_0, …, S_k} with exit detection.
#[derive(Clone, Debug)]
pub struct RangeTracker {
    visited: FxHashSet<Site>,
}

impl Default for RangeTracker {
    fn default() -> Self {
        let mut visited = FxHashSet::default();
        visited.insert(Site::ORIGIN);
        RangeTracker { visited }
    }
}

impl RangeTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the next position; true iff it was not in the range before.
    #[inline]
    pub fn visit(&mut self, site: Site) -> bool {
        self.visited.insert(site)
    }

    pub fn len(&self) -> usize {
        self.visited.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visited.is_empty()
    }
}

/// J_n = Σ_x N_n(x)·Ñ_n(x) for two trajectories of equal horizon.
pub fn mutual_intersection_local_time(t1: &Trajectory, t2: &Trajectory) -> Result<u64> {
    if t1.steps() != t2.steps() {
        return Err(Error::HorizonMismatch {
            left: t1.steps(),
            right: t2.steps(),
        });
    }
    let (a, b) = (local_times(t1), local_times(t2));
    let (small, large) = if a.range_size() <= b.range_size() { (&a, &b) } else { (&b, &a) };
    Ok(small
        .iter()
        .map(|(s, c)| u64::from(c) * u64::from(large.get(s)))
        .sum())
}

/// Running J_k for two walks advanced in lockstep.
#[derive(Clone, Debug, Default)]
pub struct PairIntersection {
    pub first: LocalTimeField,
    pub second: LocalTimeField,
    j: u64,
}

impl PairIntersection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record S_k and S'_k; returns J_k.
    #[inline]
    pub fn record(&mut self, a: Site, b: Site) -> u64 {
        self.record_counts(a, b);
        self.j
    }

    /// Record S_k and S'_k; returns (N_k(S_k), Ñ_k(S'_k)).
    #[inline]
    pub fn record_counts(&mut self, a: Site, b: Site) -> (u32, u32) {
        // J_k − J_{k−1} = Ñ_{k−1}(a) + N_{k−1}(b) + 1{a = b}
        let partner_a = u64::from(self.second.get(a));
        let own_b = u64::from(self.first.get(b));
        self.j += partner_a + own_b + u64::from(a == b);
        (self.first.record(a), self.second.record(b))
    }

    pub fn value(&self) -> u64 {
        self.j
    }
}
