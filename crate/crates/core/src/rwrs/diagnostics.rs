use super::functional::FunctionalSpec;
use super::interp::{grid_len, normalizer, InterpolatedProcess};
use super::path::{accumulate, truncated_accumulate_with};
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::scenery::{truncate_value, QuenchedField, Scenery, SceneryLaw, TruncationSchedule};
use crate::walk::{local_times_upto, Trajectory};
use serde::{Deserialize, Serialize};

/// Outcome of comparing Z with its truncated and recentered versions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationDiscrepancy {
    /// No site of the range R_⌊nT⌋ carries |ξ| > M_n (so Z^{(n)} = Z up to ⌊nT⌋).
    pub untouched: bool,
    /// sup_{k ≤ ⌊nT⌋} |Ẑ^{(n)}_k − Z^{(n)}_k| / √(n ln n).
    pub drift: f64,
}

pub fn truncation_discrepancy(
    traj: &Trajectory,
    field: &QuenchedField,
    n: u64,
    t_max: f64,
    schedule: &TruncationSchedule,
) -> Result<TruncationDiscrepancy> {
    let threshold = schedule.threshold(n)?;
    let last = grid_len(n, t_max);
    if traj.steps() < last {
        return Err(Error::Domain(format!(
            "trajectory of {} steps does not cover ⌊nT⌋ = {last}",
            traj.steps()
        )));
    }
    let untouched = local_times_upto(traj, last)
        .iter()
        .all(|(site, _)| field.eval(site).abs() <= threshold);
    let m = field.law().truncated_mean(threshold);
    let (zt, zh) = truncated_accumulate_with(traj, field, n, threshold, m);
    let norm = normalizer(n);
    let drift = (1..=last)
        .map(|k| (zh.at(k) - zt.at(k)).abs())
        .fold(0.0, f64::max)
        / norm;
    Ok(TruncationDiscrepancy { untouched, drift })
}

/// ⌊nT⌋ |m_n| / √(n ln n): the recentering drift in closed form.
pub fn recentering_drift(law: &SceneryLaw, schedule: &TruncationSchedule, n: u64, t_max: f64) -> Result<f64> {
    let m = law.truncated_mean(schedule.threshold(n)?);
    Ok(grid_len(n, t_max) as f64 * m.abs() / normalizer(n))
}

/// Square-spiral enumeration x_0 = 0, x_1, x_2, … of ℤ².
pub fn enumerate_site(k: u64) -> Site {
    if k == 0 {
        return Site::ORIGIN;
    }
    // ring r holds k with (2r − 1)² ≤ k < (2r + 1)²
    let r = (k.isqrt() + 1) / 2;
    let offset = k - (2 * r - 1) * (2 * r - 1);
    let side = offset / (2 * r);
    let pos = (offset % (2 * r)) as i64;
    let r = r as i64;
    match side {
        0 => Site::new(r, -r + 1 + pos),
        1 => Site::new(r - 1 - pos, r),
        2 => Site::new(-r, r - 1 - pos),
        _ => Site::new(-r + 1 + pos, -r),
    }
}

/// Inverse of [`enumerate_site`].
pub fn site_index(site: Site) -> Result<u64> {
    let (x, y) = (i128::from(site.x), i128::from(site.y));
    let r = x.abs().max(y.abs());
    if r == 0 {
        return Ok(0);
    }
    let (side, pos) = if x == r && y > -r {
        (0, y + r - 1)
    } else if y == r && x < r {
        (1, r - 1 - x)
    } else if x == -r && y < r {
        (2, r - 1 - y)
    } else {
        (3, x + r - 1)
    };
    let index = (2 * r - 1) * (2 * r - 1) + side * 2 * r + pos;
    u64::try_from(index).map_err(|_| Error::Domain(format!("site {site} is beyond the enumerable range")))
}

/// Effect on F of resampling the scenery at one site, and the Lipschitz bound for it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteInfluence {
    pub site: Site,
    pub visits: u32,
    /// |F(𝒲̂) − F(𝒲̂^{(k)})|
    pub influence: f64,
    /// L · |ξ̂_n(x_k) − ξ̂′_n(x_k)| · N_{⌊nT⌋+1}(x_k) / √(n ln n)
    pub bound: f64,
}

/// Compare F on the truncated recentered process built from `field` and from
/// `coupled`, which must agree with `field` everywhere except at x_k.
#[allow(clippy::too_many_arguments)]
pub fn site_influence<A: Scenery, B: Scenery>(
    traj: &Trajectory,
    field: &A,
    coupled: &B,
    law: &SceneryLaw,
    k: u64,
    n: u64,
    t_max: f64,
    schedule: &TruncationSchedule,
    functional: &FunctionalSpec,
) -> Result<SiteInfluence> {
    let site = enumerate_site(k);
    let threshold = schedule.threshold(n)?;
    let m = law.truncated_mean(threshold);
    let needed = grid_len(n, t_max) + 1;
    if traj.steps() < needed {
        return Err(Error::Domain(format!(
            "trajectory of {} steps does not cover ⌊nT⌋ + 1 = {needed}",
            traj.steps()
        )));
    }
    // Only sites the walk can see are observable.
    if let Some(&bad) = traj.positions()[1..]
        .iter()
        .find(|&&s| s != site && field.value(s).to_bits() != coupled.value(s).to_bits())
    {
        return Err(Error::Precondition(format!(
            "coupled fields differ at {bad} as well as at x_{k} = {site}"
        )));
    }
    let a = functional_on_recentered(traj, field, n, t_max, threshold, m, functional)?;
    let b = functional_on_recentered(traj, coupled, n, t_max, threshold, m, functional)?;
    let visits = local_times_upto(traj, needed).get(site);
    let jump = (truncate_value(field.value(site), threshold) - truncate_value(coupled.value(site), threshold)).abs();
    Ok(SiteInfluence {
        site,
        visits,
        influence: (a - b).abs(),
        bound: functional.lipschitz * jump * f64::from(visits) / normalizer(n),
    })
}

fn functional_on_recentered<S: Scenery>(
    traj: &Trajectory,
    field: &S,
    n: u64,
    t_max: f64,
    threshold: f64,
    mean: f64,
    functional: &FunctionalSpec,
) -> Result<f64> {
    let (_, zh) = truncated_accumulate_with(traj, field, n, threshold, mean);
    Ok(functional.eval(&InterpolatedProcess::new(&zh, n, t_max)?))
}

/// Whether Z^{(n)} and Z agree on 1..=⌊nT⌋, bitwise.
pub fn truncated_equals_raw(traj: &Trajectory, field: &QuenchedField, n: u64, t_max: f64, schedule: &TruncationSchedule) -> Result<bool> {
    let threshold = schedule.threshold(n)?;
    let last = grid_len(n, t_max).min(traj.steps());
    let z = accumulate(traj, field);
    let (zt, _) = truncated_accumulate_with(traj, field, n, threshold, 0.0);
    Ok((1..=last).all(|k| z.at(k).to_bits() == zt.at(k).to_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rwrs::functional::FunctionalId;
    use crate::scenery::{PlantedField, ResampledField, ScenerySpec};
    use crate::walk::{sample_trajectory, WalkModel};
    use rustc_hash::FxHashSet;

    #[test]
    fn spiral_enumerates_each_site_once() {
        let r = 6i64;
        let count = ((2 * r + 1) * (2 * r + 1)) as u64;
        let sites: FxHashSet<Site> = (0..count).map(enumerate_site).collect();
        assert_eq!(sites.len() as u64, count);
        assert!(sites.iter().all(|s| s.x.abs() <= r && s.y.abs() <= r));
        assert_eq!(enumerate_site(1), Site::new(1, 0));
        for k in 0..count {
            assert_eq!(site_index(enumerate_site(k)).unwrap(), k);
        }
    }

    proptest::proptest! {
        #[test]
        fn spiral_roundtrip(x in -1_000_000_000i64..1_000_000_000, y in -1_000_000_000i64..1_000_000_000) {
            let s = Site::new(x, y);
            proptest::prop_assert_eq!(enumerate_site(site_index(s).unwrap()), s);
        }
    }

    #[test]
    fn bounded_scenery_untouched_without_drift() {
        let f = QuenchedField::new(ScenerySpec::new(SceneryLaw::Rademacher, 1.0, 1).unwrap());
        let t = sample_trajectory(&WalkModel::simple(), 1100, 4).unwrap();
        let sched = TruncationSchedule::new(1.0).unwrap();
        let d = truncation_discrepancy(&t, &f, 1024, 1.0, &sched).unwrap();
        assert_eq!(d, TruncationDiscrepancy { untouched: true, drift: 0.0 });
        assert!(truncated_equals_raw(&t, &f, 1024, 1.0, &sched).unwrap());
    }

    #[test]
    fn planted_violation_detected() {
        // plant a huge value on the path by choosing a seed-independent heavy site
        let spec = ScenerySpec::new(SceneryLaw::Pareto { beta: 3.0, p_positive: 0.5 }, 1.0, 2).unwrap();
        let t = sample_trajectory(&WalkModel::simple(), 300, 9).unwrap();
        let hot = t.at(100);
        let mut seed = 0u64;
        // find a master seed under which ξ(hot) exceeds M_n
        let sched = TruncationSchedule::new(1.0).unwrap();
        let m = sched.threshold(256).unwrap();
        let f = loop {
            let f = QuenchedField::new(spec.with_seed(seed));
            if f.eval(hot).abs() > m {
                break f;
            }
            seed += 1;
        };
        let d = truncation_discrepancy(&t, &f, 256, 1.0, &sched).unwrap();
        assert!(!d.untouched);
        assert!(!truncated_equals_raw(&t, &f, 256, 1.0, &sched).unwrap());
    }

    #[test]
    fn drift_matches_closed_form() {
        let law = SceneryLaw::Pareto { beta: 2.5, p_positive: 0.9 };
        let f = QuenchedField::new(ScenerySpec::new(law, 1.0, 3).unwrap());
        let t = sample_trajectory(&WalkModel::simple(), 600, 1).unwrap();
        let sched = TruncationSchedule::new(1.0).unwrap();
        let d = truncation_discrepancy(&t, &f, 512, 1.0, &sched).unwrap();
        let closed = recentering_drift(&law, &sched, 512, 1.0).unwrap();
        assert!(closed > 0.0);
        assert!((d.drift - closed).abs() <= 1e-9 * closed);
    }

    fn influence_setup() -> (Trajectory, QuenchedField, TruncationSchedule) {
        let f = QuenchedField::new(ScenerySpec::new(SceneryLaw::Gaussian, 1.0, 21).unwrap());
        let t = sample_trajectory(&WalkModel::simple(), 300, 5).unwrap();
        (t, f, TruncationSchedule::new(1.0).unwrap())
    }

    #[test]
    fn unvisited_site_has_no_influence() {
        let (t, f, sched) = influence_setup();
        let far = (0..).find(|&k| enumerate_site(k).x > 400).unwrap();
        let g = ResampledField::new(&f, 99, enumerate_site(far));
        let fs = FunctionalSpec::endpoint_cosine();
        let r = site_influence(&t, &f, &g, &f.law(), far, 256, 1.0, &sched, &fs).unwrap();
        assert_eq!((r.influence, r.bound, r.visits), (0.0, 0.0, 0));
    }

    #[test]
    fn identical_coupling_has_no_influence() {
        let (t, f, sched) = influence_setup();
        let fs = FunctionalSpec::new(FunctionalId::CappedSup, 5.0).unwrap();
        let r = site_influence(&t, &f, &f, &f.law(), 0, 256, 1.0, &sched, &fs).unwrap();
        assert_eq!(r.influence, 0.0);
        assert!(r.visits > 0 || r.bound == 0.0);
    }

    #[test]
    fn influence_bounded_and_multi_site_difference_rejected() {
        let (t, f, sched) = influence_setup();
        for k in 0..25u64 {
            let g = ResampledField::new(&f, 1000 + k, enumerate_site(k));
            for id in FunctionalId::ALL {
                let fs = FunctionalSpec::new(id, 3.0).unwrap();
                let r = site_influence(&t, &f, &g, &f.law(), k, 256, 1.0, &sched, &fs).unwrap();
                assert!(r.influence <= r.bound * (1.0 + 1e-12) + 1e-15, "{r:?}");
            }
        }
        let two = PlantedField::new(f).plant(Site::ORIGIN, 9.0).plant(t.at(3), -9.0);
        let fs = FunctionalSpec::endpoint_cosine();
        let other = if t.at(3) == Site::ORIGIN { 1 } else { 0 };
        assert!(matches!(
            site_influence(&t, &f, &two, &f.law(), other, 256, 1.0, &sched, &fs),
            Err(Error::Precondition(_))
        ));
    }
}
