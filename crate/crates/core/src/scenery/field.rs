use super::law::SceneryLaw;
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::seed::site_stream;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

/// Scenery law, the (A2) log-moment exponent χ and the master seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenerySpec {
    pub law: SceneryLaw,
    pub chi: f64,
    pub master_seed: u64,
}

impl ScenerySpec {
    pub fn new(law: SceneryLaw, chi: f64, master_seed: u64) -> Result<Self> {
        let spec = ScenerySpec { law, chi, master_seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi.is_finite() && self.chi > 0.0) {
            return Err(Error::InvalidScenery(format!("chi must be positive, got {}", self.chi)));
        }
        self.law.validate()
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        ScenerySpec { master_seed, ..self }
    }
}

/// Anything that assigns a real value to every lattice site.
pub trait Scenery: Sync {
    fn value(&self, site: Site) -> f64;
}

/// The i.i.d. field ξ, realized lazily: ξ(x) is a pure function of
/// (master seed, x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuenchedField {
    spec: ScenerySpec,
}

impl QuenchedField {
    pub fn new(spec: ScenerySpec) -> Self {
        QuenchedField { spec }
    }

    pub fn spec(&self) -> &ScenerySpec {
        &self.spec
    }

    pub fn law(&self) -> SceneryLaw {
        self.spec.law
    }

    #[inline]
    pub fn eval(&self, site: Site) -> f64 {
        self.spec.law.sample(&mut site_stream(self.spec.master_seed, site))
    }
}

impl Scenery for QuenchedField {
    #[inline]
    fn value(&self, site: Site) -> f64 {
        self.eval(site)
    }
}

/// A base scenery with a finite set of sites overwritten.
#[derive(Clone, Debug)]
pub struct PlantedField<S> {
    base: S,
    planted: FxHashMap<Site, f64>,
}

impl<S: Scenery> PlantedField<S> {
    pub fn new(base: S) -> Self {
        PlantedField {
            base,
            planted: FxHashMap::default(),
        }
    }

    pub fn plant(mut self, site: Site, value: f64) -> Self {
        self.planted.insert(site, value);
        self
    }

    pub fn base(&self) -> &S {
        &self.base
    }
}

impl<S: Scenery> Scenery for PlantedField<S> {
    fn value(&self, site: Site) -> f64 {
        match self.planted.get(&site) {
            Some(&v) => v,
            None => self.base.value(site),
        }
    }
}

/// ξ with the value at a single site replaced by that of an independent copy ξ′.
#[derive(Clone, Copy, Debug)]
pub struct ResampledField<'a> {
    base: &'a QuenchedField,
    copy: QuenchedField,
    site: Site,
}

impl<'a> ResampledField<'a> {
    pub fn new(base: &'a QuenchedField, independent_seed: u64, site: Site) -> Self {
        ResampledField {
            base,
            copy: QuenchedField::new(base.spec().with_seed(independent_seed)),
            site,
        }
    }

    pub fn site(&self) -> Site {
        self.site
    }
}

impl Scenery for ResampledField<'_> {
    fn value(&self, site: Site) -> f64 {
        if site == self.site {
            self.copy.eval(site)
        } else {
            self.base.eval(site)
        }
    }
}

impl<S: Scenery + ?Sized> Scenery for &S {
    #[inline]
    fn value(&self, site: Site) -> f64 {
        (**self).value(site)
    }
}

/// Scenery given by an arbitrary function of the site.
#[derive(Clone, Copy, Debug)]
pub struct FnScenery<F>(pub F);

impl<F: Fn(Site) -> f64 + Sync> Scenery for FnScenery<F> {
    #[inline]
    fn value(&self, site: Site) -> f64 {
        (self.0)(site)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::derive;

    fn field(law: SceneryLaw, seed: u64) -> QuenchedField {
        QuenchedField::new(ScenerySpec::new(law, 1.0, seed).unwrap())
    }

    #[test]
    fn rademacher_support() {
        let f = field(SceneryLaw::Rademacher, 4);
        for x in -50..50 {
            for y in -5..5 {
                let v = f.eval(Site::new(x, y));
                assert!(v == 1.0 || v == -1.0);
            }
        }
    }

    #[test]
    fn evaluation_is_pure() {
        for i in 0..1000u64 {
            let seed = derive(1, "purity", &[i]);
            let site = Site::new((seed % 2001) as i64 - 1000, ((seed >> 20) % 2001) as i64 - 1000);
            for law in [
                SceneryLaw::Rademacher,
                SceneryLaw::Gaussian,
                SceneryLaw::Pareto { beta: 3.0, p_positive: 0.7 },
            ] {
                let f = field(law, seed);
                assert_eq!(f.eval(site).to_bits(), f.eval(site).to_bits());
                assert_eq!(f.eval(site).to_bits(), field(law, seed).eval(site).to_bits());
            }
        }
    }

    #[test]
    fn site_moments_and_neighbour_correlation() {
        // 10^5 sites on a 400 × 250 block; CLT band for mean, variance band
        // [0.97, 1.03] and correlation with the right neighbour within 3/√N.
        for law in [SceneryLaw::Rademacher, SceneryLaw::Gaussian] {
            let f = field(law, 2024);
            let n = 100_000usize;
            let (mut s, mut ss, mut cross) = (0.0, 0.0, 0.0);
            for i in 0..n as i64 {
                let site = Site::new(i % 400, i / 400);
                let v = f.eval(site);
                let w = f.eval(site.shifted(Site::new(1, 0)));
                s += v;
                ss += v * v;
                cross += v * w;
            }
            let nf = n as f64;
            let mean = s / nf;
            let var = ss / nf - mean * mean;
            assert!(mean.abs() <= 3.0 / nf.sqrt(), "{law:?} mean {mean}");
            assert!((0.97..=1.03).contains(&var), "{law:?} var {var}");
            let corr = (cross / nf - mean * mean) / var;
            assert!(corr.abs() <= 3.0 / nf.sqrt(), "{law:?} corr {corr}");
        }
    }

    #[test]
    fn resampled_field_differs_only_at_site() {
        let f = field(SceneryLaw::Gaussian, 9);
        let x = Site::new(2, -1);
        let g = ResampledField::new(&f, 10, x);
        assert_ne!(g.value(x), f.value(x));
        assert_eq!(g.value(Site::new(2, 0)), f.value(Site::new(2, 0)));
    }
}
