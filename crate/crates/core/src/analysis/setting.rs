use crate::error::{Error, Result};
use crate::scenery::{ScenerySpec, TruncationSchedule};
use crate::walk::WalkModel;
use serde::{Deserialize, Serialize};

/// Geometric grid n_j = ⌊b^j⌋ for n_min_exp ≤ j ≤ n_max_exp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "default_ratio")]
    pub b: f64,
    pub n_min_exp: u32,
    pub n_max_exp: u32,
}

fn default_ratio() -> f64 {
    2.0
}

impl Grid {
    pub fn new(b: f64, n_min_exp: u32, n_max_exp: u32) -> Result<Self> {
        let g = Grid { b, n_min_exp, n_max_exp };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0 && self.b <= 2.0) {
            return Err(Error::Domain(format!("grid ratio b must lie in (1, 2], got {}", self.b)));
        }
        if self.n_min_exp > self.n_max_exp {
            return Err(Error::Domain(format!(
                "n_min_exp = {} exceeds n_max_exp = {}",
                self.n_min_exp, self.n_max_exp
            )));
        }
        if self.n_at(self.n_min_exp) < 2 {
            return Err(Error::Domain(format!(
                "smallest grid point ⌊b^{}⌋ is below 2",
                self.n_min_exp
            )));
        }
        if self.n_at(self.n_max_exp) > 1 << 40 {
            return Err(Error::Domain("largest grid point exceeds 2^40".into()));
        }
        Ok(())
    }

    pub fn n_at(&self, j: u32) -> u64 {
        self.b.powi(j as i32).floor() as u64
    }

    pub fn exponents(&self) -> Vec<u32> {
        (self.n_min_exp..=self.n_max_exp).collect()
    }

    /// Grid points for a subset of exponents (all when `None`), sorted by n
    /// with duplicates of n removed.
    pub fn points(&self, subset: Option<&[u32]>) -> Result<Vec<(u32, u64)>> {
        let mut exps = subset.map_or_else(|| self.exponents(), <[u32]>::to_vec);
        if exps.is_empty() {
            return Err(Error::Domain("empty exponent list".into()));
        }
        if let Some(j) = exps.iter().find(|&&j| j < self.n_min_exp || j > self.n_max_exp) {
            return Err(Error::Domain(format!(
                "exponent {j} outside the grid range [{}, {}]",
                self.n_min_exp, self.n_max_exp
            )));
        }
        exps.sort_unstable();
        let mut out: Vec<(u32, u64)> = Vec::with_capacity(exps.len());
        for j in exps {
            let n = self.n_at(j);
            if out.last().map_or(true, |&(_, m)| m != n) {
                out.push((j, n));
            }
        }
        Ok(out)
    }
}

/// Everything an experiment needs besides its own parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub walk: WalkModel,
    /// Scenery law and χ; its seed is replaced per scenery draw.
    pub scenery: ScenerySpec,
    pub grid: Grid,
    pub t_max: f64,
    pub master_seed: u64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        self.walk.validate()?;
        self.scenery.validate()?;
        self.grid.validate()?;
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::Domain(format!("T must be positive, got {}", self.t_max)));
        }
        Ok(())
    }

    pub fn schedule(&self) -> TruncationSchedule {
        TruncationSchedule::new(self.scenery.chi).expect("χ validated with the scenery")
    }

    pub fn walk_label(&self) -> String {
        self.walk.label()
    }

    pub fn scenery_label(&self) -> String {
        use crate::scenery::SceneryLaw::*;
        let law = match self.scenery.law {
            Pareto { beta, p_positive } => format!("pareto(beta={beta}, p_positive={p_positive})"),
            other => other.name().to_string(),
        };
        format!("{law}, chi={}", self.scenery.chi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_and_fractional_grids() {
        let g = Grid::new(2.0, 10, 12).unwrap();
        assert_eq!(g.points(None).unwrap(), vec![(10, 1024), (11, 2048), (12, 4096)]);
        let g = Grid::new(1.1, 8, 10).unwrap();
        // 1.1^8 = 2.1435…, 1.1^9 = 2.3579…, 1.1^10 = 2.5937…: all floor to 2
        assert_eq!(g.points(None).unwrap(), vec![(8, 2)]);
        assert!(g.points(Some(&[11])).is_err());
    }

    #[test]
    fn ratio_outside_range_rejected() {
        assert!(Grid::new(2.5, 1, 3).is_err());
        assert!(Grid::new(1.0, 1, 3).is_err());
        assert!(Grid::new(2.0, 0, 3).is_err());
        assert!(Grid::new(2.0, 5, 3).is_err());
    }
}
