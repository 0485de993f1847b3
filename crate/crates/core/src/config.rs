//! TOML experiment configuration. Unknown keys are errors, and every
//! validation error names the offending key path.

use crate::analysis::experiments::ExperimentSpec;
use crate::analysis::sigma::cauchy_scale_oracle;
use crate::analysis::{EnsembleConfig, Grid};
use crate::error::{Error, Result};
use crate::scenery::{moment_audit, SceneryLaw, ScenerySpec};
use crate::walk::{Step, WalkModel};
use serde::{Deserialize, Serialize};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "RWRS_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Worker threads; falls back to `RWRS_THREADS`, then to all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    pub walk: WalkConfig,
    pub scenery: SceneryConfig,
    pub grid: GridConfig,
    #[serde(rename = "experiment", default)]
    pub experiments: Vec<ExperimentSpec>,
}

fn default_output_dir() -> String {
    "runs".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKindName {
    Simple,
    Diagonal,
    Custom,
    HeavyTail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub kind: WalkKindName,
    /// Increments of a custom walk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<Step>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Lattice spacing of the heavy-tailed walk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<i64>,
    /// Cauchy scale of the heavy-tailed walk; computed by the oracle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy_scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneryName {
    Rademacher,
    Gaussian,
    Pareto,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneryConfig {
    pub distribution: SceneryName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_positive: Option<f64>,
    #[serde(default = "default_chi")]
    pub chi: f64,
}

fn default_chi() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_ratio")]
    pub b: f64,
    pub n_min_exp: u32,
    pub n_max_exp: u32,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
}

fn default_ratio() -> f64 {
    2.0
}

fn default_t_max() -> f64 {
    1.0
}

/// A validated configuration ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConfig {
    /// The configuration with every default and derived value filled in.
    pub config: ExperimentConfig,
    pub ensemble: EnsembleConfig,
    pub experiments: Vec<ExperimentSpec>,
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let path = path.into();
    move |e| match e {
        Error::Config { path: inner, message } => Error::config(format!("{path}.{inner}"), message),
        other => Error::config(path, other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.message().to_string();
            match inner.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    Error::config(path, format!("{message} (line {line})"))
                }
                None => Error::config(path, message),
            }
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn walk_model(&self) -> Result<WalkModel> {
        let w = &self.walk;
        let lattice_only = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::config(format!("walk.{field}"), "only valid for kind = \"heavy_tail\""))
            } else {
                Ok(())
            }
        };
        let model = match w.kind {
            WalkKindName::HeavyTail => {
                if w.steps.is_some() {
                    return Err(Error::config("walk.steps", "only valid for kind = \"custom\""));
                }
                let mut model = WalkModel::heavy_tail();
                if let WalkModel::HeavyTail1D(h) = &mut model {
                    h.span = w.span.unwrap_or(1);
                    h.cauchy_scale = w.cauchy_scale;
                }
                model
            }
            kind => {
                lattice_only("span", w.span.is_some())?;
                lattice_only("cauchy_scale", w.cauchy_scale.is_some())?;
                match kind {
                    WalkKindName::Custom => {
                        let steps = w
                            .steps
                            .clone()
                            .ok_or_else(|| Error::config("walk.steps", "a custom walk needs a steps list"))?;
                        let label = w.label.clone().unwrap_or_else(|| "custom".into());
                        WalkModel::custom(label, steps).map_err(at("walk.steps"))?
                    }
                    _ if w.steps.is_some() => {
                        return Err(Error::config("walk.steps", "only valid for kind = \"custom\""))
                    }
                    WalkKindName::Simple => WalkModel::simple(),
                    _ => WalkModel::diagonal(),
                }
            }
        };
        if w.label.is_some() && w.kind != WalkKindName::Custom {
            return Err(Error::config("walk.label", "only valid for kind = \"custom\""));
        }
        model.validate().map_err(at("walk"))?;
        Ok(model)
    }

    fn scenery_spec(&self) -> Result<ScenerySpec> {
        let s = &self.scenery;
        let law = match s.distribution {
            SceneryName::Pareto => SceneryLaw::Pareto {
                beta: s.beta.ok_or_else(|| Error::config("scenery.beta", "pareto scenery needs beta"))?,
                p_positive: s.p_positive.unwrap_or(0.5),
            },
            other => {
                if s.beta.is_some() {
                    return Err(Error::config("scenery.beta", "only valid for distribution = \"pareto\""));
                }
                if s.p_positive.is_some() {
                    return Err(Error::config("scenery.p_positive", "only valid for distribution = \"pareto\""));
                }
                match other {
                    SceneryName::Rademacher => SceneryLaw::Rademacher,
                    SceneryName::Gaussian => SceneryLaw::Gaussian,
                    _ => SceneryLaw::Zero,
                }
            }
        };
        let key = match law {
            SceneryLaw::Pareto { beta, .. } if !(beta > 2.0 && beta <= 4.0) => "scenery.beta",
            SceneryLaw::Pareto { p_positive, .. } if !(0.0..=1.0).contains(&p_positive) => "scenery.p_positive",
            _ if !(s.chi.is_finite() && s.chi > 0.0) => "scenery.chi",
            _ => "scenery",
        };
        let spec = ScenerySpec::new(law, s.chi, self.master_seed).map_err(at(key))?;
        moment_audit(&spec).map_err(at(key))?;
        Ok(spec)
    }

    fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        if !(g.b > 1.0 && g.b <= 2.0) {
            return Err(Error::config("grid.b", format!("must lie in (1, 2], got {}", g.b)));
        }
        if !(g.t_max.is_finite() && g.t_max > 0.0) {
            return Err(Error::config("grid.t_max", format!("must be positive, got {}", g.t_max)));
        }
        Grid::new(g.b, g.n_min_exp, g.n_max_exp).map_err(|e| {
            let key = if g.n_min_exp > g.n_max_exp || e.to_string().contains("below 2") {
                "grid.n_min_exp"
            } else {
                "grid.n_max_exp"
            };
            at(key)(e)
        })
    }

    /// Validate every section and fill in derived values: this is the
    /// `validate` command. The heavy-tailed walk's Cauchy scale is computed
    /// by the oracle when not given.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1 (omit it for the default)"));
        }
        let mut walk = self.walk_model()?;
        let scenery = self.scenery_spec()?;
        let grid = self.grid()?;
        let mut config = self.clone();
        if let WalkModel::HeavyTail1D(h) = &mut walk {
            if h.cauchy_scale.is_none() {
                let a = cauchy_scale_oracle(h).map_err(at("walk"))?.scale;
                h.cauchy_scale = Some(a);
                config.walk.cauchy_scale = Some(a);
            }
        }
        let ensemble = EnsembleConfig {
            walk,
            scenery,
            grid,
            t_max: self.grid.t_max,
            master_seed: self.master_seed,
        };
        if self.experiments.is_empty() {
            return Err(Error::config("experiment", "at least one [[experiment]] table is required"));
        }
        for (i, e) in self.experiments.iter().enumerate() {
            e.validate(&ensemble).map_err(at(format!("experiment[{i}]")))?;
        }
        Ok(ResolvedConfig {
            config,
            experiments: self.experiments.clone(),
            ensemble,
        })
    }
}

/// Worker count: the configured value, else `RWRS_THREADS`, else all cores.
pub fn resolve_threads(configured: Option<usize>, env: Option<&str>) -> Result<usize> {
    if let Some(n) = configured {
        return Ok(n);
    }
    if let Some(v) = env {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}
