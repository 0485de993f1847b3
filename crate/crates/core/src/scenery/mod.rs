//! The random scenery ξ as a lazily evaluated deterministic field, and its
//! truncated / recentered views.

mod audit;
mod field;
mod law;
mod truncation;

pub use audit::{moment_audit, MomentAudit};
pub use field::{FnScenery, PlantedField, QuenchedField, ResampledField, Scenery, ScenerySpec};
pub use law::SceneryLaw;
pub use truncation::{
    recenter, recenter_with, truncate, truncate_value, RecenteredView, TruncatedView, TruncationSchedule,
};
