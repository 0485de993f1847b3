//! The RWRS process, its truncated/recentered variants, the rescaled
//! polygonal interpolation and a catalog of bounded Lipschitz functionals.

mod diagnostics;
mod functional;
mod interp;
mod path;

pub use diagnostics::{
    enumerate_site, recentering_drift, site_index, site_influence, truncated_equals_raw, truncation_discrepancy,
    SiteInfluence, TruncationDiscrepancy,
};
pub use functional::{FunctionalId, FunctionalSpec};
pub use interp::{grid_len, normalizer, InterpolatedProcess, ProbeSummary, ProcessProbe};
pub use path::{accumulate, site_sum, truncated_accumulate, truncated_accumulate_with, RwrsPath, Variant};
