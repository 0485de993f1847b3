//! Simulation and statistical verification of random walks in random
//! sceneries (RWRS): Z_n = Σ_{i ≤ n} ξ(S_i), with the truncation and
//! recentering machinery used to pass the functional CLT from the annealed
//! to the quenched law.

pub mod analysis;
pub mod config;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod runner;
pub mod rwrs;
pub mod scenery;
pub mod seed;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::Site;
