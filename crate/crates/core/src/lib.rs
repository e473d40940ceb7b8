//! Splitting tessellations and Poisson great hypersphere tessellations of the
//! d-dimensional unit sphere: exact-in-distribution simulation, geometric
//! functionals, closed-form references and a Monte Carlo comparison harness.
//!
//! The crate is organised around the pipeline
//!
//! `sphgeo` (spherical geometry kernel)
//!   -> `dirdist` (direction distributions and hitting measures)
//!   -> `splitproc` / `poissontess` (the two tessellation models)
//!   -> `analytics` (closed-form reference values)
//!   -> `estimate` (Monte Carlo estimators and pass/fail comparison reports).

pub mod analytics;
pub mod dirdist;
pub mod error;
pub mod estimate;
pub mod poissontess;
pub mod quad;
pub mod special;
pub mod sphgeo;
pub mod splitproc;
pub mod verify;

pub use error::SphereSplitError;

/// Schema/version tag written as the first comment line of every CSV export.
pub fn csv_schema_header(schema: &str) -> String {
    format!("# sphere-split v{} schema={}", env!("CARGO_PKG_VERSION"), schema)
}
