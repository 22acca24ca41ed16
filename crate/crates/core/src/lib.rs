//! Exact counting and measure-estimation toolkit for unit-simplex censuses
//! in a paraboloid norm over anisotropically scaled integer lattices.
//!
//! Layers, bottom up: exact integer machinery (`intmath`, `sublattice`),
//! the geometry of the body and lattice (`geometry`), number-theoretic
//! counting (`numbertheory`), the simplex censuses (`census`), the
//! measure-side estimators (`incidence`, `cantor`), and exponent
//! certification (`analysis`).

pub mod analysis;
pub mod cantor;
pub mod census;
pub mod error;
pub mod geometry;
pub mod incidence;
pub mod intmath;
pub mod numbertheory;
pub mod records;
pub mod rng;
pub mod sublattice;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Artifact version stamped into run records and cache keys.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
