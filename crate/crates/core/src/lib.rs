//! Torus bundles with 3-form flux over finite base models: cohomology,
//! Leray–Serre spectral sequences, topological T-duality and twisted
//! rational cohomology.

pub mod bundle;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod onn;
pub mod space;
pub mod tduality;
pub mod twisted;

pub use error::{Result, TdkError};
pub use tdk_linalg::{FgGroup, Int, IntMatrix, Rat, RatMatrix};
