//! Base spaces: simplicial complexes and differential graded ring models.

pub mod builtin;
pub mod dgring;
pub mod simplicial;

pub use builtin::{builtin_expr, builtin_space, exterior_model, product_model};
pub use dgring::{truncation_bound, CocycleRef, DgRingModel, ProductEntry, DEFAULT_TRUNCATION};
pub use simplicial::{cohomology_ring, CohomologyRing, SimplicialComplex};
