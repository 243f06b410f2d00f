//! Exact linear algebra for cochain computations.
//!
//! The algorithms are generic over the scalar traits in [`scalar`]; the rest of
//! the workspace uses the arbitrary-precision aliases below so that no
//! intermediate Smith-form entry can overflow.

pub mod error;
pub mod field;
pub mod group;
pub mod lattice;
pub mod matrix;
pub mod scalar;
pub mod snf;

pub use error::LinalgError;
pub use group::{cokernel, kernel, FgAbelianGroup, GroupHom, Kernel};
pub use lattice::{image_basis, kernel_basis, solve, solve_many, Solution};
pub use matrix::{Matrix, SparseMatrix};
pub use scalar::{FieldScalar, IntScalar, Scalar};
pub use snf::{smith_normal_form, SmithForm};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;
pub type IntSparse = SparseMatrix<BigInt>;
pub type FgGroup = FgAbelianGroup<BigInt>;
pub type IntGroupHom = GroupHom<BigInt>;

/// Converts an integer matrix to rationals.
pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.map(|x| BigRational::from_integer(x.clone()))
}
