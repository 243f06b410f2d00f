//! Scalar traits the matrix code is generic over.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// Anything that can live in a [`Matrix`](crate::Matrix): a commutative ring
/// with exact equality.
pub trait Scalar: Num + Clone + Debug + Neg<Output = Self> + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Clone + Debug + Neg<Output = T> + Send + Sync + 'static {}

/// Euclidean scalars: the rings Smith normal form and lattice computations run over.
///
/// Fixed-width integers satisfy the bounds but overflow silently in release
/// builds; the crate-level aliases use [`num_bigint::BigInt`].
pub trait IntScalar: Scalar + Integer + Signed + Ord + Display {}

impl<T> IntScalar for T where T: Scalar + Integer + Signed + Ord + Display {}

/// Exact fields. Pivoting assumes `x == 0` is decidable exactly, so floating
/// point types are deliberately not implementors.
pub trait FieldScalar: Scalar + Display {}

impl<T> FieldScalar for Ratio<T> where T: IntScalar + Clone {}
