//! Sublattices of `ℤᴺ` and integer linear systems, all via Smith normal form.

use crate::error::LinalgError;
use crate::matrix::Matrix;
use crate::scalar::IntScalar;
use crate::snf::smith_normal_form;

/// Basis (as columns) of the integer kernel `{x : M·x = 0}`.
pub fn kernel_basis<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(m);
    let idx: Vec<usize> = (s.rank..m.cols()).collect();
    let all: Vec<usize> = (0..m.cols()).collect();
    s.v.select(&all, &idx)
}

/// Basis (as columns) of the lattice spanned by the columns of `g`.
pub fn image_basis<T: IntScalar>(g: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(g);
    // G·V = U⁻¹·D, so d_j·U⁻¹[:, j] (j < rank) span the column lattice.
    let cols: Vec<Vec<T>> = (0..s.rank)
        .map(|j| {
            let d = s.d[(j, j)].clone();
            s.u_inv
                .column(j)
                .into_iter()
                .map(|x| x * d.clone())
                .collect()
        })
        .collect();
    Matrix::from_columns(g.rows(), &cols)
}

/// Outcome of an integer linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution<T> {
    Solved(Vec<T>),
    /// `(U·b)[row]` is `residue`, which the diagonal entry `divisor` does not
    /// divide (`divisor = 0` means the row lies outside the rank).
    Obstructed {
        row: usize,
        divisor: T,
        residue: T,
    },
}

impl<T> Solution<T> {
    pub fn into_option(self) -> Option<Vec<T>> {
        match self {
            Solution::Solved(x) => Some(x),
            Solution::Obstructed { .. } => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Solution::Solved(_))
    }
}

/// Solves `M·x = b` over the integers. The particular solution returned sets
/// every free coordinate (in the Smith basis) to zero, which makes it
/// deterministic for a given `M`.
pub fn solve<T: IntScalar>(m: &Matrix<T>, b: &[T]) -> Result<Solution<T>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve right-hand side",
            expected: m.rows(),
            found: b.len(),
            index: None,
        });
    }
    let s = smith_normal_form(m);
    let c = s.u.mul_vec(b);
    let mut y = vec![T::zero(); m.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let d = &s.d[(i, i)];
            if !ci.is_multiple_of(d) {
                return Ok(Solution::Obstructed {
                    row: i,
                    divisor: d.clone(),
                    residue: ci.clone(),
                });
            }
            y[i] = ci.div_floor(d);
        } else if !ci.is_zero() {
            return Ok(Solution::Obstructed {
                row: i,
                divisor: T::zero(),
                residue: ci.clone(),
            });
        }
    }
    Ok(Solution::Solved(s.v.mul_vec(&y)))
}

/// Solves `M·X = B` column by column; `None` if any column is unsolvable.
pub fn solve_many<T: IntScalar>(
    m: &Matrix<T>,
    b: &Matrix<T>,
) -> Result<Result<Matrix<T>, usize>, LinalgError> {
    if b.rows() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: "solve right-hand side",
            expected: m.rows(),
            found: b.rows(),
            index: None,
        });
    }
    let s = smith_normal_form(m);
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        let c = s.u.mul_vec(&b.column(j));
        let mut y = vec![T::zero(); m.cols()];
        for (i, ci) in c.iter().enumerate() {
            if i < s.rank {
                let d = &s.d[(i, i)];
                if !ci.is_multiple_of(d) {
                    return Ok(Err(j));
                }
                y[i] = ci.div_floor(d);
            } else if !ci.is_zero() {
                return Ok(Err(j));
            }
        }
        cols.push(s.v.mul_vec(&y));
    }
    Ok(Ok(Matrix::from_columns(m.cols(), &cols)))
}

/// Rank of an integer matrix (equal to its rank over ℚ).
pub fn rank<T: IntScalar>(m: &Matrix<T>) -> usize {
    smith_normal_form(m).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn big(rows: &[&[i64]]) -> Matrix<BigInt> {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            c,
        )
        .unwrap()
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve(&big(&[&[2]]), &v(&[4])).unwrap(),
            Solution::Solved(v(&[2]))
        );
        assert!(!solve(&big(&[&[2]]), &v(&[3])).unwrap().is_solved());
        let m = big(&[&[2, 4], &[6, 8]]);
        let x = solve(&m, &v(&[2, 6])).unwrap().into_option().unwrap();
        assert_eq!(m.mul_vec(&x), v(&[2, 6]));
        assert_eq!(x, v(&[1, 0]));
        assert!(matches!(
            solve(&m, &v(&[1])),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_of_sum_map() {
        let k = kernel_basis(&big(&[&[1, 1]]));
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col == v(&[1, -1]) || col == v(&[-1, 1]));
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in 1usize..5, cols in 1usize..5, e in proptest::collection::vec(-6i64..7, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| e[i * 5 + j]).collect()).collect();
            let m = big(&data.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
            let k = kernel_basis(&m);
            prop_assert!(m.mul(&k).is_zero());
            prop_assert_eq!(k.cols() + image_basis(&m).cols(), cols);
        }

        #[test]
        fn solve_is_sound(rows in 1usize..4, cols in 1usize..4,
                          e in proptest::collection::vec(-6i64..7, 16),
                          b in proptest::collection::vec(-6i64..7, 4)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| e[i * 4 + j]).collect()).collect();
            let m = big(&data.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
            let rhs = v(&b[..rows]);
            match solve(&m, &rhs).unwrap() {
                Solution::Solved(x) => prop_assert_eq!(m.mul_vec(&x), rhs),
                Solution::Obstructed { divisor, residue, .. } => {
                    // divisor ∤ residue certifies no integer solution
                    prop_assert!(divisor.is_zero() || !residue.is_multiple_of(&divisor));
                }
            }
        }

        #[test]
        fn image_basis_spans_columns(rows in 1usize..4, cols in 1usize..4, e in proptest::collection::vec(-6i64..7, 16)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| e[i * 4 + j]).collect()).collect();
            let m = big(&data.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
            let basis = image_basis(&m);
            // every column of m is an integer combination of the basis and vice versa
            for j in 0..m.cols() {
                prop_assert!(solve(&basis, &m.column(j)).unwrap().is_solved());
            }
            for j in 0..basis.cols() {
                prop_assert!(solve(&m, &basis.column(j)).unwrap().is_solved());
            }
        }
    }
}
