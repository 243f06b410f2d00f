//! Gaussian elimination over exact fields.

use crate::matrix::Matrix;
use crate::scalar::FieldScalar;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<T: FieldScalar>(m: &mut Matrix<T>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row == m.rows() {
            break;
        }
        let Some(p) = (row..m.rows()).find(|&i| !m[(i, col)].is_zero()) else {
            continue;
        };
        m.swap_rows(row, p);
        let inv = T::one() / m[(row, col)].clone();
        for j in 0..m.cols() {
            let v = m[(row, j)].clone() * inv.clone();
            m[(row, j)] = v;
        }
        for i in 0..m.rows() {
            if i != row && !m[(i, col)].is_zero() {
                let c = -m[(i, col)].clone();
                m.add_row_multiple(i, row, &c);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<T: FieldScalar>(m: &Matrix<T>) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of the null space, one column per free variable.
pub fn kernel_basis<T: FieldScalar>(m: &Matrix<T>) -> Matrix<T> {
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let cols: Vec<Vec<T>> = free
        .iter()
        .map(|&f| {
            let mut x = vec![T::zero(); m.cols()];
            x[f] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[(i, f)].clone();
            }
            x
        })
        .collect();
    Matrix::from_columns(m.cols(), &cols)
}
