//! Smith normal form with unimodular transforms.
//!
//! For an integer matrix `M` we compute unimodular `U`, `V` and a diagonal `D`
//! with `U·M·V = D`, the nonzero diagonal entries positive and forming a
//! divisibility chain. `U⁻¹` is tracked alongside `U` so that image lattices and
//! sections of quotient groups can be read off without a separate inversion.

use crate::matrix::Matrix;
use crate::scalar::IntScalar;

#[derive(Clone, Debug)]
pub struct SmithForm<T> {
    pub u: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl<T: IntScalar> SmithForm<T> {
    /// Nonzero diagonal entries `d₁ | d₂ | … | d_rank`.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nontrivial invariant factors: the diagonal with the units dropped.
    pub fn invariant_factors(&self) -> Vec<T> {
        self.diagonal()
            .into_iter()
            .filter(|x| !x.is_one())
            .collect()
    }
}

struct Work<T> {
    a: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
}

impl<T: IntScalar> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    /// row[t] += c·row[s]
    fn add_row(&mut self, t: usize, s: usize, c: &T) {
        self.a.add_row_multiple(t, s, c);
        self.u.add_row_multiple(t, s, c);
        self.u_inv.add_col_multiple(s, t, &-c.clone());
    }

    /// col[t] += c·col[s]
    fn add_col(&mut self, t: usize, s: usize, c: &T) {
        self.a.add_col_multiple(t, s, c);
        self.v.add_col_multiple(t, s, c);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest nonzero |entry| in the block `[t.., t..]`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, T)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    let done = ax.is_one();
                    best = Some((i, j, ax));
                    if done {
                        return best.map(|(i, j, _)| (i, j));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

pub fn smith_normal_form<T: IntScalar>(m: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        u: Matrix::identity(rows),
        u_inv: Matrix::identity(rows),
        v: Matrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.min_pivot(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            // Clear column t below the pivot; any remainder becomes a smaller pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let q = w.a[(i, t)].div_floor(&w.a[(t, t)]);
                w.add_row(i, t, &-q);
                if !w.a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let i = smallest_in_col(&w.a, t, t);
                w.swap_rows(t, i);
                continue;
            }
            for j in t + 1..cols {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let q = w.a[(t, j)].div_floor(&w.a[(t, t)]);
                w.add_col(j, t, &-q);
                if !w.a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let j = smallest_in_row(&w.a, t, t);
                w.swap_cols(t, j);
                continue;
            }
            // Pivot must divide the rest of the block.
            let p = w.a[(t, t)].clone();
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => w.add_row(t, i, &T::one()),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    SmithForm {
        u: w.u,
        u_inv: w.u_inv,
        d: w.a,
        v: w.v,
        rank: t,
    }
}

fn smallest_in_col<T: IntScalar>(a: &Matrix<T>, col: usize, from: usize) -> usize {
    (from..a.rows())
        .filter(|&i| !a[(i, col)].is_zero())
        .min_by(|&x, &y| a[(x, col)].abs().cmp(&a[(y, col)].abs()))
        .expect("nonzero entry present")
}

fn smallest_in_row<T: IntScalar>(a: &Matrix<T>, row: usize, from: usize) -> usize {
    (from..a.cols())
        .filter(|&j| !a[(row, j)].is_zero())
        .min_by(|&x, &y| a[(row, x)].abs().cmp(&a[(row, y)].abs()))
        .expect("nonzero entry present")
}
