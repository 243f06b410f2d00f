//! Smith forms checked against determinantal divisors, and solves checked
//! against exhaustive search.

use num_integer::Integer;
use proptest::prelude::*;
use tdk_linalg::{cokernel, smith_normal_form, solve, FgAbelianGroup, Matrix, Solution};

fn m(rows: &[&[i64]]) -> Matrix<i64> {
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect(), cols).unwrap()
}

fn det(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| *x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * a[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// `d_k = D_k / D_{k−1}` where `D_k` is the gcd of all k×k minors.
fn invariant_factors(a: &Matrix<i64>) -> Vec<i64> {
    let rows = a.to_rows();
    let mut divisors = vec![1i64];
    for k in 1..=a.rows().min(a.cols()) {
        let mut g = 0i64;
        for rs in subsets(a.rows(), k) {
            for cs in subsets(a.cols(), k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| w[1] / w[0]).collect()
}

#[test]
fn small_smith_example() {
    let a = m(&[&[2, 4], &[6, 8]]);
    let s = smith_normal_form(&a);
    assert_eq!(s.diagonal(), vec![2, 4]);
    assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
}

#[test]
fn small_solve_example() {
    let a = m(&[&[2, 4], &[6, 8]]);
    assert_eq!(solve(&a, &[2, 6]).unwrap(), Solution::Solved(vec![1, 0]));
    assert!(!solve(&a, &[1, 0]).unwrap().is_solved());
}

#[test]
fn small_group_examples() {
    assert_eq!(cokernel(&m(&[&[2, 4], &[6, 8]])).to_string(), "Z/2 + Z/4");
    let g = FgAbelianGroup::subquotient(2, &Matrix::identity(2), &m(&[&[2, 0], &[0, 3]])).unwrap();
    assert_eq!(g.to_string(), "Z/6");
    assert_eq!(cokernel(&m(&[&[0, 0]])).to_string(), "Z");
}

fn matrix_strategy() -> impl Strategy<Value = Matrix<i64>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)
            .prop_map(move |rows| Matrix::from_rows(rows, c).unwrap())
    })
}

proptest! {
    #[test]
    fn smith_matches_determinantal_divisors(a in matrix_strategy()) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.diagonal(), invariant_factors(&a));
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(a.rows()));
    }

    #[test]
    fn solve_agrees_with_search(a in matrix_strategy(), b in prop::collection::vec(-6i64..=6, 4)) {
        let b = &b[..a.rows()];
        let found = {
            let range: Vec<i64> = (-12..=12).collect();
            let mut x = vec![0i64; a.cols()];
            let mut hit = false;
            'outer: loop {
                if a.mul_vec(&x) == b {
                    hit = true;
                    break;
                }
                for i in 0..x.len() {
                    if x[i] < *range.last().unwrap() {
                        x[i] += 1;
                        continue 'outer;
                    }
                    x[i] = range[0];
                }
                break;
            }
            hit
        };
        match solve(&a, b).unwrap() {
            Solution::Solved(x) => prop_assert_eq!(a.mul_vec(&x), b.to_vec()),
            // a bounded search can miss large solutions but never finds a false one
            Solution::Obstructed { .. } => prop_assert!(!found),
        }
    }
}
