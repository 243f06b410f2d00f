//! Cohomology computations checked against ranks modulo primes, which do not
//! go through Smith normal form at all.

use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use tdk_core::bundle::KoszulModel;
use tdk_core::space::builtin::{heisenberg, sphere, surface, torus};
use tdk_core::space::simplicial::{
    boundary_tetrahedron, cohomology_ring_with, seven_vertex_torus, six_vertex_rp2,
};
use tdk_core::space::{builtin_expr, DgRingModel, SimplicialComplex};
use tdk_core::{FgGroup, Int, IntMatrix};

const BIG_PRIME: i64 = 1_000_003;

fn rank_mod(m: &IntMatrix, p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m
        .to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| (x % Int::from(p)).to_i64().unwrap().rem_euclid(p))
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * inv % p;
                for k in c..cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// `dim Hᵏ(C ⊗ 𝔽_p)` from the differentials alone.
fn field_betti(dims: &[usize], d: &dyn Fn(usize) -> IntMatrix, p: i64) -> Vec<usize> {
    let top = dims.len() - 1;
    (0..=top)
        .map(|k| {
            let out = if k < top { rank_mod(&d(k), p) } else { 0 };
            let inc = if k > 0 { rank_mod(&d(k - 1), p) } else { 0 };
            dims[k] - out - inc
        })
        .collect()
}

/// Universal coefficients: `Hᵏ ⊗ 𝔽_p ⊕ Tor(Hᵏ⁺¹, 𝔽_p)`.
fn uct(groups: &[FgGroup], p: i64) -> Vec<usize> {
    let divisible = |g: &FgGroup| {
        g.torsion()
            .iter()
            .filter(|t| (*t % Int::from(p)).is_zero())
            .count()
    };
    (0..groups.len())
        .map(|k| groups[k].rank() + divisible(&groups[k]) + groups.get(k + 1).map_or(0, divisible))
        .collect()
}

fn check_complex(groups: &[FgGroup], dims: &[usize], d: &dyn Fn(usize) -> IntMatrix, what: &str) {
    for p in [2, 3, 5, 7, BIG_PRIME] {
        assert_eq!(uct(groups, p), field_betti(dims, d, p), "{what}, p = {p}");
    }
}

fn check_simplicial(k: &SimplicialComplex, expected: &[&str]) {
    let groups: Vec<FgGroup> = (0..=k.dim()).map(|d| k.cohomology(d)).collect();
    let shown: Vec<String> = groups.iter().map(ToString::to_string).collect();
    assert_eq!(shown, expected);
    let dims: Vec<usize> = (0..=k.dim()).map(|d| k.count(d)).collect();
    check_complex(&groups, &dims, &|d| k.coboundary(d), "simplicial");
}

fn check_bundle(m: &KoszulModel, expected: Option<&[&str]>) {
    let groups: Vec<FgGroup> = (0..=m.top_degree()).map(|k| m.cohomology(k)).collect();
    if let Some(e) = expected {
        let shown: Vec<String> = groups.iter().map(ToString::to_string).collect();
        assert_eq!(shown, e);
    }
    let dims: Vec<usize> = (0..=m.top_degree()).map(|k| m.dim(k)).collect();
    check_complex(&groups, &dims, &|k| m.d(k).clone(), "bundle");
}

fn int(x: i64) -> Int {
    Int::from(x)
}

fn line(base: &Arc<DgRingModel>, zeta: Vec<i64>) -> KoszulModel {
    KoszulModel::bundle(base.clone(), vec![zeta.into_iter().map(int).collect()]).unwrap()
}

#[test]
fn simplicial_oracles() {
    check_simplicial(&boundary_tetrahedron(), &["Z", "0", "Z"]);
    check_simplicial(&seven_vertex_torus(), &["Z", "Z^2", "Z"]);
    check_simplicial(&six_vertex_rp2(), &["Z", "0", "Z/2"]);
}

#[test]
fn euler_characteristic_matches_ranks() {
    for k in [boundary_tetrahedron(), seven_vertex_torus(), six_vertex_rp2()] {
        let alt: i64 = (0..=k.dim())
            .map(|d| {
                let r = k.cohomology(d).rank() as i64;
                if d % 2 == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum();
        assert_eq!(alt, k.euler_characteristic());
    }
}

#[test]
fn representative_choice_does_not_change_products() {
    let k = seven_vertex_torus();
    let groups: Vec<FgGroup> = (0..=2).map(|d| k.cohomology(d)).collect();
    let mut reps: Vec<Vec<Vec<Int>>> = groups.iter().map(FgGroup::generators).collect();
    reps[0] = vec![vec![int(1); k.count(0)]];
    let first = cohomology_ring_with(&k, groups.clone(), reps.clone()).unwrap();
    // shift every degree-1 representative by a different coboundary
    let d0 = k.coboundary(0);
    for (i, r) in reps[1].iter_mut().enumerate() {
        let mut f = vec![int(0); k.count(0)];
        f[i % k.count(0)] = int(3);
        f[(i + 2) % k.count(0)] = int(-1);
        for (x, y) in r.iter_mut().zip(d0.mul_vec(&f)) {
            *x += y;
        }
    }
    let second = cohomology_ring_with(&k, groups, reps).unwrap();
    assert_eq!(first.model, second.model);
}

#[test]
fn hopf_lens_and_heisenberg() {
    let s2 = Arc::new(sphere(2).unwrap());
    check_bundle(&line(&s2, vec![1]), Some(&["Z", "0", "0", "Z"]));
    for k in [2, 3, 5] {
        let shown = format!("Z/{k}");
        check_bundle(&line(&s2, vec![k]), Some(&["Z", "0", &shown, "Z"]));
    }
    let t2 = Arc::new(torus(2).unwrap());
    for k in 1..=3 {
        let h2 = if k == 1 { "Z^2".to_string() } else { format!("Z^2 + Z/{k}") };
        check_bundle(&line(&t2, vec![k]), Some(&["Z", "Z^2", &h2, "Z"]));
    }
}

#[test]
fn assorted_bundles_satisfy_uct() {
    let t3 = Arc::new(torus(3).unwrap());
    check_bundle(&line(&t3, vec![1, 0, 0]), None);
    check_bundle(&line(&t3, vec![2, 3, 0]), None);
    let two = KoszulModel::bundle(t3.clone(), vec![vec![int(1), int(0), int(0)], vec![int(0), int(0), int(2)]]).unwrap();
    check_bundle(&two, None);
    let h = Arc::new(heisenberg().unwrap());
    check_bundle(&line(&h, vec![0, 1, 0]), None);
    let s = Arc::new(surface(2).unwrap());
    check_bundle(&line(&s, vec![4]), None);
}

#[test]
fn trivial_bundles_are_products() {
    for (base, n, product) in [
        ("sphere:2", 1, "sphere:2*sphere:1"),
        ("torus:2", 1, "torus:3"),
        ("sphere:1", 2, "torus:3"),
        ("sphere:3", 1, "sphere:3*sphere:1"),
    ] {
        let b = Arc::new(builtin_expr(base).unwrap());
        let zero = vec![int(0); b.dim(2)];
        let m = KoszulModel::bundle(b, vec![zero; n]).unwrap();
        let p = builtin_expr(product).unwrap();
        for k in 0..=m.top_degree() {
            assert!(m.cohomology(k).isomorphic(&p.cohomology(k)), "{base} x T^{n}, degree {k}");
        }
    }
}

fn cup_matrix(base: &DgRingModel, zeta: &[Int], k: usize) -> IntMatrix {
    let cols: Vec<Vec<Int>> = (0..base.dim(k))
        .map(|j| {
            let mut e = vec![int(0); base.dim(k)];
            e[j] = int(1);
            base.mul(2, zeta, k, &e)
        })
        .collect();
    IntMatrix::from_columns(base.dim(k + 2), &cols)
}

#[test]
fn gysin_sequence_is_exact_over_fields() {
    // Bases with zero differential, so H*(B) is the model itself.
    let cases: Vec<(DgRingModel, Vec<i64>)> = vec![
        (sphere(2).unwrap(), vec![1]),
        (sphere(2).unwrap(), vec![4]),
        (torus(2).unwrap(), vec![3]),
        (torus(3).unwrap(), vec![1, 2, 0]),
        (surface(2).unwrap(), vec![2]),
        (builtin_expr("sphere:2*sphere:2").unwrap(), vec![1, 1]),
    ];
    for (base, zeta) in cases {
        let zeta: Vec<Int> = zeta.into_iter().map(int).collect();
        let base = Arc::new(base);
        let m = KoszulModel::bundle(base.clone(), vec![zeta.clone()]).unwrap();
        let dims: Vec<usize> = (0..=m.top_degree()).map(|k| m.dim(k)).collect();
        for p in [2, 3, BIG_PRIME] {
            let betti = field_betti(&dims, &|k| m.d(k).clone(), p);
            for k in 0..=m.top_degree() {
                let coker = if k >= 2 {
                    base.dim(k) - rank_mod(&cup_matrix(&base, &zeta, k - 2), p)
                } else {
                    base.dim(k)
                };
                let ker = if k >= 1 {
                    base.dim(k - 1) - rank_mod(&cup_matrix(&base, &zeta, k - 1), p)
                } else {
                    0
                };
                assert_eq!(betti[k], coker + ker, "degree {k}, p = {p}");
            }
        }
    }
}

#[test]
fn e_infinity_matches_associated_graded() {
    let t3 = Arc::new(torus(3).unwrap());
    let s2 = Arc::new(sphere(2).unwrap());
    let h = Arc::new(heisenberg().unwrap());
    let models = vec![
        line(&s2, vec![1]),
        line(&s2, vec![3]),
        line(&t3, vec![1, 0, 0]),
        KoszulModel::bundle(t3.clone(), vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]]).unwrap(),
        line(&h, vec![0, 1, 0]),
        KoszulModel::bundle(Arc::new(sphere(1).unwrap()), vec![vec![], vec![]]).unwrap(),
    ];
    for m in models {
        let r = m.infinity_page();
        for k in 0..=m.top_degree().min(4) {
            for p in 0..=k {
                let e = m.ss_page(r, p, k - p).unwrap();
                assert!(e.infinity);
                let gr = m.associated_graded(k, p);
                assert!(e.group.isomorphic(&gr), "E_inf^({p},{}) = {} vs {}", k - p, e.group, gr);
            }
        }
    }
}

#[test]
fn second_differentials_follow_the_transgression() {
    let t3 = Arc::new(torus(3).unwrap());
    let models = vec![
        line(&Arc::new(sphere(2).unwrap()), vec![2]),
        line(&t3, vec![1, 0, 0]),
        KoszulModel::bundle(t3.clone(), vec![vec![int(1), int(0), int(0)], vec![int(0), int(2), int(1)]]).unwrap(),
        KoszulModel::bundle(Arc::new(torus(2).unwrap()), vec![vec![int(1)], vec![int(3)]]).unwrap(),
        KoszulModel::bundle(
            Arc::new(surface(2).unwrap()),
            vec![vec![int(1)], vec![int(0)], vec![int(2)]],
        )
        .unwrap(),
    ];
    for m in models {
        let n = m.rank();
        let d01 = m.ss_page(2, 0, 1).unwrap().outgoing;
        for i in 0..n {
            let image = d01.apply(&m.generator(i));
            let expected = m.pullback(2, &m.zetas()[i]);
            let target = &d01.target;
            assert_eq!(target.reduce(&image).unwrap(), target.reduce(&expected).unwrap());
        }
        let d02 = m.ss_page(2, 0, 2).unwrap().outgoing;
        for i in 0..n {
            for j in i + 1..n {
                let yy = m.mul(1, &m.generator(i), 1, &m.generator(j));
                let image = d02.apply(&yy);
                let expected = m.assemble(
                    3,
                    &[
                        (1 << j, m.zetas()[i].clone()),
                        (1 << i, m.zetas()[j].iter().map(|x| -x).collect()),
                    ],
                );
                let target = &d02.target;
                assert_eq!(target.reduce(&image).unwrap(), target.reduce(&expected).unwrap());
            }
        }
    }
}
