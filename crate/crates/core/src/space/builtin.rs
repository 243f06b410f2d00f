//! Shipped base spaces and the Künneth product of models.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};
use tdk_linalg::{Int, Matrix};

use super::dgring::{truncation_bound, DgRingModel, ProductEntry};
use crate::error::{Result, TdkError};

/// Subsets of `0..n` of size `k`, as bitmasks, in lexicographic order of their
/// sorted index lists.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<u32> {
    fn go(start: usize, n: usize, k: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            go(i + 1, n, k - 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    go(0, n, k, 0, &mut out);
    out
}

/// Sign of `y_S · y_T = ± y_{S∪T}` in an exterior algebra, or `None` if they overlap.
pub(crate) fn wedge_sign(s: u32, t: u32) -> Option<bool> {
    if s & t != 0 {
        return None;
    }
    // count pairs (i in S, j in T) with i > j
    let mut inversions = 0u32;
    let mut tt = t;
    while tt != 0 {
        let j = tt.trailing_zeros();
        inversions += (s >> (j + 1)).count_ones();
        tt &= tt - 1;
    }
    Some(inversions % 2 == 1)
}

type Element = BTreeMap<u32, Int>;

fn ext_mul(x: &Element, y: &Element) -> Element {
    let mut out = Element::new();
    for (s, a) in x {
        for (t, b) in y {
            if let Some(neg) = wedge_sign(*s, *t) {
                let c = a * b;
                let e = out.entry(s | t).or_insert_with(Int::zero);
                if neg {
                    *e -= c;
                } else {
                    *e += c;
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn monomial(mask: u32) -> Element {
    Element::from([(mask, Int::one())])
}

/// Exterior algebra on degree-one generators `names`, with
/// `d(x_i) = Σ c·x_a x_b` for each `(a, b, c)` in `dgen[i]`, extended as a
/// derivation.
pub fn exterior_model(names: &[&str], dgen: &[Vec<(usize, usize, i64)>]) -> Result<DgRingModel> {
    let n = names.len();
    let bases: Vec<Vec<u32>> = (0..=n).map(|k| subsets(n, k)).collect();
    let pos = |k: usize, m: u32| bases[k].iter().position(|&x| x == m).expect("monomial");
    let labels = bases
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|&m| {
                    if m == 0 {
                        "1".to_string()
                    } else {
                        (0..n).filter(|i| m >> i & 1 == 1).map(|i| names[i]).collect()
                    }
                })
                .collect()
        })
        .collect();
    let dx: Vec<Element> = (0..n)
        .map(|i| {
            let mut e = Element::new();
            for &(a, b, c) in dgen.get(i).map_or(&[][..], Vec::as_slice) {
                for (m, v) in ext_mul(&monomial(1 << a), &monomial(1 << b)) {
                    *e.entry(m).or_insert_with(Int::zero) += v * Int::from(c);
                }
            }
            e
        })
        .collect();
    let mut diff = Vec::new();
    for k in 0..n {
        let mut m = Matrix::zeros(bases[k + 1].len(), bases[k].len());
        for (col, &s) in bases[k].iter().enumerate() {
            let idx: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
            for (j, &i) in idx.iter().enumerate() {
                let left = idx[..j].iter().fold(0u32, |a, &t| a | 1 << t);
                let right = idx[j + 1..].iter().fold(0u32, |a, &t| a | 1 << t);
                let term = ext_mul(&ext_mul(&monomial(left), &dx[i]), &monomial(right));
                for (mask, c) in term {
                    let row = pos(k + 1, mask);
                    if j % 2 == 0 {
                        m[(row, col)] += c;
                    } else {
                        m[(row, col)] -= c;
                    }
                }
            }
        }
        diff.push(m);
    }
    let mut products = Vec::new();
    for i in 1..=n {
        for j in 1..=n - i {
            for (a, &s) in bases[i].iter().enumerate() {
                for (b, &t) in bases[j].iter().enumerate() {
                    if let Some(neg) = wedge_sign(s, t) {
                        let c = if neg { -Int::one() } else { Int::one() };
                        products.push(ProductEntry {
                            i_deg: i,
                            i_idx: a,
                            j_deg: j,
                            j_idx: b,
                            result: vec![(pos(i + j, s | t), c)],
                        });
                    }
                }
            }
        }
    }
    DgRingModel::new(labels, diff, &products)
}

pub fn point() -> DgRingModel {
    DgRingModel::new(vec![vec!["1".to_string()]], vec![], &[]).expect("point model")
}

pub fn sphere(k: usize) -> Result<DgRingModel> {
    if !(1..=4).contains(&k) {
        return Err(TdkError::Parameter {
            name: "sphere".into(),
            message: format!("dimension must be 1..=4, got {k}"),
        });
    }
    check_bound(k)?;
    let mut labels = vec![Vec::new(); k + 1];
    labels[0].push("1".to_string());
    labels[k].push(format!("g{k}"));
    DgRingModel::new(labels, vec![], &[])
}

pub fn torus(k: usize) -> Result<DgRingModel> {
    if !(1..=3).contains(&k) {
        return Err(TdkError::Parameter {
            name: "torus".into(),
            message: format!("dimension must be 1..=3, got {k}"),
        });
    }
    check_bound(k)?;
    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    exterior_model(&refs, &[])
}

/// Closed orientable surface of genus `g ≥ 1`: `a_i b_i = w = −b_i a_i`.
pub fn surface(g: usize) -> Result<DgRingModel> {
    if g == 0 {
        return sphere(2);
    }
    if g > 16 {
        return Err(TdkError::Parameter {
            name: "surface".into(),
            message: format!("genus {g} too large"),
        });
    }
    check_bound(2)?;
    let mut h1: Vec<String> = (1..=g).map(|i| format!("a{i}")).collect();
    h1.extend((1..=g).map(|i| format!("b{i}")));
    let labels = vec![vec!["1".to_string()], h1, vec!["w".to_string()]];
    let mut products = Vec::new();
    for i in 0..g {
        for (x, y, c) in [(i, g + i, 1), (g + i, i, -1)] {
            products.push(ProductEntry {
                i_deg: 1,
                i_idx: x,
                j_deg: 1,
                j_idx: y,
                result: vec![(0, Int::from(c))],
            });
        }
    }
    DgRingModel::new(labels, vec![], &products)
}

/// `Λ(x, y, z)` with `dz = xy`.
pub fn heisenberg() -> Result<DgRingModel> {
    check_bound(3)?;
    exterior_model(&["x", "y", "z"], &[vec![], vec![], vec![(0, 1, 1)]])
}

fn check_bound(top: usize) -> Result<()> {
    let bound = truncation_bound();
    if top > bound {
        return Err(TdkError::Truncation { degree: top, bound });
    }
    Ok(())
}

pub fn builtin_space(name: &str, param: Option<i64>) -> Result<DgRingModel> {
    let need = |what: &str| -> Result<usize> {
        let p = param.ok_or_else(|| TdkError::Parameter {
            name: name.to_string(),
            message: format!("missing {what}"),
        })?;
        usize::try_from(p).map_err(|_| TdkError::Parameter {
            name: name.to_string(),
            message: format!("{what} must be nonnegative, got {p}"),
        })
    };
    match name {
        "point" => Ok(point()),
        "sphere" => sphere(need("dimension")?),
        "torus" => torus(need("dimension")?),
        "surface" => surface(need("genus")?),
        "heisenberg" => heisenberg(),
        other => Err(TdkError::UnknownBuiltin(other.to_string())),
    }
}

/// Parses `name[:param]` factors joined by `*`, e.g. `sphere:2*sphere:1`.
pub fn builtin_expr(expr: &str) -> Result<DgRingModel> {
    let mut acc: Option<DgRingModel> = None;
    for factor in expr.split('*') {
        let factor = factor.trim();
        let (name, param) = match factor.split_once(':') {
            Some((n, p)) => {
                let v = p.trim().parse::<i64>().map_err(|_| TdkError::Parameter {
                    name: n.to_string(),
                    message: format!("not an integer: {p:?}"),
                })?;
                (n.trim(), Some(v))
            }
            None => (factor, None),
        };
        let m = builtin_space(name, param)?;
        acc = Some(match acc {
            None => m,
            Some(a) => product_model(&a, &m)?,
        });
    }
    acc.ok_or_else(|| TdkError::UnknownBuiltin(expr.to_string()))
}

/// Tensor product model with the Koszul sign
/// `(a⊗b)(a'⊗b') = (−1)^{|b||a'|} aa'⊗bb'`. Labels of the second factor that
/// clash with labels of the first get a `'` suffix.
pub fn product_model(a: &DgRingModel, b: &DgRingModel) -> Result<DgRingModel> {
    for (f, m) in [a, b].iter().enumerate() {
        for k in 0..=m.top_degree() {
            if !m.cohomology(k).torsion().is_empty() {
                return Err(TdkError::Torsion { factor: f, degree: k });
            }
        }
    }
    let top = a.top_degree() + b.top_degree();
    check_bound(top)?;
    let taken: HashSet<&str> = a.all_labels().iter().flatten().map(String::as_str).collect();
    let rename = |l: &str| {
        let mut s = l.to_string();
        while taken.contains(s.as_str()) {
            s.push('\'');
        }
        s
    };
    // basis of degree k: (i, x, y) with x in A_i, y in B_{k-i}, first factor degree descending
    let mut basis: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); top + 1];
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    for (k, (bk, lk)) in basis.iter_mut().zip(labels.iter_mut()).enumerate() {
        for i in (0..=k.min(a.top_degree())).rev() {
            let j = k - i;
            for x in 0..a.dim(i) {
                for y in 0..b.dim(j) {
                    bk.push((i, x, y));
                    let la = &a.labels(i)[x];
                    let lb = rename(&b.labels(j)[y]);
                    lk.push(match (i, j) {
                        (0, 0) => "1".to_string(),
                        (0, _) => lb,
                        (_, 0) => la.clone(),
                        _ => format!("{la}{lb}"),
                    });
                }
            }
        }
    }
    let pos = |k: usize, key: (usize, usize, usize)| {
        basis[k].iter().position(|&e| e == key).expect("basis element")
    };
    let mut diff = Vec::new();
    for k in 0..top {
        let mut m = Matrix::zeros(basis[k + 1].len(), basis[k].len());
        for (col, &(i, x, y)) in basis[k].iter().enumerate() {
            let j = k - i;
            let da = a.d(i);
            for r in 0..a.dim(i + 1) {
                if !da[(r, x)].is_zero() {
                    m[(pos(k + 1, (i + 1, r, y)), col)] += &da[(r, x)];
                }
            }
            let db = b.d(j);
            for r in 0..b.dim(j + 1) {
                if !db[(r, y)].is_zero() {
                    let row = pos(k + 1, (i, x, r));
                    if i % 2 == 0 {
                        m[(row, col)] += &db[(r, y)];
                    } else {
                        m[(row, col)] -= &db[(r, y)];
                    }
                }
            }
        }
        diff.push(m);
    }
    let mut products = Vec::new();
    for k1 in 1..=top {
        for k2 in 1..=top - k1 {
            for (p1, &(i1, x1, y1)) in basis[k1].iter().enumerate() {
                for (p2, &(i2, x2, y2)) in basis[k2].iter().enumerate() {
                    let (j1, j2) = (k1 - i1, k2 - i2);
                    let pa = a.mul_basis(i1, x1, i2, x2);
                    let pb = b.mul_basis(j1, y1, j2, y2);
                    let neg = j1 * i2 % 2 == 1;
                    let mut result = BTreeMap::new();
                    for (u, cu) in pa.iter().enumerate() {
                        if cu.is_zero() {
                            continue;
                        }
                        for (v, cv) in pb.iter().enumerate() {
                            if cv.is_zero() {
                                continue;
                            }
                            let c = cu * cv;
                            let e = result
                                .entry(pos(k1 + k2, (i1 + i2, u, v)))
                                .or_insert_with(Int::zero);
                            if neg {
                                *e -= c;
                            } else {
                                *e += c;
                            }
                        }
                    }
                    result.retain(|_, c: &mut Int| !c.is_zero());
                    if !result.is_empty() {
                        products.push(ProductEntry {
                            i_deg: k1,
                            i_idx: p1,
                            j_deg: k2,
                            j_idx: p2,
                            result: result.into_iter().collect(),
                        });
                    }
                }
            }
        }
    }
    let mut m = DgRingModel::new(labels, diff, &products)?;
    for f in a.flags().iter().chain(b.flags()) {
        m = m.with_flag(f);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(m: &DgRingModel) -> Vec<usize> {
        (0..=m.top_degree()).map(|k| m.cohomology(k).rank()).collect()
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        // y2 · y1y3 = −y1y2y3
        assert_eq!(wedge_sign(0b010, 0b101), Some(true));
    }

    #[test]
    fn lexicographic_subsets() {
        assert_eq!(subsets(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(subsets(2, 0), vec![0]);
    }

    #[test]
    fn spheres_and_tori() {
        assert_eq!(ranks(&sphere(3).unwrap()), vec![1, 0, 0, 1]);
        assert_eq!(ranks(&torus(3).unwrap()), vec![1, 3, 3, 1]);
        assert!(builtin_space("sphere", Some(5)).is_err());
        assert!(matches!(builtin_space("klein", None), Err(TdkError::UnknownBuiltin(_))));
    }

    #[test]
    fn heisenberg_cohomology() {
        let m = heisenberg().unwrap();
        assert_eq!(ranks(&m), vec![1, 2, 2, 1]);
        assert!(m.cohomology(2).torsion().is_empty());
    }

    #[test]
    fn surface_products() {
        let m = surface(2).unwrap();
        assert_eq!(ranks(&m), vec![1, 4, 1]);
        assert_eq!(m.mul_basis(1, 1, 1, 3), &[Int::one()]);
        assert_eq!(m.mul_basis(1, 0, 1, 1), &[Int::zero()]);
    }

    #[test]
    fn products() {
        let p = product_model(&point(), &torus(2).unwrap()).unwrap();
        assert_eq!(p.all_labels(), torus(2).unwrap().all_labels());
        let t2 = builtin_expr("sphere:1*sphere:1").unwrap();
        assert_eq!(ranks(&t2), vec![1, 2, 1]);
        assert_eq!(t2.labels(1), &["g1".to_string(), "g1'".to_string()]);
        assert_eq!(t2.mul_basis(1, 0, 1, 1), &[Int::one()]);
        assert_eq!(t2.mul_basis(1, 1, 1, 0), &[-Int::one()]);
        let s2s1 = builtin_expr("sphere:2*sphere:1").unwrap();
        assert_eq!(ranks(&s2s1), vec![1, 1, 1, 1]);
        assert!(builtin_expr("torus:3*sphere:2").is_err());
    }
}
