//! Finite simplicial complexes, their cochains and the simplicial cup product.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use tdk_linalg::{FgGroup, Int, IntMatrix, IntSparse, Matrix};

use super::dgring::{DgRingModel, ProductEntry};
use crate::error::{Result, TdkError};

pub const FLAG_FORMALITY: &str = "formality_assumed";
pub const FLAG_TORSION_PRODUCTS: &str = "torsion_products_dropped";

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertices: usize,
    facets: Vec<Vec<usize>>,
    /// `simplices[k]`: sorted list of sorted k-simplices.
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Facets may list vertices in any order but without repetition. Every
    /// vertex `0..vertices` is a 0-simplex, used or not.
    pub fn new(vertices: usize, facets: Vec<Vec<usize>>, max_dim: usize) -> Result<Self> {
        let mut sorted = Vec::with_capacity(facets.len());
        for (n, f) in facets.into_iter().enumerate() {
            let path = format!("$.facets[{n}]");
            if f.is_empty() {
                return Err(TdkError::schema(path, "empty facet"));
            }
            let mut g = f.clone();
            g.sort_unstable();
            if g.windows(2).any(|w| w[0] == w[1]) {
                return Err(TdkError::schema(path, "repeated vertex"));
            }
            if let Some(&v) = g.iter().find(|&&v| v >= vertices) {
                return Err(TdkError::schema(
                    path,
                    format!("vertex {v} out of range (vertices = {vertices})"),
                ));
            }
            if g.len() - 1 > max_dim {
                return Err(TdkError::Truncation {
                    degree: g.len() - 1,
                    bound: max_dim,
                });
            }
            sorted.push(g);
        }
        let dim = sorted.iter().map(|f| f.len() - 1).max().unwrap_or(0);
        let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        for v in 0..vertices {
            sets[0].insert(vec![v]);
        }
        for f in &sorted {
            let k = f.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                sets[face.len() - 1].insert(face);
            }
        }
        let simplices: Vec<Vec<Vec<usize>>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Ok(SimplicialComplex {
            vertices,
            facets: sorted,
            simplices,
            index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim())
            .map(|k| {
                let c = self.count(k) as i64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// `δ: Cᵏ → Cᵏ⁺¹`, `(δf)(σ) = Σᵢ (−1)ⁱ f(∂ᵢσ)`.
    pub fn coboundary_sparse(&self, k: usize) -> IntSparse {
        let mut m = IntSparse::new(self.count(k + 1), self.count(k));
        for (row, s) in self.simplices(k + 1).iter().enumerate() {
            for i in 0..s.len() {
                let mut face = s.clone();
                face.remove(i);
                let col = self.index[k][&face];
                let c = if i % 2 == 0 { Int::one() } else { -Int::one() };
                m.add_entry(row, col, c);
            }
        }
        m
    }

    pub fn coboundary(&self, k: usize) -> IntMatrix {
        self.coboundary_sparse(k).to_dense()
    }

    /// Front-face/back-face cup product of a `p`-cochain and a `q`-cochain.
    pub fn cup(&self, p: usize, f: &[Int], q: usize, g: &[Int]) -> Vec<Int> {
        self.simplices(p + q)
            .iter()
            .map(|s| {
                let a = &f[self.index[p][&s[..=p]]];
                let b = &g[self.index[q][&s[p..]]];
                if a.is_zero() || b.is_zero() {
                    Int::zero()
                } else {
                    a * b
                }
            })
            .collect()
    }

    pub fn cohomology(&self, k: usize) -> FgGroup {
        let n = self.count(k);
        let z = tdk_linalg::kernel_basis(&self.coboundary(k));
        let b = if k == 0 {
            Matrix::zeros(n, 0)
        } else {
            self.coboundary(k - 1)
        };
        FgGroup::subquotient(n, &z, &b).expect("coboundaries are cocycles")
    }
}

/// Cohomology ring of a complex as a model with zero differential on the free
/// part, plus the cochain-level data it was computed from.
#[derive(Clone, Debug)]
pub struct CohomologyRing {
    pub model: DgRingModel,
    pub groups: Vec<FgGroup>,
    /// `representatives[k][i]`: simplicial cocycle for the i-th normal-form
    /// generator of `Hᵏ`.
    pub representatives: Vec<Vec<Vec<Int>>>,
}

/// Model of `H*(K)`: a generator `h{k}_{i}` per free summand, `t{k}_{i}` per
/// cyclic torsion summand of order `m`, and `u{k}_{i}` in degree `k − 1` with
/// `d u = m·t`, so that the model's cohomology is `H*(K)` on the nose.
///
/// Products of free generators are reduced in cohomology and their torsion
/// coordinates are discarded; products involving `t` or `u` are zero. The
/// ring is therefore exact modulo torsion, and the model carries
/// [`FLAG_TORSION_PRODUCTS`] whenever some torsion was present.
pub fn cohomology_ring(k: &SimplicialComplex) -> Result<CohomologyRing> {
    let groups: Vec<FgGroup> = (0..=k.dim()).map(|d| k.cohomology(d)).collect();
    let mut reps: Vec<Vec<Vec<Int>>> = groups.iter().map(FgGroup::generators).collect();
    if groups[0].rank() != 1 {
        return Err(TdkError::NotConnected(format!(
            "complex has {} connected components",
            groups[0].rank()
        )));
    }
    reps[0] = vec![vec![Int::one(); k.count(0)]];
    cohomology_ring_with(k, groups, reps)
}

/// Same as [`cohomology_ring`] but multiplying the given representatives.
/// Each `reps[d]` must be a list of cocycles reducing to the standard
/// generators of `groups[d]`.
pub fn cohomology_ring_with(
    k: &SimplicialComplex,
    groups: Vec<FgGroup>,
    reps: Vec<Vec<Vec<Int>>>,
) -> Result<CohomologyRing> {
    let top = k.dim();
    let free: Vec<usize> = groups.iter().map(FgGroup::rank).collect();
    let tors: Vec<Vec<Int>> = groups.iter().map(FgGroup::torsion).collect();
    let killers = |d: usize| tors.get(d + 1).map_or(0, Vec::len);
    let mut labels = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let mut ls = Vec::new();
        if d == 0 {
            ls.push("1".to_string());
        } else {
            ls.extend((0..free[d]).map(|i| format!("h{d}_{i}")));
        }
        ls.extend((0..tors[d].len()).map(|i| format!("t{d}_{i}")));
        ls.extend((0..killers(d)).map(|i| format!("u{}_{i}", d + 1)));
        labels.push(ls);
    }
    let mut diff = Vec::with_capacity(top);
    for d in 0..top {
        let mut m = Matrix::zeros(labels[d + 1].len(), labels[d].len());
        for (i, order) in tors[d + 1].iter().enumerate() {
            m[(free[d + 1] + i, free[d] + tors[d].len() + i)] = order.clone();
        }
        diff.push(m);
    }
    let mut products = Vec::new();
    for p in 1..=top {
        for q in 1..=top - p {
            for a in 0..free[p] {
                for b in 0..free[q] {
                    let c = k.cup(p, &reps[p][a], q, &reps[q][b]);
                    let coords = groups[p + q].reduce(&c)?;
                    let result: Vec<(usize, Int)> = coords[..free[p + q]]
                        .iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(i, x)| (i, x.clone()))
                        .collect();
                    products.push(ProductEntry {
                        i_deg: p,
                        i_idx: a,
                        j_deg: q,
                        j_idx: b,
                        result,
                    });
                }
            }
        }
    }
    let mut model = DgRingModel::new(labels, diff, &products)?.with_flag(FLAG_FORMALITY);
    if tors.iter().any(|t| !t.is_empty()) {
        model = model.with_flag(FLAG_TORSION_PRODUCTS);
    }
    Ok(CohomologyRing {
        model,
        groups,
        representatives: reps,
    })
}

/// Boundary of the 3-simplex.
pub fn boundary_tetrahedron() -> SimplicialComplex {
    SimplicialComplex::new(
        4,
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        4,
    )
    .expect("valid complex")
}

/// Minimal 7-vertex torus.
pub fn seven_vertex_torus() -> SimplicialComplex {
    let mut facets = Vec::new();
    for i in 0..7 {
        facets.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        facets.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    SimplicialComplex::new(7, facets, 4).expect("valid complex")
}

/// Minimal 6-vertex projective plane.
pub fn six_vertex_rp2() -> SimplicialComplex {
    let facets = [
        [1, 2, 4],
        [1, 2, 6],
        [1, 3, 5],
        [1, 3, 6],
        [1, 4, 5],
        [2, 3, 4],
        [2, 3, 5],
        [2, 5, 6],
        [3, 4, 6],
        [4, 5, 6],
    ]
    .iter()
    .map(|f| f.iter().map(|v| v - 1).collect())
    .collect();
    SimplicialComplex::new(6, facets, 4).expect("valid complex")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(x: &Int) -> i64 {
        i64::try_from(x).unwrap()
    }

    #[test]
    fn coboundary_squares_to_zero() {
        for k in [boundary_tetrahedron(), seven_vertex_torus(), six_vertex_rp2()] {
            for d in 0..k.dim() {
                assert!(k.coboundary(d + 1).mul(&k.coboundary(d)).is_zero());
            }
        }
    }

    #[test]
    fn tetrahedron_counts() {
        let k = boundary_tetrahedron();
        assert_eq!(k.dim(), 2);
        assert_eq!((k.count(0), k.count(1), k.count(2)), (4, 6, 4));
        assert_eq!(k.euler_characteristic(), 2);
    }

    #[test]
    fn torus_cup_generates_top_class() {
        let ring = cohomology_ring(&seven_vertex_torus()).unwrap();
        let m = &ring.model;
        assert_eq!(m.dim(1), 2);
        let p = m.mul_basis(1, 0, 1, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(small(&p[0]).abs(), 1);
    }

    #[test]
    fn rp2_model_has_a_killer() {
        let ring = cohomology_ring(&six_vertex_rp2()).unwrap();
        let m = &ring.model;
        assert_eq!(m.labels(1), &["u2_0".to_string()]);
        assert_eq!(m.labels(2), &["t2_0".to_string()]);
        assert!(m.flags().iter().any(|f| f == FLAG_TORSION_PRODUCTS));
        let h2 = m.cohomology(2);
        assert_eq!(h2.rank(), 0);
        assert_eq!(h2.torsion(), vec![Int::from(2)]);
    }

    #[test]
    fn disconnected_rejected() {
        let k = SimplicialComplex::new(4, vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        assert!(matches!(cohomology_ring(&k), Err(TdkError::NotConnected(_))));
    }

    #[test]
    fn bad_facets() {
        assert!(SimplicialComplex::new(3, vec![vec![0, 0, 1]], 4).is_err());
        assert!(SimplicialComplex::new(3, vec![vec![0, 3]], 4).is_err());
        assert!(matches!(
            SimplicialComplex::new(6, vec![vec![0, 1, 2, 3, 4, 5]], 4),
            Err(TdkError::Truncation { degree: 5, bound: 4 })
        ));
    }
}
