//! Finitely generated abelian groups presented as subquotients `Z/B` of `ℤᴺ`.
//!
//! Every group carries its ambient embedding, so elements are plain ambient
//! vectors and comparison happens through [`FgAbelianGroup::reduce`], which maps
//! an element of `Z` to normal-form coordinates `ℤʳ ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k`
//! (free coordinates first, then torsion in divisibility order).

use std::fmt;

use crate::error::LinalgError;
use crate::lattice::{image_basis, kernel_basis};
use crate::matrix::{is_zero_vec, Matrix};
use crate::scalar::IntScalar;
use crate::snf::smith_normal_form;

/// Coordinates of a full-column-rank lattice basis, recovered through its
/// Smith form: `x = Z·c` iff `c = V·D⁻¹·(U·x)` with exact divisions.
#[derive(Clone, Debug)]
struct Coordinatizer<T> {
    u: Matrix<T>,
    v: Matrix<T>,
    diag: Vec<T>,
}

impl<T: IntScalar> Coordinatizer<T> {
    fn new(basis: &Matrix<T>) -> Self {
        let s = smith_normal_form(basis);
        debug_assert_eq!(s.rank, basis.cols(), "basis must have full column rank");
        let diag = s.diagonal();
        Coordinatizer {
            u: s.u,
            v: s.v,
            diag,
        }
    }

    fn coords(&self, x: &[T]) -> Option<Vec<T>> {
        let ux = self.u.mul_vec(x);
        let mut y = Vec::with_capacity(self.diag.len());
        for (i, val) in ux.iter().enumerate() {
            if i < self.diag.len() {
                if !val.is_multiple_of(&self.diag[i]) {
                    return None;
                }
                y.push(val.div_floor(&self.diag[i]));
            } else if !val.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }
}

#[derive(Clone, Debug)]
pub struct FgAbelianGroup<T> {
    ambient: usize,
    /// Basis of the numerator lattice `Z` (columns, full column rank).
    num_basis: Matrix<T>,
    /// Basis of the denominator lattice `B ⊆ Z`.
    den_basis: Matrix<T>,
    /// Relations of the presentation, in `Z`-coordinates.
    relations: Matrix<T>,
    num_coords: Coordinatizer<T>,
    /// Smith transform of the relation matrix.
    u: Matrix<T>,
    u_inv: Matrix<T>,
    /// Smith-basis indices kept in the normal form, free ones first.
    kept: Vec<usize>,
    /// Modulus per normal-form coordinate; zero for free coordinates.
    moduli: Vec<T>,
}

fn fmt_vec<T: fmt::Display>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl<T: IntScalar> FgAbelianGroup<T> {
    /// The group `⟨num_gens⟩ / ⟨den_gens⟩` inside `ℤ^ambient`. Generators are the
    /// columns of the two matrices.
    pub fn subquotient(
        ambient: usize,
        num_gens: &Matrix<T>,
        den_gens: &Matrix<T>,
    ) -> Result<Self, LinalgError> {
        for (what, m) in [
            ("numerator generators", num_gens),
            ("denominator generators", den_gens),
        ] {
            if m.rows() != ambient {
                return Err(LinalgError::DimensionMismatch {
                    context: what,
                    expected: ambient,
                    found: m.rows(),
                    index: None,
                });
            }
        }
        let num_basis = image_basis(num_gens);
        let den_basis = image_basis(den_gens);
        let num_coords = Coordinatizer::new(&num_basis);
        let a = num_basis.cols();
        let mut rel_cols = Vec::with_capacity(den_basis.cols());
        for j in 0..den_basis.cols() {
            let col = den_basis.column(j);
            match num_coords.coords(&col) {
                Some(c) => rel_cols.push(c),
                None => {
                    return Err(LinalgError::NotContained {
                        index: j,
                        element: fmt_vec(&col),
                    })
                }
            }
        }
        let relations = Matrix::from_columns(a, &rel_cols);
        let s = smith_normal_form(&relations);
        let mut kept: Vec<usize> = (s.rank..a).collect();
        let mut moduli = vec![T::zero(); kept.len()];
        for i in 0..s.rank {
            let d = s.d[(i, i)].clone();
            if !d.is_one() {
                kept.push(i);
                moduli.push(d);
            }
        }
        Ok(FgAbelianGroup {
            ambient,
            num_basis,
            den_basis,
            relations,
            num_coords,
            u: s.u,
            u_inv: s.u_inv,
            kept,
            moduli,
        })
    }

    /// `ℤⁿ` with the standard basis.
    pub fn free(n: usize) -> Self {
        Self::subquotient(n, &Matrix::identity(n), &Matrix::zeros(n, 0))
            .expect("free group is well formed")
    }

    /// The group of order one inside `ℤ^ambient`.
    pub fn trivial(ambient: usize) -> Self {
        Self::subquotient(
            ambient,
            &Matrix::zeros(ambient, 0),
            &Matrix::zeros(ambient, 0),
        )
        .expect("trivial group is well formed")
    }

    /// Subgroup generated by the columns of `gens` (which must lie in the
    /// numerator lattice), with the same relations.
    pub fn subgroup(&self, gens: &Matrix<T>) -> Result<Self, LinalgError> {
        for j in 0..gens.cols() {
            let col = gens.column(j);
            if self.num_coords.coords(&col).is_none() {
                return Err(LinalgError::NotInGroup {
                    element: fmt_vec(&col),
                });
            }
        }
        Self::subquotient(self.ambient, &gens.hstack(&self.den_basis), &self.den_basis)
    }

    /// The quotient of this group by the subgroup generated by `gens`.
    pub fn quotient(&self, gens: &Matrix<T>) -> Result<Self, LinalgError> {
        Self::subquotient(self.ambient, &self.num_basis, &gens.hstack(&self.den_basis))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.moduli.iter().filter(|m| m.is_zero()).count()
    }

    /// Invariant factors `d₁ | … | d_k`, each at least two.
    pub fn torsion(&self) -> Vec<T> {
        self.moduli
            .iter()
            .filter(|m| !m.is_zero())
            .cloned()
            .collect()
    }

    /// Per normal-form coordinate: `0` for `ℤ`, `d` for `ℤ/d`.
    pub fn moduli(&self) -> &[T] {
        &self.moduli
    }

    /// Number of normal-form generators.
    pub fn ngens(&self) -> usize {
        self.kept.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.kept.is_empty()
    }

    /// `(generator count, relation matrix)` of the presentation.
    pub fn presentation(&self) -> (usize, &Matrix<T>) {
        (self.num_basis.cols(), &self.relations)
    }

    pub fn numerator_basis(&self) -> &Matrix<T> {
        &self.num_basis
    }

    pub fn denominator_basis(&self) -> &Matrix<T> {
        &self.den_basis
    }

    /// Whether the ambient vector lies in the numerator lattice.
    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.ambient && self.num_coords.coords(x).is_some()
    }

    /// Normal-form coordinates of an element of the numerator lattice.
    pub fn reduce(&self, x: &[T]) -> Result<Vec<T>, LinalgError> {
        if x.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                context: "group element",
                expected: self.ambient,
                found: x.len(),
                index: None,
            });
        }
        let c = self
            .num_coords
            .coords(x)
            .ok_or_else(|| LinalgError::NotInGroup {
                element: fmt_vec(x),
            })?;
        let uc = self.u.mul_vec(&c);
        Ok(self
            .kept
            .iter()
            .zip(&self.moduli)
            .map(|(&i, m)| {
                if m.is_zero() {
                    uc[i].clone()
                } else {
                    uc[i].mod_floor(m)
                }
            })
            .collect())
    }

    /// Canonical representative of normal-form coordinates.
    pub fn normalize(&self, coords: &[T]) -> Vec<T> {
        coords
            .iter()
            .zip(&self.moduli)
            .map(|(c, m)| {
                if m.is_zero() {
                    c.clone()
                } else {
                    c.mod_floor(m)
                }
            })
            .collect()
    }

    /// Whether `x` represents the zero class.
    pub fn is_zero_element(&self, x: &[T]) -> Result<bool, LinalgError> {
        Ok(is_zero_vec(&self.reduce(x)?))
    }

    /// Ambient lift of normal-form coordinates.
    pub fn section(&self, coords: &[T]) -> Vec<T> {
        assert_eq!(
            coords.len(),
            self.kept.len(),
            "normal-form coordinate count"
        );
        let a = self.num_basis.cols();
        let mut c = vec![T::zero(); a];
        for (k, &i) in self.kept.iter().enumerate() {
            if coords[k].is_zero() {
                continue;
            }
            for (r, cr) in c.iter_mut().enumerate() {
                *cr = cr.clone() + self.u_inv[(r, i)].clone() * coords[k].clone();
            }
        }
        self.num_basis.mul_vec(&c)
    }

    /// Ambient lifts of the normal-form generators.
    pub fn generators(&self) -> Vec<Vec<T>> {
        (0..self.ngens())
            .map(|k| {
                let mut e = vec![T::zero(); self.ngens()];
                e[k] = T::one();
                self.section(&e)
            })
            .collect()
    }

    /// Same rank and same invariant factors.
    pub fn isomorphic(&self, other: &Self) -> bool {
        self.rank() == other.rank() && self.torsion() == other.torsion()
    }
}

impl<T: IntScalar> fmt::Display for FgAbelianGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank() {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in self.torsion() {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homomorphism induced by an ambient integer matrix.
#[derive(Clone, Debug)]
pub struct GroupHom<T> {
    pub source: FgAbelianGroup<T>,
    pub target: FgAbelianGroup<T>,
    /// `target.ambient × source.ambient`
    pub matrix: Matrix<T>,
}

impl<T: IntScalar> GroupHom<T> {
    /// Checks that the matrix maps the source numerator into the target
    /// numerator and the source relations to zero.
    pub fn new(
        source: FgAbelianGroup<T>,
        target: FgAbelianGroup<T>,
        matrix: Matrix<T>,
    ) -> Result<Self, LinalgError> {
        if matrix.rows() != target.ambient || matrix.cols() != source.ambient {
            return Err(LinalgError::DimensionMismatch {
                context: "homomorphism matrix",
                expected: target.ambient * source.ambient,
                found: matrix.rows() * matrix.cols(),
                index: None,
            });
        }
        for j in 0..source.num_basis.cols() {
            let img = matrix.mul_vec(&source.num_basis.column(j));
            if !target.contains(&img) {
                return Err(LinalgError::IllDefinedHom(format!(
                    "generator {j} maps outside the target"
                )));
            }
        }
        for j in 0..source.den_basis.cols() {
            let img = matrix.mul_vec(&source.den_basis.column(j));
            if !target.is_zero_element(&img)? {
                return Err(LinalgError::IllDefinedHom(format!(
                    "relation {j} does not map to zero"
                )));
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix.mul_vec(x)
    }

    /// Matrix in normal-form coordinates (`target.ngens × source.ngens`).
    pub fn normal_matrix(&self) -> Matrix<T> {
        let cols: Vec<Vec<T>> = self
            .source
            .generators()
            .iter()
            .map(|g| {
                self.target
                    .reduce(&self.matrix.mul_vec(g))
                    .expect("well-defined homomorphism")
            })
            .collect();
        Matrix::from_columns(self.target.ngens(), &cols)
    }

    /// Kernel as a subquotient of the source ambient space.
    pub fn kernel(&self) -> FgAbelianGroup<T> {
        let zs = &self.source.num_basis;
        let a = zs.cols();
        let mz = self.matrix.mul(zs);
        let bt = self.target.den_basis.scale(&-T::one());
        let k = kernel_basis(&mz.hstack(&bt));
        let rows: Vec<usize> = (0..a).collect();
        let all: Vec<usize> = (0..k.cols()).collect();
        let proj = k.select(&rows, &all);
        let gens = zs.mul(&proj);
        FgAbelianGroup::subquotient(self.source.ambient, &gens, &self.source.den_basis)
            .expect("source relations lie in the kernel")
    }

    /// Image as a subgroup of the target.
    pub fn image(&self) -> FgAbelianGroup<T> {
        let gens = self.matrix.mul(&self.source.num_basis);
        self.target
            .subgroup(&gens)
            .expect("image lies in the target")
    }

    pub fn cokernel(&self) -> FgAbelianGroup<T> {
        let gens = self.matrix.mul(&self.source.num_basis);
        self.target
            .quotient(&gens)
            .expect("image lies in the target")
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }
}

/// Kernel of a matrix together with its inclusion map.
#[derive(Clone, Debug)]
pub struct Kernel<T> {
    pub group: FgAbelianGroup<T>,
    /// Columns: ambient images of the free generators.
    pub inclusion: Matrix<T>,
}

pub fn kernel<T: IntScalar>(m: &Matrix<T>) -> Kernel<T> {
    let basis = kernel_basis(m);
    let group = FgAbelianGroup::subquotient(m.cols(), &basis, &Matrix::zeros(m.cols(), 0))
        .expect("kernel lattice is well formed");
    let inclusion = Matrix::from_columns(m.cols(), &group.generators());
    Kernel { group, inclusion }
}

/// `ℤ^rows / im(M)`; the projection is [`FgAbelianGroup::reduce`].
pub fn cokernel<T: IntScalar>(m: &Matrix<T>) -> FgAbelianGroup<T> {
    FgAbelianGroup::subquotient(m.rows(), &Matrix::identity(m.rows()), m)
        .expect("image lies in the ambient lattice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
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

    fn ints(x: &[BigInt]) -> Vec<i64> {
        x.iter().map(|a| i64::try_from(a).unwrap()).collect()
    }

    #[test]
    fn cyclic_cokernel() {
        let g = cokernel(&big(&[&[5]]));
        assert_eq!(g.rank(), 0);
        assert_eq!(ints(&g.torsion()), vec![5]);
        assert_eq!(g.to_string(), "Z/5");
    }

    #[test]
    fn kernel_of_sum() {
        let k = kernel(&big(&[&[1, 1]]));
        assert_eq!(k.group.rank(), 1);
        let inc = k.inclusion.column(0);
        assert!(ints(&inc) == vec![1, -1] || ints(&inc) == vec![-1, 1]);
        assert!(big(&[&[1, 1]]).mul(&k.inclusion).is_zero());
    }

    #[test]
    fn two_by_two_cokernel() {
        let g = cokernel(&big(&[&[2, 4], &[6, 8]]));
        assert_eq!(g.rank(), 0);
        assert_eq!(ints(&g.torsion()), vec![2, 4]);
    }

    #[test]
    fn subquotient_examples() {
        let one = big(&[&[1]]);
        let g = FgAbelianGroup::subquotient(1, &one, &big(&[&[7]])).unwrap();
        assert_eq!(ints(&g.torsion()), vec![7]);
        let same = FgAbelianGroup::subquotient(1, &big(&[&[3]]), &big(&[&[3]])).unwrap();
        assert!(same.is_trivial());
        let g =
            FgAbelianGroup::subquotient(2, &big(&[&[1, 0], &[0, 1]]), &big(&[&[2, 0], &[0, 3]]))
                .unwrap();
        assert_eq!(g.rank(), 0);
        assert_eq!(ints(&g.torsion()), vec![6]);
    }

    #[test]
    fn containment_failure_reports_element() {
        let err = FgAbelianGroup::subquotient(1, &big(&[&[2]]), &big(&[&[3]])).unwrap_err();
        match err {
            LinalgError::NotContained { index, element } => {
                assert_eq!(index, 0);
                assert_eq!(element, vec!["3".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hom_kernel_image_cokernel() {
        // ×2 : ℤ → ℤ/4
        let src = FgAbelianGroup::<BigInt>::free(1);
        let tgt = cokernel(&big(&[&[4]]));
        let h = GroupHom::new(src, tgt, big(&[&[2]])).unwrap();
        assert_eq!(ints(&h.kernel().torsion()), Vec::<i64>::new());
        assert_eq!(h.kernel().rank(), 1);
        assert_eq!(ints(&h.image().torsion()), vec![2]);
        assert_eq!(ints(&h.cokernel().torsion()), vec![2]);
        // ℤ/4 → ℤ/2 reduction is well defined, ℤ/2 → ℤ/4 identity is not
        let h = GroupHom::new(
            cokernel(&big(&[&[4]])),
            cokernel(&big(&[&[2]])),
            big(&[&[1]]),
        )
        .unwrap();
        assert!(h.is_surjective());
        assert_eq!(ints(&h.kernel().torsion()), vec![2]);
        assert!(GroupHom::new(
            cokernel(&big(&[&[2]])),
            cokernel(&big(&[&[4]])),
            big(&[&[1]])
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn reduction_is_additive(
            e in proptest::collection::vec(-5i64..6, 9),
            x in proptest::collection::vec(-20i64..20, 3),
            y in proptest::collection::vec(-20i64..20, 3),
        ) {
            let rel = big(&[&e[0..3], &e[3..6], &e[6..9]]);
            let g = cokernel(&rel);
            let rx = g.reduce(&v(&x)).unwrap();
            let ry = g.reduce(&v(&y)).unwrap();
            let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let rs = g.reduce(&v(&sum)).unwrap();
            let added: Vec<BigInt> = rx.iter().zip(&ry).map(|(a, b)| a + b).collect();
            prop_assert_eq!(rs, g.normalize(&added));
            // section then reduce is the identity on normal-form coordinates
            prop_assert_eq!(g.reduce(&g.section(&rx)).unwrap(), rx.clone());
            // relations reduce to zero
            for j in 0..3 {
                prop_assert!(g.is_zero_element(&rel.column(j)).unwrap());
            }
        }
    }
}
