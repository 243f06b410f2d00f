//! Spectral sequence of the base-degree filtration.
//!
//! With `Z_r^p = {x ∈ F^p : dx ∈ F^{p+r}}` (and `F^p` everything for `p ≤ 0`),
//! `E_r^p = Z_r^p / (Z_{r−1}^{p+1} + d Z_{r−1}^{p−r+1})` and `d_r` is induced by
//! `d` itself, so each page is a subquotient of the cochains and `d_r` is a
//! homomorphism given by the ambient differential matrix.

use num_traits::Zero;
use tdk_linalg::{kernel_basis, solve, FgGroup, Int, IntGroupHom, IntMatrix, Matrix, Solution};

use super::KoszulModel;
use crate::error::{Result, TdkError};

#[derive(Clone, Debug)]
pub struct SSPage {
    pub r: usize,
    pub p: usize,
    pub q: usize,
    pub group: FgGroup,
    /// `d_r: E_r^{p,q} → E_r^{p+r, q−r+1}`
    pub outgoing: IntGroupHom,
    /// `d_r: E_r^{p−r, q+r−1} → E_r^{p,q}`
    pub incoming: IntGroupHom,
    /// No differential into or out of any slot can be nonzero from this page on.
    pub infinity: bool,
}

/// Where a closed cochain sits in the filtration of its cohomology class.
#[derive(Clone, Debug)]
pub struct FiltrationReport {
    pub degree: usize,
    /// Largest `p` with the class in `F^p H^k`; `None` for the zero class.
    pub filtration: Option<usize>,
    /// `e` with `z + de ∈ F^p`.
    pub correction: Vec<Int>,
    /// `z + de`.
    pub normalized: Vec<Int>,
    /// `E_∞^{p, k−p}` containing the leading part.
    pub leading_group: FgGroup,
    /// Normal-form coordinates of the leading part in `leading_group`.
    pub leading: Vec<Int>,
    /// Filtration-`p` components of the canonical lift of the leading part.
    pub leading_terms: Vec<(String, Int)>,
}

impl FiltrationReport {
    pub fn is_zero_class(&self) -> bool {
        self.filtration.is_none()
    }
}

impl KoszulModel {
    /// First page index at which the sequence has certainly degenerated.
    pub fn infinity_page(&self) -> usize {
        self.base().top_degree().max(self.rank()) + 1
    }

    fn column_embedding(&self, k: usize, rows: &[usize], m: &IntMatrix) -> IntMatrix {
        let mut out = Matrix::zeros(self.dim(k), m.cols());
        for (i, &r) in rows.iter().enumerate() {
            for j in 0..m.cols() {
                out[(r, j)] = m[(i, j)].clone();
            }
        }
        out
    }

    /// Basis (columns) of `Z_r^p` in degree `k`.
    pub fn z_lattice(&self, k: i64, p: i64, r: i64) -> IntMatrix {
        if k < 0 || k as usize > self.top_degree() {
            return Matrix::zeros(if k < 0 { 0 } else { self.dim(k as usize) }, 0);
        }
        let k = k as usize;
        let cols = self.at_least(k, p);
        let rows = if k < self.top_degree() {
            self.below(k + 1, p + r)
        } else {
            Vec::new()
        };
        let kernel = if rows.is_empty() {
            Matrix::identity(cols.len())
        } else {
            kernel_basis(&self.d(k).select(&rows, &cols))
        };
        self.column_embedding(k, &cols, &kernel)
    }

    /// `E_r^p` in total degree `k`, as a subquotient of the degree-`k` cochains.
    pub fn e_group(&self, k: i64, p: i64, r: i64) -> FgGroup {
        if k < 0 || k as usize > self.top_degree() {
            return FgGroup::trivial(if k < 0 { 0 } else { self.dim(k as usize) });
        }
        let num = self.z_lattice(k, p, r);
        let mut den = self.z_lattice(k, p + 1, r - 1);
        if k >= 1 {
            let prev = self.z_lattice(k - 1, p - r + 1, r - 1);
            den = den.hstack(&self.d(k as usize - 1).mul(&prev));
        }
        FgGroup::subquotient(self.dim(k as usize), &num, &den).expect("B_r ⊆ Z_r")
    }

    /// `E_r^{p,q}` with both differentials.
    pub fn ss_page(&self, r: usize, p: usize, q: usize) -> Result<SSPage> {
        if r == 0 {
            return Err(TdkError::Parameter {
                name: "page".into(),
                message: "pages start at r = 1".into(),
            });
        }
        let (ri, pi, qi) = (r as i64, p as i64, q as i64);
        let k = pi + qi;
        let group = self.e_group(k, pi, ri);
        let ku = k as usize;
        let out_target = self.e_group(k + 1, pi + ri, ri);
        let out_matrix = if ku < self.top_degree() {
            self.d(ku).clone()
        } else {
            Matrix::zeros(out_target.ambient_dim(), group.ambient_dim())
        };
        let outgoing = IntGroupHom::new(group.clone(), out_target, out_matrix)?;
        let in_source = self.e_group(k - 1, pi - ri, ri);
        let in_matrix = if ku >= 1 && ku <= self.top_degree() {
            self.d(ku - 1).clone()
        } else {
            Matrix::zeros(group.ambient_dim(), in_source.ambient_dim())
        };
        let incoming = IntGroupHom::new(in_source, group.clone(), in_matrix)?;
        Ok(SSPage {
            r,
            p,
            q,
            group,
            outgoing,
            incoming,
            infinity: r >= self.infinity_page(),
        })
    }

    /// `e` with `z + de ∈ F^p`, if one exists.
    pub fn push_into_filtration(&self, k: usize, z: &[Int], p: usize) -> Option<Vec<Int>> {
        let rows = self.below(k, p as i64);
        if rows.iter().all(|&i| z[i].is_zero()) {
            return Some(vec![Int::zero(); if k == 0 { 0 } else { self.dim(k - 1) }]);
        }
        if k == 0 {
            return None;
        }
        let cols: Vec<usize> = (0..self.dim(k - 1)).collect();
        let a = self.d(k - 1).select(&rows, &cols);
        let b: Vec<Int> = rows.iter().map(|&i| -z[i].clone()).collect();
        match solve(&a, &b).expect("dimensions agree") {
            Solution::Solved(e) => Some(e),
            Solution::Obstructed { .. } => None,
        }
    }

    /// Filtration degree and leading part of the class of a closed cochain.
    pub fn filtration_report(&self, k: usize, z: &[Int]) -> Result<FiltrationReport> {
        if z.len() != self.dim(k) {
            return Err(TdkError::schema(
                "$.flux",
                format!("expected {} coordinates in degree {k}, found {}", self.dim(k), z.len()),
            ));
        }
        if !self.is_cocycle(k, z) {
            return Err(TdkError::NotClosed {
                what: format!("cocycle {}", self.format_element(k, z)),
            });
        }
        let r_inf = self.infinity_page() as i64;
        for p in (0..=k + 1).rev() {
            let Some(e) = self.push_into_filtration(k, z, p) else {
                continue;
            };
            let de = if k == 0 {
                vec![Int::zero(); self.dim(0)]
            } else {
                self.apply_d(k - 1, &e)
            };
            let normalized: Vec<Int> = z.iter().zip(&de).map(|(a, b)| a + b).collect();
            if p == k + 1 {
                return Ok(FiltrationReport {
                    degree: k,
                    filtration: None,
                    correction: e,
                    normalized,
                    leading_group: FgGroup::trivial(self.dim(k)),
                    leading: Vec::new(),
                    leading_terms: Vec::new(),
                });
            }
            let group = self.e_group(k as i64, p as i64, r_inf);
            let leading = group.reduce(&normalized)?;
            let lift = group.section(&leading);
            let leading_terms = self
                .basis(k)
                .iter()
                .zip(&lift)
                .filter(|(b, c)| b.base_deg == p && !c.is_zero())
                .map(|(b, c)| (self.label(b), c.clone()))
                .collect();
            return Ok(FiltrationReport {
                degree: k,
                filtration: Some(p),
                correction: e,
                normalized,
                leading_group: group,
                leading,
                leading_terms,
            });
        }
        unreachable!("p = 0 always succeeds")
    }

    /// `(Z∞^p + im d) / (Z∞^{p+1} + im d)`: the associated graded of the
    /// filtration on `H^k`, computed without the spectral sequence.
    pub fn associated_graded(&self, k: usize, p: usize) -> FgGroup {
        let r = self.infinity_page() as i64 + 1;
        let (ki, pi) = (k as i64, p as i64);
        let im = if k == 0 {
            Matrix::zeros(self.dim(0), 0)
        } else {
            self.d(k - 1).clone()
        };
        let num = self.z_lattice(ki, pi, r).hstack(&im);
        let den = self.z_lattice(ki, pi + 1, r).hstack(&im);
        FgGroup::subquotient(self.dim(k), &num, &den).expect("nested lattices")
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::builtin::{sphere, torus};

    fn int(x: i64) -> Int {
        Int::from(x)
    }

    #[test]
    fn hopf_transgression_kills_e2_01() {
        let m = KoszulModel::bundle(Arc::new(sphere(2).unwrap()), vec![vec![int(1)]]).unwrap();
        let page = m.ss_page(2, 0, 1).unwrap();
        assert_eq!(page.group.to_string(), "Z");
        assert_eq!(page.outgoing.normal_matrix().to_rows(), vec![vec![int(1)]]);
        assert!(m.ss_page(3, 0, 1).unwrap().group.is_trivial());
    }

    #[test]
    fn trivial_t2_over_circle_survives() {
        let m = KoszulModel::bundle(Arc::new(sphere(1).unwrap()), vec![vec![], vec![]]).unwrap();
        for r in 2..=m.infinity_page() {
            let page = m.ss_page(r, 1, 2).unwrap();
            assert_eq!(page.group.to_string(), "Z");
            assert!(page.outgoing.normal_matrix().is_zero());
            assert!(page.incoming.normal_matrix().is_zero());
        }
        assert!(m.ss_page(m.infinity_page(), 1, 2).unwrap().infinity);
    }

    #[test]
    fn filtration_of_hopf_flux() {
        let m = KoszulModel::bundle(Arc::new(sphere(2).unwrap()), vec![vec![int(1)]]).unwrap();
        let rep = m.filtration_report(3, &[int(3)]).unwrap();
        assert_eq!(rep.filtration, Some(2));
        assert_eq!(rep.leading_terms, vec![("y⊗g2".to_string(), int(3))]);
        let zero = m.filtration_report(3, &[int(0)]).unwrap();
        assert!(zero.is_zero_class());
    }

    #[test]
    fn exact_cochain_is_zero_class() {
        let m = KoszulModel::bundle(Arc::new(torus(2).unwrap()), vec![vec![int(1)]]).unwrap();
        // d(y) = x1x2, which is exact in the total space
        let v = m.pullback(2, &[int(1)]);
        assert!(m.filtration_report(2, &v).unwrap().is_zero_class());
    }

    #[test]
    fn page_zero_rejected() {
        let m = KoszulModel::bundle(Arc::new(sphere(2).unwrap()), vec![vec![int(1)]]).unwrap();
        assert!(m.ss_page(0, 0, 0).is_err());
    }
}
