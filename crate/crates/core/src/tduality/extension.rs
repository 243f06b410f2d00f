//! How far the fluxes with a given leading part fail to be determined by it.
//!
//! For a bundle `π: F → B` the classes `α ∈ H³(B)` with `π*α = 0` form the
//! kernel of `π*`. The elements `Σ ζᵢ·aᵢ` with `aᵢ ∈ H¹(B)` are always in it,
//! and the quotient `ker π* / im C` should match the image of
//! `d₃: E₃^{0,2} → E₃^{3,0}`.

use tdk_linalg::{kernel_basis, FgGroup, Int, IntMatrix, Matrix};

use super::{extract_dual_chern, Pair};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct ExtensionReport {
    /// `ker(π*: H³(B) → H³(F))`
    pub kernel: FgGroup,
    /// Generators `ζᵢ·a` of the image of `C`, as base 3-cochains.
    pub image_c: Vec<Vec<Int>>,
    /// `ker π* / im C`
    pub torsor: FgGroup,
    /// `im d₃^{0,2}` in `E₃^{3,0}`
    pub d3_image: FgGroup,
    pub consistent: bool,
    /// Dual Chern ambiguity `{B·c}` as lists of `H²(B)` classes, when the pair
    /// is dualizable.
    pub dual_chern_ambiguity: Option<Vec<Vec<Vec<Int>>>>,
}

pub fn extension_report(pair: &Pair) -> Result<ExtensionReport> {
    let f = &pair.bundle;
    let base = f.base();
    let nb = base.dim(3);
    let nt = f.dim(2);
    let d3 = base.d(3);
    let mut a = Matrix::zeros(d3.rows() + f.dim(3), nb + nt);
    for i in 0..d3.rows() {
        for j in 0..nb {
            a[(i, j)] = d3[(i, j)].clone();
        }
    }
    let r0 = d3.rows();
    for j in 0..nb {
        let col = f.pullback(3, &crate::space::dgring::unit_vec(nb, j));
        for (i, c) in col.into_iter().enumerate() {
            a[(r0 + i, j)] = c;
        }
    }
    let df = f.d_or_zero(2);
    for i in 0..df.rows() {
        for j in 0..nt {
            a[(r0 + i, nb + j)] = -df[(i, j)].clone();
        }
    }
    let kern = kernel_basis(&a);
    let x: IntMatrix = kern.select(&(0..nb).collect::<Vec<_>>(), &(0..kern.cols()).collect::<Vec<_>>());
    let exact = base.d(2);
    let num = x.hstack(&exact);
    let kernel = FgGroup::subquotient(nb, &num, &exact)?;
    let closed1 = kernel_basis(&base.d(1));
    let mut image_c = Vec::new();
    for z in f.zetas() {
        for a1 in closed1.columns() {
            image_c.push(base.mul(2, z, 1, &a1));
        }
    }
    let cmat = Matrix::from_columns(nb, &image_c).hstack(&exact);
    let torsor = FgGroup::subquotient(nb, &num, &cmat)?;
    let d3_image = f.ss_page(3, 0, 2)?.outgoing.image();
    let consistent = torsor.isomorphic(&d3_image);
    let dual_chern_ambiguity = extract_dual_chern(pair).ok().map(|d| d.ambiguity);
    Ok(ExtensionReport {
        kernel,
        image_c,
        torsor,
        d3_image,
        consistent,
        dual_chern_ambiguity,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bundle::KoszulModel;
    use crate::space::builtin::torus;

    fn int(x: i64) -> Int {
        Int::from(x)
    }

    #[test]
    fn t2_bundle_over_t3() {
        // n = 2 with c = (x1x2, x1x3): π* kills x1x2x3 through C.
        let base = Arc::new(torus(3).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]])
            .unwrap();
        let z = vec![int(0); m.dim(3)];
        let rep = extension_report(&Pair::new(Arc::new(m), z).unwrap()).unwrap();
        assert_eq!(rep.kernel.to_string(), "Z");
        assert!(rep.torsor.is_trivial());
        assert!(rep.consistent);
        assert_eq!(rep.dual_chern_ambiguity.unwrap().len(), 1);
    }

    #[test]
    fn trivial_bundle_has_injective_pullback() {
        let base = Arc::new(torus(3).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(0); 3]]).unwrap();
        let z = vec![int(0); m.dim(3)];
        let rep = extension_report(&Pair::new(Arc::new(m), z).unwrap()).unwrap();
        assert!(rep.kernel.is_trivial());
        assert!(rep.consistent);
    }
}
