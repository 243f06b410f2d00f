//! The `H³(B)` action on triples, differences of triples and gauge changes.

use num_traits::Zero;
use tdk_linalg::{kernel_basis, solve, FgGroup, Int, IntMatrix, Matrix, Solution};

use super::{embed_matrix, Pair, Triple};
use crate::bundle::KoszulModel;
use crate::error::{Result, TdkError};

fn check_base_cocycle(t: &Triple, k: usize, v: &[Int], what: &str) -> Result<()> {
    let base = t.side.bundle.base();
    if v.len() != base.dim(k) {
        return Err(TdkError::schema(
            "$.alpha",
            format!("expected {} coordinates in base degree {k}, found {}", base.dim(k), v.len()),
        ));
    }
    if !base.is_cocycle(k, v) {
        return Err(TdkError::NotClosed {
            what: format!("{what} {}", base.format_element(k, v)),
        });
    }
    Ok(())
}

fn add(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `(z, ẑ, w) ↦ (z + π*α, ẑ + π̂*α, w)` for a closed `α ∈ C³(B)`.
pub fn h3_action(t: &Triple, alpha: &[Int]) -> Result<Triple> {
    check_base_cocycle(t, 3, alpha, "alpha")?;
    let z = add(&t.side.flux, &t.side.bundle.pullback(3, alpha));
    let zh = add(&t.dual.flux, &t.dual.bundle.pullback(3, alpha));
    Ok(Triple {
        side: Pair::new(t.side.bundle.clone(), z)?,
        dual: Pair::new(t.dual.bundle.clone(), zh)?,
        correspondence: t.correspondence.clone(),
        w: t.w.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct TorsorDifference {
    /// `H³(B)` modulo the classes that act trivially on the first triple.
    pub group: FgGroup,
    /// Class of `δ` in `group`.
    pub class: Vec<Int>,
    /// A cocycle `δ` with `t2 ≅ δ·t1`.
    pub cocycle: Vec<Int>,
    /// Whether the action is free, i.e. `group` is all of `H³(B)`.
    pub free: bool,
}

fn same_bundle(a: &KoszulModel, b: &KoszulModel) -> bool {
    a.base() == b.base() && a.zetas() == b.zetas()
}

/// Columns of `[m]` placed at row offset `r0` and column offset `c0` of `out`.
fn place(out: &mut IntMatrix, m: &IntMatrix, r0: usize, c0: usize) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(r0 + i, c0 + j)] = m[(i, j)].clone();
        }
    }
}

/// Solves `π*δ + dθ = Δz`, `π̂*δ + dθ̂ = Δẑ`, `p̂*θ̂ − p*θ + dκ = Δw`.
pub fn torsor_difference(t1: &Triple, t2: &Triple) -> Result<TorsorDifference> {
    if !same_bundle(&t1.side.bundle, &t2.side.bundle) || !same_bundle(&t1.dual.bundle, &t2.dual.bundle)
    {
        return Err(TdkError::BundleMismatch(
            "the triples do not share both underlying bundles".into(),
        ));
    }
    let f = &t1.side.bundle;
    let fh = &t1.dual.bundle;
    let d = &t1.correspondence;
    let base = f.base();
    let n = f.rank();
    let (nb, nt, nth, nk) = (base.dim(3), f.dim(2), fh.dim(2), d.dim(1));
    let (r1, r2, r3) = (f.dim(3), fh.dim(3), d.dim(2));
    let mut a = Matrix::zeros(r1 + r2 + r3, nb + nt + nth + nk);
    let pi = Matrix::from_columns(
        r1,
        &(0..nb).map(|i| f.pullback(3, &crate::space::dgring::unit_vec(nb, i))).collect::<Vec<_>>(),
    );
    let pih = Matrix::from_columns(
        r2,
        &(0..nb).map(|i| fh.pullback(3, &crate::space::dgring::unit_vec(nb, i))).collect::<Vec<_>>(),
    );
    place(&mut a, &pi, 0, 0);
    place(&mut a, &f.d_or_zero(2), 0, nb);
    place(&mut a, &pih, r1, 0);
    place(&mut a, &fh.d_or_zero(2), r1, nb + nt);
    let p = embed_matrix(f, d, 2, 0);
    let ph = embed_matrix(fh, d, 2, n);
    place(&mut a, &p.scale(&Int::from(-1)), r1 + r2, nb);
    place(&mut a, &ph, r1 + r2, nb + nt);
    place(&mut a, &d.d_or_zero(1), r1 + r2, nb + nt + nth);
    let mut rhs: Vec<Int> = t2.side.flux.iter().zip(&t1.side.flux).map(|(x, y)| x - y).collect();
    rhs.extend(t2.dual.flux.iter().zip(&t1.dual.flux).map(|(x, y)| x - y));
    rhs.extend(t2.w.iter().zip(&t1.w).map(|(x, y)| x - y));
    let sol = match solve(&a, &rhs)? {
        Solution::Solved(x) => x,
        Solution::Obstructed { .. } => {
            return Err(TdkError::NoSolution(
                "the triples are not related by the H^3(B) action".into(),
            ))
        }
    };
    let delta = sol[..nb].to_vec();
    let kern = kernel_basis(&a);
    let rows: Vec<usize> = (0..nb).collect();
    let cols: Vec<usize> = (0..kern.cols()).collect();
    let ambiguity = kern.select(&rows, &cols);
    let cocycles = kernel_basis(&base.d(3));
    let exact = base.d(2);
    let group = FgGroup::subquotient(nb, &cocycles, &exact.hstack(&ambiguity))?;
    let h3 = base.cohomology(3);
    let mut free = true;
    for c in ambiguity.columns() {
        if !h3.is_zero_element(&c)? {
            free = false;
        }
    }
    let class = group.reduce(&delta)?;
    Ok(TorsorDifference {
        group,
        class,
        cocycle: delta,
        free,
    })
}

fn check_gauge(t: &Triple, psi: &[Vec<Int>], psi_hat: &[Vec<Int>]) -> Result<()> {
    let n = t.n();
    if psi.len() != n || psi_hat.len() != n {
        return Err(TdkError::schema("$.gauge", format!("expected {n} one-cochains per side")));
    }
    for (i, v) in psi.iter().chain(psi_hat).enumerate() {
        check_base_cocycle(t, 1, v, &format!("gauge cochain {}", i + 1))?;
    }
    Ok(())
}

fn images(m: &KoszulModel, shift: usize, psi: &[Vec<Int>]) -> Vec<Vec<Int>> {
    psi.iter()
        .enumerate()
        .map(|(i, v)| add(&m.generator(i + shift), &m.pullback(1, v)))
        .collect()
}

/// Applies `yᵢ ↦ yᵢ + ψᵢ`, `ŷᵢ ↦ ŷᵢ + ψ̂ᵢ` for closed `ψ, ψ̂ ∈ C¹(B)`.
pub fn gauge_act(t: &Triple, psi: &[Vec<Int>], psi_hat: &[Vec<Int>]) -> Result<Triple> {
    check_gauge(t, psi, psi_hat)?;
    let f = &t.side.bundle;
    let fh = &t.dual.bundle;
    let d = &t.correspondence;
    let z = f.substitute(f, 3, &t.side.flux, &images(f, 0, psi));
    let zh = fh.substitute(fh, 3, &t.dual.flux, &images(fh, 0, psi_hat));
    let mut all = images(d, 0, psi);
    all.extend(images(d, t.n(), psi_hat));
    let w = d.substitute(d, 2, &t.w, &all);
    Ok(Triple {
        side: Pair::new(f.clone(), z)?,
        dual: Pair::new(fh.clone(), zh)?,
        correspondence: d.clone(),
        w,
    })
}

/// `Σ ζ̂ᵢ·ψᵢ + ζᵢ·ψ̂ᵢ`, the `H³(B)` element realised by [`gauge_act`].
pub fn gauge_shift(t: &Triple, psi: &[Vec<Int>], psi_hat: &[Vec<Int>]) -> Result<Vec<Int>> {
    check_gauge(t, psi, psi_hat)?;
    let base = t.side.bundle.base();
    let mut acc = vec![Int::zero(); base.dim(3)];
    let zetas = t.side.bundle.zetas();
    let zhats = t.dual.bundle.zetas();
    for i in 0..t.n() {
        for term in [base.mul(2, &zhats[i], 1, &psi[i]), base.mul(2, &zetas[i], 1, &psi_hat[i])] {
            for (a, x) in acc.iter_mut().zip(term) {
                *a += x;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::builtin::torus;
    use crate::tduality::{dualize, validate_triple};

    fn int(x: i64) -> Int {
        Int::from(x)
    }

    fn t3_over_t2(k: i64) -> Triple {
        let m = KoszulModel::bundle(Arc::new(torus(2).unwrap()), vec![vec![int(0)]]).unwrap();
        let vol = m.assemble(3, &[(1, vec![int(k)])]);
        dualize(&Pair::new(Arc::new(m), vol).unwrap(), None).unwrap()
    }

    #[test]
    fn h3_action_round_trip() {
        // Over T³ the action is nontrivial.
        let base = Arc::new(torus(3).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(0); 3]]).unwrap();
        let z = vec![int(0); m.dim(3)];
        let t = dualize(&Pair::new(Arc::new(m), z).unwrap(), None).unwrap();
        let moved = h3_action(&t, &[int(5)]).unwrap();
        assert!(validate_triple(&moved).all_pass());
        let diff = torsor_difference(&t, &moved).unwrap();
        assert_eq!(diff.group.to_string(), "Z");
        assert!(diff.free);
        assert_eq!(diff.group.reduce(&[int(5)]).unwrap(), diff.class);
        let back = torsor_difference(&moved, &t).unwrap();
        assert_eq!(back.group.reduce(&[int(-5)]).unwrap(), back.class);
    }

    #[test]
    fn mismatched_bundles_rejected() {
        assert!(matches!(
            torsor_difference(&t3_over_t2(1), &t3_over_t2(2)),
            Err(TdkError::BundleMismatch(_))
        ));
    }

    #[test]
    fn gauge_matches_shift() {
        // T³ → T² base with c = 0, flux k·x1x2⊗y; dual has ĉ = k.
        let t = t3_over_t2(2);
        let psi = vec![vec![int(1), int(0)]];
        let psi_hat = vec![vec![int(0), int(3)]];
        let acted = gauge_act(&t, &psi, &psi_hat).unwrap();
        assert!(validate_triple(&acted).all_pass());
        let diff = torsor_difference(&t, &acted).unwrap();
        let shift = gauge_shift(&t, &psi, &psi_hat).unwrap();
        assert_eq!(diff.group.reduce(&shift).unwrap(), diff.class);
    }

    #[test]
    fn gauge_over_t3_moves_class() {
        let base = Arc::new(torus(3).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(1), int(0), int(0)]]).unwrap();
        let z = vec![int(0); m.dim(3)];
        let t = dualize(&Pair::new(Arc::new(m), z).unwrap(), None).unwrap();
        let psi = vec![vec![int(0), int(0), int(0)]];
        let psi_hat = vec![vec![int(0), int(0), int(1)]];
        let acted = gauge_act(&t, &psi, &psi_hat).unwrap();
        assert!(validate_triple(&acted).all_pass());
        let shift = gauge_shift(&t, &psi, &psi_hat).unwrap();
        assert_eq!(shift, vec![int(1)]);
        let diff = torsor_difference(&t, &acted).unwrap();
        assert_eq!(diff.group.reduce(&shift).unwrap(), diff.class);
        // ĉ = 0, so π̂*(c ∪ x3) is not exact and the shift is a genuine move.
        assert!(diff.free);
        assert_eq!(diff.group.to_string(), "Z");
        assert_eq!(diff.class.len(), 1);
        assert_ne!(diff.class[0], int(0));
    }
}
