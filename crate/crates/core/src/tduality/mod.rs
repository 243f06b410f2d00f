//! Pairs, T-duality triples, dualizability and the construction of duals.
//!
//! A triple consists of two bundle models `F`, `F̂` over the same base with
//! fluxes `z`, `ẑ`, and a degree-2 cochain `w` on the correspondence model
//! `C*(B) ⊗ Λ(y₁…yₙ, ŷ₁…ŷₙ)` with `dw = p̂*ẑ − p*z`, whose restriction to a
//! fiber is `Σ yᵢŷᵢ` modulo `Λ²(y) + Λ²(ŷ)`.

pub mod extension;
pub mod torsor;

use std::sync::Arc;

use num_traits::{One, Zero};
use tdk_linalg::{Int, IntMatrix};

use crate::bundle::{fiber_names, BasisElem, FiltrationReport, KoszulModel};
use crate::error::{Result, TdkError};

pub use extension::{extension_report, ExtensionReport};
pub use torsor::{gauge_act, gauge_shift, h3_action, torsor_difference, TorsorDifference};

#[derive(Clone, Debug)]
pub struct Pair {
    pub bundle: Arc<KoszulModel>,
    /// Degree-3 cocycle on the total model.
    pub flux: Vec<Int>,
}

impl Pair {
    pub fn new(bundle: Arc<KoszulModel>, flux: Vec<Int>) -> Result<Self> {
        if flux.len() != bundle.dim(3) {
            return Err(TdkError::schema(
                "$.flux",
                format!("expected {} coordinates in degree 3, found {}", bundle.dim(3), flux.len()),
            ));
        }
        if !bundle.is_cocycle(3, &flux) {
            return Err(TdkError::NotClosed {
                what: format!("flux {}", bundle.format_element(3, &flux)),
            });
        }
        Ok(Pair { bundle, flux })
    }

    pub fn n(&self) -> usize {
        self.bundle.rank()
    }

    /// Chern classes in `H²(B)` normal-form coordinates.
    pub fn chern_classes(&self) -> Vec<Vec<Int>> {
        let h2 = self.bundle.base().cohomology(2);
        self.bundle
            .zetas()
            .iter()
            .map(|z| h2.reduce(z).expect("chern cocycles are closed"))
            .collect()
    }

    /// Flux class in `H³(F)` normal-form coordinates.
    pub fn flux_class(&self) -> Vec<Int> {
        self.bundle
            .cohomology(3)
            .reduce(&self.flux)
            .expect("flux is closed")
    }
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub side: Pair,
    pub dual: Pair,
    pub correspondence: Arc<KoszulModel>,
    pub w: Vec<Int>,
}

/// Correspondence model with generators `y…` of `side` followed by `ŷ…` of `dual`.
pub fn correspondence_model(side: &KoszulModel, dual: &KoszulModel) -> Result<KoszulModel> {
    if side.base() != dual.base() {
        return Err(TdkError::BundleMismatch("the two bundles have different bases".into()));
    }
    if side.rank() != dual.rank() {
        return Err(TdkError::BundleMismatch(format!(
            "fiber dimensions differ ({} vs {})",
            side.rank(),
            dual.rank()
        )));
    }
    let mut zetas = side.zetas().to_vec();
    zetas.extend(dual.zetas().iter().cloned());
    let mut names = side.names().to_vec();
    names.extend(dual.names().iter().cloned());
    KoszulModel::new(side.base_arc().clone(), zetas, names)
}

/// `b·y_S ↦ b·y_{S << shift}` from `from` into `to`.
pub(crate) fn embed(from: &KoszulModel, to: &KoszulModel, k: usize, v: &[Int], shift: usize) -> Vec<Int> {
    let mut out = vec![Int::zero(); to.dim(k)];
    for (e, c) in from.basis(k).iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let target = BasisElem {
            mask: e.mask << shift,
            ..*e
        };
        out[to.index_of(k, &target).expect("generator embedding")] += c;
    }
    out
}

pub(crate) fn embed_matrix(from: &KoszulModel, to: &KoszulModel, k: usize, shift: usize) -> IntMatrix {
    let cols: Vec<Vec<Int>> = (0..from.dim(k))
        .map(|i| {
            let mut e = vec![Int::zero(); from.dim(k)];
            e[i] = Int::one();
            embed(from, to, k, &e, shift)
        })
        .collect();
    IntMatrix::from_columns(to.dim(k), &cols)
}

impl Triple {
    /// Checks shapes only; use [`validate_triple`] for the defining conditions.
    pub fn new(side: Pair, dual: Pair, w: Vec<Int>) -> Result<Self> {
        let correspondence = Arc::new(correspondence_model(&side.bundle, &dual.bundle)?);
        Self::from_parts(side, dual, correspondence, w)
    }

    pub(crate) fn from_parts(
        side: Pair,
        dual: Pair,
        correspondence: Arc<KoszulModel>,
        w: Vec<Int>,
    ) -> Result<Self> {
        if w.len() != correspondence.dim(2) {
            return Err(TdkError::schema(
                "$.correspondence",
                format!(
                    "expected {} coordinates in degree 2, found {}",
                    correspondence.dim(2),
                    w.len()
                ),
            ));
        }
        Ok(Triple {
            side,
            dual,
            correspondence,
            w,
        })
    }

    pub fn n(&self) -> usize {
        self.side.n()
    }

    /// `p*` from the side model into the correspondence model.
    pub fn p_star(&self, k: usize, v: &[Int]) -> Vec<Int> {
        embed(&self.side.bundle, &self.correspondence, k, v, 0)
    }

    /// `p̂*` from the dual model into the correspondence model.
    pub fn p_hat_star(&self, k: usize, v: &[Int]) -> Vec<Int> {
        embed(&self.dual.bundle, &self.correspondence, k, v, self.n())
    }

    /// The n=1 triple over a point: everything zero except `w = yŷ`.
    pub fn point_base_case() -> Self {
        let base = Arc::new(crate::space::builtin::point());
        let f = Arc::new(KoszulModel::bundle(base.clone(), vec![vec![]]).expect("point bundle"));
        let fh = Arc::new(
            KoszulModel::new(base, vec![vec![]], fiber_names("ŷ", 1)).expect("point bundle"),
        );
        let side = Pair::new(f, vec![]).expect("zero flux");
        let dual = Pair::new(fh, vec![]).expect("zero flux");
        let d = Arc::new(correspondence_model(&side.bundle, &dual.bundle).expect("same base"));
        let w = yyhat(&d, 1);
        Triple::from_parts(side, dual, d, w).expect("shapes")
    }
}

/// `Σ yᵢŷᵢ` in the correspondence model.
pub(crate) fn yyhat(d: &KoszulModel, n: usize) -> Vec<Int> {
    let mut w = vec![Int::zero(); d.dim(2)];
    for i in 0..n {
        let e = BasisElem {
            base_deg: 0,
            base_idx: 0,
            mask: 1 << i | 1 << (n + i),
        };
        w[d.index_of(2, &e).expect("fiber monomial")] = Int::one();
    }
    w
}

/// `z + de = Σ βᵢ·yᵢ + β` with `βᵢ ∈ C²(B)`, `β ∈ C³(B)`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub correction: Vec<Int>,
    pub betas: Vec<Vec<Int>>,
    pub beta: Vec<Int>,
}

/// Pushes a degree-3 cocycle into `F²`, using the Smith-form particular
/// solution for the correction.
pub fn normal_form(bundle: &KoszulModel, z: &[Int]) -> Option<NormalForm> {
    let e = bundle.push_into_filtration(3, z, 2)?;
    Some(normal_form_with(bundle, z, e))
}

fn normal_form_with(bundle: &KoszulModel, z: &[Int], e: Vec<Int>) -> NormalForm {
    let de = bundle.apply_d(2, &e);
    let zp: Vec<Int> = z.iter().zip(&de).map(|(a, b)| a + b).collect();
    let betas = (0..bundle.rank())
        .map(|i| bundle.base_component(3, &zp, 1 << i))
        .collect();
    let beta = bundle.base_component(3, &zp, 0);
    NormalForm {
        correction: e,
        betas,
        beta,
    }
}

pub fn is_dualizable(pair: &Pair) -> Result<(bool, FiltrationReport)> {
    let rep = pair.bundle.filtration_report(3, &pair.flux)?;
    let ok = rep.filtration.is_none_or(|p| p >= 2);
    Ok((ok, rep))
}

/// Dual Chern data read off the leading part of the flux.
#[derive(Clone, Debug)]
pub struct DualChern {
    /// Representative cocycles `ζ̂ᵢ`.
    pub cocycles: Vec<Vec<Int>>,
    /// Their classes in `H²(B)` normal-form coordinates.
    pub classes: Vec<Vec<Int>>,
    /// Generators of the ambiguity lattice `{B·c : B antisymmetric}`, one per
    /// elementary matrix `E_ji − E_ij` (i < j), as vectors of `n` classes.
    pub ambiguity: Vec<Vec<Vec<Int>>>,
    /// `Σ cᵢ ∪ ĉᵢ = 0` in `H⁴(B)`.
    pub quadratic_relation: bool,
}

/// The antisymmetric matrix with `B[j][i] = 1`, `B[i][j] = −1`.
pub fn elementary_antisymmetric(n: usize, i: usize, j: usize) -> IntMatrix {
    let mut b = IntMatrix::zeros(n, n);
    b[(j, i)] = Int::one();
    b[(i, j)] = -Int::one();
    b
}

pub(crate) fn is_antisymmetric(b: &IntMatrix) -> bool {
    b.rows() == b.cols() && b.add(&b.transpose()).is_zero()
}

/// `(B·v)_j = Σᵢ B_ji vᵢ` for a vector of base cochains.
pub(crate) fn act_on_cochains(b: &IntMatrix, v: &[Vec<Int>]) -> Vec<Vec<Int>> {
    (0..b.rows())
        .map(|j| {
            let len = v.first().map_or(0, Vec::len);
            let mut acc = vec![Int::zero(); len];
            for (i, vi) in v.iter().enumerate() {
                let c = &b[(j, i)];
                if c.is_zero() {
                    continue;
                }
                for (a, x) in acc.iter_mut().zip(vi) {
                    *a += c * x;
                }
            }
            acc
        })
        .collect()
}

pub(crate) fn quadratic_relation(base: &crate::space::DgRingModel, c: &[Vec<Int>], chat: &[Vec<Int>]) -> bool {
    if base.top_degree() < 4 {
        return true;
    }
    let mut acc = vec![Int::zero(); base.dim(4)];
    for (a, b) in c.iter().zip(chat) {
        for (x, y) in acc.iter_mut().zip(base.mul(2, a, 2, b)) {
            *x += y;
        }
    }
    base.cohomology(4).is_zero_element(&acc).expect("products of cocycles are cocycles")
}

pub fn extract_dual_chern(pair: &Pair) -> Result<DualChern> {
    let (ok, rep) = is_dualizable(pair)?;
    if !ok {
        return Err(TdkError::NotDualizable {
            filtration: rep.filtration.unwrap_or(0),
        });
    }
    let nf = normal_form(&pair.bundle, &pair.flux)
        .ok_or_else(|| TdkError::NoSolution("normal form of a class in F^2".into()))?;
    let base = pair.bundle.base();
    let h2 = base.cohomology(2);
    let classes = nf
        .betas
        .iter()
        .map(|b| h2.reduce(b))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let n = pair.n();
    let zetas = pair.bundle.zetas();
    let mut ambiguity = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let shift = act_on_cochains(&elementary_antisymmetric(n, i, j), zetas);
            ambiguity.push(
                shift
                    .iter()
                    .map(|s| h2.reduce(s))
                    .collect::<std::result::Result<Vec<_>, _>>()?,
            );
        }
    }
    let quadratic = quadratic_relation(base, zetas, &nf.betas);
    Ok(DualChern {
        cocycles: nf.betas,
        classes,
        ambiguity,
        quadratic_relation: quadratic,
    })
}

/// Constructs a triple with `pair` as its first side.
///
/// The flux is brought to `z + de = Σ βᵢyᵢ + β`; then `ζ̂ᵢ = βᵢ`,
/// `ẑ = Σ ζᵢŷᵢ + β` and `w = Σ yᵢŷᵢ + p*e`. An antisymmetric `shear` adds
/// `d(Σ_{i<j} B_ji yᵢyⱼ)` to the correction first, which moves the dual Chern
/// classes to `ĉ + B·c`.
pub fn dualize(pair: &Pair, shear: Option<&IntMatrix>) -> Result<Triple> {
    let (ok, rep) = is_dualizable(pair)?;
    if !ok {
        return Err(TdkError::NotDualizable {
            filtration: rep.filtration.unwrap_or(0),
        });
    }
    let bundle = &pair.bundle;
    let n = pair.n();
    let mut e = bundle
        .push_into_filtration(3, &pair.flux, 2)
        .ok_or_else(|| TdkError::NoSolution("normal form of a class in F^2".into()))?;
    if let Some(b) = shear {
        if b.rows() != n || !is_antisymmetric(b) {
            return Err(TdkError::Parameter {
                name: "shear".into(),
                message: format!("expected an antisymmetric {n}x{n} matrix"),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                let el = BasisElem {
                    base_deg: 0,
                    base_idx: 0,
                    mask: 1 << i | 1 << j,
                };
                e[bundle.index_of(2, &el).expect("fiber monomial")] += &b[(j, i)];
            }
        }
    }
    let nf = normal_form_with(bundle, &pair.flux, e);
    let dual_bundle = Arc::new(KoszulModel::new(
        bundle.base_arc().clone(),
        nf.betas.clone(),
        fiber_names("ŷ", n),
    )?);
    let mut parts: Vec<(u32, Vec<Int>)> = bundle
        .zetas()
        .iter()
        .enumerate()
        .map(|(i, z)| (1u32 << i, z.clone()))
        .collect();
    parts.push((0, nf.beta.clone()));
    let zhat = dual_bundle.assemble(3, &parts);
    let dual = Pair::new(dual_bundle, zhat)?;
    let d = Arc::new(correspondence_model(bundle, &dual.bundle)?);
    let pe = embed(bundle, &d, 2, &nf.correction, 0);
    let w = yyhat(&d, n).iter().zip(&pe).map(|(a, b)| a + b).collect();
    Triple::from_parts(pair.clone(), dual, d, w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckItem {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleReport {
    pub items: Vec<CheckItem>,
}

impl TripleReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

/// `x − Σ ζᵢ'·yᵢ ∈ F³ + im d`, the cochain form of "the leading part of `x`
/// is `Σ yᵢ ⊗ [ζᵢ']`".
fn leading_matches(bundle: &KoszulModel, x: &[Int], other: &[Vec<Int>]) -> bool {
    let parts: Vec<(u32, Vec<Int>)> = other
        .iter()
        .enumerate()
        .map(|(i, z)| (1u32 << i, z.clone()))
        .collect();
    let lead = bundle.assemble(3, &parts);
    let diff: Vec<Int> = x.iter().zip(&lead).map(|(a, b)| a - b).collect();
    bundle.push_into_filtration(3, &diff, 3).is_some()
}

pub fn validate_triple(t: &Triple) -> TripleReport {
    let f = &t.side.bundle;
    let fh = &t.dual.bundle;
    let d = &t.correspondence;
    let n = t.n();
    let mut items = Vec::new();
    let closed_z = f.is_cocycle(3, &t.side.flux);
    items.push(CheckItem {
        name: "closed_z",
        pass: closed_z,
        detail: f.format_element(3, &t.side.flux),
    });
    let closed_zh = fh.is_cocycle(3, &t.dual.flux);
    items.push(CheckItem {
        name: "closed_zhat",
        pass: closed_zh,
        detail: fh.format_element(3, &t.dual.flux),
    });
    items.push(CheckItem {
        name: "leading_z",
        pass: leading_matches(f, &t.side.flux, fh.zetas()),
        detail: "z − Σ ζ̂ᵢ·yᵢ ∈ F³ + im d".into(),
    });
    items.push(CheckItem {
        name: "leading_zhat",
        pass: leading_matches(fh, &t.dual.flux, f.zetas()),
        detail: "ẑ − Σ ζᵢ·ŷᵢ ∈ F³ + im d".into(),
    });
    let dw = d.apply_d(2, &t.w);
    let rhs: Vec<Int> = t
        .p_hat_star(3, &t.dual.flux)
        .iter()
        .zip(t.p_star(3, &t.side.flux))
        .map(|(a, b)| a - b)
        .collect();
    let resid: Vec<Int> = dw.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    items.push(CheckItem {
        name: "dw_equation",
        pass: resid.iter().all(Zero::is_zero),
        detail: format!("dw − (p̂*ẑ − p*z) = {}", d.format_element(3, &resid)),
    });
    let low = (1u32 << n) - 1;
    let mixed_ok = d.fiber_restriction(2, &t.w).into_iter().all(|(mask, c)| {
        let (a, b) = (mask & low, mask >> n);
        if a == 0 || b == 0 {
            return true;
        }
        let expect = if a == b { Int::one() } else { Int::zero() };
        c == expect
    });
    items.push(CheckItem {
        name: "condition_p",
        pass: mixed_ok,
        detail: "fiber restriction of w ≡ Σ yᵢŷᵢ mod Λ²(y) + Λ²(ŷ)".into(),
    });
    items.push(CheckItem {
        name: "quadratic_relation",
        pass: quadratic_relation(f.base(), f.zetas(), fh.zetas()),
        detail: "Σ cᵢ ∪ ĉᵢ = 0 in H⁴(B)".into(),
    });
    TripleReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::builtin::{sphere, torus};

    fn int(x: i64) -> Int {
        Int::from(x)
    }

    fn hopf_pair(k: i64) -> Pair {
        let m = KoszulModel::bundle(Arc::new(sphere(2).unwrap()), vec![vec![int(1)]]).unwrap();
        Pair::new(Arc::new(m), vec![int(k)]).unwrap()
    }

    #[test]
    fn point_triple_validates() {
        let t = Triple::point_base_case();
        let rep = validate_triple(&t);
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn hopf_dual_is_lens_space() {
        for k in [0, 1, 2, 3, -1] {
            let t = dualize(&hopf_pair(k), None).unwrap();
            assert_eq!(t.dual.bundle.zetas(), &[vec![int(k)]]);
            let rep = validate_triple(&t);
            assert!(rep.all_pass(), "k={k}: {rep:?}");
        }
    }

    #[test]
    fn tampered_w_fails() {
        let t = dualize(&hopf_pair(2), None).unwrap();
        let mut bad = t.clone();
        bad.w = t.w.iter().map(|x| x * int(2)).collect();
        let rep = validate_triple(&bad);
        assert!(!rep.item("condition_p").unwrap().pass);
        assert!(!rep.item("dw_equation").unwrap().pass);
    }

    #[test]
    fn trivial_t3_over_t2() {
        let m = KoszulModel::bundle(Arc::new(torus(2).unwrap()), vec![vec![int(0)]]).unwrap();
        let vol = m.assemble(3, &[(1, vec![int(3)])]);
        let t = dualize(&Pair::new(Arc::new(m), vol).unwrap(), None).unwrap();
        assert_eq!(t.dual.bundle.zetas(), &[vec![int(3)]]);
        assert!(t.dual.flux.iter().all(Zero::is_zero));
        assert!(validate_triple(&t).all_pass());
    }

    #[test]
    fn shear_moves_dual_chern() {
        let base = Arc::new(torus(2).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(1)], vec![int(0)]]).unwrap();
        let pair = Pair::new(Arc::new(m), vec![int(0); 4]).unwrap();
        let b = elementary_antisymmetric(2, 0, 1);
        let t = dualize(&pair, Some(&b)).unwrap();
        // ĉ₂ = B₂₁·c₁ = c₁
        assert_eq!(t.dual.bundle.zetas()[1], vec![int(1)]);
        assert!(validate_triple(&t).all_pass());
    }

    #[test]
    fn double_dual_recovers_pair() {
        let base = Arc::new(torus(3).unwrap());
        let m = KoszulModel::bundle(base, vec![vec![int(1), int(0), int(2)]]).unwrap();
        let z = m.assemble(3, &[(1, vec![int(0), int(3), int(0)]), (0, vec![int(4)])]);
        let pair = Pair::new(Arc::new(m), z).unwrap();
        let t = dualize(&pair, None).unwrap();
        assert!(validate_triple(&t).all_pass());
        let tt = dualize(&t.dual, None).unwrap();
        assert_eq!(tt.dual.bundle.zetas(), pair.bundle.zetas());
        let h3 = pair.bundle.cohomology(3);
        assert_eq!(h3.reduce(&tt.dual.flux).unwrap(), pair.flux_class());
    }
}
