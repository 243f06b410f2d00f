//! Koszul-type cochain model of a principal torus bundle.
//!
//! The total complex is `C*(B) ⊗ Λ(y₁, …, y_m)` with basis `b·y_S`, the base
//! coefficient written on the left. With `|b| = p`,
//!
//! ```text
//! d(b·y_S) = db·y_S + (−1)^p Σ_{i∈S} ε(i,S) (b·ζᵢ)·y_{S∖i},   ε(i,S) = (−1)^{#{j∈S : j<i}}
//! (b·y_S)(b'·y_T) = (−1)^{|S||b'|} (bb')·(y_S y_T)
//! ```
//!
//! and the filtration degree of `b·y_S` is `p`. The same construction with
//! `2n` generators gives the correspondence space of a T-duality triple.

pub mod spectral;

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use tdk_linalg::{kernel_basis, FgGroup, Int, IntMatrix, Matrix};

use crate::error::{Result, TdkError};
use crate::space::builtin::{subsets, wedge_sign};
use crate::space::dgring::format_terms;
use crate::space::DgRingModel;

pub use spectral::{FiltrationReport, SSPage};

/// `b·y_S` with `b` the `base_idx`-th basis element of degree `base_deg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElem {
    pub base_deg: usize,
    pub base_idx: usize,
    pub mask: u32,
}

impl BasisElem {
    pub fn fiber_degree(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

#[derive(Clone, Debug)]
pub struct KoszulModel {
    base: Arc<DgRingModel>,
    zetas: Vec<Vec<Int>>,
    names: Vec<String>,
    basis: Vec<Vec<BasisElem>>,
    index: Vec<HashMap<BasisElem, usize>>,
    diff: Vec<IntMatrix>,
}

/// Principal `Tⁿ`-bundle model.
pub type BundleModel = KoszulModel;

/// `y` for a single generator, `y1 … yn` otherwise.
pub fn fiber_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl KoszulModel {
    /// Model with fiber generators named `y…`.
    pub fn bundle(base: Arc<DgRingModel>, chern: Vec<Vec<Int>>) -> Result<Self> {
        let names = fiber_names("y", chern.len());
        Self::new(base, chern, names)
    }

    /// `zetas[i]` is the degree-2 base cochain `d(y_i)`.
    pub fn new(base: Arc<DgRingModel>, zetas: Vec<Vec<Int>>, names: Vec<String>) -> Result<Self> {
        let m = zetas.len();
        if m == 0 || m > 12 {
            return Err(TdkError::Parameter {
                name: "chern".into(),
                message: format!("fiber dimension must be 1..=12, got {m}"),
            });
        }
        assert_eq!(names.len(), m, "one name per generator");
        for (i, z) in zetas.iter().enumerate() {
            if z.len() != base.dim(2) {
                return Err(TdkError::schema(
                    format!("$.chern[{i}]"),
                    format!("expected {} coordinates in degree 2, found {}", base.dim(2), z.len()),
                ));
            }
            if !base.is_cocycle(2, z) {
                return Err(TdkError::NotClosed {
                    what: format!("chern cocycle {i} ({})", base.format_element(2, z)),
                });
            }
        }
        let top = base.top_degree() + m;
        let mut basis = vec![Vec::new(); top + 1];
        for (k, bk) in basis.iter_mut().enumerate() {
            for p in 0..=k.min(base.top_degree()) {
                let q = k - p;
                if q > m {
                    continue;
                }
                for mask in subsets(m, q) {
                    for b in 0..base.dim(p) {
                        bk.push(BasisElem {
                            base_deg: p,
                            base_idx: b,
                            mask,
                        });
                    }
                }
            }
        }
        let index = basis
            .iter()
            .map(|bk| bk.iter().enumerate().map(|(i, e)| (*e, i)).collect())
            .collect();
        let mut model = KoszulModel {
            base,
            zetas,
            names,
            basis,
            index,
            diff: Vec::new(),
        };
        model.diff = (0..=top).map(|k| model.build_d(k)).collect();
        for k in 0..top.saturating_sub(1) {
            let dd = model.diff[k + 1].mul(&model.diff[k]);
            if let Some(col) = (0..dd.cols()).find(|&c| dd.column(c).iter().any(|x| !x.is_zero()))
            {
                return Err(TdkError::DSquared {
                    degree: k,
                    label: model.label(&model.basis[k][col]),
                });
            }
        }
        Ok(model)
    }

    fn build_d(&self, k: usize) -> IntMatrix {
        let mut m = Matrix::zeros(self.dim(k + 1), self.dim(k));
        for (col, e) in self.basis[k].iter().enumerate() {
            let p = e.base_deg;
            let db = self.base.d(p);
            for r in 0..self.base.dim(p + 1) {
                if !db[(r, e.base_idx)].is_zero() {
                    let row = self.idx(k + 1, p + 1, r, e.mask);
                    m[(row, col)] += &db[(r, e.base_idx)];
                }
            }
            let mut before = 0;
            for i in 0..self.zetas.len() {
                if e.mask >> i & 1 == 0 {
                    continue;
                }
                let neg = (p + before) % 2 == 1;
                before += 1;
                let bz = self.base.mul(
                    p,
                    &crate::space::dgring::unit_vec(self.base.dim(p), e.base_idx),
                    2,
                    &self.zetas[i],
                );
                for (r, c) in bz.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let row = self.idx(k + 1, p + 2, r, e.mask & !(1 << i));
                    if neg {
                        m[(row, col)] -= c;
                    } else {
                        m[(row, col)] += c;
                    }
                }
            }
        }
        m
    }

    fn idx(&self, k: usize, p: usize, b: usize, mask: u32) -> usize {
        self.index[k][&BasisElem {
            base_deg: p,
            base_idx: b,
            mask,
        }]
    }

    pub fn base(&self) -> &DgRingModel {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<DgRingModel> {
        &self.base
    }

    /// Number of fiber generators.
    pub fn rank(&self) -> usize {
        self.zetas.len()
    }

    pub fn zetas(&self) -> &[Vec<Int>] {
        &self.zetas
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn top_degree(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.basis.get(k).map_or(0, Vec::len)
    }

    pub fn basis(&self, k: usize) -> &[BasisElem] {
        self.basis.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, k: usize, e: &BasisElem) -> Option<usize> {
        self.index.get(k).and_then(|m| m.get(e).copied())
    }

    /// The differential out of degree `k`.
    pub fn d(&self, k: usize) -> &IntMatrix {
        &self.diff[k]
    }

    /// Like [`KoszulModel::d`], but an empty matrix past the top degree.
    pub fn d_or_zero(&self, k: usize) -> IntMatrix {
        match self.diff.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.dim(k + 1), self.dim(k)),
        }
    }

    pub fn apply_d(&self, k: usize, v: &[Int]) -> Vec<Int> {
        if k > self.top_degree() {
            return Vec::new();
        }
        self.diff[k].mul_vec(v)
    }

    pub fn is_cocycle(&self, k: usize, v: &[Int]) -> bool {
        v.len() == self.dim(k) && self.apply_d(k, v).iter().all(Zero::is_zero)
    }

    pub fn fiber_label(&self, mask: u32) -> String {
        (0..self.rank())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.names[i].as_str())
            .collect()
    }

    /// `y⊗g2`, `y1y2`, `x1`, or `1`.
    pub fn label(&self, e: &BasisElem) -> String {
        let fiber = self.fiber_label(e.mask);
        let base = &self.base.labels(e.base_deg)[e.base_idx];
        match (e.mask == 0, e.base_deg == 0) {
            (true, _) => base.clone(),
            (false, true) => fiber,
            (false, false) => format!("{fiber}⊗{base}"),
        }
    }

    pub fn labels(&self, k: usize) -> Vec<String> {
        self.basis(k).iter().map(|e| self.label(e)).collect()
    }

    pub fn format_element(&self, k: usize, v: &[Int]) -> String {
        format_terms(&self.labels(k), v)
    }

    /// `π*`: `b ↦ b·y_∅`.
    pub fn pullback(&self, k: usize, beta: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.dim(k)];
        for (b, c) in beta.iter().enumerate() {
            if !c.is_zero() {
                out[self.idx(k, k, b, 0)] = c.clone();
            }
        }
        out
    }

    /// Components of a degree-`k` element along `b·y_S` for a fixed fiber
    /// monomial, as a base cochain of degree `k − |S|`.
    pub fn base_component(&self, k: usize, v: &[Int], mask: u32) -> Vec<Int> {
        let q = mask.count_ones() as usize;
        if q > k {
            return Vec::new();
        }
        let p = k - q;
        (0..self.base.dim(p))
            .map(|b| match self.index_of(k, &BasisElem { base_deg: p, base_idx: b, mask }) {
                Some(i) => v[i].clone(),
                None => Int::zero(),
            })
            .collect()
    }

    /// Element `Σ_S β_S·y_S` from base cochains, one per fiber monomial.
    pub fn assemble(&self, k: usize, parts: &[(u32, Vec<Int>)]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.dim(k)];
        for (mask, beta) in parts {
            let p = k - mask.count_ones() as usize;
            for (b, c) in beta.iter().enumerate() {
                if !c.is_zero() {
                    out[self.idx(k, p, b, *mask)] += c;
                }
            }
        }
        out
    }

    /// Restriction to a fiber: the coefficients of the monomials `1·y_S`.
    pub fn fiber_restriction(&self, k: usize, v: &[Int]) -> Vec<(u32, Int)> {
        subsets(self.rank(), k)
            .into_iter()
            .map(|mask| {
                let c = self
                    .index_of(k, &BasisElem { base_deg: 0, base_idx: 0, mask })
                    .map_or_else(Int::zero, |i| v[i].clone());
                (mask, c)
            })
            .collect()
    }

    /// Product of a degree-`i` and a degree-`j` element.
    pub fn mul(&self, i: usize, x: &[Int], j: usize, y: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.dim(i + j)];
        if out.is_empty() {
            return out;
        }
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let ea = self.basis[i][a];
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let eb = self.basis[j][b];
                let Some(wneg) = wedge_sign(ea.mask, eb.mask) else {
                    continue;
                };
                let neg = wneg ^ (ea.fiber_degree() * eb.base_deg % 2 == 1);
                let c = xa * yb;
                let prod = self.base.mul_basis(ea.base_deg, ea.base_idx, eb.base_deg, eb.base_idx);
                for (r, pr) in prod.iter().enumerate() {
                    if pr.is_zero() {
                        continue;
                    }
                    let row = self.idx(i + j, ea.base_deg + eb.base_deg, r, ea.mask | eb.mask);
                    if neg {
                        out[row] -= &c * pr;
                    } else {
                        out[row] += &c * pr;
                    }
                }
            }
        }
        out
    }

    /// Ring map out of this model determined by `b ↦ b` and
    /// `y_i ↦ images[i]` (degree-1 elements of `target`, which must share the
    /// base). The images are multiplied in increasing generator order.
    pub fn substitute(&self, target: &KoszulModel, k: usize, v: &[Int], images: &[Vec<Int>]) -> Vec<Int> {
        assert_eq!(images.len(), self.rank(), "one image per generator");
        let mut out = vec![Int::zero(); target.dim(k)];
        for (a, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.basis[k][a];
            let mut acc = vec![Int::zero(); target.dim(e.base_deg)];
            acc[target.idx(e.base_deg, e.base_deg, e.base_idx, 0)] = c.clone();
            let mut deg = e.base_deg;
            for (i, img) in images.iter().enumerate() {
                if e.mask >> i & 1 == 1 {
                    acc = target.mul(deg, &acc, 1, img);
                    deg += 1;
                }
            }
            for (o, x) in out.iter_mut().zip(acc) {
                *o += x;
            }
        }
        out
    }

    /// The degree-1 element `y_i`.
    pub fn generator(&self, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); self.dim(1)];
        v[self.idx(1, 0, 0, 1 << i)] = Int::one();
        v
    }

    pub fn cohomology(&self, k: usize) -> FgGroup {
        let n = self.dim(k);
        let z = kernel_basis(&self.diff[k]);
        let b = if k == 0 {
            Matrix::zeros(n, 0)
        } else {
            self.diff[k - 1].clone()
        };
        FgGroup::subquotient(n, &z, &b).expect("coboundaries are cocycles")
    }

    /// Indices of the degree-`k` basis with filtration degree `< p`.
    pub(crate) fn below(&self, k: usize, p: i64) -> Vec<usize> {
        self.basis(k)
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.base_deg as i64) < p)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the degree-`k` basis with filtration degree `≥ p`.
    pub(crate) fn at_least(&self, k: usize, p: i64) -> Vec<usize> {
        self.basis(k)
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.base_deg as i64) >= p)
            .map(|(i, _)| i)
            .collect()
    }
}
