//! Finite differential graded rings over ℤ, given by structure constants.

use std::collections::HashSet;

use num_traits::{One, Zero};
use tdk_linalg::{kernel_basis, FgGroup, Int, IntMatrix, Matrix};

use crate::error::{Result, TdkError};

pub const DEFAULT_TRUNCATION: usize = 4;

/// Degree bound for input models: `TDK_TRUNCATION` if set to a positive
/// integer, otherwise [`DEFAULT_TRUNCATION`].
pub fn truncation_bound() -> usize {
    std::env::var("TDK_TRUNCATION")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&b| b >= 1)
        .unwrap_or(DEFAULT_TRUNCATION)
}

/// `basis(i_deg, i_idx) · basis(j_deg, j_idx) = Σ coeff · basis(i_deg + j_deg, idx)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEntry {
    pub i_deg: usize,
    pub i_idx: usize,
    pub j_deg: usize,
    pub j_idx: usize,
    pub result: Vec<(usize, Int)>,
}

/// A closed cochain in a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleRef {
    pub degree: usize,
    pub coeffs: Vec<Int>,
}

/// Free graded ℤ-module in degrees `0..=top` with a differential and an
/// associative, graded-commutative product with unit. The degree-0 part is
/// `ℤ·1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgRingModel {
    labels: Vec<Vec<String>>,
    /// `diff[k]` maps degree `k` to degree `k + 1`; `diff[top]` has no rows.
    diff: Vec<IntMatrix>,
    /// `prod[i][j][a * dim(j) + b]`: coordinates of `e_a · e_b` in degree `i + j`
    /// (empty when `i + j > top`).
    prod: Vec<Vec<Vec<Vec<Int>>>>,
    flags: Vec<String>,
}

fn sign(odd: bool) -> Int {
    if odd {
        -Int::one()
    } else {
        Int::one()
    }
}

impl DgRingModel {
    /// Builds and validates a model. `diff` holds the maps out of degrees
    /// `0..top` (a missing tail is zero). Products with the unit that are not
    /// listed are filled in as the identity; everything else not listed is zero.
    pub fn new(
        labels: Vec<Vec<String>>,
        diff: Vec<IntMatrix>,
        products: &[ProductEntry],
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(TdkError::schema("$.basis", "at least degree 0 is required"));
        }
        let top = labels.len() - 1;
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        if dims[0] != 1 {
            return Err(TdkError::NotConnected(format!(
                "degree 0 has {} basis elements",
                dims[0]
            )));
        }
        let mut seen = HashSet::new();
        for (k, ls) in labels.iter().enumerate() {
            for (i, l) in ls.iter().enumerate() {
                if !seen.insert(l.as_str()) {
                    return Err(TdkError::schema(
                        format!("$.basis[{k}][{i}]"),
                        format!("duplicate label {l:?}"),
                    ));
                }
            }
        }
        if diff.len() > top {
            return Err(TdkError::schema(
                "$.diff",
                format!("differential given out of degree {} > top degree {top}", diff.len() - 1),
            ));
        }
        let mut full = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let rows = if k < top { dims[k + 1] } else { 0 };
            let m = match diff.get(k) {
                Some(m) => {
                    if m.rows() != rows || m.cols() != dims[k] {
                        return Err(TdkError::schema(
                            format!("$.diff[deg={k}]"),
                            format!(
                                "expected a {rows}x{} matrix, found {}x{}",
                                dims[k],
                                m.rows(),
                                m.cols()
                            ),
                        ));
                    }
                    m.clone()
                }
                None => Matrix::zeros(rows, dims[k]),
            };
            full.push(m);
        }
        let mut prod: Vec<Vec<Vec<Vec<Int>>>> = (0..=top)
            .map(|i| {
                (0..=top)
                    .map(|j| {
                        let len = if i + j <= top { dims[i + j] } else { 0 };
                        vec![vec![Int::zero(); len]; dims[i] * dims[j]]
                    })
                    .collect()
            })
            .collect();
        let mut given = HashSet::new();
        for (n, e) in products.iter().enumerate() {
            let path = format!("$.product[{n}]");
            if e.i_deg > top || e.j_deg > top || e.i_idx >= dims[e.i_deg] || e.j_idx >= dims[e.j_deg]
            {
                return Err(TdkError::schema(path, "basis index out of range"));
            }
            let deg = e.i_deg + e.j_deg;
            if deg > top {
                if e.result.iter().any(|(_, c)| !c.is_zero()) {
                    return Err(TdkError::schema(
                        path,
                        format!("product lands in degree {deg} above the top degree {top}"),
                    ));
                }
                continue;
            }
            if !given.insert((e.i_deg, e.i_idx, e.j_deg, e.j_idx)) {
                return Err(TdkError::schema(path, "duplicate product entry"));
            }
            let slot = &mut prod[e.i_deg][e.j_deg][e.i_idx * dims[e.j_deg] + e.j_idx];
            for (idx, c) in &e.result {
                if *idx >= dims[deg] {
                    return Err(TdkError::schema(
                        format!("{path}.result"),
                        format!("index {idx} out of range for degree {deg}"),
                    ));
                }
                slot[*idx] += c;
            }
        }
        for k in 0..=top {
            for b in 0..dims[k] {
                if !given.contains(&(0, 0, k, b)) {
                    prod[0][k][b][b] = Int::one();
                }
                if !given.contains(&(k, b, 0, 0)) {
                    prod[k][0][b][b] = Int::one();
                }
            }
        }
        let model = DgRingModel {
            labels,
            diff: full,
            prod,
            flags: Vec::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub(crate) fn with_flag(mut self, flag: &str) -> Self {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.to_string());
        }
        self
    }

    /// Metadata attached by constructors (for instance the formality
    /// assumption of a model computed from a triangulation).
    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    pub fn top_degree(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.labels.get(k).map_or(0, Vec::len)
    }

    pub fn labels(&self, k: usize) -> &[String] {
        self.labels.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn all_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn find_label(&self, name: &str) -> Option<(usize, usize)> {
        self.labels
            .iter()
            .enumerate()
            .find_map(|(k, ls)| ls.iter().position(|l| l == name).map(|i| (k, i)))
    }

    /// The differential out of degree `k` (zero rows past the top).
    pub fn d(&self, k: usize) -> IntMatrix {
        match self.diff.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.dim(k + 1), self.dim(k)),
        }
    }

    pub fn apply_d(&self, k: usize, v: &[Int]) -> Vec<Int> {
        match self.diff.get(k) {
            Some(m) => m.mul_vec(v),
            None => vec![Int::zero(); self.dim(k + 1)],
        }
    }

    pub fn is_cocycle(&self, k: usize, v: &[Int]) -> bool {
        v.len() == self.dim(k) && self.apply_d(k, v).iter().all(Zero::is_zero)
    }

    /// `e_a · e_b` for basis elements in degrees `i`, `j`.
    pub fn mul_basis(&self, i: usize, a: usize, j: usize, b: usize) -> &[Int] {
        if i > self.top_degree() || j > self.top_degree() {
            return &[];
        }
        &self.prod[i][j][a * self.dim(j) + b]
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
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let c = xa * yb;
                for (o, p) in out.iter_mut().zip(self.mul_basis(i, a, j, b)) {
                    if !p.is_zero() {
                        *o += &c * p;
                    }
                }
            }
        }
        out
    }

    /// Coordinates of the unit.
    pub fn unit(&self) -> Vec<Int> {
        vec![Int::one()]
    }

    /// `Hᵏ` as `ker d_k / im d_{k-1}` inside the degree-`k` cochains.
    pub fn cohomology(&self, k: usize) -> FgGroup {
        let n = self.dim(k);
        let z = kernel_basis(&self.d(k));
        let b = if k == 0 {
            Matrix::zeros(n, 0)
        } else {
            self.d(k - 1)
        };
        FgGroup::subquotient(n, &z, &b).expect("coboundaries are cocycles")
    }

    /// Human-readable `2*x1 - x2`.
    pub fn format_element(&self, k: usize, v: &[Int]) -> String {
        format_terms(self.labels(k), v)
    }

    fn validate(&self) -> Result<()> {
        let top = self.top_degree();
        let lab = |k: usize, i: usize| self.labels[k][i].clone();
        for b in 0..self.dim(0) {
            for k in 0..=top {
                for x in 0..self.dim(k) {
                    let e = unit_vec(self.dim(k), x);
                    if self.mul_basis(0, b, k, x) != e.as_slice()
                        || self.mul_basis(k, x, 0, b) != e.as_slice()
                    {
                        return Err(TdkError::Unit { label: lab(k, x) });
                    }
                }
            }
        }
        for k in 0..top.saturating_sub(1) {
            let dd = self.diff[k + 1].mul(&self.diff[k]);
            if let Some(col) = (0..dd.cols()).find(|&c| dd.column(c).iter().any(|x| !x.is_zero()))
            {
                return Err(TdkError::DSquared {
                    degree: k,
                    label: lab(k, col),
                });
            }
        }
        for i in 0..=top {
            for j in 0..=top - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let ab = self.mul_basis(i, a, j, b);
                        let ba = self.mul_basis(j, b, i, a);
                        let s = sign(i * j % 2 == 1);
                        if ab.iter().zip(ba).any(|(x, y)| *x != &s * y) {
                            return Err(TdkError::Commutativity {
                                a: lab(i, a),
                                b: lab(j, b),
                            });
                        }
                        if i + j < top {
                            let lhs = self.apply_d(i + j, ab);
                            let da = self.diff[i].column(a);
                            let db = self.diff[j].column(b);
                            let t1 = self.mul(i + 1, &da, j, &unit_vec(self.dim(j), b));
                            let t2 = self.mul(i, &unit_vec(self.dim(i), a), j + 1, &db);
                            let s = sign(i % 2 == 1);
                            if lhs
                                .iter()
                                .zip(t1.iter().zip(&t2))
                                .any(|(l, (x, y))| *l != x + &s * y)
                            {
                                return Err(TdkError::Leibniz {
                                    a: lab(i, a),
                                    b: lab(j, b),
                                });
                            }
                        }
                    }
                }
            }
        }
        for i in 1..=top {
            for j in 1..=top.saturating_sub(i) {
                for k in 1..=top.saturating_sub(i + j) {
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            let ab = self.mul_basis(i, a, j, b).to_vec();
                            for c in 0..self.dim(k) {
                                let bc = self.mul_basis(j, b, k, c).to_vec();
                                let ec = unit_vec(self.dim(k), c);
                                let ea = unit_vec(self.dim(i), a);
                                if self.mul(i + j, &ab, k, &ec) != self.mul(i, &ea, j + k, &bc) {
                                    return Err(TdkError::Associativity {
                                        a: lab(i, a),
                                        b: lab(j, b),
                                        c: lab(k, c),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn unit_vec(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

pub(crate) fn format_terms<S: AsRef<str>>(labels: &[S], v: &[Int]) -> String {
    let mut out = String::new();
    for (l, c) in labels.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Int::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag.is_one() {
            out.push_str(l.as_ref());
        } else {
            out.push_str(&format!("{mag}*{}", l.as_ref()));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2(v_sign: i64) -> Result<DgRingModel> {
        let labels = vec![
            vec!["1".to_string()],
            vec!["x1".to_string(), "x2".to_string()],
            vec!["v".to_string()],
        ];
        let e = |i, j, c: i64| ProductEntry {
            i_deg: 1,
            i_idx: i,
            j_deg: 1,
            j_idx: j,
            result: vec![(0, Int::from(c))],
        };
        DgRingModel::new(
            labels,
            vec![],
            &[e(0, 1, 1), e(1, 0, v_sign)],
        )
    }

    #[test]
    fn torus_document_is_valid() {
        let m = t2(-1).unwrap();
        assert_eq!(m.top_degree(), 2);
        assert_eq!(m.mul_basis(1, 0, 1, 1), &[Int::one()]);
        let h1 = m.cohomology(1);
        assert_eq!(h1.rank(), 2);
    }

    #[test]
    fn commutativity_failure_names_the_pair() {
        match t2(1) {
            Err(TdkError::Commutativity { a, b }) => assert_eq!((a.as_str(), b.as_str()), ("x1", "x2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn d_squared_rejected() {
        let labels = vec![
            vec!["1".to_string()],
            vec!["a".to_string()],
            vec!["b".to_string()],
            vec!["c".to_string()],
        ];
        let one = |r, c| IntMatrix::from_fn(r, c, |_, _| Int::one());
        let err = DgRingModel::new(labels, vec![one(1, 1), one(1, 1), one(1, 1)], &[]).unwrap_err();
        // d(1) ≠ 0 already breaks Leibniz; the d² check runs first.
        assert!(matches!(err, TdkError::DSquared { degree: 0, .. }), "{err:?}");
    }

    #[test]
    fn format_terms_signs() {
        let labels = ["a", "b", "c"];
        let v = [Int::from(2), Int::from(-1), Int::zero()];
        assert_eq!(format_terms(&labels, &v), "2*a - b");
        assert_eq!(format_terms(&labels, &[Int::zero(), Int::zero(), Int::zero()]), "0");
    }
}
