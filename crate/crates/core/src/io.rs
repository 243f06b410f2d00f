//! JSON documents for spaces, pairs, triples and O(n,n) elements.
//!
//! Integers are read from decimal strings or JSON integers and always written
//! as decimal strings. Every schema error carries a `$.path` location.

use std::sync::Arc;

use num_traits::Zero;
use serde_json::{json, Map, Value};
use tdk_linalg::{FgGroup, Int, IntMatrix, Matrix};

use crate::bundle::{fiber_names, BasisElem, KoszulModel};
use crate::error::{Result, TdkError};
use crate::space::{
    builtin_expr, builtin_space, cohomology_ring, truncation_bound, DgRingModel, ProductEntry,
    SimplicialComplex,
};
use crate::tduality::{Pair, Triple};

const MAX_VERTICES: usize = 4096;
const MAX_BASIS: usize = 512;
const MAX_FIBER: usize = 8;

/// Carried by models read from a `dgring` document: whether they model a
/// space is the caller's hypothesis.
pub const FLAG_USER_MODEL: &str = "user_model_assumed";

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| TdkError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    let obj = v
        .as_object()
        .ok_or_else(|| TdkError::schema(path, "expected an object"))?;
    obj.get(key)
        .ok_or_else(|| TdkError::schema(path, format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| TdkError::schema(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| TdkError::schema(path, "expected a string"))
}

pub fn parse_int(v: &Value, path: &str) -> Result<Int> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|_| TdkError::schema(path, format!("not a decimal integer: {s:?}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Int::from(u))
            } else {
                Err(TdkError::schema(
                    path,
                    format!("{n} is not an exact integer; use a decimal string"),
                ))
            }
        }
        _ => Err(TdkError::schema(path, "expected an integer")),
    }
}

fn parse_usize(v: &Value, path: &str) -> Result<usize> {
    let i = parse_int(v, path)?;
    usize::try_from(&i).map_err(|_| TdkError::schema(path, format!("expected a nonnegative count, got {i}")))
}

fn parse_matrix(v: &Value, rows: usize, cols: usize, path: &str) -> Result<IntMatrix> {
    let rs = array(v, path)?;
    if rs.len() != rows {
        return Err(TdkError::schema(path, format!("expected {rows} rows, found {}", rs.len())));
    }
    let mut m = Matrix::zeros(rows, cols);
    for (i, r) in rs.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let cs = array(r, &rp)?;
        if cs.len() != cols {
            return Err(TdkError::schema(&rp, format!("expected {cols} entries, found {}", cs.len())));
        }
        for (j, c) in cs.iter().enumerate() {
            m[(i, j)] = parse_int(c, &format!("{rp}[{j}]"))?;
        }
    }
    Ok(m)
}

pub fn int_json(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn vec_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_json(r)).collect())
}

pub fn group_json(g: &FgGroup) -> Value {
    json!({
        "rank": g.rank(),
        "torsion": vec_json(&g.torsion()),
        "display": g.to_string(),
    })
}

/// A base model together with the document it came from.
#[derive(Clone, Debug)]
pub struct BaseSpec {
    pub doc: Value,
    pub model: Arc<DgRingModel>,
    pub complex: Option<SimplicialComplex>,
}

pub fn parse_space(v: &Value, path: &str) -> Result<BaseSpec> {
    if let Some(name) = v.get("builtin") {
        let name = string(name, &format!("{path}.builtin"))?;
        let model = match v.get("params") {
            None | Some(Value::Null) => builtin_expr(name)?,
            Some(p) => {
                let pp = format!("{path}.params");
                let val = match p {
                    Value::Object(o) if o.len() == 1 => o.values().next().expect("one entry"),
                    Value::Object(_) => return Err(TdkError::schema(pp, "expected a single parameter")),
                    other => other,
                };
                let i = parse_int(val, &pp)?;
                let i = i64::try_from(&i).map_err(|_| TdkError::schema(&pp, "parameter out of range"))?;
                builtin_space(name, Some(i))?
            }
        };
        return Ok(BaseSpec {
            doc: v.clone(),
            model: Arc::new(model),
            complex: None,
        });
    }
    let format = string(field(v, "format", path)?, &format!("{path}.format"))?;
    match format {
        "simplicial" => {
            let n = parse_usize(field(v, "vertices", path)?, &format!("{path}.vertices"))?;
            if n == 0 || n > MAX_VERTICES {
                return Err(TdkError::schema(
                    format!("{path}.vertices"),
                    format!("vertex count must be 1..={MAX_VERTICES}"),
                ));
            }
            let fp = format!("{path}.facets");
            let mut facets = Vec::new();
            for (i, f) in array(field(v, "facets", path)?, &fp)?.iter().enumerate() {
                let p = format!("{fp}[{i}]");
                let vs = array(f, &p)?;
                if vs.len() > truncation_bound() + 1 {
                    return Err(TdkError::Truncation {
                        degree: vs.len() - 1,
                        bound: truncation_bound(),
                    });
                }
                facets.push(
                    vs.iter()
                        .enumerate()
                        .map(|(j, x)| parse_usize(x, &format!("{p}[{j}]")))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            let complex = SimplicialComplex::new(n, facets, truncation_bound()).map_err(|e| e.at(path))?;
            let ring = cohomology_ring(&complex)?;
            Ok(BaseSpec {
                doc: v.clone(),
                model: Arc::new(ring.model),
                complex: Some(complex),
            })
        }
        "dgring" => Ok(BaseSpec {
            doc: v.clone(),
            model: Arc::new(parse_dgring(v, path)?),
            complex: None,
        }),
        other => Err(TdkError::schema(
            format!("{path}.format"),
            format!("unknown format {other:?}; expected \"simplicial\" or \"dgring\""),
        )),
    }
}

fn parse_dgring(v: &Value, path: &str) -> Result<DgRingModel> {
    let bp = format!("{path}.basis");
    let basis = array(field(v, "basis", path)?, &bp)?;
    if basis.is_empty() {
        return Err(TdkError::schema(bp, "at least degree 0 is required"));
    }
    let top = basis.len() - 1;
    if top > truncation_bound() {
        return Err(TdkError::Truncation {
            degree: top,
            bound: truncation_bound(),
        });
    }
    if let Some(d) = v.get("degrees") {
        let d = parse_usize(d, &format!("{path}.degrees"))?;
        if d != top {
            return Err(TdkError::schema(
                format!("{path}.degrees"),
                format!("degrees = {d} but the basis lists degrees 0..={top}"),
            ));
        }
    }
    let mut labels = Vec::new();
    let mut total = 0;
    for (k, ls) in basis.iter().enumerate() {
        let p = format!("{bp}[{k}]");
        let ls = array(ls, &p)?;
        total += ls.len();
        if total > MAX_BASIS {
            return Err(TdkError::schema(p, format!("more than {MAX_BASIS} basis elements")));
        }
        labels.push(
            ls.iter()
                .enumerate()
                .map(|(i, l)| string(l, &format!("{p}[{i}]")).map(str::to_string))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
    let mut diff: Vec<Option<IntMatrix>> = vec![None; top];
    if let Some(ds) = v.get("diff") {
        let dp = format!("{path}.diff");
        for (i, e) in array(ds, &dp)?.iter().enumerate() {
            let p = format!("{dp}[{i}]");
            let k = parse_usize(field(e, "deg", &p)?, &format!("{p}.deg"))?;
            if k >= top {
                return Err(TdkError::schema(
                    format!("{p}.deg"),
                    format!("no differential out of degree {k} (top degree {top})"),
                ));
            }
            if diff[k].is_some() {
                return Err(TdkError::schema(&p, format!("degree {k} given twice")));
            }
            diff[k] = Some(parse_matrix(field(e, "matrix", &p)?, dims[k + 1], dims[k], &format!("{p}.matrix"))?);
        }
    }
    let diff: Vec<IntMatrix> = diff
        .into_iter()
        .enumerate()
        .map(|(k, m)| m.unwrap_or_else(|| Matrix::zeros(dims[k + 1], dims[k])))
        .collect();
    let mut products = Vec::new();
    if let Some(ps) = v.get("product") {
        let pp = format!("{path}.product");
        for (i, e) in array(ps, &pp)?.iter().enumerate() {
            let p = format!("{pp}[{i}]");
            let get = |key: &str| parse_usize(field(e, key, &p)?, &format!("{p}.{key}"));
            let rp = format!("{p}.result");
            let mut result = Vec::new();
            for (j, r) in array(field(e, "result", &p)?, &rp)?.iter().enumerate() {
                let q = format!("{rp}[{j}]");
                result.push((
                    parse_usize(field(r, "idx", &q)?, &format!("{q}.idx"))?,
                    parse_int(field(r, "coeff", &q)?, &format!("{q}.coeff"))?,
                ));
            }
            products.push(ProductEntry {
                i_deg: get("i_deg")?,
                i_idx: get("i_idx")?,
                j_deg: get("j_deg")?,
                j_idx: get("j_idx")?,
                result,
            });
        }
    }
    Ok(DgRingModel::new(labels, diff, &products)
        .map_err(|e| e.at(path))?
        .with_flag(FLAG_USER_MODEL))
}

/// Serializes a model in the `dgring` schema.
pub fn dgring_json(m: &DgRingModel) -> Value {
    let top = m.top_degree();
    let diff: Vec<Value> = (0..top)
        .filter(|&k| !m.d(k).is_zero())
        .map(|k| json!({"deg": k, "matrix": matrix_json(&m.d(k))}))
        .collect();
    let mut product = Vec::new();
    for i in 1..=top {
        for j in 1..=top - i {
            for a in 0..m.dim(i) {
                for b in 0..m.dim(j) {
                    let r = m.mul_basis(i, a, j, b);
                    if r.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let result: Vec<Value> = r
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(idx, c)| json!({"idx": idx, "coeff": int_json(c)}))
                        .collect();
                    product.push(json!({"i_deg": i, "i_idx": a, "j_deg": j, "j_idx": b, "result": result}));
                }
            }
        }
    }
    json!({
        "format": "dgring",
        "degrees": top,
        "basis": m.all_labels(),
        "diff": diff,
        "product": product,
    })
}

fn base_label(base: &DgRingModel, v: &Value, path: &str) -> Result<(usize, usize)> {
    let l = string(v, path)?;
    base.find_label(l)
        .ok_or_else(|| TdkError::schema(path, format!("unknown base basis label {l:?}")))
}

/// One cochain of base degree `deg`: either a coefficient vector or a list of
/// `{"base": label, "coeff": c}` terms.
fn parse_base_cochain(base: &DgRingModel, deg: usize, v: &Value, path: &str) -> Result<Vec<Int>> {
    let items = array(v, path)?;
    let mut out = vec![Int::zero(); base.dim(deg)];
    if !items.is_empty() && items.iter().all(|x| !x.is_object()) {
        if items.len() != out.len() {
            return Err(TdkError::schema(
                path,
                format!("expected {} coefficients in base degree {deg}, found {}", out.len(), items.len()),
            ));
        }
        for (i, x) in items.iter().enumerate() {
            out[i] = parse_int(x, &format!("{path}[{i}]"))?;
        }
        return Ok(out);
    }
    for (i, t) in items.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let (k, idx) = base_label(base, field(t, "base", &p)?, &format!("{p}.base"))?;
        if k != deg {
            return Err(TdkError::schema(
                format!("{p}.base"),
                format!("basis element has degree {k}, expected {deg}"),
            ));
        }
        out[idx] += parse_int(field(t, "coeff", &p)?, &format!("{p}.coeff"))?;
    }
    Ok(out)
}

/// Mask and sorting sign (true = negative) of 1-based generator indices.
fn parse_fiber(v: Option<&Value>, n: usize, offset: usize, path: &str) -> Result<(u32, bool)> {
    let Some(v) = v else {
        return Ok((0, false));
    };
    let mut idx = Vec::new();
    for (i, x) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let j = parse_usize(x, &p)?;
        if j == 0 || j > n {
            return Err(TdkError::schema(p, format!("fiber index must be 1..={n}")));
        }
        idx.push(j - 1);
    }
    let mut neg = false;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] == idx[b] {
                return Err(TdkError::schema(path, "repeated fiber generator"));
            }
            if idx[a] > idx[b] {
                neg = !neg;
            }
        }
    }
    Ok((idx.iter().fold(0, |m, i| m | 1 << (i + offset)), neg))
}

/// Terms `{"base", "fiber", ["dual_fiber",] "coeff"}` of total degree `k`.
fn parse_total(m: &KoszulModel, n: usize, k: usize, dual: bool, v: &Value, path: &str) -> Result<Vec<Int>> {
    let mut out = vec![Int::zero(); m.dim(k)];
    for (i, t) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let (bd, bi) = match t.get("base") {
            Some(b) => base_label(m.base(), b, &format!("{p}.base"))?,
            None => (0, 0),
        };
        let (ma, na) = parse_fiber(t.get("fiber"), n, 0, &format!("{p}.fiber"))?;
        let (mb, nb) = if dual {
            parse_fiber(t.get("dual_fiber"), n, n, &format!("{p}.dual_fiber"))?
        } else {
            (0, false)
        };
        let e = BasisElem {
            base_deg: bd,
            base_idx: bi,
            mask: ma | mb,
        };
        if e.base_deg + e.fiber_degree() != k {
            return Err(TdkError::schema(
                &p,
                format!("term has degree {}, expected {k}", e.base_deg + e.fiber_degree()),
            ));
        }
        let c = parse_int(field(t, "coeff", &p)?, &format!("{p}.coeff"))?;
        let idx = m
            .index_of(k, &e)
            .ok_or_else(|| TdkError::schema(&p, "term outside the model"))?;
        if na ^ nb {
            out[idx] -= c;
        } else {
            out[idx] += c;
        }
    }
    Ok(out)
}

fn terms_json(m: &KoszulModel, k: usize, v: &[Int], split: Option<usize>) -> Value {
    let mut out = Vec::new();
    for (e, c) in m.basis(k).iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let mut t = Map::new();
        if e.base_deg > 0 {
            t.insert("base".into(), json!(m.base().labels(e.base_deg)[e.base_idx]));
        }
        let ones = |mask: u32| -> Vec<usize> { (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect() };
        match split {
            None => {
                t.insert("fiber".into(), json!(ones(e.mask)));
            }
            Some(n) => {
                let low = (1u32 << n) - 1;
                t.insert("fiber".into(), json!(ones(e.mask & low)));
                t.insert("dual_fiber".into(), json!(ones(e.mask >> n)));
            }
        }
        t.insert("coeff".into(), int_json(c));
        out.push(Value::Object(t));
    }
    Value::Array(out)
}

fn chern_json(base: &DgRingModel, zetas: &[Vec<Int>]) -> Value {
    Value::Array(
        zetas
            .iter()
            .map(|z| {
                Value::Array(
                    z.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| json!({"base": base.labels(2)[i], "coeff": int_json(c)}))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn parse_chern(base: &DgRingModel, v: &Value, path: &str) -> Result<Vec<Vec<Int>>> {
    let items = array(v, path)?;
    if items.is_empty() || items.len() > MAX_FIBER {
        return Err(TdkError::schema(path, format!("fiber dimension must be 1..={MAX_FIBER}")));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, z)| parse_base_cochain(base, 2, z, &format!("{path}[{i}]")))
        .collect()
}

fn bundle_from(base: &Arc<DgRingModel>, zetas: Vec<Vec<Int>>, prefix: &str, path: &str) -> Result<Arc<KoszulModel>> {
    let n = zetas.len();
    let m = KoszulModel::new(base.clone(), zetas, fiber_names(prefix, n)).map_err(|e| match e {
        TdkError::NotClosed { what } => TdkError::NotClosed {
            what: format!("{path}: {what}"),
        },
        other => other,
    })?;
    Ok(Arc::new(m))
}

fn closed_flux(m: &Arc<KoszulModel>, flux: Vec<Int>, path: &str) -> Result<Pair> {
    Pair::new(m.clone(), flux).map_err(|e| match e {
        TdkError::NotClosed { what } => TdkError::NotClosed {
            what: format!("{path}: {what}"),
        },
        other => other.at(path),
    })
}

/// A bundle over `base` from a Chern list, given bare or as `{"chern": [...]}`.
pub fn parse_bundle(base: &BaseSpec, chern: &Value) -> Result<Arc<KoszulModel>> {
    let (v, path) = match chern.get("chern") {
        Some(c) => (c, "$.chern"),
        None => (chern, "$"),
    };
    let zetas = parse_chern(&base.model, v, path)?;
    bundle_from(&base.model, zetas, "y", path)
}

/// `{"base", "chern", "flux"}`.
pub fn parse_pair(v: &Value) -> Result<(BaseSpec, Pair)> {
    let base = parse_space(field(v, "base", "$")?, "$.base")?;
    let chern = parse_chern(&base.model, field(v, "chern", "$")?, "$.chern")?;
    let n = chern.len();
    let bundle = bundle_from(&base.model, chern, "y", "$.chern")?;
    let flux = match v.get("flux") {
        Some(f) => parse_total(&bundle, n, 3, false, f, "$.flux")?,
        None => vec![Int::zero(); bundle.dim(3)],
    };
    Ok((base, closed_flux(&bundle, flux, "$.flux")?))
}

pub fn pair_json(base: &BaseSpec, p: &Pair) -> Value {
    json!({
        "base": base.doc,
        "chern": chern_json(p.bundle.base(), p.bundle.zetas()),
        "flux": terms_json(&p.bundle, 3, &p.flux, None),
    })
}

/// `{"base", "chern", "flux", "dual_chern", "dual_flux", "correspondence"}`.
pub fn parse_triple(v: &Value) -> Result<(BaseSpec, Triple)> {
    let (base, side) = parse_pair(v)?;
    let n = side.n();
    let dual_chern = parse_chern(&base.model, field(v, "dual_chern", "$")?, "$.dual_chern")?;
    if dual_chern.len() != n {
        return Err(TdkError::schema(
            "$.dual_chern",
            format!("expected {n} dual Chern cocycles, found {}", dual_chern.len()),
        ));
    }
    let dual_bundle = bundle_from(&base.model, dual_chern, "ŷ", "$.dual_chern")?;
    let dual_flux = match v.get("dual_flux") {
        Some(f) => parse_total(&dual_bundle, n, 3, false, f, "$.dual_flux")?,
        None => vec![Int::zero(); dual_bundle.dim(3)],
    };
    let dual = closed_flux(&dual_bundle, dual_flux, "$.dual_flux")?;
    let d = Arc::new(crate::tduality::correspondence_model(&side.bundle, &dual.bundle)?);
    let w = parse_total(&d, n, 2, true, field(v, "correspondence", "$")?, "$.correspondence")?;
    Ok((base, Triple::from_parts(side, dual, d, w)?))
}

pub fn triple_json(base: &BaseSpec, t: &Triple) -> Value {
    let m = t.side.bundle.base();
    json!({
        "base": base.doc,
        "chern": chern_json(m, t.side.bundle.zetas()),
        "flux": terms_json(&t.side.bundle, 3, &t.side.flux, None),
        "dual_chern": chern_json(m, t.dual.bundle.zetas()),
        "dual_flux": terms_json(&t.dual.bundle, 3, &t.dual.flux, None),
        "correspondence": terms_json(&t.correspondence, 2, &t.w, Some(t.n())),
    })
}

/// `{"n", "matrix"}`; membership is left to the caller.
pub fn parse_onn(v: &Value) -> Result<IntMatrix> {
    let n = parse_usize(field(v, "n", "$")?, "$.n")?;
    if n == 0 || n > 64 {
        return Err(TdkError::schema("$.n", "n must be 1..=64"));
    }
    parse_matrix(field(v, "matrix", "$")?, 2 * n, 2 * n, "$.matrix")
}

pub fn onn_json(m: &IntMatrix) -> Value {
    json!({"n": m.rows() / 2, "matrix": matrix_json(m)})
}
