use std::sync::Arc;

use serde_json::{json, Value};
use tdk_core::bundle::KoszulModel;
use tdk_core::io::{
    group_json, int_json, onn_json, parse_bundle, parse_json, parse_onn, parse_pair, parse_space,
    parse_triple, triple_json, vec_json, BaseSpec,
};
use tdk_core::onn::{act_on_triple, is_onn, OnnElement, OnnKind};
use tdk_core::space::builtin_expr;
use tdk_core::tduality::{
    dualize as dualize_pair, extension_report, extract_dual_chern, is_dualizable, validate_triple,
    Pair, Triple, TripleReport,
};
use tdk_core::twisted::{t_transform, twisted_dims, verify_iso, IsoReport};
use tdk_core::{RatMatrix, TdkError};

use crate::{BundleInput, CliError, CliResult, PairOrTriple, Report, Source, SpaceInput};

/// Largest input document accepted, in bytes.
const MAX_INPUT: usize = 1 << 20;

pub(crate) struct Ctx<'a> {
    source: &'a dyn Source,
    file: Option<String>,
}

impl<'a> Ctx<'a> {
    pub fn new(source: &'a dyn Source) -> Self {
        Ctx { source, file: None }
    }

    pub fn current_file(&self) -> Option<&str> {
        self.file.as_deref()
    }

    fn load(&mut self, path: &str) -> CliResult<Value> {
        self.file = Some(path.to_string());
        let text = self.source.read(path).map_err(|message| CliError::Io {
            path: path.to_string(),
            message,
        })?;
        if text.len() > MAX_INPUT {
            return Err(CliError::Io {
                path: path.to_string(),
                message: format!("larger than {MAX_INPUT} bytes"),
            });
        }
        Ok(parse_json(&text)?)
    }

    fn pair(&mut self, path: &str) -> CliResult<(BaseSpec, Pair)> {
        let v = self.load(path)?;
        Ok(parse_pair(&v)?)
    }

    fn triple(&mut self, path: &str) -> CliResult<(BaseSpec, Triple)> {
        let v = self.load(path)?;
        Ok(parse_triple(&v)?)
    }

    fn base(&mut self, input: &SpaceInput) -> CliResult<BaseSpec> {
        match (&input.base, &input.builtin) {
            (Some(path), _) => {
                let v = self.load(path)?;
                Ok(parse_space(&v, "$")?)
            }
            (None, Some(name)) => Ok(BaseSpec {
                doc: json!({"builtin": name}),
                model: Arc::new(builtin_expr(name)?),
                complex: None,
            }),
            (None, None) => Err(CliError::Usage(
                "one of --base, --builtin or --pair is required".into(),
            )),
        }
    }

    fn bundle(&mut self, input: &BundleInput) -> CliResult<(BaseSpec, Arc<KoszulModel>)> {
        if let Some(p) = &input.space.pair {
            let (b, pair) = self.pair(p)?;
            return Ok((b, pair.bundle));
        }
        let base = self.base(&input.space)?;
        let chern = input.chern.as_ref().ok_or_else(|| {
            CliError::Usage("--chern is required with --base or --builtin".into())
        })?;
        let v = self.load(chern)?;
        let m = parse_bundle(&base, &v)?;
        Ok((base, m))
    }

    fn triple_or_dual(&mut self, input: &PairOrTriple) -> CliResult<(BaseSpec, Triple)> {
        match (&input.pair, &input.triple) {
            (_, Some(t)) => self.triple(t),
            (Some(p), None) => {
                let (b, pair) = self.pair(p)?;
                Ok((b, dualize_pair(&pair, None)?))
            }
            (None, None) => Err(CliError::Usage(
                "one of --pair or --triple is required".into(),
            )),
        }
    }
}

fn groups_json(
    top: usize,
    deg: Option<usize>,
    group: impl Fn(usize) -> tdk_core::FgGroup,
) -> CliResult<Value> {
    let degrees: Vec<usize> = match deg {
        Some(k) if k > top => {
            return Err(TdkError::Parameter {
                name: "deg".into(),
                message: format!("degree {k} exceeds the top degree {top}"),
            }
            .into())
        }
        Some(k) => vec![k],
        None => (0..=top).collect(),
    };
    Ok(Value::Array(
        degrees
            .into_iter()
            .map(|k| json!({"degree": k, "group": group_json(&group(k))}))
            .collect(),
    ))
}

pub(crate) fn cohomology(
    ctx: &mut Ctx,
    input: &SpaceInput,
    deg: Option<usize>,
) -> CliResult<Report> {
    if let Some(p) = &input.pair {
        let (_, pair) = ctx.pair(p)?;
        let m = &pair.bundle;
        let table = groups_json(m.top_degree(), deg, |k| m.cohomology(k))?;
        let mut out = json!({"space": "total", "cohomology": table});
        add_flags(&mut out, m.base());
        return Ok(Report::ok(out));
    }
    let base = ctx.base(input)?;
    let m = &base.model;
    let table = groups_json(m.top_degree(), deg, |k| m.cohomology(k))?;
    let mut out = json!({"space": "base", "cohomology": table});
    add_flags(&mut out, m);
    Ok(Report::ok(out))
}

/// Validity hypotheses of the base model, when there are any.
fn add_flags(out: &mut Value, base: &tdk_core::space::DgRingModel) {
    if !base.flags().is_empty() {
        out["flags"] = json!(base.flags());
    }
}

fn chern_classes(m: &KoszulModel) -> CliResult<Value> {
    let h2 = m.base().cohomology(2);
    let classes = m
        .zetas()
        .iter()
        .map(|z| Ok(vec_json(&h2.reduce(z).map_err(TdkError::from)?)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(json!({"group": group_json(&h2), "classes": classes}))
}

pub(crate) fn bundle(ctx: &mut Ctx, input: &BundleInput) -> CliResult<Report> {
    let (_, m) = ctx.bundle(input)?;
    let dims: Vec<usize> = (0..=m.top_degree()).map(|k| m.dim(k)).collect();
    let mut out = json!({
        "rank": m.rank(),
        "fiber": m.names(),
        "dims": dims,
        "chern": chern_classes(&m)?,
        "cohomology": groups_json(m.top_degree(), None, |k| m.cohomology(k))?,
    });
    add_flags(&mut out, m.base());
    Ok(Report::ok(out))
}

pub(crate) fn ss(
    ctx: &mut Ctx,
    input: &BundleInput,
    page: usize,
    deg: Option<usize>,
) -> CliResult<Report> {
    let (_, m) = ctx.bundle(input)?;
    let (pmax, qmax) = (m.base().top_degree(), m.rank());
    let mut slots = Vec::new();
    for p in 0..=pmax {
        for q in 0..=qmax {
            if deg.is_some_and(|k| k != p + q) {
                continue;
            }
            let e = m.ss_page(page, p, q)?;
            slots.push(json!({
                "p": p,
                "q": q,
                "group": group_json(&e.group),
                "d_image": e.outgoing.image().to_string(),
            }));
        }
    }
    Ok(Report::ok(json!({
        "page": page,
        "infinity_page": m.infinity_page(),
        "slots": slots,
    })))
}

pub(crate) fn dualizable(ctx: &mut Ctx, path: &str) -> CliResult<Report> {
    let (_, pair) = ctx.pair(path)?;
    let (ok, rep) = is_dualizable(&pair)?;
    let leading: Vec<Value> = rep
        .leading_terms
        .iter()
        .map(|(label, c)| json!([label, int_json(c)]))
        .collect();
    Ok(Report::answer(
        ok,
        json!({"dualizable": ok, "filtration": rep.filtration, "leading": leading}),
    ))
}

fn checks_json(r: &TripleReport) -> Value {
    Value::Array(
        r.items
            .iter()
            .map(|i| json!({"name": i.name, "pass": i.pass, "detail": i.detail}))
            .collect(),
    )
}

pub(crate) fn dualize(ctx: &mut Ctx, path: &str) -> CliResult<Report> {
    let (base, pair) = ctx.pair(path)?;
    let (ok, rep) = is_dualizable(&pair)?;
    if !ok {
        return Ok(Report::answer(
            false,
            json!({"dualizable": false, "filtration": rep.filtration}),
        ));
    }
    let dc = extract_dual_chern(&pair)?;
    let t = dualize_pair(&pair, None)?;
    let report = validate_triple(&t);
    let ambiguity: Vec<Value> = dc
        .ambiguity
        .iter()
        .map(|cs| Value::Array(cs.iter().map(|c| vec_json(c)).collect()))
        .collect();
    let mut out = json!({
            "dualizable": true,
            "dual_chern": {
                "classes": dc.classes.iter().map(|c| vec_json(c)).collect::<Vec<_>>(),
                "ambiguity": ambiguity,
            },
            "triple": triple_json(&base, &t),
            "checks": checks_json(&report),
            "valid": report.all_pass(),
    });
    add_flags(&mut out, pair.bundle.base());
    Ok(Report::answer(report.all_pass(), out))
}

pub(crate) fn check_triple(ctx: &mut Ctx, path: &str) -> CliResult<Report> {
    let (_, t) = ctx.triple(path)?;
    let report = validate_triple(&t);
    Ok(Report::answer(
        report.all_pass(),
        json!({"valid": report.all_pass(), "checks": checks_json(&report)}),
    ))
}

pub(crate) fn extensions(ctx: &mut Ctx, path: &str) -> CliResult<Report> {
    let (_, pair) = ctx.pair(path)?;
    let r = extension_report(&pair)?;
    let ambiguity = r.dual_chern_ambiguity.as_ref().map(|a| {
        a.iter()
            .map(|cs| Value::Array(cs.iter().map(|c| vec_json(c)).collect()))
            .collect::<Vec<_>>()
    });
    Ok(Report::answer(
        r.consistent,
        json!({
            "kernel": group_json(&r.kernel),
            "image_c": r.image_c.iter().map(|c| vec_json(c)).collect::<Vec<_>>(),
            "torsor": group_json(&r.torsor),
            "d3_image": group_json(&r.d3_image),
            "consistent": r.consistent,
            "dual_chern_ambiguity": ambiguity,
        }),
    ))
}

fn kind_json(k: &OnnKind) -> Value {
    match k {
        OnnKind::Flip => json!({"kind": "flip"}),
        OnnKind::Gl(a) => json!({"kind": "gl", "block": tdk_core::io::matrix_json(a)}),
        OnnKind::LowerShear(b) => {
            json!({"kind": "lower_shear", "block": tdk_core::io::matrix_json(b)})
        }
        OnnKind::UpperShear(b) => {
            json!({"kind": "upper_shear", "block": tdk_core::io::matrix_json(b)})
        }
        OnnKind::Other => json!({"kind": "other"}),
    }
}

pub(crate) fn onn(ctx: &mut Ctx, check: &str, triple: Option<&str>) -> CliResult<Report> {
    let v = ctx.load(check)?;
    let m = parse_onn(&v)?;
    if !is_onn(&m)? {
        return Ok(Report::answer(false, json!({"in_onn": false})));
    }
    let g = OnnElement::new(m)?;
    let mut out =
        json!({"in_onn": true, "element": onn_json(&g.matrix), "type": kind_json(&g.classify())});
    if let Some(path) = triple {
        let (base, t) = ctx.triple(path)?;
        let moved = act_on_triple(&g, &t)?;
        out["triple"] = triple_json(&base, &moved);
        out["valid"] = json!(validate_triple(&moved).all_pass());
    }
    Ok(Report::ok(out))
}

fn dims_json((even, odd): (usize, usize)) -> Value {
    json!({"even": even, "odd": odd})
}

pub(crate) fn twisted(ctx: &mut Ctx, input: &PairOrTriple) -> CliResult<Report> {
    if let (Some(p), None) = (&input.pair, &input.triple) {
        let (_, pair) = ctx.pair(p)?;
        return Ok(Report::ok(dims_json(twisted_dims(
            &pair.bundle,
            &pair.flux,
        )?)));
    }
    let (_, t) = ctx.triple_or_dual(input)?;
    Ok(Report::ok(json!({
        "n": t.n(),
        "side": dims_json(twisted_dims(&t.side.bundle, &t.side.flux)?),
        "dual": dims_json(twisted_dims(&t.dual.bundle, &t.dual.flux)?),
    })))
}

fn rat_matrix_json(m: &RatMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(x.to_string())).collect()))
            .collect(),
    )
}

fn iso_json(r: &IsoReport) -> Value {
    let parities: Vec<Value> = r
        .parities
        .iter()
        .enumerate()
        .map(|(eps, &(src, tgt, induced))| {
            json!({"parity": eps, "source_dim": src, "target_dim": tgt, "induced_rank": induced})
        })
        .collect();
    json!({"chain_map": r.chain_map, "parities": parities, "iso": r.is_iso()})
}

pub(crate) fn tmap(ctx: &mut Ctx, input: &PairOrTriple) -> CliResult<Report> {
    let (_, t) = ctx.triple_or_dual(input)?;
    let tm = t_transform(&t);
    let rep = verify_iso(&t)?;
    Ok(Report::answer(
        rep.is_iso(),
        json!({
            "n": tm.n,
            "source_labels": labels(&t.side.bundle),
            "target_labels": labels(&t.dual.bundle),
            "matrix": rat_matrix_json(&tm.matrix),
            "report": iso_json(&rep),
        }),
    ))
}

fn labels(m: &KoszulModel) -> Vec<String> {
    (0..=m.top_degree()).flat_map(|k| m.labels(k)).collect()
}
