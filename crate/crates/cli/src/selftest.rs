//! The acceptance table, computed over the embedded fixtures.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tdk_core::bundle::KoszulModel;
use tdk_core::io::{parse_json, parse_onn, parse_pair, parse_triple, BaseSpec};
use tdk_core::onn::{act_on_chern, is_onn, OnnElement};
use tdk_core::space::builtin::{heisenberg, sphere, surface, torus};
use tdk_core::space::simplicial::{boundary_tetrahedron, seven_vertex_torus, six_vertex_rp2};
use tdk_core::space::{cohomology_ring, DgRingModel};
use tdk_core::tduality::{
    dualize, extension_report, gauge_act, gauge_shift, h3_action, is_dualizable, torsor_difference,
    validate_triple, Pair, Triple,
};
use tdk_core::twisted::{twisted_dims, verify_iso};
use tdk_core::{fixtures, FgGroup, Int, IntMatrix};

use crate::{Report, Source};

/// One row of the table.
#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn int(x: i64) -> Int {
    Int::from(x)
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

fn doc(name: &str) -> Result<Value, String> {
    let text = fixtures::get(name).ok_or_else(|| format!("missing fixture {name}"))?;
    parse_json(text).map_err(|e| format!("{name}: {e}"))
}

fn pair(name: &str) -> Result<(BaseSpec, Pair), String> {
    parse_pair(&doc(name)?).map_err(|e| format!("{name}: {e}"))
}

fn triple(name: &str) -> Result<(BaseSpec, Triple), String> {
    parse_triple(&doc(name)?).map_err(|e| format!("{name}: {e}"))
}

fn e<T: std::fmt::Display>(what: &str) -> impl FnOnce(T) -> String + '_ {
    move |err| format!("{what}: {err}")
}

fn shown(groups: impl Iterator<Item = FgGroup>) -> Vec<String> {
    groups.map(|g| g.to_string()).collect()
}

fn bundle(base: &Arc<DgRingModel>, zetas: &[&[i64]]) -> Result<KoszulModel, String> {
    KoszulModel::bundle(base.clone(), zetas.iter().map(|z| ints(z)).collect())
        .map_err(|e| e.to_string())
}

fn cohomology_of(m: &KoszulModel) -> Vec<String> {
    shown((0..=m.top_degree()).map(|k| m.cohomology(k)))
}

fn c1_cohomology() -> Check {
    let cases = [
        (
            "boundary of the 3-simplex",
            boundary_tetrahedron(),
            vec!["Z", "0", "Z"],
        ),
        (
            "7-vertex torus",
            seven_vertex_torus(),
            vec!["Z", "Z^2", "Z"],
        ),
        ("6-vertex RP2", six_vertex_rp2(), vec!["Z", "0", "Z/2"]),
    ];
    for (name, k, expected) in &cases {
        let got = shown((0..=k.dim()).map(|d| k.cohomology(d)));
        ensure!(got == *expected, "{name}: {got:?}");
    }
    let ring = cohomology_ring(&cases[1].1).map_err(e("torus ring"))?;
    let prod = ring.model.mul_basis(1, 0, 1, 1).to_vec();
    ensure!(
        prod.len() == 1 && prod[0].abs().is_one(),
        "x1 x2 = {prod:?} does not generate H2"
    );
    Ok("simplicial groups and the torus cup product match".into())
}

fn c2_gysin() -> Check {
    let s2 = Arc::new(sphere(2).map_err(e("S2"))?);
    let hopf = cohomology_of(&bundle(&s2, &[&[1]])?);
    ensure!(hopf == ["Z", "0", "0", "Z"], "Hopf: {hopf:?}");
    for k in [2, 3, 5] {
        let got = cohomology_of(&bundle(&s2, &[&[k]])?);
        ensure!(
            got == ["Z", "0", &format!("Z/{k}"), "Z"],
            "lens space k={k}: {got:?}"
        );
    }
    let t2 = Arc::new(torus(2).map_err(e("T2"))?);
    for k in 1..=3 {
        let got = cohomology_of(&bundle(&t2, &[&[k]])?);
        let h2 = if k == 1 {
            "Z^2".to_string()
        } else {
            format!("Z^2 + Z/{k}")
        };
        ensure!(
            got == ["Z", "Z^2", h2.as_str(), "Z"],
            "Heisenberg k={k}: {got:?}"
        );
    }
    Ok("Hopf, lens spaces k = 2, 3, 5 and Heisenberg k = 1..3".into())
}

fn c3_transgression() -> Check {
    let t3 = Arc::new(torus(3).map_err(e("T3"))?);
    let models = [
        bundle(&Arc::new(sphere(2).map_err(e("S2"))?), &[&[2]])?,
        bundle(&t3, &[&[1, 0, 0]])?,
        bundle(&t3, &[&[1, 0, 0], &[0, 2, 1]])?,
        bundle(&Arc::new(torus(2).map_err(e("T2"))?), &[&[1], &[3]])?,
        bundle(
            &Arc::new(surface(2).map_err(e("surface"))?),
            &[&[1], &[0], &[2]],
        )?,
        bundle(
            &Arc::new(heisenberg().map_err(e("Heisenberg"))?),
            &[&[0, 1, 0], &[1, 0, 0]],
        )?,
    ];
    for (idx, m) in models.iter().enumerate() {
        let n = m.rank();
        let d01 = m.ss_page(2, 0, 1).map_err(e("E2"))?.outgoing;
        for i in 0..n {
            let image = d01.apply(&m.generator(i));
            let expected = m.pullback(2, &m.zetas()[i]);
            let t = &d01.target;
            ensure!(
                t.reduce(&image).map_err(e("reduce"))?
                    == t.reduce(&expected).map_err(e("reduce"))?,
                "model {idx}: d2(y{}) is not [zeta{}]",
                i + 1,
                i + 1
            );
        }
        let d02 = m.ss_page(2, 0, 2).map_err(e("E2"))?.outgoing;
        for i in 0..n {
            for j in i + 1..n {
                let image = d02.apply(&m.mul(1, &m.generator(i), 1, &m.generator(j)));
                let minus: Vec<Int> = m.zetas()[j].iter().map(|x| -x).collect();
                let expected = m.assemble(3, &[(1 << j, m.zetas()[i].clone()), (1 << i, minus)]);
                let t = &d02.target;
                ensure!(
                    t.reduce(&image).map_err(e("reduce"))?
                        == t.reduce(&expected).map_err(e("reduce"))?,
                    "model {idx}: d2(y{} y{}) mismatch",
                    i + 1,
                    j + 1
                );
            }
        }
    }
    Ok(format!("{} bundle models", models.len()))
}

fn c4_dualizability() -> Check {
    for name in [
        "hopf_k0.json",
        "hopf_k1.json",
        "hopf_km1.json",
        "hopf_k2.json",
    ] {
        let (_, p) = pair(name)?;
        ensure!(
            is_dualizable(&p).map_err(e(name))?.0,
            "{name} should be dualizable"
        );
    }
    let (_, p) = pair("t3_over_s1_vol.json")?;
    ensure!(
        !is_dualizable(&p).map_err(e("t3_over_s1_vol"))?.0,
        "T3 over S1 with volume flux is dualizable"
    );
    Ok("Hopf k in {0, 1, -1, 2} dualizable, T3 over S1 with volume flux not".into())
}

fn h2_class(m: &KoszulModel, i: usize) -> Result<Vec<Int>, String> {
    m.base()
        .cohomology(2)
        .reduce(&m.zetas()[i])
        .map_err(e("H2"))
}

fn c5_classical() -> Check {
    for k in [0i64, 1, 2, 3, -1] {
        let name = if k < 0 {
            "hopf_km1.json".to_string()
        } else {
            format!("hopf_k{k}.json")
        };
        let (_, p) = pair(&name)?;
        let t = dualize(&p, None).map_err(e(&name))?;
        let chat = h2_class(&t.dual.bundle, 0)?;
        ensure!(chat == [int(k)], "{name}: dual Chern class {chat:?}");
        let (_, rep) = is_dualizable(&t.dual).map_err(e(&name))?;
        ensure!(
            rep.filtration == Some(2) && rep.leading == [int(1)],
            "{name}: dual leading part {:?}",
            rep.leading
        );
        let report = validate_triple(&t);
        ensure!(
            report.all_pass(),
            "{name}: {:?}",
            report.items.iter().find(|i| !i.pass)
        );
    }
    let t2 = Arc::new(torus(2).map_err(e("T2"))?);
    for k in 1..=3 {
        let name = format!("t3_over_t2_k{k}.json");
        let (_, p) = pair(&name)?;
        let t = dualize(&p, None).map_err(e(&name))?;
        ensure!(
            h2_class(&t.dual.bundle, 0)? == [int(k)],
            "{name}: dual Chern class"
        );
        let zh = t.dual.flux_class();
        ensure!(
            zh.iter().all(Zero::is_zero),
            "{name}: dual flux class {zh:?}"
        );
        let heis = bundle(&t2, &[&[k]])?;
        ensure!(
            cohomology_of(&t.dual.bundle) == cohomology_of(&heis),
            "{name}: dual is not Heisenberg"
        );
        ensure!(validate_triple(&t).all_pass(), "{name}: triple invalid");
    }
    Ok("Hopf k in {0, 1, 2, 3, -1} and T3 over T2 k = 1..3".into())
}

fn shipped_pairs() -> Result<Vec<(String, BaseSpec, Pair)>, String> {
    fixtures::PAIRS
        .iter()
        .map(|n| pair(n).map(|(b, p)| (n.to_string(), b, p)))
        .collect()
}

fn dualizable_pairs() -> Result<Vec<(String, Pair)>, String> {
    let mut out = Vec::new();
    for (name, _, p) in shipped_pairs()? {
        if is_dualizable(&p).map_err(e(&name))?.0 {
            out.push((name, p));
        }
    }
    Ok(out)
}

fn c6_involution() -> Check {
    let pairs = dualizable_pairs()?;
    for (name, p) in &pairs {
        let t = dualize(p, None).map_err(e(name))?;
        let tt = dualize(&t.dual, None).map_err(e(name))?;
        let h2 = p.bundle.base().cohomology(2);
        for i in 0..p.n() {
            let a = h2.reduce(&tt.dual.bundle.zetas()[i]).map_err(e(name))?;
            let b = h2.reduce(&p.bundle.zetas()[i]).map_err(e(name))?;
            ensure!(a == b, "{name}: Chern class {} changed", i + 1);
        }
        let h3 = p.bundle.cohomology(3);
        ensure!(
            h3.reduce(&tt.dual.flux).map_err(e(name))? == p.flux_class(),
            "{name}: flux class changed"
        );
    }
    Ok(format!("{} dualizable fixtures", pairs.len()))
}

fn h3_generators(base: &DgRingModel) -> Vec<Vec<Int>> {
    base.cohomology(3).generators()
}

fn c7_torsor() -> Check {
    let names = [
        "s3_trivial.json",
        "s3_trivial_gen.json",
        "t3_base_c12.json",
        "t3_base_flux2.json",
        "t3_base_rank2.json",
    ];
    let mut count = 0;
    for name in names {
        let (_, p) = pair(name)?;
        let t = dualize(&p, None).map_err(e(name))?;
        let gens = h3_generators(p.bundle.base());
        let mut alphas = gens.clone();
        alphas.extend(gens.iter().map(|g| g.iter().map(|x| x * int(-2)).collect()));
        for alpha in alphas {
            let moved = h3_action(&t, &alpha).map_err(e(name))?;
            let d = torsor_difference(&t, &moved).map_err(e(name))?;
            ensure!(
                d.free,
                "{name}: action not free ({} instead of H3)",
                d.group
            );
            let expected = d.group.reduce(&alpha).map_err(e(name))?;
            ensure!(
                d.group.normalize(&d.class) == expected,
                "{name}: difference {:?} for {alpha:?}",
                d.class
            );
            let back = torsor_difference(&moved, &t).map_err(e(name))?;
            let neg: Vec<Int> = expected.iter().map(|x| -x).collect();
            ensure!(
                back.group.normalize(&back.class) == back.group.normalize(&neg),
                "{name}: reverse difference"
            );
            count += 1;
        }
    }
    Ok(format!("{count} round trips over S3 and T3"))
}

fn c8_gauge() -> Check {
    let mut count = 0;
    for name in [
        "t3_base_c12.json",
        "t3_base_flux2.json",
        "t3_base_rank2.json",
    ] {
        let (_, p) = pair(name)?;
        let t = dualize(&p, None).map_err(e(name))?;
        let n = t.n();
        let h1 = p.bundle.base().cohomology(1).generators();
        let zero = vec![int(0); p.bundle.base().dim(1)];
        for slot in 0..2 * n {
            for g in &h1 {
                let mut psi = vec![zero.clone(); n];
                let mut psi_hat = vec![zero.clone(); n];
                if slot < n {
                    psi[slot] = g.clone();
                } else {
                    psi_hat[slot - n] = g.clone();
                }
                let acted = gauge_act(&t, &psi, &psi_hat).map_err(e(name))?;
                let shift = gauge_shift(&t, &psi, &psi_hat).map_err(e(name))?;
                let d = torsor_difference(&t, &acted).map_err(e(name))?;
                let expected = d.group.reduce(&shift).map_err(e(name))?;
                ensure!(
                    d.group.normalize(&d.class) == expected,
                    "{name}: gauge slot {slot} gave {:?}",
                    d.class
                );
                count += 1;
            }
        }
    }
    Ok(format!("{count} gauge moves over T3"))
}

fn c9_extensions() -> Check {
    let pairs = shipped_pairs()?;
    for (name, _, p) in &pairs {
        let r = extension_report(p).map_err(e(name))?;
        ensure!(
            r.torsor.rank() == r.d3_image.rank() && r.torsor.torsion() == r.d3_image.torsion(),
            "{name}: {} vs {}",
            r.torsor,
            r.d3_image
        );
    }
    Ok(format!("{} fixtures", pairs.len()))
}

fn q(n: usize, v: &[Int]) -> Int {
    (0..n).map(|i| &v[i] * &v[n + i]).sum()
}

fn c10_onn() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d0d);
    let mut accepted: Vec<(String, IntMatrix)> = Vec::new();
    for name in fixtures::ONN {
        let m = parse_onn(&doc(name)?).map_err(e(name))?;
        let inside = is_onn(&m).map_err(e(name))?;
        ensure!(
            inside == (*name != "diag2.json"),
            "{name}: membership {inside}"
        );
        if inside {
            accepted.push((name.to_string(), m));
        }
    }
    for n in 1..=3 {
        for (label, g) in tdk_core::onn::generators(n) {
            accepted.push((format!("{label} (n={n})"), g.matrix));
        }
    }
    for (name, m) in &accepted {
        ensure!(is_onn(m).map_err(e(name))?, "{name} rejected");
        let n = m.rows() / 2;
        for _ in 0..100 {
            let v: Vec<Int> = (0..2 * n)
                .map(|_| int(rng.gen_range(-1000..=1000)))
                .collect();
            ensure!(q(n, &m.mul_vec(&v)) == q(n, &v), "{name}: q not preserved");
        }
    }
    let mut checked = 0;
    for (name, p) in dualizable_pairs()? {
        let t = dualize(&p, None).map_err(e(&name))?;
        let flip = OnnElement::flip(t.n());
        let c = t.side.bundle.zetas().to_vec();
        let ch = t.dual.bundle.zetas().to_vec();
        let base = t.side.bundle.base();
        let once = act_on_chern(&flip, base, &c, &ch).map_err(e(&name))?;
        let twice = act_on_chern(&flip, base, &once.0, &once.1).map_err(e(&name))?;
        ensure!(twice == (c, ch), "{name}: flip twice moved the Chern data");
        checked += 1;
    }
    Ok(format!(
        "{} elements x 100 vectors, flip involution on {checked} fixtures",
        accepted.len()
    ))
}

fn c11_twisted() -> Check {
    let mut triples: Vec<(String, Triple)> = Vec::new();
    for name in fixtures::TRIPLES {
        triples.push((name.to_string(), triple(name)?.1));
    }
    for (name, p) in dualizable_pairs()? {
        triples.push((name.clone(), dualize(&p, None).map_err(e(&name))?));
    }
    for (name, t) in &triples {
        let r = verify_iso(t).map_err(e(name))?;
        ensure!(r.chain_map, "{name}: T is not a chain map");
        ensure!(r.is_iso(), "{name}: {:?}", r.parities);
    }
    let dims = |t: &Triple| -> Result<_, String> {
        Ok((
            twisted_dims(&t.side.bundle, &t.side.flux).map_err(e("twisted"))?,
            twisted_dims(&t.dual.bundle, &t.dual.flux).map_err(e("twisted"))?,
        ))
    };
    for name in [
        "hopf_k1.json",
        "hopf_k2.json",
        "hopf_k3.json",
        "hopf_km1.json",
    ] {
        let t = dualize(&pair(name)?.1, None).map_err(e(name))?;
        ensure!(dims(&t)? == ((0, 0), (0, 0)), "{name}: {:?}", dims(&t)?);
    }
    let t = dualize(&pair("hopf_k0.json")?.1, None).map_err(e("hopf_k0"))?;
    ensure!(
        dims(&t)? == ((1, 1), (1, 1)),
        "S3 with zero flux: {:?}",
        dims(&t)?
    );
    let r = verify_iso(&t).map_err(e("hopf_k0"))?;
    // n = 1: the even part of one side goes to the odd part of the other
    ensure!(
        r.parities[0] == (1, 1, 1) && r.parities[1] == (1, 1, 1),
        "parity swap: {:?}",
        r.parities
    );
    Ok(format!("{} triples, Hopf dimension tables", triples.len()))
}

struct Memory(BTreeMap<String, String>);

impl Source for Memory {
    fn read(&self, path: &str) -> Result<String, String> {
        self.0
            .get(path)
            .cloned()
            .ok_or_else(|| "no such file".into())
    }
}

fn run_doc(verb: &[&str], text: &str) -> crate::Outcome {
    let mut files = BTreeMap::new();
    files.insert("in.json".to_string(), text.to_string());
    let mut args = vec!["tdk"];
    args.extend_from_slice(verb);
    args.push("in.json");
    crate::run_with(args, &Memory(files))
}

fn expect_located(verb: &[&str], text: &str, kind: &str) -> Check {
    let out = run_doc(verb, text);
    ensure!(out.code == 2, "{kind}: exit code {}", out.code);
    let v: Value = serde_json::from_str(&out.output).map_err(e("report"))?;
    ensure!(v["error"] == kind, "expected {kind}, got {}", v["error"]);
    let loc = v["location"].as_str().unwrap_or_default();
    ensure!(loc.len() > "in.json".len(), "{kind}: location {loc:?}");
    Ok(loc.to_string())
}

/// Deterministic mutations of a document: truncations and single-byte edits.
fn mutations(text: &str) -> Vec<String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    for cut in (0..bytes.len()).step_by(5) {
        out.push(String::from_utf8_lossy(&bytes[..cut]).into_owned());
    }
    for (i, sub) in (0..bytes.len())
        .step_by(3)
        .zip(b"{\"9-]x0, ".iter().cycle())
    {
        let mut b = bytes.to_vec();
        b[i] = *sub;
        out.push(String::from_utf8_lossy(&b).into_owned());
    }
    out
}

pub(crate) fn verbs_for(name: &str) -> Vec<Vec<&'static str>> {
    if fixtures::ONN.contains(&name) {
        vec![vec!["onn", "--check"]]
    } else if fixtures::TRIPLES.contains(&name) {
        vec![vec!["check-triple", "--triple"], vec!["tmap", "--triple"]]
    } else {
        vec![
            vec!["dualize", "--pair"],
            vec!["extensions", "--pair"],
            vec!["cohomology", "--pair"],
        ]
    }
}

fn c12_robustness() -> Check {
    let mut where_ = Vec::new();
    where_.push(expect_located(
        &["dualize", "--pair"],
        r#"{"base": {"builtin": "sphere", "params": 2}, "chern": [["#,
        "json",
    )?);
    let d2 = r#"{"base": {"format": "dgring", "basis": [["1"], ["a"], ["b"], ["c"]],
        "diff": [{"deg": 1, "matrix": [["1"]]}, {"deg": 2, "matrix": [["1"]]}]},
        "chern": [[]], "flux": []}"#;
    where_.push(expect_located(&["dualize", "--pair"], d2, "d_squared")?);
    let open_flux = r#"{"base": {"format": "dgring", "basis": [["1"], [], ["a"], ["b"]],
        "diff": [{"deg": 2, "matrix": [["1"]]}]}, "chern": [[]],
        "flux": [{"base": "a", "fiber": [1], "coeff": "1"}]}"#;
    where_.push(expect_located(
        &["dualize", "--pair"],
        open_flux,
        "not_closed",
    )?);
    let open_chern = r#"{"base": {"format": "dgring", "basis": [["1"], [], ["a"], ["b"]],
        "diff": [{"deg": 2, "matrix": [["1"]]}]}, "chern": [[{"base": "a", "coeff": "1"}]]}"#;
    where_.push(expect_located(
        &["dualize", "--pair"],
        open_chern,
        "not_closed",
    )?);
    let mut runs = 0;
    for (name, text) in fixtures::ALL {
        let compact = parse_json(text).map_err(e(name))?.to_string();
        ensure!(compact.len() <= 1024, "{name} is over 1 KB");
        for verb in verbs_for(name) {
            for m in mutations(&compact) {
                let out = run_doc(&verb, &m);
                ensure!(!out.panicked, "{name}: panic on {m:?}");
                ensure!((0..=2).contains(&out.code), "{name}: exit {}", out.code);
                runs += 1;
            }
        }
    }
    Ok(format!(
        "located at {}; {runs} mutated inputs without a panic",
        where_.join(" | ")
    ))
}

const CRITERIA: [(&str, fn() -> Check); 12] = [
    ("cohomology oracle", c1_cohomology),
    ("Gysin and Koszul models", c2_gysin),
    ("spectral sequence d2 formulas", c3_transgression),
    ("dualizability", c4_dualizability),
    ("classical dual pairs", c5_classical),
    ("double dual", c6_involution),
    ("H3 torsor", c7_torsor),
    ("gauge action", c8_gauge),
    ("extension classification", c9_extensions),
    ("O(n,n) elements", c10_onn),
    ("twisted isomorphism", c11_twisted),
    ("robustness", c12_robustness),
];

/// Evaluates every criterion; a panic inside one counts as a failure of it.
pub fn criteria() -> Vec<Criterion> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
                Ok(Ok(d)) => (true, d),
                Ok(Err(d)) => (false, d),
                Err(_) => (false, "panicked".to_string()),
            };
            Criterion {
                id: i + 1,
                name,
                pass,
                detail,
            }
        })
        .collect()
}

pub(crate) fn report() -> Report {
    let rows = criteria();
    let all = rows.iter().all(|c| c.pass);
    let table: Vec<Value> = rows
        .iter()
        .map(|c| json!({"id": c.id, "name": c.name, "pass": c.pass, "detail": c.detail}))
        .collect();
    Report::answer(all, json!({"criteria": table, "all_pass": all}))
}
