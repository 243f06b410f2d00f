//! Runs the twelve acceptance criteria and prints one line for each.
//!
//! The table itself comes from `selftest`; a few criteria get extra checks
//! through the command-line surface here.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;
use tdk_cli::selftest::criteria;
use tdk_cli::{run, run_with, Outcome, Source};

struct Memory(BTreeMap<String, String>);

impl Source for Memory {
    fn read(&self, path: &str) -> Result<String, String> {
        self.0
            .get(path)
            .cloned()
            .ok_or_else(|| "no such file".into())
    }
}

fn report(out: &Outcome) -> Value {
    serde_json::from_str(&out.output).unwrap_or(Value::Null)
}

fn cli_dualizable() -> Result<(), String> {
    let yes = run(["tdk", "dualizable", "--pair", "hopf_k2.json"]);
    let v = report(&yes);
    if yes.code != 0
        || v["dualizable"] != true
        || v["leading"] != serde_json::json!([["y⊗g2", "2"]])
    {
        return Err(format!("hopf_k2: exit {} {}", yes.code, yes.output.trim()));
    }
    let no = run(["tdk", "dualizable", "--pair", "t3_over_s1_vol.json"]);
    if no.code != 1 {
        return Err(format!("t3_over_s1_vol: exit {}", no.code));
    }
    Ok(())
}

fn cli_onn() -> Result<(), String> {
    for (file, code) in [
        ("flip2.json", 0),
        ("flip1.json", 0),
        ("shear2.json", 0),
        ("diag2.json", 1),
    ] {
        let out = run(["tdk", "onn", "--check", file]);
        if out.code != code {
            return Err(format!("{file}: exit {}", out.code));
        }
    }
    Ok(())
}

fn cli_fuzz() -> Result<(), String> {
    let verbs: [&[&str]; 6] = [
        &["dualize", "--pair"],
        &["check-triple", "--triple"],
        &["onn", "--check"],
        &["twisted", "--pair"],
        &["cohomology", "--base"],
        &["extensions", "--pair"],
    ];
    let seeds: Vec<String> = tdk_core::fixtures::ALL
        .iter()
        .map(|(_, t)| serde_json::from_str::<Value>(t).unwrap().to_string())
        .collect();
    let bytes = prop::collection::vec(any::<u8>(), 0..1024)
        .prop_map(|b| String::from_utf8_lossy(&b).into_owned());
    let edits = (
        0..seeds.len(),
        prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..6),
    )
        .prop_map(move |(i, e)| {
            let mut b = seeds[i].clone().into_bytes();
            for (at, byte) in e {
                let k = at.index(b.len());
                b[k] = byte;
            }
            String::from_utf8_lossy(&b).into_owned()
        });
    let input = prop_oneof![bytes, edits].prop_filter("at most 1 KB", |s| s.len() <= 1024);
    let mut runner = TestRunner::new(Config {
        cases: 400,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(input, 0..verbs.len()), |(text, v)| {
            let mut files = BTreeMap::new();
            files.insert("in.json".to_string(), text);
            let mut args = vec!["tdk"];
            args.extend_from_slice(verbs[v]);
            args.push("in.json");
            let out = run_with(args, &Memory(files));
            prop_assert!(!out.panicked);
            prop_assert!((0..=2).contains(&out.code));
            if out.code == 2 {
                let r = report(&out);
                prop_assert!(
                    r["error"].is_string() && r["location"].is_string(),
                    "{}",
                    out.output
                );
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn main() {
    // panics are caught and reported as failures; keep the log readable
    std::panic::set_hook(Box::new(|_| {}));
    let mut rows = criteria();
    let extra: [(usize, fn() -> Result<(), String>); 3] =
        [(4, cli_dualizable), (10, cli_onn), (12, cli_fuzz)];
    for (id, check) in extra {
        let row = &mut rows[id - 1];
        match check() {
            Ok(()) => row.detail.push_str("; command-line checks pass"),
            Err(e) => {
                row.pass = false;
                row.detail = format!("{}; command line: {e}", row.detail);
            }
        }
    }
    for r in &rows {
        println!(
            "criterion {:>2} {}: {} ({})",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!(
        "acceptance: {} of {} criteria pass",
        rows.len() - failed,
        rows.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
