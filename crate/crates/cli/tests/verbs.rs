use serde_json::Value;
use tdk_cli::run;

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["tdk"];
    all.extend_from_slice(args);
    let out = run(all);
    (
        out.code,
        serde_json::from_str(&out.output).expect("JSON report"),
    )
}

#[test]
fn every_verb_answers_on_fixtures() {
    let cases: &[(&[&str], i32)] = &[
        (&["cohomology", "--builtin", "sphere:2*sphere:1"], 0),
        (&["cohomology", "--pair", "hopf_k3.json", "--deg", "2"], 0),
        (&["bundle", "--pair", "t3_base_rank2.json"], 0),
        (&["ss", "--pair", "t3_base_rank2.json", "--page", "3"], 0),
        (&["dualize", "--pair", "heisenberg_base.json"], 0),
        (&["dualize", "--pair", "t3_over_s1_vol.json"], 1),
        (&["check-triple", "--triple", "point_triple.json"], 0),
        (&["extensions", "--pair", "surface2_rank2.json"], 0),
        (
            &[
                "onn",
                "--check",
                "flip1.json",
                "--triple",
                "point_triple.json",
            ],
            0,
        ),
        (&["twisted", "--pair", "hopf_k2.json"], 0),
        (&["tmap", "--triple", "point_triple.json"], 0),
    ];
    for (args, code) in cases {
        let (c, _) = json(args);
        assert_eq!(c, *code, "{args:?}");
    }
}

#[test]
fn hopf_total_space_is_s3() {
    let (_, v) = json(&["cohomology", "--pair", "hopf_k3.json"]);
    let shown: Vec<&str> = v["cohomology"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["group"]["display"].as_str().unwrap())
        .collect();
    assert_eq!(shown, ["Z", "0", "0", "Z"]);
}

#[test]
fn input_errors_exit_two_with_a_location() {
    for args in [
        &["dualize", "--pair", "no_such_file.json"][..],
        &["cohomology", "--builtin", "torus:9"],
        &["cohomology", "--builtin", "klein"],
        &["ss", "--pair", "hopf_k1.json", "--page", "0"],
        &["cohomology", "--pair", "hopf_k1.json", "--deg", "7"],
    ] {
        let (c, v) = json(args);
        assert_eq!(c, 2, "{args:?}");
        assert!(v["error"].is_string(), "{args:?}");
    }
    let (c, v) = json(&["dualize", "--pair", "no_such_file.json"]);
    assert_eq!((c, v["location"].as_str()), (2, Some("no_such_file.json")));
}

#[test]
fn usage_errors_are_rejected_before_work() {
    for args in [
        &["frobnicate"][..],
        &["dualize"],
        &["dualize", "--pair", "a", "--triple", "b"],
        &["ss", "--page", "x"],
    ] {
        assert_eq!(json(args).0, 2, "{args:?}");
    }
}

#[test]
fn pretty_output_is_text() {
    let out = run(["tdk", "twisted", "--pair", "s2xs1_gen.json", "--pretty"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.output, "even: 1\nodd: 1\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["tdk", "dualize", "--pair", "t3_base_rank2.json"];
    assert_eq!(run(args).output, run(args).output);
}
