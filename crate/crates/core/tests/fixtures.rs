use tdk_core::fixtures;
use tdk_core::io::{pair_json, parse_json, parse_onn, parse_pair, parse_triple, triple_json};
use tdk_core::onn::is_onn;
use tdk_core::tduality::{dualize, is_dualizable, validate_triple};
use tdk_core::twisted::verify_iso;

#[test]
fn every_pair_fixture_parses_and_round_trips() {
    for name in fixtures::PAIRS {
        let doc = parse_json(fixtures::get(name).unwrap()).unwrap();
        let (base, pair) = parse_pair(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
        let out = pair_json(&base, &pair);
        let (_, again) = parse_pair(&out).unwrap();
        assert_eq!(again.flux, pair.flux, "{name}");
        assert_eq!(pair_json(&base, &again), out, "{name}");
    }
}

#[test]
fn dualizable_fixtures_give_valid_iso_triples() {
    let mut dualized = 0;
    for name in fixtures::PAIRS {
        let doc = parse_json(fixtures::get(name).unwrap()).unwrap();
        let (base, pair) = parse_pair(&doc).unwrap();
        if !is_dualizable(&pair).unwrap().0 {
            assert_eq!(*name, "t3_over_s1_vol.json");
            continue;
        }
        let t = dualize(&pair, None).unwrap();
        let rep = validate_triple(&t);
        assert!(rep.all_pass(), "{name}: {rep:?}");
        assert!(verify_iso(&t).unwrap().is_iso(), "{name}");
        let text = triple_json(&base, &t);
        let (_, back) = parse_triple(&text).unwrap();
        assert_eq!(back.w, t.w, "{name}");
        dualized += 1;
    }
    assert!(dualized >= 15);
}

#[test]
fn onn_fixtures() {
    for name in fixtures::ONN {
        let doc = parse_json(fixtures::get(name).unwrap()).unwrap();
        let m = parse_onn(&doc).unwrap();
        assert_eq!(is_onn(&m).unwrap(), *name != "diag2.json", "{name}");
    }
}

#[test]
fn point_triple_fixture_validates() {
    let doc = parse_json(fixtures::get("point_triple.json").unwrap()).unwrap();
    let (_, t) = parse_triple(&doc).unwrap();
    assert!(validate_triple(&t).all_pass());
    assert!(verify_iso(&t).unwrap().is_iso());
}
