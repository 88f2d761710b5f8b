use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use coquasi_cli::doc::{self, Loaded, Loader};
use coquasi_cli::{run, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use coquasi_core::catalog;
use coquasi_core::hopf_modules::{induced_module, regular_module, RModule};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["coquasi"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn load(target: &str) -> Loaded {
    Loader { field: None }.load(target).unwrap()
}

#[test]
fn check_builtin_h3_passes() {
    let (code, out, _) = call(&["check", "--kind", "coquasi-hopf", "builtin:H3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("OK:"));
}

#[test]
fn check_group_algebra_is_flagged_ordinary() {
    let (code, out, _) = call(&["check", "--kind", "coquasi-hopf", "builtin:C3", "--field", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("ordinary bialgebra"), "{out}");
}

#[test]
fn check_h2_fixture_passes() {
    let (code, out, err) = call(&["check", "--kind", "crossed-system", &fixture("h2_fixture.json")]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
}

#[test]
fn check_every_fixture() {
    for (kind, file) in [
        ("crossed-system", "h2_fixture.json"),
        ("h3-datum", "h3_datum.json"),
        ("comodule-algebra", "h2_product.json"),
        ("cleaving-system", "h2_cleft.json"),
    ] {
        let (code, out, err) = call(&["check", "--kind", kind, &fixture(file)]);
        assert_eq!(code, EXIT_OK, "{file}: {out}{err}");
    }
}

#[test]
fn division_by_zero_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("h2_fixture.json")).unwrap()).unwrap();
    v["payload"]["sigma"][3][1] = Value::String("1/0".into());
    let p = dir.path().join("bad.json");
    fs::write(&p, v.to_string()).unwrap();
    let (code, _, err) = call(&["check", "--kind", "crossed-system", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("DivisionByZero"), "{err}");
}

#[test]
fn schema_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    fs::write(&p, r#"{"format":"coquasi-doc/1","kind":"crossed_system","payload":{"host":"builtin:H2"}}"#).unwrap();
    assert_eq!(call(&["check", "--kind", "crossed-system", p.to_str().unwrap()]).0, EXIT_INPUT);
    fs::write(&p, r#"{"format":"coquasi-doc/2","kind":"h2_datum","payload":{}}"#).unwrap();
    assert_eq!(call(&["check", "--kind", "h2-datum", p.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(call(&["check", "--kind", "crossed-system", "builtin:H2"]).0, EXIT_INPUT);
    assert_eq!(call(&["check", "--kind", "coquasi-hopf", "builtin:H7"]).0, EXIT_INPUT);
    assert_eq!(call(&["check", "--kind", "hopf", "builtin:H2"]).0, EXIT_INPUT);
    assert_eq!(call(&["check", "--kind", "coquasi-hopf", "/nonexistent.json"]).0, EXIT_INPUT);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INPUT);
}

#[test]
fn wrong_vector_length_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("h2_fixture.json")).unwrap()).unwrap();
    v["payload"]["action"][0] = serde_json::json!(["1"]);
    let p = dir.path().join("bad.json");
    fs::write(&p, v.to_string()).unwrap();
    let (code, _, err) = call(&["check", "--kind", "crossed-system", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("action[0]"), "{err}");
}

#[test]
fn corrupted_cocycle_exits_1_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("h2_fixture.json")).unwrap()).unwrap();
    v["payload"]["action"][3] = serde_json::json!(["0", "2"]);
    v["payload"]["host"] = Value::String("builtin:H2".into());
    let p = dir.path().join("bad.json");
    fs::write(&p, v.to_string()).unwrap();
    let (code, out, _) = call(&["check", "--kind", "crossed-system", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("FAIL"), "{out}");
    assert!(out.contains(" at ("), "{out}");
}

#[test]
fn json_report_is_sorted_and_stable() {
    let args = ["check", "--kind", "crossed-system", "--json", "builtin:h3-fixture"];
    let (code, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert!(v["checks"].is_array());
    let pos = |k: &str| a.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("checks") < pos("notes") && pos("notes") < pos("subject"));
}

#[test]
fn heisenberg_h2_has_dimension_4() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("hd.json");
    let (code, out, err) = call(&["build", "heisenberg", "builtin:H2", "-o", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    let Loaded::Comodule(a) = load(p.to_str().unwrap()) else { panic!("kind") };
    assert_eq!(a.dim(), 4);
    let (code, out, _) = call(&["check", "--kind", "comodule-algebra", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn tables_h3_match_the_library() {
    let (code, out, err) = call(&["build", "tables", "--json", "--datum", &fixture("h3_datum.json")]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let d = catalog::h3_fixture_datum(coquasi_core::scalar::FieldSpec::cyclotomic(3)).unwrap();
    let t = catalog::h3_table(&d).unwrap();
    assert_eq!(v, coquasi_cli::table_json(&t));
    assert_eq!(v["products"]["b"]["a"], "(z)*1#1");
    assert_eq!(v["products"]["a"]["a"], "s#x^2");
    let (_, text, _) = call(&["build", "tables", "--datum", &fixture("h3_datum.json")]);
    assert_eq!(text, t.render());
}

#[test]
fn tables_h2() {
    let (code, out, _) = call(&["build", "tables", "--json", "--datum", "builtin:h2-datum"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["products"]["a"]["b"], "1#1");
    assert_eq!(v["products"]["b"]["a"], "-1*1#1");
}

#[test]
fn morita_h2_cleft_is_strict() {
    let (code, out, err) = call(&["build", "morita", &fixture("h2_cleft.json")]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    assert!(out.contains("dimensions: ring1 4, ring2 4, P 4, Q 4"), "{out}");
    assert!(out.lines().any(|l| l == "strict: yes; [δ,γ]=α·1; (γ,δ)=ε·1"), "{out}");
}

#[test]
fn can_is_bijective_on_fixtures() {
    for target in [fixture("h2_cleft.json"), "builtin:h3-cleft".to_string()] {
        let (code, out, _) = call(&["build", "can", &target]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().last(), Some("Bijective"));
    }
    let (_, out, _) = call(&["build", "can", "--json", &fixture("h2_product.json")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Bijective");
}

#[test]
fn can_on_the_regular_comodule_of_the_trivial_algebra_is_not_bijective() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("triv.json");
    let doc = serde_json::json!({
        "format": "coquasi-doc/1",
        "kind": "comodule_algebra",
        "payload": {
            "host": "builtin:C2",
            "algebra": { "basis": ["1"], "products": [["1"]], "unit": ["1"] },
            "coaction": [["1", "0"]]
        }
    });
    fs::write(&p, doc.to_string()).unwrap();
    let (code, out, _) = call(&["build", "can", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().last(), Some("NotBijective"));
}

#[test]
fn crossed_and_cleft_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cleft = dir.path().join("cleft.json");
    let crossed = dir.path().join("crossed.json");
    let (code, _, err) = call(&["build", "crossed-to-cleft", &fixture("h2_fixture.json"), "-o", cleft.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, _, err) = call(&["build", "cleft-to-crossed", cleft.to_str().unwrap(), "-o", crossed.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(call(&["check", "--kind", "crossed-system", crossed.to_str().unwrap()]).0, EXIT_OK);
    let Loaded::Crossed(cs) = load(crossed.to_str().unwrap()) else { panic!("kind") };
    assert_eq!((cs.dim_r(), cs.dim_h()), (2, 2));
}

#[test]
fn crossed_product_of_h3_fixture() {
    let (code, out, _) = call(&["build", "crossed-product", "builtin:h3-fixture"]);
    assert_eq!(code, EXIT_OK);
    let d: doc::Document = serde_json::from_str(&out).unwrap();
    assert_eq!(d.field, 3);
    let Loaded::Comodule(a) = Loader { field: None }.from_document(&d, Path::new(".")).unwrap() else { panic!("kind") };
    assert_eq!(a.dim(), 9);
}

#[test]
fn deform_by_invertible_map() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    fs::write(&a, r#"[["1", "0"], ["0", "1"]]"#).unwrap();
    let out_p = dir.path().join("deformed.json");
    let (code, _, err) = call(&["build", "deform", &fixture("h2_fixture.json"), "--a", a.to_str().unwrap(), "-o", out_p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(call(&["check", "--kind", "crossed-system", out_p.to_str().unwrap()]).0, EXIT_OK);
    let Loaded::Crossed(cs) = load(out_p.to_str().unwrap()) else { panic!("kind") };
    // σ'(x,x) = a(x)(x·a(x))σ(x,x)a⁻¹(1) = t(-t)t = -t
    assert_eq!(cs.sig(1, 1).0[1], coquasi_core::scalar::Scalar::from_i64(-1));

    fs::write(&a, r#"[["1", "0"], ["0", "0"]]"#).unwrap();
    let (code, _, _) = call(&["build", "deform", &fixture("h2_fixture.json"), "--a", a.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
}

#[test]
fn twist_clifford_gives_a_valid_host() {
    let dir = tempfile::tempdir().unwrap();
    let tau = dir.path().join("tau.json");
    let t = catalog::clifford_twist(2);
    let values: Vec<String> = t.tau.values.iter().map(|s| s.to_string()).collect();
    fs::write(&tau, serde_json::to_string(&values).unwrap()).unwrap();
    let out_p = dir.path().join("twisted.json");
    let (code, _, err) = call(&["build", "twist", "builtin:C2^2", "--tau", tau.to_str().unwrap(), "-o", out_p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, out, _) = call(&["check", "--kind", "coquasi-hopf", out_p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn circledast_of_h2_cleft() {
    let (code, out, _) = call(&["build", "circledast", &fixture("h2_cleft.json")]);
    assert_eq!(code, EXIT_OK);
    let d: doc::Document = serde_json::from_str(&out).unwrap();
    let Loaded::Crossed(cs) = Loader { field: None }.from_document(&d, Path::new(".")).unwrap() else { panic!("kind") };
    assert_eq!(cs.dim_r(), 8);
}

fn round_trip(x: &Loaded) -> Loaded {
    let d = doc::to_document(x, 1);
    let text = doc::to_json_string(&d);
    let back: doc::Document = serde_json::from_str(&text).unwrap();
    let y = Loader { field: None }.from_document(&back, Path::new(".")).unwrap();
    assert_eq!(doc::to_json_string(&doc::to_document(&y, 1)), text);
    y
}

#[test]
fn documents_round_trip_tensor_identically() {
    let targets = [
        "builtin:H2",
        "builtin:H3",
        "builtin:C4",
        "builtin:C2^3",
        "builtin:h2-fixture",
        "builtin:h3-fixture",
        "builtin:h2-datum",
        "builtin:h3-datum",
        "builtin:h2-cleft",
        "builtin:h3-cleft",
        "builtin:clifford-2",
    ];
    for t in targets {
        let x = load(t);
        let y = round_trip(&x);
        match (&x, &y) {
            (Loaded::Hopf(a), Loaded::Hopf(b)) => {
                assert_eq!(a.base, b.base);
                assert_eq!((&a.antipode, &a.alpha, &a.beta), (&b.antipode, &b.alpha, &b.beta));
            }
            (Loaded::Crossed(a), Loaded::Crossed(b)) => {
                assert_eq!((&a.r, &a.action, &a.sigma, &a.sigma_inv), (&b.r, &b.action, &b.sigma, &b.sigma_inv));
                assert_eq!(a.host.base, b.host.base);
            }
            (Loaded::Comodule(a), Loaded::Comodule(b)) => {
                assert_eq!((&a.algebra, &a.coaction), (&b.algebra, &b.coaction));
                assert_eq!(a.host.base, b.host.base);
            }
            (Loaded::Cleaving(a), Loaded::Cleaving(b)) => {
                assert_eq!((&a.gamma, &a.delta), (&b.gamma, &b.delta));
                assert_eq!((&a.a.algebra, &a.a.coaction), (&b.a.algebra, &b.a.coaction));
            }
            (Loaded::H2(a), Loaded::H2(b)) => assert_eq!(a, b),
            (Loaded::H3(a), Loaded::H3(b)) => assert_eq!(a, b),
            _ => panic!("{t}: kind changed"),
        }
    }
}

#[test]
fn hopf_module_documents() {
    let Loaded::Crossed(cs) = load(&fixture("h2_fixture.json")) else { panic!("kind") };
    let cs = Arc::new(cs);
    for m in [regular_module(cs.clone()), induced_module(&RModule::free(&cs.r, 2), cs.clone())] {
        let y = round_trip(&Loaded::Module(m.clone()));
        let Loaded::Module(n) = &y else { panic!("kind") };
        assert_eq!((&m.r_action, &m.coaction, &m.h_action), (&n.r_action, &n.coaction, &n.h_action));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        fs::write(&p, doc::to_json_string(&doc::to_document(&y, 1))).unwrap();
        let (code, out, _) = call(&["check", "--kind", "hopf-module", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{out}");
    }
}

#[test]
fn relative_references_resolve_against_the_document() {
    // h2_cleft.json names its algebra as "h2_product.json"
    let cwd = std::env::current_dir().unwrap();
    assert_ne!(cwd.canonicalize().unwrap(), fixtures().canonicalize().unwrap());
    assert!(matches!(load(&fixture("h2_cleft.json")), Loaded::Cleaving(_)));
}

#[test]
fn scalar_forms_agree() {
    let order = 3;
    let a = doc::scalar(&doc::ScalarJson::Text("1/2 - z^2".into()), order).unwrap();
    let b = doc::scalar(&doc::ScalarJson::Coeffs(vec!["3/2".into(), "1".into()]), order).unwrap();
    assert_eq!(a, b);
    let c = doc::scalar(&doc::ScalarJson::Int(-2), order).unwrap();
    assert_eq!(c, coquasi_core::scalar::Scalar::from_i64(-2));
}

#[test]
fn h3_datum_needs_cube_roots() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("h3_datum.json")).unwrap()).unwrap();
    v["field"] = Value::from(1);
    v["payload"]["f"][1][1] = Value::String("1".into());
    v["payload"]["f"][2][2] = Value::String("1".into());
    v["payload"]["g"][1][1] = Value::String("1".into());
    v["payload"]["g"][2][2] = Value::String("1".into());
    v["payload"]["v2"][0] = Value::String("1".into());
    let p = dir.path().join("h3.json");
    fs::write(&p, v.to_string()).unwrap();
    assert_eq!(call(&["check", "--kind", "h3-datum", p.to_str().unwrap()]).0, EXIT_INPUT);
}
