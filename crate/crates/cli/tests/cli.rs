use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn nambu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nambu")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_atomic_example() {
    let out = nambu(&["--json", "classify", &data("atomic4.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["label"], "Unimodular{r=1, m=1}");
    assert_eq!(v["label_data"]["rank"], 1);
    assert_eq!(v["unimodular"], true);
}

#[test]
fn zero_algebra_is_lie() {
    let zero = scratch("zero.json", r#"{"dim": 3, "arity": 2, "constants": []}"#);
    assert_eq!(code(&nambu(&["check-nlie", &zero])), 0);
}

#[test]
fn sum_of_blades_fails_with_monomials() {
    let out = nambu(&["--json", "check-poisson", &data("sum_of_blades.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["verdict"], false);
    assert_eq!(v["decomposable"], false);
    let witness = v["witness"].as_array().unwrap();
    assert!(!witness.is_empty());
    assert!(witness.iter().all(|w| !w.as_str().unwrap().contains(['+', '-'])), "{witness:?}");
}

#[test]
fn malformed_json_reports_location() {
    let bad = scratch("bad.json", "{\"dim\": 3,\n  \"arity\": ]");
    let out = nambu(&["check-nlie", &bad]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn synthesize_then_classify() {
    let out = nambu(&["synthesize", "--kind", "minus", "--lambda", "7/3", "--n", "3", "--random-basis", "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let alg = scratch("minus.json", &String::from_utf8(out.stdout).unwrap());
    let v = json(&nambu(&["--json", "classify", &alg]));
    assert_eq!(v["label_data"]["kind"], "PsiLambdaMinus");
    assert_eq!(v["label_data"]["lambda_sq"], "49/9");
}

#[test]
fn integrate_writes_csv() {
    let out = nambu(&["integrate", "--builtin", "spin", "--h", "0.01", "--steps", "10"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3,drift1,drift2"));
    assert_eq!(lines.count(), 11);
}

#[test]
fn exit_codes_across_verbs() {
    let zero = scratch("zero2.json", r#"{"dim": 3, "arity": 2, "constants": []}"#);
    let broken = scratch("broken.json", "not json");
    let split = scratch(
        "split.json",
        r#"{"nabla": {"num_vars": 6, "degree": 3, "components": [{"indices": [1, 2, 3], "poly": [{"coef": 1, "exps": [0,0,0,0,0,0]}]}]},
            "box": {"num_vars": 6, "degree": 2, "components": [{"indices": [4, 5], "poly": [{"coef": 1, "exps": [0,0,0,0,0,0]}]}]}}"#,
    );
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["check-nlie".into(), data("vector_product4.json")], 0),
        (vec!["check-nlie".into(), broken.clone()], 2),
        (vec!["check-poisson".into(), data("sum_of_blades.json")], 1),
        (vec!["check-poisson".into(), broken.clone()], 2),
        (vec!["check-jacobi".into(), data("pair_planar.json")], 0),
        (vec!["check-jacobi".into(), split], 1),
        (vec!["check-jacobi".into(), broken.clone()], 2),
        (vec!["classify".into(), data("vector_product4.json")], 0),
        (vec!["classify".into(), broken.clone()], 2),
        (vec!["derivations".into(), data("atomic4.json")], 0),
        (vec!["derivations".into(), "/nonexistent.json".into()], 2),
        (vec!["synthesize".into(), "--kind".into(), "psi-one".into(), "--n".into(), "2".into()], 0),
        (vec!["synthesize".into(), "--kind".into(), "plus".into(), "--n".into(), "2".into()], 2),
        (vec!["compat".into(), zero.clone(), zero.clone()], 0),
        (vec!["compat".into(), zero.clone(), data("sum_of_blades.json")], 2),
        (vec!["hereditary".into(), data("vector_product4.json"), "--u".into(), "1,0,0,0".into()], 0),
        (vec!["hereditary".into(), data("vector_product4.json"), "--u".into(), "1,0".into()], 2),
        (vec!["integrate".into(), "--builtin".into(), "kepler".into(), "--steps".into(), "20".into()], 0),
        (vec!["integrate".into(), "--builtin".into(), "kepler".into(), "--x0".into(), "0,0,0,0,0,0".into()], 2),
        (vec!["integrate".into(), "--system".into(), data("spin_system.json"), "--x0".into(), "1,0,0".into(), "--tolerance".into(), "1e-30".into(), "--h".into(), "0.5".into(), "--steps".into(), "20".into()], 1),
        (vec!["witt-demo".into()], 0),
        (vec!["no-such-verb".into()], 2),
    ];
    for (args, expected) in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = nambu(&refs);
        assert_eq!(code(&out), expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
