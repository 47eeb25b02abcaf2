use std::path::PathBuf;
use std::process::{Command, Output};

use ccm_cli::run_repl;
use ccm_core::semantics::evaluate;
use ccm_core::syntax::{parse_context, parse_formula, parse_model};
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "examples", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn ccm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_reports_truth() {
    let o = ccm(&["eval", "-m", &fixture("temperature.ccm"), "-c", "U=35", "-f", "<TC <- 40>(HS = 1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn vacuous_box_has_no_solutions() {
    let o = ccm(&[
        "eval", "-m", &fixture("temperature.ccm"), "-c", "U=35", "-f", "[TF <- 104](HS = 0)", "--show-solutions", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["model"], "Temperature");
    assert_eq!(v["context"]["U"], 35);
    assert_eq!(v["value"], true);
    assert_eq!(v["solutions"], serde_json::json!([]));
    assert!(v["elapsed_ms"].is_number());
}

#[test]
fn disconnect_solution_in_json() {
    let o = ccm(&["eval", "-m", &fixture("temperature.ccm"), "-c", "U=35", "-f", "<disc(TC), TF <- 104>(HS = 1)", "--json"]);
    let v = json(&o);
    assert_eq!(v["value"], true);
    assert_eq!(v["solutions"], serde_json::json!([{"TC": 40, "TF": 104, "HS": 1}]));
}

#[test]
fn exit_codes() {
    let t = fixture("temperature.ccm");
    let code = |args: &[&str]| ccm(args).status.code();
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=99", "-f", "[ ]true"]), Some(3));
    assert_eq!(code(&["eval", "-m", &t, "-c", "W=30", "-f", "[ ]true"]), Some(3));
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=35", "-f", "[TF <- 104](HS ="]), Some(2));
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=35", "-f", "[Q <- 1]true"]), Some(2));
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=", "-f", "[ ]true"]), Some(2));
    assert_eq!(code(&["eval", "-m", "/nonexistent.ccm", "-c", "U=35", "-f", "[ ]true"]), Some(2));
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=35", "-f", "<TF <- 104>(HS = 1)", "--assert-true"]), Some(1));
    assert_eq!(code(&["eval", "-m", &t, "-c", "U=35", "-f", "<TF <- 104>(HS = 1)"]), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ccm");
    std::fs::write(&bad, "model Bad\nendogenous A : 0..1\neq A = 2\n").unwrap();
    assert_eq!(code(&["eval", "-m", bad.to_str().unwrap(), "-c", "", "-f", "[ ]true"]), Some(3));
    std::fs::write(&bad, "model Bad\nendogenous A : 0..\n").unwrap();
    assert_eq!(code(&["eval", "-m", bad.to_str().unwrap(), "-c", "", "-f", "[ ]true"]), Some(2));
}

#[test]
fn rewrite_expands_the_range() {
    let o = ccm(&["rewrite", "-m", &fixture("temperature.ccm"), "-f", "[disc(TC), TF <- 104](HS=1)", "--json"]);
    assert_eq!(json(&o)["basics"], 16);
    let o = ccm(&["rewrite", "-m", &fixture("temperature.ccm"), "-f", "[disc(TC, TF)]true", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solutions_count_and_list() {
    let c = fixture("cholesterol.ccm");
    let o = ccm(&["solutions", "-m", &c, "-c", "U=1", "-s", "disc(LDL), TOT <- 12"]);
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).contains("LDL=5"));
    let o = ccm(&["solutions", "-m", &c, "-c", "U=1", "-s", "disc(LDL, HDL, VLDL), TOT <- 12", "--count", "--json"]);
    let brute = (2..=6).flat_map(|h| (2..=7).flat_map(move |l| (1..=5).map(move |v| h + l + v))).filter(|&s| s == 12).count();
    assert_eq!(json(&o)["count"], brute);
}

#[test]
fn axiom_sweep_is_clean() {
    let o = ccm(&["axioms", "--sig", &fixture("tiny.ccm"), "--models", "20", "--instances", "8", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("0 violations over 20 models\n"));
    let o = ccm(&["axioms", "--sig", &fixture("tiny.ccm"), "--schemas", "D9", "--models", "20", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["violations"].as_array().unwrap().is_empty());
    assert_eq!(ccm(&["axioms", "--sig", &fixture("tiny.ccm"), "--schemas", "D6"]).status.code(), Some(2));
}

#[test]
fn validity_counterexample_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx.ccm");
    let formula = format!("@{}", fixture("old-d9-instance.cf"));
    let o = ccm(&[
        "validity", "--sig", &fixture("tiny.ccm"), "-f", &formula, "--exhaustive", "-o", out.to_str().unwrap(), "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["outcome"], "counterexample");
    let text = v["counterexample"]["model"].as_str().unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);

    let m = parse_model(text).unwrap();
    let ctx: Vec<String> =
        v["counterexample"]["context"].as_object().unwrap().iter().map(|(k, x)| format!("{k}={x}")).collect();
    let u = parse_context(&ctx.join(", ")).unwrap();
    let f = parse_formula(std::fs::read_to_string(fixture("old-d9-instance.cf")).unwrap().trim(), &m.signature).unwrap();
    assert_eq!(evaluate(&m, &u, &f), Ok(false));

    let o = ccm(&["eval", "-m", out.to_str().unwrap(), "-c", &ctx.join(","), "-f", &formula]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn validity_modes() {
    let tiny = fixture("tiny.ccm");
    let o = ccm(&["validity", "--sig", &tiny, "-f", "[A <- 0](A = 0)"]);
    assert_eq!(stdout(&o), "valid: true at all 147968 model-context pairs\n");
    let o = ccm(&["validity", "--sig", &tiny, "-f", "[A <- 0](A = 0)", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ccm(&["validity", "--sig", &tiny, "-f", "[A <- 0](A = 0)", "--budget", "1000", "--sample", "0.001", "--json"]);
    assert_eq!(json(&o)["outcome"], "none-found");
    let o = ccm(&["validity", "--sig", &tiny, "-f", "<A <- 0>true", "--assert-valid"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn combine_writes_a_loadable_model() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ccm");
    let b = dir.path().join("b.ccm");
    let links = dir.path().join("links.txt");
    let out = dir.path().join("out.ccm");
    std::fs::write(&a, "model C\nexogenous U : 30..45\nendogenous TC : 30..45\neq TC = U\n").unwrap();
    std::fs::write(&b, "model F\nendogenous TF : 86..113\n").unwrap();
    std::fs::write(&links, "constraint 5 * TF == 9 * TC + 160\n").unwrap();
    let p = |x: &PathBuf| x.to_str().unwrap().to_string();
    let o = ccm(&["combine", &p(&a), &p(&b), "--links", &p(&links), "-o", &p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let o = ccm(&["eval", "-m", &p(&out), "-c", "U=40", "-f", "[ ](TF = 104)"]);
    assert_eq!(stdout(&o), "true\n");
    let o = ccm(&["combine", &p(&a), &p(&a)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn repl_matches_batch() {
    let path = fixture("temperature.ccm");
    let m = parse_model(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let queries = ["<TC <- 40>(HS = 1)", "[TF <- 104](HS = 0)", "<TF <- 104>(HS = 1)", "<disc(TC), TF <- 104>(HS = 1)"];
    let input = queries.join("\n") + "\n:context U=41\n[ ](HS = 1)\n:quit\n[ ]false\n";
    let mut out = vec![];
    run_repl(&m, parse_context("U=35").unwrap(), input.as_bytes(), &mut out, false, false).unwrap();
    let mut expected = String::new();
    for q in queries {
        expected += &stdout(&ccm(&["eval", "-m", &path, "-c", "U=35", "-f", q]));
    }
    expected += &stdout(&ccm(&["eval", "-m", &path, "-c", "U=41", "-f", "[ ](HS = 1)"]));
    assert_eq!(String::from_utf8(out).unwrap(), expected);
}

#[test]
fn repl_reports_errors_inline() {
    let m = parse_model(&std::fs::read_to_string(fixture("temperature.ccm")).unwrap()).unwrap();
    let input = ":context U=99\n[TF <- \n:solutions disc(TC), TF <- 104\n:nope\n";
    let mut out = vec![];
    run_repl(&m, parse_context("U=35").unwrap(), input.as_bytes(), &mut out, false, false).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("error: value 99"));
    assert!(lines[1].starts_with("error: 1:7"));
    assert_eq!(lines[2], "TC=40, TF=104, HS=1");
    assert!(lines[3].starts_with("error: unknown command"));
}

#[test]
fn repl_json_matches_batch_json() {
    let path = fixture("temperature.ccm");
    let m = parse_model(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mut out = vec![];
    run_repl(&m, parse_context("U=35").unwrap(), "<TC <- 40>(HS = 1)\n".as_bytes(), &mut out, true, false).unwrap();
    let mut repl: Value = serde_json::from_slice(&out).unwrap();
    let mut batch = json(&ccm(&["eval", "-m", &path, "-c", "U=35", "-f", "<TC <- 40>(HS = 1)", "--json"]));
    repl.as_object_mut().unwrap().remove("elapsed_ms");
    batch.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(repl, batch);
}
