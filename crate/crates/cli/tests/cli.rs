use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorgram"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

#[test]
fn parse_prints_a_script_that_checks() {
    let g = fixture("john_loves_mary.tg");
    let o = run(&["parse", p(&g), "John loves Mary"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("jlm.drv");
    std::fs::write(&d, stdout(&o)).unwrap();
    let c = run(&[
        "check",
        p(&d),
        "--grammar",
        p(&g),
        "--sentence",
        "John loves Mary",
    ]);
    assert_eq!(code(&c), 0, "{}", String::from_utf8_lossy(&c.stdout));
    assert!(stdout(&c).starts_with("OK "));
    let wrong = run(&[
        "check",
        p(&d),
        "--grammar",
        p(&g),
        "--sentence",
        "Mary loves John",
    ]);
    assert_eq!(code(&wrong), 1);
}

#[test]
fn sentences_outside_the_language() {
    let o = run(&["parse", p(&fixture("john_loves_mary.tg")), "loves John"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "NOT-IN-LANGUAGE");
}

#[test]
fn relative_clause_parses_and_checks() {
    let g = fixture("elaborate.tg");
    let s = "Mary whom John loves madly leaves";
    let o = run(&["parse", p(&g), s]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("rel.drv");
    std::fs::write(&d, stdout(&o)).unwrap();
    assert_eq!(
        code(&run(&["check", p(&d), "--grammar", p(&g), "--sentence", s])),
        0
    );
}

#[test]
fn lambek_translation_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.etg");
    let t = run(&[
        "translate",
        "--from",
        "lambek",
        p(&fixture("lambek.lex")),
        "-o",
        p(&out),
    ]);
    assert_eq!(code(&t), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# translated from a Lambek lexicon"));
    assert_eq!(code(&run(&["parse", p(&out), "John loves Mary"])), 0);
    assert_eq!(code(&run(&["parse", p(&out), "loves John Mary"])), 1);
    // the lexicon itself loads through the same translation
    assert_eq!(
        code(&run(&[
            "parse",
            p(&fixture("lambek.lex")),
            "Mary leaves madly"
        ])),
        0
    );
}

#[test]
fn acg_translation_agrees_with_the_tensor_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy.tg");
    assert_eq!(
        code(&run(&[
            "translate",
            "--from",
            "acg",
            p(&fixture("toy.acg")),
            "-o",
            p(&out)
        ])),
        0
    );
    let a = run(&["enumerate", p(&out), "--max-len", "4"]);
    let b = run(&["enumerate", p(&fixture("elaborate.tg")), "--max-len", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn enumerate_json_schema() {
    let o = run(&[
        "--format",
        "json",
        "enumerate",
        p(&fixture("john_loves_mary.tg")),
        "--max-len",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "enumerate");
    assert_eq!(v["max_len"], 3);
    let words: Vec<&str> = v["words"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap())
        .collect();
    assert_eq!(
        words,
        [
            "John loves John",
            "John loves Mary",
            "Mary loves John",
            "Mary loves Mary"
        ]
    );
    assert!(v["inconclusive"].as_array().unwrap().is_empty());
}

#[test]
fn parse_json_schema() {
    let o = run(&[
        "--format",
        "json",
        "parse",
        p(&fixture("john_loves_mary.tg")),
        "loves",
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "not-in-language");
    let o = run(&[
        "--format",
        "json",
        "parse",
        p(&fixture("john_loves_mary.tg")),
        "John loves Mary",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "parsed");
    assert_eq!(v["axioms_used"]["loves"], 1);
    assert!(v["derivation"].as_array().unwrap().len() > 3);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "parse",
        p(&fixture("elaborate.tg")),
        "Mary whom John loves madly leaves",
    ]
    .map(str::to_string);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn prove_lambek_sequents() {
    assert_eq!(code(&run(&["prove", "--lambek", "np, np\\s |- s"])), 0);
    assert_eq!(code(&run(&["prove", "--lambek", "np\\s, np |- s"])), 1);
    // empty antecedent
    assert_eq!(code(&run(&["prove", "--lambek", "|- s/s"])), 0);
    assert_eq!(
        code(&run(&[
            "prove",
            "--lambek",
            "--lambek-restriction",
            "|- s/s"
        ])),
        1
    );
}

#[test]
fn prove_tensor_judgements() {
    assert_eq!(code(&run(&["prove", "d_i^j * d_k^l |- p^i_l, ~p^k_j"])), 0);
    assert_eq!(code(&run(&["prove", "d_i^l * d_k^j |- p^i_l, ~p^k_j"])), 1);
}

#[test]
fn graph_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let o = run(&[
        "graph",
        "[loves]_l^r * d_j^k * d_s^i |- S^j_i, ~NP^l_k, ~NP^s_r",
        "-o",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/loves_axiom.dot"),
    )
    .unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), golden);
}

#[test]
fn lexicalize_keeps_the_language() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lex.etg");
    let g = fixture("elaborate.tg");
    assert_eq!(code(&run(&["lexicalize", p(&g), "-o", p(&out)])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("nab^"));
    let a = run(&["enumerate", p(&out), "--max-len", "4"]);
    let b = run(&["enumerate", p(&g), "--max-len", "4"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn format_errors_name_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tg");
    std::fs::write(
        &bad,
        "literals:\n  NP : (1,1)\naxioms:\n  x: [a]_i^j |- NP^i_\n",
    )
    .unwrap();
    let o = run(&["parse", p(&bad), "a"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.tg:4:"), "{err}");
    assert_eq!(code(&run(&["parse", "no/such/file.tg", "a"])), 2);
    assert_eq!(code(&run(&["enumerate"])), 2);
}

#[test]
fn selftest_single_criterion() {
    let o = run(&["selftest", "--criterion", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("criterion 1:"));
    assert_eq!(code(&run(&["selftest", "--criterion", "9"])), 2);
}
