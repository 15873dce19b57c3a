use std::path::PathBuf;
use std::process::{Command, Output};

const DUP_COIN: &str = "(\\x.\\y. y x x) coin";
const BRANCH_COIN: &str = "(\\x.\\y. if y then x else ((\\z. if z then 0 else 1) x)) coin";
const CBV_END: &str = "{ 1/2: \\x0. x0 0 0 ; 1/2: \\x0. x0 1 1 }";
const CBN_END: &str =
    "{ 1/4: \\x0. x0 0 0 ; 1/4: \\x0. x0 0 1 ; 1/4: \\x0. x0 1 0 ; 1/4: \\x0. x0 1 1 }";

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn lambcoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambcoin"))
        .args(args)
        .env_remove("LAMBCOIN_FUEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn typecheck_verdicts() {
    let o = lambcoin(&["typecheck", "--system", "affine", DUP_COIN]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("AffinityViolation"));
    let o = lambcoin(&["typecheck", "--system", "simple", "coin"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "𝔹\n"));
    let o = lambcoin(&["typecheck", "--system", "subaffine", BRANCH_COIN]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "𝔹 → 𝔹\n"));
    let o = lambcoin(&["typecheck", DUP_COIN]);
    assert_eq!(stdout(&o), "(𝔹 → 𝔹 → 𝔹) → 𝔹\n");
}

#[test]
fn infer_prints_a_scheme() {
    assert_eq!(stdout(&lambcoin(&["infer", "\\x.\\y. x"])), "α → β → α\n");
}

#[test]
fn reduce_traces() {
    let o = lambcoin(&["reduce", "--strategy", "cbv", DUP_COIN]);
    assert_eq!(code(&o), 0);
    let expected = format!(
        "start: {{ 1: (\\x0. \\x1. x1 x0 x0) coin }}\n\
         step 1: [arg in (\\x0. \\x1. x1 x0 x0) coin] -> {{ 1/2: (\\x0. \\x1. x1 x0 x0) 0 ; 1/2: (\\x0. \\x1. x1 x0 x0) 1 }}\n\
         step 2: [root in (\\x0. \\x1. x1 x0 x0) 0 ; root in (\\x0. \\x1. x1 x0 x0) 1] -> {CBV_END}\n\
         terminal: {CBV_END}\n"
    );
    assert_eq!(stdout(&o), expected);
    let o = lambcoin(&["reduce", "--strategy", "cbn", DUP_COIN]);
    assert!(stdout(&o).ends_with(&format!("terminal: {CBN_END}\n")));
    let o = lambcoin(&["reduce", "--strategy", "cbn", "0"]);
    assert_eq!(stdout(&o), "start: { 1: 0 }\nterminal: { 1: 0 }\n");
}

#[test]
fn explore_and_confluence() {
    let o = lambcoin(&["explore", "coin"]);
    assert_eq!(
        stdout(&o),
        "{ 1/2: 0 ; 1/2: 1 }\nstats: nodes=3 max_depth=1 fuel=3\n"
    );
    let o = lambcoin(&["explore", DUP_COIN]);
    assert_eq!(
        stdout(&o),
        format!("{CBV_END}\n{CBN_END}\nstats: nodes=12 max_depth=3 fuel=12\n")
    );
    let o = lambcoin(&["confluence", DUP_COIN]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.starts_with("NOT CONFLUENT\n"));
    assert!(out.contains(&format!("witness: {CBV_END}\nwitness: {CBN_END}\n")));
    let o = lambcoin(&["confluence", "--calculus", "internal", DUP_COIN]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("CONFLUENT\n{ 1: \\x0. x0 (0 +[1/2] 1) (0 +[1/2] 1) }\n"));
}

#[test]
fn stuck_sums_are_flagged() {
    let o = lambcoin(&["explore", "--calculus", "internal", "if coin then 0 else 1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(
        out.starts_with("{ 1: if 0 +[1/2] 1 then 0 else 1 }\n"),
        "{out}"
    );
    assert!(
        out.contains("stuck on a sum at root in if 0 +[1/2] 1 then 0 else 1\n"),
        "{out}"
    );
}

#[test]
fn equivalence_commands() {
    let o = lambcoin(&["computational-confluence", BRANCH_COIN]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("COMPUTATIONALLY CONFLUENT\n"));
    let o = lambcoin(&["computational-confluence", DUP_COIN]);
    assert_eq!(code(&o), 5);

    let o = lambcoin(&[
        "equiv",
        &data("dup_cbv.dist"),
        &data("dup_cbn.dist"),
        "--type",
        "(B->B->B)->B",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o)
        .contains("NOT EQUIVALENT (failing context: ◊ (\\x0. \\x1. if x0 then 0 else x1))"));

    let o = lambcoin(&[
        "equiv",
        &data("branch_left.dist"),
        &data("branch_right.dist"),
        "--type",
        "B->B",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "type: 𝔹 → 𝔹\nsize bound: 6\ncontexts: 2\n\
         ◊ 0 | { 1/2: 0 ; 1/2: 1 } | { 1/2: 0 ; 1/2: 1 } | OK\n\
         ◊ 1 | { 1/2: 0 ; 1/2: 1 } | { 1/2: 0 ; 1/2: 1 } | OK\n\
         EQUIVALENT\n"
    );
    let d = data("branch_left.dist");
    assert_eq!(code(&lambcoin(&["equiv", &d, &d, "--type", "B->B"])), 0);
    let o = lambcoin(&[
        "equiv",
        "{ 1: \\y. y coin coin }",
        "{ 1: \\y. y 0 0 }",
        "--type",
        "(B->B->B)->B",
    ]);
    assert_eq!(code(&o), 4);
    let o = lambcoin(&[
        "equiv",
        "--single-path",
        "{ 1: \\y. y coin coin }",
        "{ 1: \\y. y 0 0 }",
        "--type",
        "(B->B->B)->B",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn demos() {
    let o = lambcoin(&["demo", "figure1"]);
    assert_eq!(
        stdout(&o),
        format!(
            "term: (\\x0. \\x1. x1 x0 x0) coin\nnormal-form distributions: 2\n{CBV_END}\n{CBN_END}\n\
             cbv (2 steps): {CBV_END}\ncbn (3 steps): {CBN_END}\n"
        )
    );
    let o = lambcoin(&["demo", "section4"]);
    assert!(stdout(&o).ends_with("EQUIVALENT\n"));
    let o = lambcoin(&["demo", "internalized"]);
    assert!(stdout(&o)
        .contains("normal-form distributions: 1\n{ 1: \\x0. x0 (0 +[1/2] 1) (0 +[1/2] 1) }\n"));
    assert_eq!(code(&lambcoin(&["demo", "nope"])), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&lambcoin(&["explore", "(\\x. x"])), 2);
    assert_eq!(code(&lambcoin(&["explore", "x"])), 2);
    assert_eq!(
        code(&lambcoin(&["explore", "coin", "--strategy", "cbv"])),
        2
    );
    assert_eq!(code(&lambcoin(&["explore", "0 +[1/2] 1"])), 2);
    assert_eq!(code(&lambcoin(&["explore", "(\\x. x x) (\\x. x x)"])), 3);
    assert_eq!(
        code(&lambcoin(&[
            "explore",
            "--fuel",
            "5",
            "(\\x. x x x) (\\x. x x x)"
        ])),
        3
    );
    assert_eq!(
        code(&lambcoin(&[
            "equiv",
            "missing.dist",
            "missing.dist",
            "--type",
            "B"
        ])),
        2
    );
    assert_eq!(
        code(&lambcoin(&[
            "equiv", "{ 1: 0 }", "{ 1: 0 }", "--type", "B-"
        ])),
        2
    );
}

#[test]
fn fuel_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lambcoin"))
        .args(["explore", DUP_COIN])
        .env("LAMBCOIN_FUEL", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: fuel exhausted"));
}

#[test]
fn file_and_stdin_input() {
    let o = lambcoin(&["explore", "--file", &data("dup.lc")]);
    assert_eq!(stdout(&o), stdout(&lambcoin(&["explore", DUP_COIN])));
    let mut child = Command::new(env!("CARGO_BIN_EXE_lambcoin"))
        .args(["typecheck", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"\\x. x").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "𝔹 → 𝔹\n");
}

#[test]
fn structured_output() {
    let o = lambcoin(&["--format", "structured", "confluence", DUP_COIN]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "confluence");
    assert_eq!(v["confluent"], false);
    assert_eq!(v["distributions"][0]["canonical"], CBV_END);
    assert_eq!(v["distributions"][1]["support"][3]["probability"], "1/4");

    let o = lambcoin(&[
        "typecheck",
        "--system",
        "affine",
        DUP_COIN,
        "--format",
        "structured",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["error_kind"], "AffinityViolation");

    let o = lambcoin(&["--format", "structured", "explore", "(\\x. x x) (\\x. x x)"]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "fuel_exhausted");
    assert_eq!(v["error"]["cycle"], true);
}

#[test]
fn output_is_stable() {
    for args in [
        &["explore", DUP_COIN][..],
        &["computational-confluence", BRANCH_COIN][..],
        &["--format", "structured", "demo", "section4"][..],
    ] {
        let a = lambcoin(args);
        let b = lambcoin(args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status, b.status);
    }
}
