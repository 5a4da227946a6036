use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn cohen(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cohen"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap().trim().to_owned(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ok_json(args: &[&str], stdin: &str) -> Value {
    let (code, out, err) = cohen(args, stdin);
    assert_eq!(code, 0, "stderr: {err}, stdout: {out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn digitize_example() {
    let (code, out, _) = cohen(&["cohen", "digitize", "--p", "2", "--r", "1", "--m", "2"], r#"{"x":["t","1"]}"#);
    assert_eq!(code, 0);
    assert_eq!(out, r#"{"digits":["t","1"]}"#);
}

#[test]
fn witt_add_example() {
    let (code, out, _) = cohen(&["witt", "add", "--p", "2", "--r", "0"], r#"{"x":["1","0"],"y":["1","0"]}"#);
    assert_eq!(code, 0);
    assert_eq!(out, r#"{"result":["0","1"]}"#);
}

#[test]
fn lambda_example() {
    let (code, out, _) = cohen(&["lambda", "--m", "1"], r#"{"alpha":"1/(1+t)"}"#);
    assert_eq!(code, 0);
    assert_eq!(out, r#"{"(0)":"(1)/(1+t)","(1)":"(1)/(1+t)"}"#);
}

#[test]
fn marker_exits_with_two() {
    let (code, out, _) = cohen(&["cohen", "digitize"], r#"{"x":["0","t"]}"#);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"], "NotMember");
    let (code, _, _) = cohen(&["witt", "div-by-p", "--r", "1"], r#"{"x":["t","1"]}"#);
    assert_eq!(code, 2);
}

#[test]
fn fault_exits_with_one() {
    let (code, out, _) = cohen(&["morphism", "tep", "--m", "2"], r#"{"stage":3}"#);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"], "StageError");
}

#[test]
fn schema_errors_exit_with_64() {
    for (args, stdin) in [
        (vec!["witt", "add"], "{not json"),
        (vec!["witt", "add"], r#"{"x":["1","0"]}"#),
        (vec!["witt", "add"], r#"{"x":["1","0"],"y":["1"]}"#),
        (vec!["lambda"], r#"{"alpha":"1/("}"#),
        (vec!["lambda", "--p", "4"], r#"{"alpha":"t"}"#),
        (vec!["lang", "eval"], r#"{"formula":"(= x:A"}"#),
        (vec!["no-such-command"], "{}"),
    ] {
        let (code, out, err) = cohen(&args, stdin);
        assert_eq!(code, 64, "{args:?} {stdin}: {out}");
        assert!(!err.is_empty());
        assert!(out.is_empty());
    }
}

#[test]
fn emitted_elements_reparse() {
    let prod = ok_json(&["witt", "mul", "--r", "1"], r#"{"x":["1/(1+t)","t^3"],"y":["t","1+t"]}"#);
    let back = json!({ "x": prod["result"], "y": ["1", "0"] });
    let again = ok_json(&["witt", "mul", "--r", "1"], &back.to_string());
    assert_eq!(again["result"], prod["result"]);

    let digits = ok_json(&["cohen", "digitize", "--m", "3"], r#"{"x":["t","0","0"]}"#);
    let undone = ok_json(&["cohen", "undigitize", "--m", "3"], &json!({ "digits": digits["digits"] }).to_string());
    assert_eq!(undone["result"], json!(["t", "0", "0"]));
}

#[test]
fn member_and_rep() {
    assert_eq!(ok_json(&["cohen", "member"], r#"{"x":["t","0"]}"#)["member"], true);
    assert_eq!(ok_json(&["cohen", "member"], r#"{"x":["0","t"]}"#)["member"], false);
    let rep = ok_json(&["cohen", "rep"], r#"{"alpha":"t"}"#);
    assert_eq!(rep["result"], json!(["t", "0"]));
}

#[test]
fn morphisms_and_enrichment() {
    let iso = ok_json(&["morphism", "structure-iso"], r#"{"target":{"reps":[["t","1"]]},"x":["t","1"]}"#);
    assert_eq!(iso["image"], json!(["t", "0"]));
    let tep = ok_json(&["morphism", "tep"], r#"{"stage":1,"x":["t","0"]}"#);
    assert_eq!(tep["image"], json!(["t^2", "0"]));
    assert_eq!(tep["witnesses"], json!([["t", "0"]]));
    let args = ["morphism", "check-enrichment", "--samples", "15", "--seed", "3"];
    let a = ok_json(&args, r#"{"stage":2}"#);
    let b = ok_json(&args, r#"{"stage":2}"#);
    assert_eq!(a, b);
    assert_eq!(a["checked"], 15);
    assert_eq!(a["clean"], true);
}

#[test]
fn valued_commands() {
    let x = r#"{"val":1,"unit":["1+t","t"]}"#;
    assert_eq!(ok_json(&["valued", "v"], &format!(r#"{{"x":{x}}}"#))["val"], 1);
    assert_eq!(ok_json(&["valued", "ac"], &format!(r#"{{"x":{x},"n":2}}"#))["result"], json!(["1+t", "t"]));
    let r = ok_json(&["valued", "res"], &format!(r#"{{"x":{x},"n":2}}"#));
    assert_eq!(r["result"], json!(["0", "1+t^2"]));
    let (code, out, _) = cohen(&["valued", "res"], r#"{"x":{"val":-1,"unit":["1","0"]},"n":1}"#);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn lang_eval_and_audit() {
    let v = ok_json(
        &["lang", "eval"],
        r#"{"formula":"(= (+ x:A x:A) (lit A \"0\" \"1\"))","assignment":{"x":["1","0"]}}"#,
    );
    assert_eq!(v["value"], true);
    let t = ok_json(&["lang", "eval"], r#"{"term":"(res x:A)","assignment":{"x":["1+t","t"]}}"#);
    assert_eq!(t["value"], "1+t");
    let good = ok_json(&["lang", "audit", "--samples", "8"], r#"{"axioms":"T2"}"#);
    assert_eq!(good["passed"], true);
    let bad = ok_json(&["lang", "audit", "--samples", "8"], r#"{"axioms":"T2","theta":"constant-true"}"#);
    assert_eq!(bad["passed"], false);
}
