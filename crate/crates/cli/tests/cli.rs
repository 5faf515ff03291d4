use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn troplag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_troplag")).args(args).output().expect("binary runs")
}

fn with_files(cmd: &str, files: &[(&str, &str)]) -> Output {
    let mut args = vec![cmd.to_string()];
    for (flag, name) in files {
        args.push(format!("--{flag}"));
        args.push(fixture(name).display().to_string());
    }
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    troplag(&refs)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn h1_of_exa8() {
    let o = with_files("h1", &[("curve", "exa8.curve.json"), ("lines", "exa8.lines.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["h1Order"], 1);
    assert_eq!(v["mv"], 1);
}

#[test]
fn rp2_surface() {
    let o = with_files("surface", &[("curve", "rp2.curve.json"), ("domain", "triangle.domain.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["crosscaps"], 1);
    assert_eq!(v["orientable"], false);
}

#[test]
fn kappa_cap_is_an_error() {
    let o = with_files("enumerate", &[("degree", "kappa9.degree.json"), ("lines", "kappa9.lines.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["code"], "KAPPA_CAP");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[KAPPA_CAP]"));
}

#[test]
fn failed_validation_exits_2() {
    let o = with_files("validate", &[("domain", "corner12.domain.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["delzant"]["offending"][0]["index"], 2);
}

#[test]
fn output_is_deterministic() {
    let files = [("curve", "exa8.curve.json"), ("lines", "exa8.lines.json")];
    let a = with_files("multiplicity", &files);
    let b = with_files("multiplicity", &files);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_format() {
    let mut args: Vec<String> = vec!["lens".into(), "--format".into(), "table".into()];
    args.extend(["--curve".into(), fixture("segment.curve.json").display().to_string()]);
    args.extend(["--lines".into(), fixture("lens_5_2.lines.json").display().to_string()]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = troplag(&refs);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("/p ") && l.trim_end().ends_with(" 5")), "{text}");
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("troplag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn parse_error_has_position() {
    let p = scratch("bad.json", "{\n  \"dim\": 2,\n  \"vertices\": [,]\n}\n");
    let o = troplag(&["validate", "--curve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["error"]["code"], "PARSE_ERROR");
    assert_eq!(v["error"]["line"], 3);
}

#[test]
fn schema_error_has_pointer() {
    let p = scratch(
        "nodir.json",
        r#"{"dim": 2, "vertices": [{"id": "a", "pos": ["0", "0"]}], "edges": [{"tail": "a", "head": null}]}"#,
    );
    let o = troplag(&["validate", "--curve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["error"]["code"], "SCHEMA_ERROR");
    assert_eq!(v["error"]["pointer"], "/edges/0/dir");
}
