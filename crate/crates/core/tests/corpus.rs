mod common;

use common::fixtures;
use troplag_core::workbench::load_corpus;

#[test]
fn every_corpus_case_passes() {
    let dir = fixtures();
    let cases = load_corpus(&dir.join("corpus.json")).unwrap();
    assert!(cases.len() >= 30);
    let failed: Vec<String> = cases
        .iter()
        .map(|c| c.check(&dir))
        .filter(|r| !r.passed)
        .map(|r| format!("{}: {}", r.name, r.detail))
        .collect();
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn corpus_rejects_unknown_origin() {
    let dir = std::env::temp_dir().join(format!("troplag-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.json");
    std::fs::write(
        &path,
        r#"[{"name":"x","command":"h1","expect":[{"pointer":"/h1Order","value":1,"origin":"guess"}]}]"#,
    )
    .unwrap();
    let err = load_corpus(&path).unwrap_err();
    assert_eq!(err.code(), "SCHEMA_ERROR");
    std::fs::remove_dir_all(&dir).ok();
}
