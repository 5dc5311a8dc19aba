//! Corrupted proof scripts under `tests/negative/`, each starting with a
//! `# expect: <class>` line naming the error class it must be rejected with.

use aic_core::corpus::{parse_document, Corpus};
use std::fs;
use std::path::Path;

fn cases() -> Vec<(String, String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/negative");
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).unwrap();
            let expect = text.lines().next().and_then(|l| l.strip_prefix("# expect: ")).expect("expect header").trim().to_string();
            (path.file_name().unwrap().to_string_lossy().into_owned(), text, expect)
        })
        .collect()
}

#[test]
fn twenty_corrupted_scripts() {
    assert_eq!(cases().len(), 20);
}

#[test]
fn corrupted_scripts_are_rejected_with_their_class() {
    let corpus = Corpus::builtin().unwrap();
    let mut wrong = Vec::new();
    for (file, text, expect) in cases() {
        let outcome = parse_document(&text, &file).and_then(|p| corpus.check_proof(&p, None));
        match outcome {
            Ok(_) => wrong.push(format!("{file}: accepted")),
            Err(e) if e.class() != expect => wrong.push(format!("{file}: expected {expect}, got {} ({e})", e.class())),
            Err(_) => {}
        }
    }
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn uncorrupted_base_script_checks() {
    let corpus = Corpus::builtin().unwrap();
    let p = corpus.get("trans").unwrap();
    corpus.check_proof(p, None).unwrap();
}
