//! The bundled fixtures stay consistent with the code that describes them.

use std::path::{Path, PathBuf};

use promptaug::corpus::{load_corpus, to_jsonl, ClassSet};
use promptaug::llm::MockScript;
use promptaug::synthetic;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

#[test]
fn synthetic_files_match_the_generator() {
    let classes = ClassSet::load(fixture("synthetic/classes.json")).unwrap();
    assert_eq!(classes, synthetic::classes());
    let corpus = load_corpus(fixture("synthetic/corpus.jsonl"), &classes).unwrap();
    assert_eq!(corpus, synthetic::corpus(0));
    let raw = std::fs::read_to_string(fixture("synthetic/corpus.jsonl")).unwrap();
    assert_eq!(raw, to_jsonl(&synthetic::corpus(0)), "regenerate with `cargo run --example export_synthetic`");
}

#[test]
fn mini_fixture_loads() {
    let classes = ClassSet::load(fixture("mini/classes.json")).unwrap();
    let corpus = load_corpus(fixture("mini/corpus.jsonl"), &classes).unwrap();
    assert_eq!(corpus.len(), 40);
    for name in ["mock.json", "mock_rejecting.json"] {
        let script = MockScript::load(fixture(&format!("mini/{name}"))).unwrap();
        assert!(!script.entries.is_empty());
    }
}
