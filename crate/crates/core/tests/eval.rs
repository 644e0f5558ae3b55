mod common;

use bgmorph::eval::{evaluate, make_synthetic_corpus, EvalError};
use bgmorph::ingest::load_builtin;

#[test]
fn gold_fixture_scores_nineteen_of_twenty() {
    let d = load_builtin().unwrap();
    let m = evaluate(&d, common::data_dir().join("eval/gold-19of20.tsv")).unwrap();
    assert_eq!(m.tokens, 20);
    assert_eq!(m.correct, 19);
    assert_eq!(m.accuracy, 0.95);
    // ".", "." and "и" are out of vocabulary but their identity lemma is right
    assert_eq!(m.covered, 17);
    assert_eq!(m.tokens - m.covered, 3);
    assert!((m.oov_rate - 0.15).abs() < 1e-12);
    assert!((m.accuracy_on_covered - 16.0 / 17.0).abs() < 1e-12);
}

#[test]
fn synthetic_corpus_closure() {
    let d = common::fixture_dictionary();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.tsv");
    let mut bytes = Vec::new();
    make_synthetic_corpus(&d, 1, 5, &mut bytes).unwrap();
    std::fs::write(&path, &bytes).unwrap();
    let m = evaluate(&d, &path).unwrap();
    assert_eq!(m.tokens, 5);
    assert_eq!(m.accuracy, 1.0);

    let mut again = Vec::new();
    make_synthetic_corpus(&d, 1, 5, &mut again).unwrap();
    assert_eq!(bytes, again);
}

#[test]
fn file_errors() {
    let d = load_builtin().unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        evaluate(&d, dir.path().join("missing.tsv")),
        Err(EvalError::Io(_))
    ));
    let empty = dir.path().join("empty.tsv");
    std::fs::write(&empty, "").unwrap();
    assert!(matches!(evaluate(&d, &empty), Err(EvalError::EmptyCorpus)));
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "редки\tA\tрядък\nредки\tXq\tрядък\n").unwrap();
    assert!(matches!(
        evaluate(&d, &bad),
        Err(EvalError::Parse { line: 2, .. })
    ));
}
