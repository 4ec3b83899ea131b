//! The checked-in fuzz corpus doubles as schema examples; keep the seeds
//! parsing (or failing) the way their names promise.

use std::path::PathBuf;

use cobar_core::space::{from_json, validate};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/parse_space")
}

#[test]
fn corpus_seeds_parse_as_labelled() {
    let dir = corpus_dir();
    for good in ["torus.json", "rp2.json", "sphere2.json", "sphere3.json", "wedge2.json"] {
        let text = std::fs::read_to_string(dir.join(good)).expect("seed exists");
        let space = from_json(&text).unwrap_or_else(|e| panic!("{good}: {e}"));
        assert!(validate(&space).is_valid(), "{good}");
    }
    let empty = std::fs::read_to_string(dir.join("empty.json")).unwrap();
    let point = from_json(&empty).unwrap();
    assert_eq!(point.top_dim(), 0);

    let bad = std::fs::read_to_string(dir.join("bad_ref.json")).unwrap();
    assert!(from_json(&bad).is_err());
}

#[test]
fn seeded_torus_matches_builtin() {
    let dir = corpus_dir();
    let text = std::fs::read_to_string(dir.join("torus.json")).unwrap();
    let parsed = from_json(&text).unwrap();
    let builtin = cobar_core::space::builtin_space("torus").unwrap();
    assert_eq!(cobar_core::space::to_json(&parsed), cobar_core::space::to_json(&builtin));
}
