use std::path::PathBuf;

use emck::dslio::{parse_model, serialize_doc, ParseOptions, SerializeOptions};
use emck::events::Event;
use emck::fixtures;

fn read(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn shipped_models_match_fixtures() {
    let opts = ParseOptions::default();
    let w1 = parse_model(&read("w1.emod"), opts).unwrap();
    assert_eq!(w1.model.agent(0).model(), &fixtures::w1());
    assert_eq!(w1.event("E"), Some(Event::from_states([1, 2])));
    assert_eq!(parse_model(&read("w2.emod"), opts).unwrap().model.agent(0).model(), &fixtures::w2());
    assert_eq!(parse_model(&read("w4.emod"), opts).unwrap().model.agent(0).model(), &fixtures::w4());
    assert_eq!(parse_model(&read("iw1.emod"), opts).unwrap().model, fixtures::iw1());
}

#[test]
fn shipped_models_are_canonical_apart_from_comments() {
    for name in ["w1.emod", "w2.emod", "w4.emod", "iw1.emod"] {
        let text = read(name);
        let doc = parse_model(&text, ParseOptions::default()).unwrap();
        let stripped: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(serialize_doc(&doc, SerializeOptions::default()), stripped, "{name}");
    }
}

#[test]
fn broken_models_fail_where_expected() {
    let opts = ParseOptions::default();
    let e = parse_model(&read("bad-capacity.emod"), opts).unwrap_err();
    assert!(e.message.contains("{s1,s2}"));
    assert!(parse_model(&read("bad-poss.emod"), opts).unwrap_err().is_invariant());
    assert!(parse_model(&read("null-bayes.emod"), opts).unwrap_err().is_invariant());
}
