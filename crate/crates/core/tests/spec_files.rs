use std::path::Path;

use coost::io::{parse_spec, serialize_spec};
use coost::model::{objects_equal, PropertyValue, Truth};

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

#[test]
fn polygons_fixture() {
    let doc = parse_spec(&read("polygons.json")).unwrap();
    assert_eq!(doc.classes.len(), 3);
    assert_eq!(doc.objects.keys().collect::<Vec<_>>(), ["A", "B", "C"]);
    assert_eq!(doc.sets["S1"], ["A", "B"]);
    assert_eq!(doc.sets["S2"], ["A", "C"]);
    // Predicates evaluated from the side and angle sizes.
    assert_eq!(doc.objects["A"].value_of("triangle_inequality"), Some(&PropertyValue::Truth(Truth::Value(1.0))));
    assert_eq!(doc.objects["C"].value_of("parallel_sides"), Some(&PropertyValue::Truth(Truth::Value(1.0))));
}

#[test]
fn polygons_fixture_matches_builtin_data() {
    let doc = parse_spec(&read("polygons.json")).unwrap();
    let p = coost::fixtures::polygons();
    assert!(objects_equal(&doc.objects["A"], &p.a));
    assert!(objects_equal(&doc.objects["B"], &p.b));
    assert!(objects_equal(&doc.objects["C"], &p.c));
}

#[test]
fn garland_fixture() {
    let doc = parse_spec(&read("garland.json")).unwrap();
    assert_eq!(doc.classes.keys().collect::<Vec<_>>(), ["Bulb"]);
    let bulb = doc.classes["Bulb"].body().unwrap();
    let props = bulb.specification.properties();
    assert_eq!(props.len(), 1);
    assert_eq!((props[0].name(), props[0].unit()), ("color_code", Some("code")));
    assert_eq!(doc.objects.keys().collect::<Vec<_>>(), ["G", "Y", "O", "B", "P", "R"]);
    for (doc_obj, builtin) in doc.objects.values().zip(coost::fixtures::bulbs()) {
        assert!(objects_equal(doc_obj, &builtin));
    }
}

#[test]
fn round_trips() {
    for name in ["polygons.json", "garland.json", "letters.json"] {
        let doc = parse_spec(&read(name)).unwrap();
        let text = serialize_spec(&doc);
        let again = parse_spec(&text).unwrap();
        assert_eq!(doc, again, "{name}");
        assert_eq!(serialize_spec(&again), text, "{name}");
    }
}

#[test]
fn empty_document() {
    let doc = parse_spec("  \n").unwrap();
    assert!(doc.classes.is_empty() && doc.objects.is_empty() && doc.sets.is_empty());
}

#[test]
fn distinct_error_codes() {
    let cases = [
        ("{", "E_SYNTAX"),
        (r#"{"objects": {"X": {"class": "Nope"}}}"#, "E_UNKNOWN_CLASS"),
        (r#"{"sets": {"S": ["X"]}}"#, "E_UNKNOWN_OBJECT"),
        (
            r#"{"classes": {"K": {"properties": [{"name": "w", "unit": "kg"}]}}, "objects": {"X": {"class": "K", "values": {"w": [1, 2], "h": 3}}}}"#,
            "E_ARITY",
        ),
        (
            r#"{"classes": {"K": {"properties": [{"name": "ok", "predicate": "custom"}]}}, "objects": {"X": {"class": "K"}}}"#,
            "E_UNKNOWN_PREDICATE",
        ),
        (r#"{"sets": {"S": [], "S": []}}"#, "E_DUPLICATE"),
        (r#"{"sets": {}, "extra": {}}"#, "E_SCHEMA"),
    ];
    for (text, code) in cases {
        let err = parse_spec(text).unwrap_err();
        assert_eq!(err.code(), code, "{text}: {err}");
    }
}

#[test]
fn recorded_truth_value_wins() {
    let text = r#"{"classes": {"K": {"properties": [{"name": "ok", "predicate": "custom"}]}},
                   "objects": {"X": {"class": "K", "values": {"ok": 0}}}}"#;
    let doc = parse_spec(text).unwrap();
    assert_eq!(doc.objects["X"].values(), [PropertyValue::Truth(Truth::Value(0.0))]);
}
