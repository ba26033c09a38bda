use serde_json::Value;

use dsttr_web::{examples, generate, generate_with_revision, parse_trace};

const FIG1: &str = "[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]";
const MARY: &str = "[x=mary:e, e=arrive:es, p=subj(e,x):t, head=p:t]";

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn trace_of_john_arrives() {
    let v = parse(parse_trace("John arrives"));
    assert_eq!(v["grammatical"], true);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(steps[0]["semantics"], "[]");
    assert_eq!(steps[2]["complete"], true);
    assert!(parse(parse_trace("arrives john"))["error"].is_string());
}

#[test]
fn plain_and_revised_generation() {
    let v = parse(generate(FIG1, 3));
    assert_eq!(v["clean"], "john arrives");
    assert!(v["error"].is_null());
    let v = parse(generate_with_revision(FIG1, 1, MARY, 3));
    assert_eq!(v["surface"], "⟦john⟧ ⟨uh I mean⟩ mary arrives");
    assert_eq!(v["clean"], "mary arrives");
    assert!(parse(generate("[x=", 3))["error"].is_string());
}

#[test]
fn every_example_regenerates() {
    let list = parse(examples());
    for e in list.as_array().unwrap() {
        let v = parse(generate(e["goal"].as_str().unwrap(), 3));
        assert_eq!(v["clean"], e["utterance"]);
    }
}
