use tensorgram::engine::{generates, Grammar};
use tensorgram::syntax::parse_grammar;
use tensorgram::term::Word;
use tensorgram::ttc::Budget;

fn fixture(name: &str) -> Grammar {
    let p = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_grammar(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn john_loves_mary() {
    let g = fixture("john_loves_mary.tg");
    let r = generates(&g, &Word::parse("John loves Mary"), &Budget::default()).unwrap();
    assert!(r.is_parsed());
    let r = generates(&g, &Word::parse("Mary loves"), &Budget::default()).unwrap();
    assert!(!r.is_parsed());
}

#[test]
fn elaborate() {
    let g = fixture("elaborate.tg");
    let r = generates(
        &g,
        &Word::parse("Mary whom John loves madly leaves"),
        &Budget::default(),
    )
    .unwrap();
    assert!(r.is_parsed());
}

#[test]
fn lexicalized_john_loves_mary() {
    let g = fixture("john_loves_mary.tg").lexicalized().unwrap();
    println!("{}", g.to_text());
    let r = generates(&g, &Word::parse("John loves Mary"), &Budget::default()).unwrap();
    assert!(r.is_parsed());
    let r = generates(&g, &Word::parse("loves John Mary"), &Budget::default()).unwrap();
    assert!(!r.is_parsed());
}
