use std::collections::BTreeSet;

use tensorgram::engine::{enumerate, joined, Grammar};
use tensorgram::lambda_acg::{
    acg_language, acg_translate, beta_eta_normal, inverse_translate, lambda_typecheck, parse_acg,
    parse_lambda_judgement, translate_judgement, Acg, InverseSignature, LambdaError,
    LambdaSignature, TensorTranslation,
};
use tensorgram::syntax::{judgement, parse_grammar};
use tensorgram::ttc::Budget;

fn read(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/../../fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn toy() -> Acg {
    parse_acg(&read("toy.acg")).unwrap()
}

fn str_sig() -> LambdaSignature {
    LambdaSignature::string(["leaves".to_string(), "a".to_string(), "b".to_string()])
}

#[test]
fn leaves_axiom() {
    let t = acg_translate(&toy()).unwrap();
    let (_, ax) = t
        .grammar
        .axioms
        .iter()
        .find(|(n, _)| n == "leaves")
        .unwrap();
    println!("{ax}");
    assert!(ax.alpha_eq(&judgement("d_v^j * [leaves]_i^s |- S^v_s, ~NP^i_j").unwrap()));
}

#[test]
fn toy_axioms_match_elaborate_grammar() {
    let t = acg_translate(&toy()).unwrap();
    let g: Grammar = parse_grammar(&read("elaborate.tg")).unwrap();
    for (name, ax) in &t.grammar.axioms {
        println!("{name}: {ax}");
        let hit = g.axioms.iter().any(|(_, b)| b.alpha_eq(ax));
        assert!(hit, "{name}");
    }
}

#[test]
fn string_translation_of_leaves_term() {
    let j = parse_lambda_judgement("|- \\x y. x (leaves y) : (O -> O) -> O -> O").unwrap();
    let tr = TensorTranslation::string(str_sig().constants.keys().cloned());
    let out = translate_judgement(&j, &str_sig(), &tr).unwrap();
    println!("{out}");
    assert!(
        out.alpha_eq(&judgement("d_v^j * [leaves]_i^s |- (O^v | ~O_s) | (O^i * ~O_j)").unwrap())
    );
}

#[test]
fn nonlinear_rejected() {
    let j = parse_lambda_judgement("|- \\x. x x : O -> O").unwrap();
    assert!(matches!(
        lambda_typecheck(&j, &str_sig()),
        Err(LambdaError::NonLinear(_))
    ));
}

#[test]
fn normal_forms() {
    let j = parse_lambda_judgement("y : O -> O |- (\\x. x) y : O -> O").unwrap();
    assert_eq!(
        beta_eta_normal(&j, &str_sig()).unwrap().to_string(),
        "\\x1. y x1"
    );
}

#[test]
fn inverse_of_leaves() {
    let j = judgement("d_v^j * [leaves]_i^s |- (O^v | ~O_s) | (O^i * ~O_j)").unwrap();
    let l = inverse_translate(&j, InverseSignature::Str).unwrap();
    println!("{l}");
    let want = parse_lambda_judgement("|- \\x y. x (leaves y) : (O -> O) -> O -> O").unwrap();
    assert!(beta_eta_normal(&l, &str_sig())
        .unwrap()
        .alpha_eq(&beta_eta_normal(&want, &str_sig()).unwrap()));
}

#[test]
fn languages_agree_small() {
    let acg = toy();
    let t = acg_translate(&acg).unwrap();
    let a = acg_language(&acg, 4).unwrap();
    assert!(a.complete);
    let b = enumerate(&t.grammar, 4, &Budget::default()).unwrap();
    let aw: BTreeSet<String> = joined(&a.words);
    println!("{aw:?}");
    assert_eq!(aw, joined(&b.words));
}
