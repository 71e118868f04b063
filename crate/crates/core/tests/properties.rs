use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use tensorgram::ettc::{ext_prove, may_be_derivable};
use tensorgram::lambek::embed_check;
use tensorgram::selftest::{
    check_cut_elimination, check_expr, inverse_suite, lemma6_suite, random_derivations,
    random_sequent,
};
use tensorgram::term::{Factor, Index, TermExpr, Word};
use tensorgram::ttc::Mode;

/// Expressions over eight index names; each name is used at most once as
/// a lower and once as an upper index, so many of them end up bound.
fn expr() -> impl Strategy<Value = TermExpr> {
    let word = prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]), 0..=2);
    let factor = (0usize..8, 0usize..8, word, prop::bool::weighted(0.1));
    prop::collection::vec(factor, 0..=8).prop_map(|fs| {
        let (mut lows, mut ups) = (Vec::new(), Vec::new());
        let mut out = Vec::new();
        for (l, u, w, is_loop) in fs {
            let w = Word::from_symbols(&w);
            if is_loop {
                out.push(Factor::Loop(w));
            } else if !lows.contains(&l) && !ups.contains(&u) {
                lows.push(l);
                ups.push(u);
                out.push(Factor::edge(
                    w,
                    Index::new(&format!("a{l}")),
                    Index::new(&format!("a{u}")),
                ));
            }
        }
        TermExpr::new(out).expect("indices kept apart")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn term_normal_forms(t in expr(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        prop_assert_eq!(check_expr(&t, &mut rng), Ok(()));
    }

    #[test]
    fn cut_elimination_preserves_conclusions(seed in any::<u64>(), full in any::<bool>()) {
        let mode = if full { Mode::Full } else { Mode::Ttc };
        let d = random_derivations(mode, 1, 6, seed).pop().unwrap();
        prop_assert_eq!(check_cut_elimination(&d, mode), Ok(()));
    }

    #[test]
    fn derivable_goals_pass_the_linking_check_and_are_found(seed in any::<u64>()) {
        let d = random_derivations(Mode::Full, 1, 5, seed).pop().unwrap();
        let g = &d.conclusion;
        prop_assume!(g.is_regular());
        prop_assert!(may_be_derivable(g));
        prop_assert!(ext_prove(g, Mode::Full).is_some());
    }

    #[test]
    fn lambek_sequents_agree_with_cycles(seed in any::<u64>(), restricted in any::<bool>()) {
        let s = random_sequent(&mut StdRng::seed_from_u64(seed), 5);
        let o = embed_check(&s, restricted);
        prop_assert!(o.agrees(), "{} {:?}", s, o);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn translation_ignores_beta_eta_variants(seed in any::<u64>()) {
        let r = lemma6_suite(3, seed);
        prop_assert!(r.passed(), "{:?}", r.examples);
    }

    #[test]
    fn inverse_translation_round_trips(seed in any::<u64>()) {
        let r = inverse_suite(3, seed);
        prop_assert!(r.passed(), "{:?}", r.examples);
    }
}
