//! Lexicalization of axioms and the lexicalized deduction theorem.
//!
//! Every free ε-edge of an axiom is absorbed into a `∇` binder, after
//! ℘-joining the two members it connects when they differ. For lexical
//! axioms the tiling of the goal words by axiom edges fixes the linking
//! term `t0` completely, so only the pure sequent needs proof search.

use std::collections::BTreeMap;

use rustc_hash::FxHashSet;

use thiserror::Error;

use super::prove::{ext_prove_with, FailureCache};
use crate::term::{Index, TensorTerm, Word};
use crate::ttc::{
    assemble, tile_words, AxiomPool, Budget, CanonicalJudgement, DeductionError, Derivation,
    Judgement, Mode, PackedAxiom, Rule, SearchOutcome, Tiling,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexicalizeError {
    #[error("axiom term has ε-edges but no labelled edge")]
    DeltaOnlyAxiom,
    #[error("rewrite step failed: {0}")]
    Step(String),
}

/// A lexical axiom with its derivation from the original one.
#[derive(Debug, Clone)]
pub struct Lexicalized {
    pub judgement: Judgement,
    pub derivation: Derivation,
    pub steps: usize,
}

fn slot_of(v: &[Index], i: &Index) -> Option<usize> {
    v.iter().position(|x| x == i)
}

/// Member holding `i` among its upper (`upper = true`) or lower indices,
/// with the slot.
fn owner(j: &Judgement, i: &Index, upper: bool) -> Option<(usize, usize)> {
    j.types
        .iter()
        .enumerate()
        .find_map(|(k, t)| slot_of(if upper { &t.upper } else { &t.lower }, i).map(|s| (k, s)))
}

/// Rewrites the axiom named `name` into a lexical one.
pub fn lexicalize(name: &str, axiom: &Judgement) -> Result<Lexicalized, LexicalizeError> {
    let has_word = axiom.term.edges().any(|(_, w, _)| !w.is_empty());
    let has_eps = axiom.term.edges().any(|(_, w, _)| w.is_empty());
    if has_eps && !has_word {
        return Err(LexicalizeError::DeltaOnlyAxiom);
    }
    let mut pool = AxiomPool::new();
    pool.insert(name, axiom.clone(), None);
    let err = |e: crate::ttc::RuleError| LexicalizeError::Step(e.to_string());
    let mut d = Derivation::leaf(Rule::Axiom(name.to_string()), &pool, Mode::Full).map_err(err)?;
    let mut steps = 0;
    loop {
        let j = &d.conclusion;
        let Some((b, a)) = j
            .term
            .edges()
            .find(|(_, w, _)| w.is_empty())
            .map(|(l, _, u)| (l.clone(), u.clone()))
        else {
            break;
        };
        // b is an upper type index, a a lower one
        let (k1, _) = owner(j, &b, true)
            .ok_or_else(|| LexicalizeError::Step(format!("dangling index {b}")))?;
        let (k2, _) = owner(j, &a, false)
            .ok_or_else(|| LexicalizeError::Step(format!("dangling index {a}")))?;
        if k1 != k2 {
            let (first, second) = (k1.min(k2), k1.max(k2));
            d = Derivation::infer(Rule::Par { first, second }, vec![d], &pool, Mode::Full)
                .map_err(err)?;
        }
        let j = &d.conclusion;
        let (k, ub) = owner(j, &b, true).expect("still present");
        let (_, la) = owner(j, &a, false).expect("still present");
        d = Derivation::infer(
            Rule::Nabla {
                pos: k,
                lower: la,
                upper: ub,
            },
            vec![d],
            &pool,
            Mode::Full,
        )
        .map_err(err)?;
        steps += 1;
    }
    Ok(Lexicalized {
        judgement: d.conclusion.clone(),
        derivation: d,
        steps,
    })
}

/// The closed linking term a tiling determines: every goal edge `x → y`
/// becomes `x → piece_1 → … → piece_m → y` through ε-edges.
fn linking_term(
    goal: &Judgement,
    edges: &[Vec<(Index, Word, Index)>],
    tiling: &Tiling,
) -> TensorTerm {
    let mut t0 = TensorTerm::unit();
    for ((x, _, y), chain) in goal.term.edges().zip(&tiling.chains) {
        let mut cur = x.clone();
        for &(i, e) in chain {
            let (l, _, u) = &edges[i][e];
            t0.insert_edge_raw(cur, Word::empty(), l.clone());
            cur = u.clone();
        }
        t0.insert_edge_raw(cur, Word::empty(), y.clone());
    }
    t0
}

/// Derivation of `goal` from lexical single-type axioms.
pub fn ext_from_axioms(
    goal: &Judgement,
    axioms: &[PackedAxiom],
    mode: Mode,
    budget: &Budget,
) -> Result<SearchOutcome, DeductionError> {
    ext_from_axioms_with(goal, axioms, mode, budget, &mut FailureCache::default())
}

/// [`ext_from_axioms`] with a failure cache shared across goals.
pub fn ext_from_axioms_with(
    goal: &Judgement,
    axioms: &[PackedAxiom],
    mode: Mode,
    budget: &Budget,
    cache: &mut FailureCache,
) -> Result<SearchOutcome, DeductionError> {
    for a in axioms {
        if a.judgement.types.len() != 1 {
            return Err(DeductionError::AxiomNotSingleType(a.name.clone()));
        }
        if !a.judgement.term.is_lexical() {
            return Err(DeductionError::NonLexicalAxiom(a.name.clone()));
        }
    }
    if !goal.is_regular() {
        return Ok(SearchOutcome::NotDerivable);
    }
    let mode = if mode == Mode::Ttc { Mode::Full } else { mode };
    let words: Vec<Vec<Word>> = axioms
        .iter()
        .map(|a| a.word_edges().into_iter().map(|(_, w, _)| w).collect())
        .collect();
    let goal_words: Vec<Word> = goal.term.edges().map(|(_, w, _)| w.clone()).collect();
    let total: usize = goal_words.iter().map(|w| w.len()).sum();
    let cap = budget.max_axioms.unwrap_or(total);
    let (tilings, mut truncated) = tile_words(&goal_words, &words, cap);
    let unlabelled: Vec<usize> = (0..axioms.len()).filter(|&a| words[a].is_empty()).collect();
    if !unlabelled.is_empty() {
        // axioms with the unit term can be added without bound
        truncated = true;
    }
    let mut seen: FxHashSet<CanonicalJudgement> = FxHashSet::default();
    let mut steps = 0usize;
    for tiling in tilings {
        steps += 1;
        if steps > budget.max_steps {
            return Ok(SearchOutcome::Inconclusive(format!(
                "tiling budget of {} steps exhausted",
                budget.max_steps
            )));
        }
        let mut extra_sets = vec![Vec::new()];
        let room = cap.saturating_sub(tiling.instances.len());
        for _ in 0..room {
            let mut next = Vec::new();
            for s in &extra_sets {
                for &u in &unlabelled {
                    if s.last().is_none_or(|&l| l <= u) {
                        let mut s2: Vec<usize> = s.clone();
                        s2.push(u);
                        next.push(s2);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            extra_sets.extend(next);
        }
        extra_sets.sort();
        extra_sets.dedup();
        for extra in extra_sets {
            let mut instances = tiling.instances.clone();
            instances.extend(extra);
            let mut inst = Vec::new();
            let mut edges = Vec::new();
            for &a in &instances {
                let j = &axioms[a].judgement;
                let map: BTreeMap<Index, Index> = j
                    .indices()
                    .into_iter()
                    .map(|i| (i, Index::fresh()))
                    .collect();
                let r = |i: &Index| map[i].clone();
                edges.push(
                    axioms[a]
                        .word_edges()
                        .iter()
                        .map(|(l, w, u)| (r(l), w.clone(), r(u)))
                        .collect::<Vec<_>>(),
                );
                inst.push(j.rename(&map));
            }
            let t0 = linking_term(goal, &edges, &tiling);
            let mut delta: Vec<_> = inst.iter().map(|j| j.types[0].dual()).collect();
            delta.extend(goal.types.iter().cloned());
            let pure = Judgement::unchecked(t0, delta);
            if !pure.literal_balance().is_empty() || pure.validate().is_err() {
                continue;
            }
            if !seen.insert(pure.canonical()) {
                continue;
            }
            if let Some(proof) = ext_prove_with(&pure, mode, cache) {
                if let Some(d) = assemble(proof, axioms, &instances, mode) {
                    return Ok(SearchOutcome::Derivable(d));
                }
            }
        }
    }
    if truncated {
        return Ok(SearchOutcome::Inconclusive(
            "axiom instance cap reached".into(),
        ));
    }
    Ok(SearchOutcome::NotDerivable)
}
