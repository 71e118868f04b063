//! Grammars, word parsing and bounded language enumeration.
//!
//! A grammar generates `w` when `[w]_i^j ⊢ S^i_j` follows from its axioms.
//! Plain grammars go through the deduction theorem with linking search;
//! extended ones are lexicalized first and use the tiling version.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ettc::{ext_from_axioms_with, lexicalize, FailureCache, LexicalizeError};
use crate::lambda_acg::{acg_translate, Acg, AcgError};
use crate::lambek::{translate_lambek_grammar, LambekGrammar};
use crate::term::{Index, TensorTerm, Word};
use crate::ttc::{
    check, from_axioms, AxiomPool, Budget, CheckError, DeductionError, Derivation, Judgement, Mode,
    PackedAxiom, Rule, SearchOutcome, TensorType, Valency,
};

/// Longest words `enumerate` accepts.
pub const MAX_ENUMERATION_LENGTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown terminal {0}")]
    UnknownTerminal(String),
    #[error("axiom {0} has ε-edges but no labelled edge and cannot be lexicalized")]
    DeltaOnlyAxiom(String),
    #[error("lexicalizing axiom {0} failed: {1}")]
    Lexicalize(String, String),
    #[error(transparent)]
    Deduction(#[from] DeductionError),
    #[error("enumeration length {0} exceeds the bound {MAX_ENUMERATION_LENGTH}")]
    BoundExceeded(usize),
    #[error("derivation for {word} does not re-check: {reason}")]
    Unsound { word: String, reason: String },
    #[error(transparent)]
    Acg(#[from] AcgError),
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub literals: BTreeMap<String, Valency>,
    pub terminals: BTreeSet<String>,
    pub axioms: Vec<(String, Judgement)>,
    pub start: String,
    pub mode: Mode,
    /// Set when the axioms were rewritten by [`Grammar::lexicalized`].
    pub lexicalized: bool,
}

impl Grammar {
    /// Terminals default to the symbols occurring in axiom terms.
    pub fn new(
        literals: BTreeMap<String, Valency>,
        terminals: Vec<String>,
        axioms: Vec<(String, Judgement)>,
        start: String,
        mode: Mode,
    ) -> Grammar {
        let mut terms: BTreeSet<String> = terminals.into_iter().collect();
        for (_, j) in &axioms {
            for (_, w, _) in j.term.edges() {
                terms.extend(w.0.iter().map(|s| s.to_string()));
            }
            for w in j.term.loops() {
                terms.extend(w.0.iter().map(|s| s.to_string()));
            }
        }
        Grammar {
            literals,
            terminals: terms,
            axioms,
            start,
            mode,
            lexicalized: false,
        }
    }

    pub fn is_extended(&self) -> bool {
        self.mode != Mode::Ttc
    }

    pub fn pool(&self) -> AxiomPool {
        AxiomPool::unlimited(self.axioms.iter().cloned())
    }

    /// `[w]_i^j ⊢ S^i_j`, with `δ_i^j` for the empty word.
    pub fn goal(&self, w: &Word) -> Judgement {
        let (i, j) = (Index::new("i"), Index::new("j"));
        let term = TensorTerm::single(w.clone(), i.clone(), j.clone());
        let s = TensorType::lit(&self.start, Valency::new(1, 1), vec![i], vec![j])
            .expect("start has valency (1,1)");
        Judgement::new(term, vec![s]).expect("goal is well formed")
    }

    /// Same grammar with every axiom lexical. Each new axiom keeps its label.
    pub fn lexicalized(&self) -> Result<Grammar, EngineError> {
        let mut axioms = Vec::new();
        for (name, j) in &self.axioms {
            let l = lexicalize(name, j).map_err(|e| lex_error(name, e))?;
            axioms.push((name.clone(), prettify(&l.judgement)));
        }
        let mode = if self.mode == Mode::Ttc {
            Mode::Full
        } else {
            self.mode
        };
        Ok(Grammar {
            axioms,
            mode,
            lexicalized: true,
            ..self.clone()
        })
    }

    /// Grammar file text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("literals:\n");
        for (n, v) in &self.literals {
            let _ = writeln!(s, "  {n} : {v}");
        }
        let terms: Vec<&str> = self.terminals.iter().map(String::as_str).collect();
        let _ = writeln!(s, "terminals: {}", terms.join(" "));
        s.push_str("axioms:\n");
        for (n, j) in &self.axioms {
            let _ = writeln!(s, "  {n}: {}", prettify(j));
        }
        let _ = writeln!(s, "start: {}", self.start);
        if self.mode == Mode::LambekRestricted {
            s.push_str("restriction: on\n");
        }
        s
    }

    fn check_word(&self, w: &Word) -> Result<(), EngineError> {
        for s in &w.0 {
            if !self.terminals.contains(&**s) {
                return Err(EngineError::UnknownTerminal(s.to_string()));
            }
        }
        Ok(())
    }

    /// Single-type axioms for the deduction search, each with its
    /// derivation from the grammar axiom.
    pub fn packed_axioms(&self) -> Result<Vec<PackedAxiom>, EngineError> {
        let pool = self.pool();
        let mut out = Vec::new();
        for (name, j) in &self.axioms {
            let mut d = if self.is_extended() && !j.term.is_lexical() {
                lexicalize(name, j)
                    .map_err(|e| lex_error(name, e))?
                    .derivation
            } else {
                Derivation::leaf(Rule::Axiom(name.clone()), &pool, Mode::Full)
                    .expect("axiom in pool")
            };
            while d.conclusion.types.len() > 1 {
                d = Derivation::infer(
                    Rule::Par {
                        first: 0,
                        second: 1,
                    },
                    vec![d],
                    &pool,
                    Mode::Full,
                )
                .expect("par");
            }
            if d.conclusion.types.is_empty() {
                // an axiom with no types only adds a closed factor; it can never help
                continue;
            }
            out.push(PackedAxiom {
                name: name.clone(),
                judgement: d.conclusion.clone(),
                leaf: d,
            });
        }
        Ok(out)
    }
}

fn lex_error(name: &str, e: LexicalizeError) -> EngineError {
    match e {
        LexicalizeError::DeltaOnlyAxiom => EngineError::DeltaOnlyAxiom(name.to_string()),
        other => EngineError::Lexicalize(name.to_string(), other.to_string()),
    }
}

/// Renames generated indices to short unused names for printing.
pub fn prettify(j: &Judgement) -> Judgement {
    let used: BTreeSet<String> = j.indices().iter().map(|i| i.name().to_string()).collect();
    let mut map = BTreeMap::new();
    let mut n = 0usize;
    for i in j.indices() {
        if i.is_generated() {
            let name = loop {
                let c = format!("x{n}");
                n += 1;
                if !used.contains(&c) {
                    break c;
                }
            };
            map.insert(i, Index::new(&name));
        }
    }
    j.rename(&map)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseResult {
    pub word: Vec<String>,
    #[serde(skip)]
    pub derivation: Derivation,
    pub axioms_used: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ParseOutcome {
    Parsed(ParseResult),
    NotInLanguage,
    Inconclusive(String),
}

impl ParseOutcome {
    pub fn is_parsed(&self) -> bool {
        matches!(self, ParseOutcome::Parsed(_))
    }
}

fn axiom_counts(d: &Derivation) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    d.for_each(&mut |n| {
        if let Rule::Axiom(a) = &n.rule {
            *m.entry(a.clone()).or_insert(0) += 1;
        }
    });
    m
}

/// Re-checks a parse derivation against the grammar.
pub fn recheck(g: &Grammar, w: &Word, d: &Derivation) -> Result<(), CheckError> {
    let concl = check(d, &g.pool(), g.mode)?;
    if !concl.alpha_eq(&g.goal(w)) {
        return Err(CheckError::ConclusionMismatch(Vec::new()));
    }
    Ok(())
}

/// Decides whether `g` generates `w`, with a checkable derivation.
pub fn generates(g: &Grammar, w: &Word, budget: &Budget) -> Result<ParseOutcome, EngineError> {
    g.check_word(w)?;
    let packed = g.packed_axioms()?;
    parse_with(g, &packed, w, budget, &mut FailureCache::default())
}

fn parse_with(
    g: &Grammar,
    packed: &[PackedAxiom],
    w: &Word,
    budget: &Budget,
    cache: &mut FailureCache,
) -> Result<ParseOutcome, EngineError> {
    let goal = g.goal(w);
    let outcome = if g.is_extended() {
        ext_from_axioms_with(&goal, packed, g.mode, budget, cache)?
    } else {
        from_axioms(&goal, packed, budget)?
    };
    Ok(match outcome {
        SearchOutcome::Derivable(d) => {
            recheck(g, w, &d).map_err(|e| EngineError::Unsound {
                word: w.to_string(),
                reason: e.to_string(),
            })?;
            let axioms_used = axiom_counts(&d);
            ParseOutcome::Parsed(ParseResult {
                word: w.0.iter().map(|s| s.to_string()).collect(),
                derivation: d,
                axioms_used,
            })
        }
        SearchOutcome::NotDerivable => ParseOutcome::NotInLanguage,
        SearchOutcome::Inconclusive(m) => ParseOutcome::Inconclusive(m),
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Enumeration {
    pub words: BTreeSet<Vec<String>>,
    /// Words whose search hit a budget cap.
    pub inconclusive: BTreeSet<Vec<String>>,
}

/// All words of length at most `max_len` generated by `g`.
pub fn enumerate(g: &Grammar, max_len: usize, budget: &Budget) -> Result<Enumeration, EngineError> {
    if max_len > MAX_ENUMERATION_LENGTH {
        return Err(EngineError::BoundExceeded(max_len));
    }
    let packed = g.packed_axioms()?;
    let terms: Vec<String> = g.terminals.iter().cloned().collect();
    let mut candidates: Vec<Vec<String>> = vec![Vec::new()];
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * terms.len());
        for w in &layer {
            for t in &terms {
                let mut w2 = w.clone();
                w2.push(t.clone());
                next.push(w2);
            }
        }
        candidates.extend(next.iter().cloned());
        layer = next;
    }
    let results: Vec<(Vec<String>, Result<ParseOutcome, EngineError>)> = candidates
        .into_par_iter()
        .map_init(FailureCache::default, |cache, w| {
            let word = Word::from_symbols(&w);
            let r = parse_with(g, &packed, &word, budget, cache);
            (w, r)
        })
        .collect();
    let mut out = Enumeration::default();
    for (w, r) in results {
        match r? {
            ParseOutcome::Parsed(_) => {
                out.words.insert(w);
            }
            ParseOutcome::Inconclusive(_) => {
                out.inconclusive.insert(w);
            }
            ParseOutcome::NotInLanguage => {}
        }
    }
    Ok(out)
}

/// Words as space-joined strings, for display and comparison.
pub fn joined(words: &BTreeSet<Vec<String>>) -> BTreeSet<String> {
    words.iter().map(|w| w.join(" ")).collect()
}

/// A grammar formalism that translates into tensor grammars.
#[derive(Debug, Clone)]
pub enum Source {
    Acg(Acg),
    Lambek(LambekGrammar),
}

#[derive(Debug, Clone)]
pub struct Translated {
    pub grammar: Grammar,
    /// One line naming the source formalism, written as a comment on output.
    pub provenance: String,
}

/// ACGs become tensor grammars, Lambek grammars extended ones.
pub fn translate(src: &Source) -> Result<Translated, EngineError> {
    Ok(match src {
        Source::Acg(g) => Translated {
            grammar: acg_translate(g)?.grammar,
            provenance: format!(
                "translated from a string ACG with {} constants",
                g.abstract_sig.constants.len()
            ),
        },
        Source::Lambek(g) => Translated {
            grammar: translate_lambek_grammar(g),
            provenance: format!(
                "translated from a Lambek lexicon with {} entries, restriction {}",
                g.lexicon.len(),
                if g.restricted { "on" } else { "off" }
            ),
        },
    })
}
