//! Derivations from non-logical axioms via the deduction theorem: a goal
//! `t ⊢ Γ` follows from axioms `t_k ⊢ F_k` iff `t = t0·t_1⋯t_n` for a closed
//! `t0` with `t0 ⊢ F̄_1, …, F̄_n, Γ` derivable in the pure calculus.
//!
//! Axiom multisets are found by tiling the goal's words with the axioms'
//! labelled edges. For the plain calculus `t0` is then an axiom linking of
//! dual literal occurrences, searched with pruning on partial chain words.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;

use serde::Serialize;
use thiserror::Error;

use super::derivation::{AxiomPool, Derivation, Mode, Rule};
use super::prove::prove;
use super::types::{literal_balance, Judgement, Literal, TensorType};
use crate::term::{Index, TensorTerm, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Cap on the number of axiom instances; `None` means the goal's total
    /// word length.
    pub max_axioms: Option<usize>,
    /// Cap on explored linkings (or tilings) per goal.
    pub max_steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_axioms: None,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SearchOutcome {
    Derivable(Derivation),
    NotDerivable,
    /// A cap was hit before the search space was exhausted.
    Inconclusive(String),
}

impl SearchOutcome {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            SearchOutcome::Derivable(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_derivable(&self) -> bool {
        matches!(self, SearchOutcome::Derivable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("axiom {0} has more than one type; pack it first")]
    AxiomNotSingleType(String),
    #[error("axiom {0} is not lexical")]
    NonLexicalAxiom(String),
}

/// A single-type axiom together with a derivation of it from the named
/// grammar axiom (an axiom leaf followed by ℘ steps when packed).
#[derive(Debug, Clone)]
pub struct PackedAxiom {
    pub name: String,
    pub judgement: Judgement,
    pub leaf: Derivation,
}

impl PackedAxiom {
    /// ℘-joins the types of a grammar axiom in stored order,
    /// `((A1 ℘ A2) ℘ A3) …`.
    pub fn pack(name: &str, j: &Judgement, mode: Mode) -> PackedAxiom {
        let mut pool = AxiomPool::new();
        pool.insert(name, j.clone(), None);
        let mut d = Derivation::leaf(Rule::Axiom(name.to_string()), &pool, mode)
            .expect("axiom is in the pool");
        while d.conclusion.types.len() > 1 {
            d = Derivation::infer(
                Rule::Par {
                    first: 0,
                    second: 1,
                },
                vec![d],
                &pool,
                mode,
            )
            .expect("par of two members");
        }
        PackedAxiom {
            name: name.to_string(),
            judgement: d.conclusion.clone(),
            leaf: d,
        }
    }

    pub fn single(name: &str, j: &Judgement) -> Result<PackedAxiom, DeductionError> {
        if j.types.len() != 1 {
            return Err(DeductionError::AxiomNotSingleType(name.to_string()));
        }
        Ok(PackedAxiom::pack(name, j, Mode::Full))
    }

    pub fn word_edges(&self) -> Vec<(Index, Word, Index)> {
        self.judgement
            .term
            .edges()
            .filter(|(_, w, _)| !w.is_empty())
            .map(|(l, w, u)| (l.clone(), w.clone(), u.clone()))
            .collect()
    }
}

/// One way of covering the goal words: axiom ids per instance, and per goal
/// edge the sequence of `(instance, word edge)` pieces in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub instances: Vec<usize>,
    pub chains: Vec<Vec<(usize, usize)>>,
}

/// Enumerates tilings of `goal` words by axiom word edges. Returns the
/// tilings and whether the instance cap cut the enumeration short.
pub fn tile_words(
    goal: &[Word],
    axioms: &[Vec<Word>],
    max_instances: usize,
) -> (Vec<Tiling>, bool) {
    struct St<'a> {
        goal: &'a [Word],
        axioms: &'a [Vec<Word>],
        max: usize,
        instances: Vec<(usize, Vec<bool>)>,
        chains: Vec<Vec<(usize, usize)>>,
        out: Vec<Tiling>,
        truncated: bool,
    }
    fn matches_at(word: &Word, p: usize, piece: &Word) -> bool {
        word.0.len() >= p + piece.0.len() && word.0[p..p + piece.0.len()] == piece.0[..]
    }
    fn go(st: &mut St, g: usize, p: usize) {
        if g == st.goal.len() {
            if st.instances.iter().all(|(_, used)| used.iter().all(|u| *u)) {
                st.out.push(Tiling {
                    instances: st.instances.iter().map(|(a, _)| *a).collect(),
                    chains: st.chains.clone(),
                });
            }
            return;
        }
        let word = &st.goal[g];
        if p == word.len() {
            go(st, g + 1, 0);
            return;
        }
        for i in 0..st.instances.len() {
            let a = st.instances[i].0;
            for e in 0..st.axioms[a].len() {
                if !st.instances[i].1[e] && matches_at(word, p, &st.axioms[a][e]) {
                    let len = st.axioms[a][e].len();
                    st.instances[i].1[e] = true;
                    st.chains[g].push((i, e));
                    go(st, g, p + len);
                    st.chains[g].pop();
                    st.instances[i].1[e] = false;
                }
            }
        }
        for a in 0..st.axioms.len() {
            for e in 0..st.axioms[a].len() {
                if matches_at(word, p, &st.axioms[a][e]) {
                    if st.instances.len() >= st.max {
                        st.truncated = true;
                        continue;
                    }
                    let len = st.axioms[a][e].len();
                    let mut used = vec![false; st.axioms[a].len()];
                    used[e] = true;
                    st.instances.push((a, used));
                    st.chains[g].push((st.instances.len() - 1, e));
                    go(st, g, p + len);
                    st.chains[g].pop();
                    st.instances.pop();
                }
            }
        }
    }
    let mut st = St {
        goal,
        axioms,
        max: max_instances,
        instances: Vec::new(),
        chains: vec![Vec::new(); goal.len()],
        out: Vec::new(),
        truncated: false,
    };
    go(&mut st, 0, 0);
    (st.out, st.truncated)
}

/// Instances renamed apart, and the sequent `F̄_1, …, F̄_n, Γ`.
pub(crate) fn combined_sequent(
    goal: &Judgement,
    axioms: &[PackedAxiom],
    instances: &[usize],
) -> (Vec<Judgement>, Vec<TensorType>) {
    let inst: Vec<Judgement> = instances
        .iter()
        .map(|&a| axioms[a].judgement.freshen())
        .collect();
    let mut delta: Vec<TensorType> = inst.iter().map(|j| j.types[0].dual()).collect();
    delta.extend(goal.types.iter().cloned());
    (inst, delta)
}

/// Cuts the instance axioms against a derivation of `t0 ⊢ F̄_1, …, F̄_n, Γ`,
/// leaving a derivation of the goal.
pub(crate) fn assemble(
    proof: Derivation,
    axioms: &[PackedAxiom],
    instances: &[usize],
    mode: Mode,
) -> Option<Derivation> {
    let pool = AxiomPool::new();
    let mut cur = proof;
    for &a in instances {
        cur = Derivation::infer(
            Rule::Cut { left: 0, right: 0 },
            vec![axioms[a].leaf.clone(), cur],
            &pool,
            mode,
        )
        .ok()?;
    }
    Some(cur)
}

fn goal_words(goal: &Judgement) -> Vec<Word> {
    goal.term.edges().map(|(_, w, _)| w.clone()).collect()
}

fn total_len(goal: &Judgement) -> usize {
    goal.term.edges().map(|(_, w, _)| w.len()).sum()
}

/// Axiom multisets to try: tilings by labelled axioms, extended by up to the
/// remaining budget of instances of axioms without labelled edges.
pub(crate) fn candidate_multisets(
    goal: &Judgement,
    axioms: &[PackedAxiom],
    budget: &Budget,
) -> (Vec<Vec<usize>>, bool) {
    let words: Vec<Vec<Word>> = axioms
        .iter()
        .map(|a| a.word_edges().into_iter().map(|(_, w, _)| w).collect())
        .collect();
    let cap = budget.max_axioms.unwrap_or_else(|| total_len(goal));
    let (tilings, mut truncated) = tile_words(&goal_words(goal), &words, cap);
    let unlabelled: Vec<usize> = (0..axioms.len()).filter(|&a| words[a].is_empty()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in tilings {
        let mut base = t.instances.clone();
        base.sort();
        let room = cap.saturating_sub(base.len());
        let mut extras: Vec<Vec<usize>> = vec![Vec::new()];
        multisets_upto(&unlabelled, room, &mut Vec::new(), 0, &mut extras);
        if !unlabelled.is_empty() {
            // any grammar with unlabelled axioms may need more instances than the cap
            truncated = true;
        }
        for ex in extras {
            let mut m = base.clone();
            m.extend(ex);
            m.sort();
            if seen.insert(m.clone()) {
                out.push(m);
            }
        }
    }
    (out, truncated)
}

fn multisets_upto(
    items: &[usize],
    room: usize,
    cur: &mut Vec<usize>,
    from: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if room == 0 {
        return;
    }
    for k in from..items.len() {
        cur.push(items[k]);
        out.push(cur.clone());
        multisets_upto(items, room - 1, cur, k, out);
        cur.pop();
    }
}

/// Derivation of `goal` from single-type axioms, each usable any number of
/// times within the budget.
pub fn from_axioms(
    goal: &Judgement,
    axioms: &[PackedAxiom],
    budget: &Budget,
) -> Result<SearchOutcome, DeductionError> {
    for a in axioms {
        if a.judgement.types.len() != 1 {
            return Err(DeductionError::AxiomNotSingleType(a.name.clone()));
        }
    }
    if !goal.is_regular() {
        return Ok(SearchOutcome::NotDerivable);
    }
    let (multisets, truncated) = candidate_multisets(goal, axioms, budget);
    let mut steps = 0usize;
    for m in multisets {
        let (inst, delta) = combined_sequent(goal, axioms, &m);
        if !literal_balance(delta.iter().map(|t| &t.symbol)).is_empty() {
            continue;
        }
        let mut linker = Linker::new(goal, &inst, &delta, budget.max_steps.saturating_sub(steps));
        let found = linker.run(&mut |t0| {
            let j = Judgement::unchecked(t0.clone(), delta.clone());
            prove(&j)
        });
        steps += linker.steps;
        if let Some(proof) = found {
            if let Some(d) = assemble(proof, axioms, &m, Mode::Ttc) {
                return Ok(SearchOutcome::Derivable(d));
            }
        }
        if linker.exhausted {
            return Ok(SearchOutcome::Inconclusive(format!(
                "linking budget of {} steps exhausted",
                budget.max_steps
            )));
        }
    }
    if truncated {
        return Ok(SearchOutcome::Inconclusive(
            "axiom instance cap reached".into(),
        ));
    }
    Ok(SearchOutcome::NotDerivable)
}

/// A literal occurrence with concrete indices.
#[derive(Debug, Clone)]
struct Occ {
    lit: Literal,
    ups: Vec<Index>,
    lows: Vec<Index>,
}

/// Partial chains `start → end` with accumulated words.
#[derive(Debug, Clone, Default)]
struct Chains {
    by_start: FxHashMap<Index, (Word, Index)>,
    by_end: FxHashMap<Index, Index>,
}

/// Searches linkings of dual literal occurrences whose ε-edges, composed
/// with the axiom terms, yield exactly the goal term.
struct Linker<'a> {
    goal: &'a Judgement,
    occs: Vec<Occ>,
    goal_starts: BTreeSet<Index>,
    goal_ends: BTreeMap<Index, (Index, Word)>,
    goal_words: Vec<Word>,
    product_base: TensorTerm,
    max_steps: usize,
    steps: usize,
    exhausted: bool,
}

impl<'a> Linker<'a> {
    fn new(
        goal: &'a Judgement,
        inst: &[Judgement],
        delta: &[TensorType],
        max_steps: usize,
    ) -> Self {
        let mut occs = Vec::new();
        for t in delta {
            for (lit, ups, lows) in t.literal_slots() {
                occs.push(Occ {
                    lit,
                    ups: ups.into_iter().map(|i| i.expect("binder-free")).collect(),
                    lows: lows.into_iter().map(|i| i.expect("binder-free")).collect(),
                });
            }
        }
        let mut product_base = TensorTerm::unit();
        for j in inst {
            product_base = product_base
                .multiply(&j.term)
                .expect("instances are renamed apart");
        }
        Linker {
            goal,
            occs,
            goal_starts: goal.term.free_sub(),
            goal_ends: goal
                .term
                .edges()
                .map(|(l, w, u)| (u.clone(), (l.clone(), w.clone())))
                .collect(),
            goal_words: goal.term.edges().map(|(_, w, _)| w.clone()).collect(),
            product_base,
            max_steps,
            steps: 0,
            exhausted: false,
        }
    }

    /// Edges of the link between positive `x` and negative `y`.
    fn link_edges(x: &Occ, y: &Occ) -> Vec<(Index, Index)> {
        let d_upper: Vec<&Index> = y.lows.iter().rev().collect();
        let d_lower: Vec<&Index> = y.ups.iter().rev().collect();
        let mut e = Vec::new();
        for (a, b) in x.ups.iter().zip(d_upper) {
            e.push((a.clone(), b.clone()));
        }
        for (a, b) in d_lower.into_iter().zip(&x.lows) {
            e.push((a.clone(), b.clone()));
        }
        e
    }

    fn is_factor(&self, w: &Word) -> bool {
        w.is_empty()
            || self
                .goal_words
                .iter()
                .any(|g| g.0.windows(w.len()).any(|s| s == &w.0[..]))
    }

    /// Adds an ε-edge `a → b`, joining the chain ending at `a` with the one
    /// starting at `b`. Fails on cycles and on words the goal cannot contain.
    fn join(&self, ch: &mut Chains, a: &Index, b: &Index) -> bool {
        let s1 = ch.by_end.get(a).cloned().unwrap_or_else(|| a.clone());
        let w1 = if s1 == *a && !ch.by_end.contains_key(a) {
            Word::empty()
        } else {
            ch.by_start
                .get(&s1)
                .map(|(w, _)| w.clone())
                .unwrap_or_default()
        };
        let (w2, e2) = ch
            .by_start
            .get(b)
            .cloned()
            .unwrap_or_else(|| (Word::empty(), b.clone()));
        if s1 == *b {
            return false;
        }
        ch.by_start.remove(&s1);
        ch.by_end.remove(a);
        ch.by_start.remove(b);
        ch.by_end.remove(&e2);
        let w = w1.concat(&w2);
        let fixed_start = self.goal_starts.contains(&s1);
        let fixed_end = self.goal_ends.contains_key(&e2);
        let ok = match (fixed_start, fixed_end) {
            (true, true) => self
                .goal
                .term
                .edge_from(&s1)
                .is_some_and(|(gw, gu)| *gw == w && *gu == e2),
            (true, false) => self
                .goal
                .term
                .edge_from(&s1)
                .is_some_and(|(gw, _)| gw.0.starts_with(&w.0)),
            (false, true) => self.goal_ends[&e2].1 .0.ends_with(&w.0),
            (false, false) => self.is_factor(&w),
        };
        ch.by_start.insert(s1.clone(), (w, e2.clone()));
        ch.by_end.insert(e2, s1);
        ok
    }

    fn try_link(&self, ch: &Chains, x: usize, y: usize) -> Option<Chains> {
        let (p, n) = if self.occs[x].lit.negated {
            (y, x)
        } else {
            (x, y)
        };
        let mut c = ch.clone();
        for (a, b) in Self::link_edges(&self.occs[p], &self.occs[n]) {
            if !self.join(&mut c, &a, &b) {
                return None;
            }
        }
        Some(c)
    }

    fn compatible(&self, x: usize, y: usize) -> bool {
        let (a, b) = (&self.occs[x].lit, &self.occs[y].lit);
        a.name == b.name && a.negated != b.negated && a.valency == b.valency.swapped()
    }

    fn run(
        &mut self,
        accept: &mut dyn FnMut(&TensorTerm) -> Option<Derivation>,
    ) -> Option<Derivation> {
        let mut ch = Chains::default();
        for (l, w, u) in self.product_base.edges() {
            ch.by_start.insert(l.clone(), (w.clone(), u.clone()));
            ch.by_end.insert(u.clone(), l.clone());
        }
        let mut matched = vec![usize::MAX; self.occs.len()];
        self.search(&ch, &mut matched, accept)
    }

    fn search(
        &mut self,
        ch: &Chains,
        matched: &mut Vec<usize>,
        accept: &mut dyn FnMut(&TensorTerm) -> Option<Derivation>,
    ) -> Option<Derivation> {
        self.steps += 1;
        if self.steps > self.max_steps {
            self.exhausted = true;
            return None;
        }
        let free: Vec<usize> = (0..self.occs.len())
            .filter(|&k| matched[k] == usize::MAX)
            .collect();
        if free.is_empty() {
            let mut t0 = TensorTerm::unit();
            for (occ, &m) in self.occs.iter().zip(matched.iter()) {
                if !occ.lit.negated {
                    for (a, b) in Self::link_edges(occ, &self.occs[m]) {
                        t0.insert_edge_raw(a, Word::empty(), b);
                    }
                }
            }
            let product = t0.multiply(&self.product_base).ok()?;
            if product != self.goal.term {
                return None;
            }
            return accept(&t0);
        }
        // most constrained occurrence first
        let mut best: Option<(usize, Vec<(usize, Chains)>)> = None;
        for &x in &free {
            let mut opts = Vec::new();
            for &y in &free {
                if y != x && self.compatible(x, y) {
                    if let Some(c) = self.try_link(ch, x, y) {
                        opts.push((y, c));
                    }
                }
            }
            if opts.is_empty() {
                return None;
            }
            if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
                let done = opts.len() == 1;
                best = Some((x, opts));
                if done {
                    break;
                }
            }
        }
        let (x, opts) = best.expect("free occurrences exist");
        for (y, c) in opts {
            matched[x] = y;
            matched[y] = x;
            let r = self.search(&c, matched, accept);
            matched[x] = usize::MAX;
            matched[y] = usize::MAX;
            if r.is_some() {
                return r;
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }
}
