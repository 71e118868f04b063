//! Tensor term expressions and their normal forms.
//!
//! A term is a product of word-labelled edges `[w]_i^j` (running from the
//! lower index `i` to the upper index `j`) and closed loops `[w]`. A bound
//! index occurs once as upper and once as lower; contracting it concatenates
//! the two words. The normal form keeps only free endpoints.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper or lower occurrence of an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Upper,
    Lower,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Upper => f.write_str("upper"),
            Polarity::Lower => f.write_str("lower"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("index {0} occurs twice as {1}")]
    IndexCollision(Index, Polarity),
    #[error("index sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("renaming sends two indices to {0}")]
    NonInjectiveRename(Index),
    #[error("renaming target {0} is already used by the term")]
    FreshnessViolation(Index),
    #[error("index {0} is missing from the vertex order")]
    MissingIndexInOrder(Index),
}

/// Names starting with this prefix are produced by [`Index::fresh`] and are
/// rejected by the surface parser, so generated names never capture.
pub const RESERVED_PREFIX: char = '_';

static FRESH: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Index(Arc<str>);

impl Index {
    /// A named index. Names of the generated form `_N` (read back from
    /// printed output) move the fresh counter past `N`, so later fresh
    /// indices cannot collide with them.
    pub fn new(name: &str) -> Self {
        if let Some(n) = name
            .strip_prefix(RESERVED_PREFIX)
            .and_then(|d| d.parse::<u64>().ok())
        {
            FRESH.fetch_max(n + 1, Ordering::Relaxed);
        }
        Index(Arc::from(name))
    }

    pub fn fresh() -> Self {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        Index(Arc::from(format!("{RESERVED_PREFIX}{n}").as_str()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.chars().count() == 1 {
            f.write_str(&self.0)
        } else {
            write!(f, "{{{}}}", self.0)
        }
    }
}

impl From<&str> for Index {
    fn from(s: &str) -> Self {
        Index::new(s)
    }
}

/// A terminal symbol.
pub type Sym = Arc<str>;

/// A finite sequence of terminal symbols; the empty word is ε.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Sym>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols<S: AsRef<str>>(symbols: &[S]) -> Self {
        Word(symbols.iter().map(|s| Arc::from(s.as_ref())).collect())
    }

    /// Splits on whitespace.
    pub fn parse(text: &str) -> Self {
        Word(text.split_whitespace().map(Arc::from).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    /// Lexicographically least rotation, the stored representative of a loop.
    pub fn least_rotation(&self) -> Word {
        let n = self.0.len();
        (0..n.max(1))
            .map(|k| {
                let mut v = self.0[k.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..k.min(n)]);
                Word(v)
            })
            .min()
            .unwrap_or_default()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|s| s.as_ref()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// An elementary factor of a term expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Edge {
        word: Word,
        lower: Index,
        upper: Index,
    },
    Loop(Word),
}

impl Factor {
    pub fn edge(word: Word, lower: impl Into<Index>, upper: impl Into<Index>) -> Self {
        Factor::Edge {
            word,
            lower: lower.into(),
            upper: upper.into(),
        }
    }

    pub fn delta(lower: impl Into<Index>, upper: impl Into<Index>) -> Self {
        Factor::edge(Word::empty(), lower, upper)
    }
}

/// A product of factors respecting the index-occurrence discipline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermExpr {
    factors: Vec<Factor>,
}

impl TermExpr {
    /// The empty product.
    pub fn unit() -> Self {
        TermExpr::default()
    }

    pub fn new(factors: Vec<Factor>) -> Result<Self, TermError> {
        let mut ups = BTreeSet::new();
        let mut lows = BTreeSet::new();
        for f in &factors {
            if let Factor::Edge { lower, upper, .. } = f {
                if !lows.insert(lower.clone()) {
                    return Err(TermError::IndexCollision(lower.clone(), Polarity::Lower));
                }
                if !ups.insert(upper.clone()) {
                    return Err(TermError::IndexCollision(upper.clone(), Polarity::Upper));
                }
            }
        }
        Ok(TermExpr { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    fn occurrences(&self) -> (BTreeSet<Index>, BTreeSet<Index>) {
        let mut ups = BTreeSet::new();
        let mut lows = BTreeSet::new();
        for f in &self.factors {
            if let Factor::Edge { lower, upper, .. } = f {
                lows.insert(lower.clone());
                ups.insert(upper.clone());
            }
        }
        (ups, lows)
    }

    /// Free upper indices: upper occurrences without a matching lower one.
    pub fn free_sup(&self) -> BTreeSet<Index> {
        let (ups, lows) = self.occurrences();
        ups.difference(&lows).cloned().collect()
    }

    pub fn free_sub(&self) -> BTreeSet<Index> {
        let (ups, lows) = self.occurrences();
        lows.difference(&ups).cloned().collect()
    }
}

/// Concatenates two expressions, failing when an index would occur twice
/// with the same polarity.
pub fn multiply(t: &TermExpr, s: &TermExpr) -> Result<TermExpr, TermError> {
    let mut factors = t.factors.clone();
    factors.extend(s.factors.iter().cloned());
    TermExpr::new(factors)
}

/// Product of ε-edges `δ_{lower[k]}^{upper[k]}`.
pub fn delta_seq(lower: &[Index], upper: &[Index]) -> Result<TermExpr, TermError> {
    if lower.len() != upper.len() {
        return Err(TermError::LengthMismatch(lower.len(), upper.len()));
    }
    let mut seen = BTreeSet::new();
    for i in lower.iter() {
        if !seen.insert(i.clone()) {
            return Err(TermError::IndexCollision(i.clone(), Polarity::Lower));
        }
    }
    for i in upper.iter() {
        if !seen.insert(i.clone()) {
            return Err(TermError::IndexCollision(i.clone(), Polarity::Upper));
        }
    }
    Ok(TermExpr {
        factors: lower
            .iter()
            .zip(upper)
            .map(|(l, u)| Factor::delta(l.clone(), u.clone()))
            .collect(),
    })
}

/// Congruence-canonical tensor term: edges keyed by their (free, distinct)
/// lower endpoint, plus a sorted multiset of loops in least rotation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorTerm {
    edges: BTreeMap<Index, (Word, Index)>,
    loops: Vec<Word>,
}

/// Contracts all bound indices by following paths.
pub fn normalize(t: &TermExpr) -> TensorTerm {
    let mut by_lower: FxHashMap<&Index, (&Word, &Index)> = FxHashMap::default();
    let mut uppers: BTreeSet<&Index> = BTreeSet::new();
    let mut loops = Vec::new();
    for f in &t.factors {
        match f {
            Factor::Edge { word, lower, upper } => {
                by_lower.insert(lower, (word, upper));
                uppers.insert(upper);
            }
            Factor::Loop(w) => loops.push(w.least_rotation()),
        }
    }
    let mut edges = BTreeMap::new();
    let mut visited: BTreeSet<&Index> = BTreeSet::new();
    let mut starts: Vec<&Index> = by_lower
        .keys()
        .copied()
        .filter(|l| !uppers.contains(l))
        .collect();
    starts.sort();
    for start in starts {
        let mut word = Vec::new();
        let mut cur = start;
        while let Some((w, up)) = by_lower.get(cur) {
            visited.insert(cur);
            word.extend(w.0.iter().cloned());
            cur = up;
        }
        edges.insert(start.clone(), (Word(word), cur.clone()));
    }
    let mut rest: Vec<&Index> = by_lower
        .keys()
        .copied()
        .filter(|l| !visited.contains(l))
        .collect();
    rest.sort();
    for start in rest {
        if visited.contains(start) {
            continue;
        }
        let mut word = Vec::new();
        let mut cur = start;
        loop {
            visited.insert(cur);
            let (w, up) = by_lower[cur];
            word.extend(w.0.iter().cloned());
            cur = up;
            if cur == start {
                break;
            }
        }
        loops.push(Word(word).least_rotation());
    }
    loops.sort();
    TensorTerm { edges, loops }
}

pub fn congruent(t: &TermExpr, s: &TermExpr) -> bool {
    normalize(t) == normalize(s)
}

impl TensorTerm {
    pub fn unit() -> Self {
        TensorTerm::default()
    }

    pub fn single(word: Word, lower: Index, upper: Index) -> Self {
        let mut edges = BTreeMap::new();
        edges.insert(lower, (word, upper));
        TensorTerm {
            edges,
            loops: Vec::new(),
        }
    }

    /// Edges as `(lower, word, upper)` in lower-index order.
    pub fn edges(&self) -> impl Iterator<Item = (&Index, &Word, &Index)> {
        self.edges.iter().map(|(l, (w, u))| (l, w, u))
    }

    pub fn edge_from(&self, lower: &Index) -> Option<(&Word, &Index)> {
        self.edges.get(lower).map(|(w, u)| (w, u))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> &[Word] {
        &self.loops
    }

    pub fn is_regular(&self) -> bool {
        self.loops.is_empty()
    }

    /// No ε-edge with both endpoints free. In a normal form every endpoint
    /// is free, so this means no edge carries the empty word.
    pub fn is_lexical(&self) -> bool {
        self.edges.values().all(|(w, _)| !w.is_empty())
    }

    pub fn is_closed(&self) -> bool {
        self.edges.values().all(|(w, _)| w.is_empty()) && self.loops.iter().all(|w| w.is_empty())
    }

    pub fn free_sup(&self) -> BTreeSet<Index> {
        self.edges.values().map(|(_, u)| u.clone()).collect()
    }

    pub fn free_sub(&self) -> BTreeSet<Index> {
        self.edges.keys().cloned().collect()
    }

    pub fn free_indices(&self) -> BTreeSet<Index> {
        let mut s = self.free_sub();
        s.extend(self.free_sup());
        s
    }

    pub fn to_expr(&self) -> TermExpr {
        let mut factors: Vec<Factor> = self
            .edges
            .iter()
            .map(|(l, (w, u))| Factor::Edge {
                word: w.clone(),
                lower: l.clone(),
                upper: u.clone(),
            })
            .collect();
        factors.extend(self.loops.iter().cloned().map(Factor::Loop));
        TermExpr { factors }
    }

    pub fn multiply(&self, other: &TensorTerm) -> Result<TensorTerm, TermError> {
        Ok(normalize(&multiply(&self.to_expr(), &other.to_expr())?))
    }

    /// Adds an edge, other endpoints being already normal. The new edge glues
    /// onto existing edges where its endpoints meet theirs.
    pub fn with_edge(
        &self,
        word: Word,
        lower: Index,
        upper: Index,
    ) -> Result<TensorTerm, TermError> {
        self.multiply(&TensorTerm::single(word, lower, upper))
    }

    /// Removes the edge starting at `lower`, returning it.
    pub fn remove_edge(&mut self, lower: &Index) -> Option<(Word, Index)> {
        self.edges.remove(lower)
    }

    pub fn insert_edge_raw(&mut self, lower: Index, word: Word, upper: Index) {
        self.edges.insert(lower, (word, upper));
    }

    pub fn push_loop(&mut self, w: Word) {
        self.loops.push(w.least_rotation());
        self.loops.sort();
    }

    /// Renames free indices. Indices outside the map are kept.
    pub fn rename_free(&self, map: &BTreeMap<Index, Index>) -> Result<TensorTerm, TermError> {
        let free = self.free_indices();
        let mut targets = BTreeSet::new();
        for (from, to) in map {
            if !free.contains(from) {
                continue;
            }
            if !targets.insert(to.clone()) {
                return Err(TermError::NonInjectiveRename(to.clone()));
            }
        }
        for i in &free {
            if !map.contains_key(i) && targets.contains(i) {
                return Err(TermError::FreshnessViolation(i.clone()));
            }
        }
        Ok(self.rename_unchecked(map))
    }

    /// Renaming without the injectivity and freshness checks.
    pub fn rename_unchecked(&self, map: &BTreeMap<Index, Index>) -> TensorTerm {
        let r = |i: &Index| map.get(i).cloned().unwrap_or_else(|| i.clone());
        TensorTerm {
            edges: self
                .edges
                .iter()
                .map(|(l, (w, u))| (r(l), (w.clone(), r(u))))
                .collect(),
            loops: self.loops.clone(),
        }
    }

    /// Graphviz text with one vertex per free index ranked left to right by
    /// `order`, and every loop drawn as a standalone cycle.
    pub fn to_graph_text(&self, order: &[Index]) -> Result<String, TermError> {
        let pos: FxHashMap<&Index, usize> = order.iter().enumerate().map(|(k, i)| (i, k)).collect();
        for i in self.free_indices() {
            if !pos.contains_key(&i) {
                return Err(TermError::MissingIndexInOrder(i));
            }
        }
        let mut out = String::from("digraph term {\n  rankdir=LR;\n  node [shape=circle];\n");
        let used = self.free_indices();
        let ranked: Vec<&Index> = order.iter().filter(|i| used.contains(*i)).collect();
        for (k, i) in ranked.iter().enumerate() {
            out.push_str(&format!("  v{k} [label=\"{}\"];\n", escape(i.name())));
        }
        if ranked.len() > 1 {
            out.push_str("  { rank=same; ");
            for k in 0..ranked.len() {
                out.push_str(&format!("v{k}; "));
            }
            out.push_str("}\n");
            let chain: Vec<String> = (0..ranked.len()).map(|k| format!("v{k}")).collect();
            out.push_str(&format!("  {} [style=invis];\n", chain.join(" -> ")));
        }
        let vid: FxHashMap<&Index, usize> =
            ranked.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        let mut edges: Vec<(usize, usize, String)> = self
            .edges()
            .map(|(l, w, u)| (vid[l], vid[u], w.to_string()))
            .collect();
        edges.sort();
        for (a, b, w) in edges {
            out.push_str(&format!("  v{a} -> v{b} [label=\"{}\"];\n", escape(&w)));
        }
        for (k, w) in self.loops.iter().enumerate() {
            out.push_str(&format!(
                "  loop{k} [shape=ellipse, label=\"({})\"];\n",
                escape(&w.to_string())
            ));
            out.push_str(&format!("  loop{k} -> loop{k};\n"));
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl fmt::Display for TensorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (l, (w, u)) in &self.edges {
            if w.is_empty() {
                parts.push(format!("d_{l}^{u}"));
            } else {
                parts.push(format!("[{w}]_{l}^{u}"));
            }
        }
        for w in &self.loops {
            parts.push(format!("[{w}]"));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(w: &str, l: &str, u: &str) -> Factor {
        Factor::edge(Word::parse(w), l, u)
    }

    #[test]
    fn contraction_concatenates_words() {
        let t = TermExpr::new(vec![e("a", "i", "j"), e("b", "k", "l"), e("c", "j", "k")]).unwrap();
        let n = normalize(&t);
        assert_eq!(
            n,
            TensorTerm::single(Word::parse("a c b"), "i".into(), "l".into())
        );
    }

    #[test]
    fn self_contraction_is_a_loop() {
        let t = TermExpr::new(vec![e("u", "i", "i")]).unwrap();
        let n = normalize(&t);
        assert_eq!(n.edge_count(), 0);
        assert_eq!(n.loops(), &[Word::parse("u")]);
    }

    #[test]
    fn loops_compare_up_to_rotation() {
        let a = TermExpr::new(vec![Factor::Loop(Word::parse("a1 a2 a3"))]).unwrap();
        let b = TermExpr::new(vec![Factor::Loop(Word::parse("a3 a1 a2"))]).unwrap();
        assert!(congruent(&a, &b));
    }

    #[test]
    fn collision_is_reported() {
        let a = TermExpr::new(vec![e("a", "i", "j")]).unwrap();
        let b = TermExpr::new(vec![e("b", "i", "k")]).unwrap();
        assert_eq!(
            multiply(&a, &b),
            Err(TermError::IndexCollision("i".into(), Polarity::Lower))
        );
    }

    #[test]
    fn delta_seq_checks_lengths_and_collisions() {
        assert_eq!(delta_seq(&[], &[]).unwrap(), TermExpr::unit());
        assert!(matches!(
            delta_seq(&["i".into()], &[]),
            Err(TermError::LengthMismatch(1, 0))
        ));
        assert!(matches!(
            delta_seq(&["i".into()], &["i".into()]),
            Err(TermError::IndexCollision(..))
        ));
    }
}
