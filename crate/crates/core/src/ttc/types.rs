//! Tensor type symbols, tensor types and typing judgements.
//!
//! A type symbol is an MLL formula over valenced literals, optionally with
//! the `∇`/`△` binders of the extended calculus. A tensor type `A^I_J`
//! decorates a symbol with its free upper indices `I` and lower indices `J`,
//! distributed in order over the literal slots. Binders store the bound pair
//! as slot positions inside the body, so α-equivalent binders are equal.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{Index, TensorTerm, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Valency {
    pub up: usize,
    pub down: usize,
}

impl Valency {
    pub fn new(up: usize, down: usize) -> Self {
        Valency { up, down }
    }

    pub fn swapped(self) -> Self {
        Valency {
            up: self.down,
            down: self.up,
        }
    }

    pub fn plus(self, o: Valency) -> Self {
        Valency {
            up: self.up + o.up,
            down: self.down + o.down,
        }
    }
}

impl fmt::Display for Valency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.up, self.down)
    }
}

/// A literal occurrence. `valency` is the valency of this occurrence, so a
/// negated literal carries the swapped valency of its atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub name: Arc<str>,
    pub negated: bool,
    pub valency: Valency,
}

/// A literal with its upper and lower decorations; bound slots are `None`.
pub type LiteralSlots = (Literal, Vec<Option<Index>>, Vec<Option<Index>>);

impl Literal {
    pub fn positive(name: &str, valency: Valency) -> Self {
        Literal {
            name: Arc::from(name),
            negated: false,
            valency,
        }
    }

    pub fn dual(&self) -> Self {
        Literal {
            name: self.name.clone(),
            negated: !self.negated,
            valency: self.valency.swapped(),
        }
    }

    /// Valency of the underlying atom.
    pub fn atom_valency(&self) -> Valency {
        if self.negated {
            self.valency.swapped()
        } else {
            self.valency
        }
    }
}

/// Bound pair of a binder: `lower` is the slot of `α` among the body's lower
/// indices, `upper` the slot of `β` among its upper indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding {
    pub lower: usize,
    pub upper: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Lit(Literal),
    Tensor(Box<Symbol>, Box<Symbol>),
    Par(Box<Symbol>, Box<Symbol>),
    Nabla(Box<Symbol>, Binding),
    Tri(Box<Symbol>, Binding),
}

impl Symbol {
    pub fn lit(name: &str, valency: Valency) -> Self {
        Symbol::Lit(Literal::positive(name, valency))
    }

    pub fn tensor(a: Symbol, b: Symbol) -> Self {
        Symbol::Tensor(Box::new(a), Box::new(b))
    }

    pub fn par(a: Symbol, b: Symbol) -> Self {
        Symbol::Par(Box::new(a), Box::new(b))
    }

    pub fn valency(&self) -> Valency {
        match self {
            Symbol::Lit(l) => l.valency,
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => a.valency().plus(b.valency()),
            Symbol::Nabla(body, _) | Symbol::Tri(body, _) => {
                let v = body.valency();
                Valency::new(v.up - 1, v.down - 1)
            }
        }
    }

    /// Checks binder slots against body valencies.
    pub fn well_formed(&self) -> bool {
        match self {
            Symbol::Lit(_) => true,
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => a.well_formed() && b.well_formed(),
            Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
                let v = body.valency();
                body.well_formed() && bd.lower < v.down && bd.upper < v.up
            }
        }
    }

    pub fn dual(&self) -> Symbol {
        match self {
            Symbol::Lit(l) => Symbol::Lit(l.dual()),
            Symbol::Tensor(a, b) => Symbol::Par(Box::new(b.dual()), Box::new(a.dual())),
            Symbol::Par(a, b) => Symbol::Tensor(Box::new(b.dual()), Box::new(a.dual())),
            Symbol::Nabla(body, bd) => Symbol::Tri(Box::new(body.dual()), dual_binding(body, *bd)),
            Symbol::Tri(body, bd) => Symbol::Nabla(Box::new(body.dual()), dual_binding(body, *bd)),
        }
    }

    pub fn is_binder_free(&self) -> bool {
        match self {
            Symbol::Lit(_) => true,
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => a.is_binder_free() && b.is_binder_free(),
            Symbol::Nabla(..) | Symbol::Tri(..) => false,
        }
    }

    /// Number of binary connectives and binders.
    pub fn size(&self) -> usize {
        match self {
            Symbol::Lit(_) => 0,
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => 1 + a.size() + b.size(),
            Symbol::Nabla(body, _) | Symbol::Tri(body, _) => 1 + body.size(),
        }
    }

    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            Symbol::Lit(l) => out.push(l),
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
                a.collect_literals(out);
                b.collect_literals(out);
            }
            Symbol::Nabla(body, _) | Symbol::Tri(body, _) => body.collect_literals(out),
        }
    }
}

/// Binder slots after dualizing: the body's index sequences are reversed and
/// swapped, so `α` becomes an upper slot and `β` a lower slot.
fn dual_binding(body: &Symbol, bd: Binding) -> Binding {
    let v = body.valency();
    Binding {
        lower: v.up - 1 - bd.upper,
        upper: v.down - 1 - bd.lower,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("symbol has valency {expected} but {up} upper and {down} lower indices were given")]
    ArityMismatch {
        expected: Valency,
        up: usize,
        down: usize,
    },
    #[error("index {0} occurs twice")]
    IndexCollision(Index),
    #[error("binder slots are out of range")]
    BadBinding,
    #[error("index {0} is not a lower index of the body")]
    NotLower(Index),
    #[error("index {0} is not an upper index of the body")]
    NotUpper(Index),
}

/// A decorated type symbol `A^I_J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorType {
    pub symbol: Symbol,
    pub upper: Vec<Index>,
    pub lower: Vec<Index>,
}

/// One step of decomposing a type at its main connective.
#[derive(Debug, Clone)]
pub enum Split {
    Lit(Literal),
    Tensor(TensorType, TensorType),
    Par(TensorType, TensorType),
    /// Body decorated with fresh `alpha` (lower) and `beta` (upper).
    Nabla {
        body: TensorType,
        alpha: Index,
        beta: Index,
    },
    Tri {
        body: TensorType,
        alpha: Index,
        beta: Index,
    },
}

impl TensorType {
    pub fn new(symbol: Symbol, upper: Vec<Index>, lower: Vec<Index>) -> Result<Self, TypeError> {
        if !symbol.well_formed() {
            return Err(TypeError::BadBinding);
        }
        let v = symbol.valency();
        if v.up != upper.len() || v.down != lower.len() {
            return Err(TypeError::ArityMismatch {
                expected: v,
                up: upper.len(),
                down: lower.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for i in upper.iter().chain(lower.iter()) {
            if !seen.insert(i) {
                return Err(TypeError::IndexCollision(i.clone()));
            }
        }
        Ok(TensorType {
            symbol,
            upper,
            lower,
        })
    }

    pub fn lit(
        name: &str,
        valency: Valency,
        upper: Vec<Index>,
        lower: Vec<Index>,
    ) -> Result<Self, TypeError> {
        TensorType::new(Symbol::lit(name, valency), upper, lower)
    }

    pub fn valency(&self) -> Valency {
        self.symbol.valency()
    }

    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.upper.iter().chain(self.lower.iter())
    }

    pub fn dual(&self) -> TensorType {
        TensorType {
            symbol: self.symbol.dual(),
            upper: self.lower.iter().rev().cloned().collect(),
            lower: self.upper.iter().rev().cloned().collect(),
        }
    }

    pub fn tensor(a: &TensorType, b: &TensorType) -> Result<TensorType, TypeError> {
        TensorType::new(
            Symbol::tensor(a.symbol.clone(), b.symbol.clone()),
            a.upper.iter().chain(&b.upper).cloned().collect(),
            a.lower.iter().chain(&b.lower).cloned().collect(),
        )
    }

    pub fn par(a: &TensorType, b: &TensorType) -> Result<TensorType, TypeError> {
        TensorType::new(
            Symbol::par(a.symbol.clone(), b.symbol.clone()),
            a.upper.iter().chain(&b.upper).cloned().collect(),
            a.lower.iter().chain(&b.lower).cloned().collect(),
        )
    }

    fn bind(
        body: &TensorType,
        alpha: &Index,
        beta: &Index,
        nabla: bool,
    ) -> Result<TensorType, TypeError> {
        let lower = body
            .lower
            .iter()
            .position(|i| i == alpha)
            .ok_or_else(|| TypeError::NotLower(alpha.clone()))?;
        let upper = body
            .upper
            .iter()
            .position(|i| i == beta)
            .ok_or_else(|| TypeError::NotUpper(beta.clone()))?;
        let bd = Binding { lower, upper };
        let b = Box::new(body.symbol.clone());
        let symbol = if nabla {
            Symbol::Nabla(b, bd)
        } else {
            Symbol::Tri(b, bd)
        };
        let mut ups = body.upper.clone();
        ups.remove(upper);
        let mut lows = body.lower.clone();
        lows.remove(lower);
        TensorType::new(symbol, ups, lows)
    }

    /// `∇^α_β body`, binding lower index `alpha` and upper index `beta`.
    pub fn nabla(body: &TensorType, alpha: &Index, beta: &Index) -> Result<TensorType, TypeError> {
        TensorType::bind(body, alpha, beta, true)
    }

    pub fn tri(body: &TensorType, alpha: &Index, beta: &Index) -> Result<TensorType, TypeError> {
        TensorType::bind(body, alpha, beta, false)
    }

    pub fn split(&self) -> Split {
        match &self.symbol {
            Symbol::Lit(l) => Split::Lit(l.clone()),
            Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
                let va = a.valency();
                let left = TensorType {
                    symbol: (**a).clone(),
                    upper: self.upper[..va.up].to_vec(),
                    lower: self.lower[..va.down].to_vec(),
                };
                let right = TensorType {
                    symbol: (**b).clone(),
                    upper: self.upper[va.up..].to_vec(),
                    lower: self.lower[va.down..].to_vec(),
                };
                if matches!(self.symbol, Symbol::Tensor(..)) {
                    Split::Tensor(left, right)
                } else {
                    Split::Par(left, right)
                }
            }
            Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
                let alpha = Index::fresh();
                let beta = Index::fresh();
                let body = self.open_with(body, *bd, alpha.clone(), beta.clone());
                if matches!(self.symbol, Symbol::Nabla(..)) {
                    Split::Nabla { body, alpha, beta }
                } else {
                    Split::Tri { body, alpha, beta }
                }
            }
        }
    }

    fn open_with(&self, body: &Symbol, bd: Binding, alpha: Index, beta: Index) -> TensorType {
        let mut upper = self.upper.clone();
        upper.insert(bd.upper, beta);
        let mut lower = self.lower.clone();
        lower.insert(bd.lower, alpha);
        TensorType {
            symbol: body.clone(),
            upper,
            lower,
        }
    }

    /// Free indices in reading order of the decorated formula: each
    /// literal's upper indices, then its lower ones, left to right.
    pub fn reading_order(&self) -> Vec<Index> {
        let mut out = Vec::with_capacity(self.upper.len() + self.lower.len());
        self.for_each_reading(&mut |i| out.push(i.clone()));
        out
    }

    /// Visits the free indices in reading order without collecting them.
    pub fn for_each_reading<'a>(&'a self, f: &mut dyn FnMut(&'a Index)) {
        let ups: Vec<Option<&Index>> = self.upper.iter().map(Some).collect();
        let lows: Vec<Option<&Index>> = self.lower.iter().map(Some).collect();
        walk_reading(&self.symbol, &ups, &lows, f);
    }

    /// Literal occurrences with their decorations. Bound slots are `None`.
    pub fn literal_slots(&self) -> Vec<LiteralSlots> {
        let mut out = Vec::new();
        let ups: Vec<Option<Index>> = self.upper.iter().cloned().map(Some).collect();
        let lows: Vec<Option<Index>> = self.lower.iter().cloned().map(Some).collect();
        walk_literals(&self.symbol, &ups, &lows, &mut out);
        out
    }

    pub fn freshened(&self) -> TensorType {
        let map: BTreeMap<Index, Index> = self
            .indices()
            .map(|i| (i.clone(), Index::fresh()))
            .collect();
        self.rename(&map)
    }

    pub fn rename(&self, map: &BTreeMap<Index, Index>) -> TensorType {
        let r = |i: &Index| map.get(i).cloned().unwrap_or_else(|| i.clone());
        TensorType {
            symbol: self.symbol.clone(),
            upper: self.upper.iter().map(r).collect(),
            lower: self.lower.iter().map(r).collect(),
        }
    }
}

type Slots = Vec<Option<Index>>;

fn walk_literals(
    sym: &Symbol,
    ups: &[Option<Index>],
    lows: &[Option<Index>],
    out: &mut Vec<(Literal, Slots, Slots)>,
) {
    match sym {
        Symbol::Lit(l) => out.push((l.clone(), ups.to_vec(), lows.to_vec())),
        Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
            let va = a.valency();
            walk_literals(a, &ups[..va.up], &lows[..va.down], out);
            walk_literals(b, &ups[va.up..], &lows[va.down..], out);
        }
        Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
            let mut u = ups.to_vec();
            u.insert(bd.upper, None);
            let mut l = lows.to_vec();
            l.insert(bd.lower, None);
            walk_literals(body, &u, &l, out);
        }
    }
}

fn walk_reading<'a>(
    sym: &Symbol,
    ups: &[Option<&'a Index>],
    lows: &[Option<&'a Index>],
    f: &mut dyn FnMut(&'a Index),
) {
    match sym {
        Symbol::Lit(_) => {
            for i in ups.iter().chain(lows).flatten() {
                f(i);
            }
        }
        Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
            let va = a.valency();
            walk_reading(a, &ups[..va.up], &lows[..va.down], f);
            walk_reading(b, &ups[va.up..], &lows[va.down..], f);
        }
        Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
            let mut u = ups.to_vec();
            u.insert(bd.upper, None);
            let mut l = lows.to_vec();
            l.insert(bd.lower, None);
            walk_reading(body, &u, &l, f);
        }
    }
}

/// Names for bound indices when printing; chosen to avoid free names.
fn binder_names(ty: &TensorType) -> impl FnMut() -> Index {
    let used: BTreeSet<String> = ty.indices().map(|i| i.name().to_string()).collect();
    let mut n = 0usize;
    move || loop {
        let cand = format!("b{n}");
        n += 1;
        if !used.contains(&cand) {
            return Index::new(&cand);
        }
    }
}

fn fmt_indices(ix: &[Index]) -> String {
    match ix.len() {
        1 => ix[0].to_string(),
        _ => {
            let names: Vec<&str> = ix.iter().map(|i| i.name()).collect();
            format!("{{{}}}", names.join(" "))
        }
    }
}

fn fmt_symbol(
    sym: &Symbol,
    ups: &[Index],
    lows: &[Index],
    fresh: &mut dyn FnMut() -> Index,
    top: bool,
) -> String {
    match sym {
        Symbol::Lit(l) => {
            let mut s = String::new();
            if l.negated {
                s.push('~');
            }
            s.push_str(&l.name);
            if !ups.is_empty() {
                s.push('^');
                s.push_str(&fmt_indices(ups));
            }
            if !lows.is_empty() {
                s.push('_');
                s.push_str(&fmt_indices(lows));
            }
            s
        }
        Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
            let va = a.valency();
            let l = fmt_symbol(a, &ups[..va.up], &lows[..va.down], fresh, false);
            let r = fmt_symbol(b, &ups[va.up..], &lows[va.down..], fresh, false);
            let op = if matches!(sym, Symbol::Tensor(..)) {
                "*"
            } else {
                "|"
            };
            if top {
                format!("{l} {op} {r}")
            } else {
                format!("({l} {op} {r})")
            }
        }
        Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
            let alpha = fresh();
            let beta = fresh();
            let mut u = ups.to_vec();
            u.insert(bd.upper, beta.clone());
            let mut l = lows.to_vec();
            l.insert(bd.lower, alpha.clone());
            let inner = fmt_symbol(body, &u, &l, fresh, true);
            let kw = if matches!(sym, Symbol::Nabla(..)) {
                "nab"
            } else {
                "tri"
            };
            format!("{kw}^{alpha}_{beta}({inner})")
        }
    }
}

impl fmt::Display for TensorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut fresh = binder_names(self);
        f.write_str(&fmt_symbol(
            &self.symbol,
            &self.upper,
            &self.lower,
            &mut fresh,
            true,
        ))
    }
}

/// Displays a bare symbol with placeholder-free literal names.
pub struct SymbolDisplay<'a>(pub &'a Symbol);

impl fmt::Display for SymbolDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(s: &Symbol, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match s {
                Symbol::Lit(l) => write!(f, "{}{}", if l.negated { "~" } else { "" }, l.name),
                Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
                    f.write_str("(")?;
                    go(a, f)?;
                    f.write_str(if matches!(s, Symbol::Tensor(..)) {
                        " * "
                    } else {
                        " | "
                    })?;
                    go(b, f)?;
                    f.write_str(")")
                }
                Symbol::Nabla(b, bd) | Symbol::Tri(b, bd) => {
                    let kw = if matches!(s, Symbol::Nabla(..)) {
                        "nab"
                    } else {
                        "tri"
                    };
                    write!(f, "{kw}[{},{}](", bd.lower, bd.upper)?;
                    go(b, f)?;
                    f.write_str(")")
                }
            }
        }
        go(self.0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgementError {
    #[error("index {0} occurs in two types of the sequent")]
    SharedIndex(Index),
    #[error("free upper indices of the term do not match the lower indices of the sequent")]
    SupMismatch,
    #[error("free lower indices of the term do not match the upper indices of the sequent")]
    SubMismatch,
}

/// A typing judgement `t ⊢ Γ`; the sequent order is kept for display and
/// for rule positions, while equality quotients by order and renaming.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub term: TensorTerm,
    pub types: Vec<TensorType>,
}

/// Order- and name-independent form of a judgement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalJudgement {
    pub symbols: Vec<Symbol>,
    pub edges: Vec<(u32, Word, u32)>,
    pub loops: Vec<Word>,
}

/// Tied types are permuted exhaustively up to this many orderings; larger
/// symmetric groups fall back to one fixed ordering.
const MAX_TIE_PERMUTATIONS: usize = 40320;

impl Judgement {
    pub fn new(term: TensorTerm, types: Vec<TensorType>) -> Result<Self, JudgementError> {
        let j = Judgement { term, types };
        j.validate()?;
        Ok(j)
    }

    pub fn unchecked(term: TensorTerm, types: Vec<TensorType>) -> Self {
        Judgement { term, types }
    }

    pub fn validate(&self) -> Result<(), JudgementError> {
        let mut seen = BTreeSet::new();
        let mut ups = BTreeSet::new();
        let mut lows = BTreeSet::new();
        for t in &self.types {
            for i in t.indices() {
                if !seen.insert(i.clone()) {
                    return Err(JudgementError::SharedIndex(i.clone()));
                }
            }
            ups.extend(t.upper.iter().cloned());
            lows.extend(t.lower.iter().cloned());
        }
        if self.term.free_sup() != lows {
            return Err(JudgementError::SupMismatch);
        }
        if self.term.free_sub() != ups {
            return Err(JudgementError::SubMismatch);
        }
        Ok(())
    }

    pub fn indices(&self) -> BTreeSet<Index> {
        self.types
            .iter()
            .flat_map(|t| t.indices().cloned())
            .collect()
    }

    pub fn rename(&self, map: &BTreeMap<Index, Index>) -> Judgement {
        Judgement {
            term: self.term.rename_unchecked(map),
            types: self.types.iter().map(|t| t.rename(map)).collect(),
        }
    }

    /// Renames every index to a fresh generated name.
    pub fn freshen(&self) -> Judgement {
        let map: BTreeMap<Index, Index> = self
            .indices()
            .into_iter()
            .map(|i| (i, Index::fresh()))
            .collect();
        self.rename(&map)
    }

    /// Renames the indices shared with `avoid` to fresh names.
    pub fn rename_apart(&self, avoid: &BTreeSet<Index>) -> Judgement {
        let map: BTreeMap<Index, Index> = self
            .indices()
            .into_iter()
            .filter(|i| avoid.contains(i))
            .map(|i| (i, Index::fresh()))
            .collect();
        if map.is_empty() {
            self.clone()
        } else {
            self.rename(&map)
        }
    }

    pub fn is_regular(&self) -> bool {
        self.term.is_regular()
    }

    pub fn reordered(&self, perm: &[usize]) -> Judgement {
        Judgement {
            term: self.term.clone(),
            types: perm.iter().map(|&k| self.types[k].clone()).collect(),
        }
    }

    fn encode(&self, order: &[usize]) -> CanonicalJudgement {
        let mut num: FxHashMap<&Index, u32> = FxHashMap::default();
        for &k in order {
            self.types[k].for_each_reading(&mut |i| {
                let n = num.len() as u32;
                num.insert(i, n);
            });
        }
        let mut edges: Vec<(u32, Word, u32)> = self
            .term
            .edges()
            .map(|(l, w, u)| {
                (
                    num.get(l).copied().unwrap_or(u32::MAX),
                    w.clone(),
                    num.get(u).copied().unwrap_or(u32::MAX),
                )
            })
            .collect();
        edges.sort();
        CanonicalJudgement {
            symbols: order
                .iter()
                .map(|&k| self.types[k].symbol.clone())
                .collect(),
            edges,
            loops: self.term.loops().to_vec(),
        }
    }

    /// Per-type invariants used to break ties between equal symbols.
    #[allow(clippy::type_complexity)]
    fn signatures(&self) -> Vec<Vec<(usize, bool, Word, usize, usize)>> {
        let mut owner: FxHashMap<&Index, (usize, usize)> = FxHashMap::default();
        let readings: Vec<Vec<Index>> = self.types.iter().map(|t| t.reading_order()).collect();
        for (t, r) in readings.iter().enumerate() {
            for (p, i) in r.iter().enumerate() {
                owner.insert(i, (t, p));
            }
        }
        let rank: Vec<usize> = {
            let mut syms: Vec<&Symbol> = self.types.iter().map(|t| &t.symbol).collect();
            syms.sort();
            syms.dedup();
            self.types
                .iter()
                .map(|t| syms.binary_search(&&t.symbol).expect("listed"))
                .collect()
        };
        let mut sigs = vec![Vec::new(); self.types.len()];
        for (l, w, u) in self.term.edges() {
            let (Some(&(tl, pl)), Some(&(tu, pu))) = (owner.get(l), owner.get(u)) else {
                continue;
            };
            sigs[tl].push((
                pl,
                true,
                w.clone(),
                rank[tu],
                if tu == tl { pu } else { usize::MAX },
            ));
            sigs[tu].push((
                pu,
                false,
                w.clone(),
                rank[tl],
                if tl == tu { pl } else { usize::MAX },
            ));
        }
        for s in &mut sigs {
            s.sort();
        }
        sigs
    }

    /// Canonical form together with the sequent order that realizes it.
    pub fn canonical_with_order(&self) -> (CanonicalJudgement, Vec<usize>) {
        let n = self.types.len();
        let sigs = self.signatures();
        let mut base: Vec<usize> = (0..n).collect();
        base.sort_by(|&a, &b| {
            (&self.types[a].symbol, &sigs[a]).cmp(&(&self.types[b].symbol, &sigs[b]))
        });
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut s = 0;
        while s < n {
            let mut e = s + 1;
            while e < n
                && self.types[base[e]].symbol == self.types[base[s]].symbol
                && sigs[base[e]] == sigs[base[s]]
            {
                e += 1;
            }
            if e - s > 1 {
                groups.push((s, e));
            }
            s = e;
        }
        let total = groups
            .iter()
            .try_fold(1usize, |acc, &(s, e)| acc.checked_mul(factorial(e - s)));
        let mut best = (self.encode(&base), base.clone());
        if groups.is_empty() || total.is_none_or(|t| t > MAX_TIE_PERMUTATIONS) {
            return best;
        }
        let mut cur = base.clone();
        loop {
            let mut g = 0;
            loop {
                if g == groups.len() {
                    return best;
                }
                let (s, e) = groups[g];
                if next_permutation(&mut cur[s..e]) {
                    break;
                }
                // wrapped around; next_permutation left the slice sorted again
                g += 1;
            }
            let enc = self.encode(&cur);
            if enc < best.0 {
                best = (enc, cur.clone());
            }
        }
    }

    pub fn canonical(&self) -> CanonicalJudgement {
        self.canonical_with_order().0
    }

    /// Equality as judgements: up to sequent order, renaming and congruence.
    pub fn alpha_eq(&self, other: &Judgement) -> bool {
        self.types.len() == other.types.len() && self.canonical() == other.canonical()
    }

    /// Canonical form of the judgement in its own sequent order. Cheaper
    /// than [`Judgement::canonical`]; equal keys mean equal judgements.
    pub fn ordered_key(&self) -> CanonicalJudgement {
        let order: Vec<usize> = (0..self.types.len()).collect();
        self.encode(&order)
    }

    /// Equality up to renaming and congruence, position by position.
    pub fn alpha_eq_ordered(&self, other: &Judgement) -> bool {
        self.types.len() == other.types.len() && self.ordered_key() == other.ordered_key()
    }

    /// A permutation `p` with `self.reordered(p)` equal to `target` up to
    /// renaming, position by position.
    pub fn alpha_perm(&self, target: &Judgement) -> Option<Vec<usize>> {
        let (ca, oa) = self.canonical_with_order();
        let (cb, ob) = target.canonical_with_order();
        if ca != cb {
            return None;
        }
        let mut p = vec![0; oa.len()];
        for c in 0..oa.len() {
            p[ob[c]] = oa[c];
        }
        Some(p)
    }

    /// Counts positive minus negative literal occurrences per atom. A
    /// cut-free derivation pairs every literal with its dual, so a nonzero
    /// entry rules out derivability.
    pub fn literal_balance(&self) -> BTreeMap<Arc<str>, i64> {
        literal_balance(self.types.iter().map(|t| &t.symbol))
    }
}

pub fn literal_balance<'a>(symbols: impl Iterator<Item = &'a Symbol>) -> BTreeMap<Arc<str>, i64> {
    let mut m: BTreeMap<Arc<str>, i64> = BTreeMap::new();
    for s in symbols {
        for l in s.literals() {
            *m.entry(l.name.clone()).or_default() += if l.negated { -1 } else { 1 };
        }
    }
    m.retain(|_, v| *v != 0);
    m
}

fn factorial(n: usize) -> usize {
    (1..=n)
        .try_fold(1usize, |a, b| a.checked_mul(b))
        .unwrap_or(usize::MAX)
}

/// Lexicographic successor; returns false (and sorts the slice) at the end.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ts: Vec<String> = self.types.iter().map(|t| t.to_string()).collect();
        write!(f, "{} |- {}", self.term, ts.join(", "))
    }
}

/// The ε-linking of a type with a copy of its dual: edges from each upper
/// index of `x` to the matching upper index of `dual(y)`, and from each lower
/// index of `dual(y)` to the matching lower index of `x`. For literals this
/// is the term of the identity axiom.
pub fn identity_term(x: &TensorType, y: &TensorType) -> Option<TensorTerm> {
    if y.symbol != x.symbol.dual() {
        return None;
    }
    let d = y.dual();
    let mut t = TensorTerm::unit();
    for (a, b) in x.upper.iter().zip(&d.upper) {
        t.insert_edge_raw(a.clone(), Word::empty(), b.clone());
    }
    for (a, b) in d.lower.iter().zip(&x.lower) {
        t.insert_edge_raw(a.clone(), Word::empty(), b.clone());
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(s: &str) -> Index {
        Index::new(s)
    }

    #[test]
    fn literal_dual_reverses_and_swaps() {
        let p = TensorType::lit(
            "p",
            Valency::new(2, 1),
            vec![ix("i"), ix("k")],
            vec![ix("j")],
        )
        .unwrap();
        let d = p.dual();
        assert_eq!(d.upper, vec![ix("j")]);
        assert_eq!(d.lower, vec![ix("k"), ix("i")]);
        assert_eq!(d.dual(), p);
    }

    #[test]
    fn dual_of_binder_swaps_kind() {
        let np = Symbol::lit("NP", Valency::new(1, 1));
        let s = Symbol::lit("S", Valency::new(1, 1));
        let body = Symbol::par(s.clone(), np.dual());
        let nab = Symbol::Nabla(Box::new(body.clone()), Binding { lower: 0, upper: 1 });
        match nab.dual() {
            Symbol::Tri(b, bd) => {
                assert_eq!(*b, body.dual());
                assert_eq!(bd, Binding { lower: 0, upper: 1 });
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(nab.dual().dual(), nab);
    }

    #[test]
    fn next_permutation_cycles() {
        let mut v = vec![0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 6);
        assert_eq!(v, vec![0, 1, 2]);
    }
}
