//! Lambek calculus, its translation into the extended calculus, and
//! Lambek grammars.
//!
//! Slashes become `∇` over a ℘, the product becomes `△` over a ⊗. A
//! sequent `A_1, …, A_n ⊢ A` becomes its Lambek cycle: the judgement over
//! `Ā_n, …, Ā_1, A` whose term links each member to the next by an ε-edge.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::Grammar;
use crate::ettc::ext_prove;
use crate::term::{Index, TensorTerm, Word};
use crate::ttc::{Judgement, Mode, Symbol, TensorType, Valency};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LambekType {
    Atom(String),
    /// `B/A`, stored as `(B, A)`.
    Over(Box<LambekType>, Box<LambekType>),
    /// `A\B`, stored as `(A, B)`.
    Under(Box<LambekType>, Box<LambekType>),
    Prod(Box<LambekType>, Box<LambekType>),
}

impl LambekType {
    pub fn atom(s: &str) -> Self {
        LambekType::Atom(s.to_string())
    }

    pub fn over(b: LambekType, a: LambekType) -> Self {
        LambekType::Over(Box::new(b), Box::new(a))
    }

    pub fn under(a: LambekType, b: LambekType) -> Self {
        LambekType::Under(Box::new(a), Box::new(b))
    }

    pub fn prod(a: LambekType, b: LambekType) -> Self {
        LambekType::Prod(Box::new(a), Box::new(b))
    }

    pub fn connectives(&self) -> usize {
        match self {
            LambekType::Atom(_) => 0,
            LambekType::Over(a, b) | LambekType::Under(a, b) | LambekType::Prod(a, b) => {
                1 + a.connectives() + b.connectives()
            }
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            LambekType::Atom(a) => {
                out.insert(a.clone());
            }
            LambekType::Over(a, b) | LambekType::Under(a, b) | LambekType::Prod(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

impl fmt::Display for LambekType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambekType::Atom(a) => f.write_str(a),
            LambekType::Over(b, a) => write!(f, "({b}/{a})"),
            LambekType::Under(a, b) => write!(f, "({a}\\{b})"),
            LambekType::Prod(a, b) => write!(f, "({a}*{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LambekSequent {
    pub context: Vec<LambekType>,
    pub goal: LambekType,
}

impl LambekSequent {
    pub fn new(context: Vec<LambekType>, goal: LambekType) -> Self {
        LambekSequent { context, goal }
    }

    pub fn connectives(&self) -> usize {
        self.context.iter().map(|t| t.connectives()).sum::<usize>() + self.goal.connectives()
    }
}

impl fmt::Display for LambekSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.context.iter().map(|t| t.to_string()).collect();
        write!(f, "{} |- {}", c.join(", "), self.goal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LcRule {
    Id,
    OverR,
    UnderR,
    ProdR,
    OverL,
    UnderL,
    ProdL,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LcDerivation {
    pub rule: LcRule,
    pub premises: Vec<LcDerivation>,
    pub conclusion: LambekSequent,
}

impl LcDerivation {
    /// Every sequent in the derivation has a nonempty context.
    pub fn satisfies_restriction(&self) -> bool {
        !self.conclusion.context.is_empty()
            && self.premises.iter().all(|p| p.satisfies_restriction())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LcCheckError {
    #[error("{0:?} step does not fit its premises")]
    BadStep(LcRule),
    #[error("empty context under the restriction")]
    Restriction,
}

/// Replays a derivation, checking each step against its premises.
pub fn lc_check(d: &LcDerivation, restricted: bool) -> Result<(), LcCheckError> {
    for p in &d.premises {
        lc_check(p, restricted)?;
    }
    let c = &d.conclusion;
    if restricted && c.context.is_empty() {
        return Err(LcCheckError::Restriction);
    }
    let bad = Err(LcCheckError::BadStep(d.rule));
    let ps: Vec<&LambekSequent> = d.premises.iter().map(|p| &p.conclusion).collect();
    let ok = match d.rule {
        LcRule::Id => ps.is_empty() && c.context.len() == 1 && c.context[0] == c.goal,
        LcRule::OverR => match &c.goal {
            LambekType::Over(b, a) => {
                ps.len() == 1
                    && ps[0].goal == **b
                    && ps[0]
                        .context
                        .split_last()
                        .is_some_and(|(l, rest)| l == &**a && rest == c.context)
            }
            _ => false,
        },
        LcRule::UnderR => match &c.goal {
            LambekType::Under(a, b) => {
                ps.len() == 1
                    && ps[0].goal == **b
                    && ps[0]
                        .context
                        .split_first()
                        .is_some_and(|(f, rest)| f == &**a && rest == c.context)
            }
            _ => false,
        },
        LcRule::ProdR => match &c.goal {
            LambekType::Prod(a, b) => {
                ps.len() == 2
                    && ps[0].goal == **a
                    && ps[1].goal == **b
                    && [ps[0].context.clone(), ps[1].context.clone()].concat() == c.context
            }
            _ => false,
        },
        LcRule::ProdL => {
            ps.len() == 1
                && ps[0].goal == c.goal
                && (0..c.context.len()).any(|k| match &c.context[k] {
                    LambekType::Prod(a, b) => {
                        let mut ctx = c.context.clone();
                        ctx.splice(k..=k, [(**a).clone(), (**b).clone()]);
                        ctx == ps[0].context
                    }
                    _ => false,
                })
        }
        LcRule::OverL | LcRule::UnderL => {
            ps.len() == 2 && ps[1].goal == c.goal && {
                let g = &ps[0].context;
                let n = g.len();
                (0..c.context.len()).any(|k| match (&c.context[k], d.rule) {
                    (LambekType::Over(b, a), LcRule::OverL) => {
                        **a == ps[0].goal
                            && k + n < c.context.len()
                            && c.context[k + 1..k + 1 + n] == g[..]
                            && {
                                let mut ctx = c.context.clone();
                                ctx.splice(k..k + 1 + n, [(**b).clone()]);
                                ctx == ps[1].context
                            }
                    }
                    (LambekType::Under(a, b), LcRule::UnderL) => {
                        **a == ps[0].goal && k >= n && c.context[k - n..k] == g[..] && {
                            let mut ctx = c.context.clone();
                            ctx.splice(k - n..=k, [(**b).clone()]);
                            ctx == ps[1].context
                        }
                    }
                    _ => false,
                })
            }
        }
    };
    if ok {
        Ok(())
    } else {
        bad
    }
}

/// Cut-free backward search. Under `restricted` every sequent of the
/// derivation keeps a nonempty context.
pub fn lc_prove(s: &LambekSequent, restricted: bool) -> Option<LcDerivation> {
    let mut p = LcProver {
        restricted,
        memo: FxHashMap::default(),
    };
    p.prove(&s.context, &s.goal)
}

struct LcProver {
    restricted: bool,
    memo: FxHashMap<(Vec<LambekType>, LambekType), Option<LcDerivation>>,
}

impl LcProver {
    fn prove(&mut self, ctx: &[LambekType], goal: &LambekType) -> Option<LcDerivation> {
        if self.restricted && ctx.is_empty() {
            return None;
        }
        let key = (ctx.to_vec(), goal.clone());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let r = self.search(ctx, goal);
        self.memo.insert(key, r.clone());
        r
    }

    fn search(&mut self, ctx: &[LambekType], goal: &LambekType) -> Option<LcDerivation> {
        let concl = LambekSequent::new(ctx.to_vec(), goal.clone());
        let node = |rule, premises| {
            Some(LcDerivation {
                rule,
                premises,
                conclusion: concl.clone(),
            })
        };
        if ctx.len() == 1 && ctx[0] == *goal {
            return node(LcRule::Id, vec![]);
        }
        // invertible rules first
        match goal {
            LambekType::Over(b, a) => {
                let mut c = ctx.to_vec();
                c.push((**a).clone());
                let p = self.prove(&c, b)?;
                return node(LcRule::OverR, vec![p]);
            }
            LambekType::Under(a, b) => {
                let mut c = vec![(**a).clone()];
                c.extend_from_slice(ctx);
                let p = self.prove(&c, b)?;
                return node(LcRule::UnderR, vec![p]);
            }
            _ => {}
        }
        for k in 0..ctx.len() {
            if let LambekType::Prod(a, b) = &ctx[k] {
                let mut c = ctx.to_vec();
                c.splice(k..=k, [(**a).clone(), (**b).clone()]);
                let p = self.prove(&c, goal)?;
                return node(LcRule::ProdL, vec![p]);
            }
        }
        if let LambekType::Prod(a, b) = goal {
            for cut in 0..=ctx.len() {
                let Some(p1) = self.prove(&ctx[..cut], a) else {
                    continue;
                };
                let Some(p2) = self.prove(&ctx[cut..], b) else {
                    continue;
                };
                return node(LcRule::ProdR, vec![p1, p2]);
            }
        }
        let min = usize::from(self.restricted);
        for k in 0..ctx.len() {
            match &ctx[k] {
                LambekType::Over(b, a) => {
                    for n in min..ctx.len() - k {
                        let g = &ctx[k + 1..k + 1 + n];
                        let mut rest = ctx[..k].to_vec();
                        rest.push((**b).clone());
                        rest.extend_from_slice(&ctx[k + 1 + n..]);
                        let Some(p1) = self.prove(g, a) else { continue };
                        let Some(p2) = self.prove(&rest, goal) else {
                            continue;
                        };
                        return node(LcRule::OverL, vec![p1, p2]);
                    }
                }
                LambekType::Under(a, b) => {
                    for n in min..=k {
                        let g = &ctx[k - n..k];
                        let mut rest = ctx[..k - n].to_vec();
                        rest.push((**b).clone());
                        rest.extend_from_slice(&ctx[k + 1..]);
                        let Some(p1) = self.prove(g, a) else { continue };
                        let Some(p2) = self.prove(&rest, goal) else {
                            continue;
                        };
                        return node(LcRule::UnderL, vec![p1, p2]);
                    }
                }
                _ => {}
            }
        }
        None
    }
}

/// Tensor type of valency (1,1) translating `a`, decorated `^i_j`.
pub fn translate_typed(a: &LambekType, i: &Index, j: &Index) -> TensorType {
    const ERR: &str = "translation is well formed";
    match a {
        LambekType::Atom(p) => {
            TensorType::lit(p, Valency::new(1, 1), vec![i.clone()], vec![j.clone()]).expect(ERR)
        }
        LambekType::Over(b, x) => {
            let (al, be) = (Index::fresh(), Index::fresh());
            let body = TensorType::par(
                &translate_typed(b, i, &al),
                &translate_typed(x, j, &be).dual(),
            )
            .expect(ERR);
            TensorType::nabla(&body, &al, &be).expect(ERR)
        }
        LambekType::Under(x, b) => {
            let (al, be) = (Index::fresh(), Index::fresh());
            let body = TensorType::par(
                &translate_typed(x, &al, i).dual(),
                &translate_typed(b, &be, j),
            )
            .expect(ERR);
            TensorType::nabla(&body, &al, &be).expect(ERR)
        }
        LambekType::Prod(x, y) => {
            let (al, be) = (Index::fresh(), Index::fresh());
            let body = TensorType::tensor(&translate_typed(x, i, &al), &translate_typed(y, &be, j))
                .expect(ERR);
            TensorType::tri(&body, &al, &be).expect(ERR)
        }
    }
}

pub fn translate_lambek_type(a: &LambekType) -> Symbol {
    translate_typed(a, &Index::new("i"), &Index::new("j")).symbol
}

/// Every ℘ sits directly under a `∇` binding one index on each side.
pub fn locally_connected(s: &Symbol) -> bool {
    match s {
        Symbol::Lit(_) => true,
        Symbol::Par(..) => false,
        Symbol::Tensor(a, b) => locally_connected(a) && locally_connected(b),
        Symbol::Nabla(body, bd) => match &**body {
            Symbol::Par(a, b) => {
                let va = a.valency();
                let alpha_left = bd.lower < va.down;
                let beta_left = bd.upper < va.up;
                alpha_left != beta_left && locally_connected(a) && locally_connected(b)
            }
            other => locally_connected(other),
        },
        Symbol::Tri(body, _) => locally_connected(body),
    }
}

/// Lambek cycle of a cyclic sequence of (1,1) symbols.
pub fn cycle_of(symbols: &[Symbol]) -> Judgement {
    let m = symbols.len();
    let is: Vec<Index> = (1..=m).map(|k| Index::new(&format!("i{k}"))).collect();
    let js: Vec<Index> = (1..=m).map(|k| Index::new(&format!("j{k}"))).collect();
    let types: Vec<TensorType> = symbols
        .iter()
        .enumerate()
        .map(|(k, s)| {
            TensorType::new(s.clone(), vec![is[k].clone()], vec![js[k].clone()])
                .expect("valency (1,1)")
        })
        .collect();
    let mut term = TensorTerm::unit();
    if m > 0 {
        term.insert_edge_raw(is[0].clone(), Word::empty(), js[m - 1].clone());
        for k in 1..m {
            term.insert_edge_raw(is[k].clone(), Word::empty(), js[k - 1].clone());
        }
    }
    Judgement::new(term, types).expect("cycle is well formed")
}

/// Cycle over `Ā_n, …, Ā_1, A`.
pub fn lambek_cycle(s: &LambekSequent) -> Judgement {
    let mut syms: Vec<Symbol> = s
        .context
        .iter()
        .rev()
        .map(|t| translate_lambek_type(t).dual())
        .collect();
    syms.push(translate_lambek_type(&s.goal));
    cycle_of(&syms)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EmbedOutcome {
    AgreeDerivable,
    AgreeUnderivable,
    Mismatch { lambek: bool, tensor: bool },
}

impl EmbedOutcome {
    pub fn agrees(&self) -> bool {
        !matches!(self, EmbedOutcome::Mismatch { .. })
    }
}

pub fn mode_for(restricted: bool) -> Mode {
    if restricted {
        Mode::LambekRestricted
    } else {
        Mode::Full
    }
}

/// Compares the Lambek prover with proof search on the Lambek cycle.
pub fn embed_check(s: &LambekSequent, restricted: bool) -> EmbedOutcome {
    let l = lc_prove(s, restricted).is_some();
    let t = ext_prove(&lambek_cycle(s), mode_for(restricted)).is_some();
    match (l, t) {
        (true, true) => EmbedOutcome::AgreeDerivable,
        (false, false) => EmbedOutcome::AgreeUnderivable,
        _ => EmbedOutcome::Mismatch {
            lambek: l,
            tensor: t,
        },
    }
}

// ---- grammars ----

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambekParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
}

#[derive(Debug, Clone, Serialize)]
pub struct LambekGrammar {
    pub lexicon: Vec<(String, LambekType)>,
    pub start: String,
    pub restricted: bool,
}

impl LambekGrammar {
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.insert(self.start.clone());
        for (_, t) in &self.lexicon {
            t.atoms(&mut out);
        }
        out
    }

    pub fn terminals(&self) -> BTreeSet<String> {
        self.lexicon.iter().map(|(w, _)| w.clone()).collect()
    }

    /// Whether `words` is in type `target`: some choice of lexical types
    /// gives a derivable sequent.
    pub fn generates_in(&self, words: &[String], target: &LambekType) -> Option<LcDerivation> {
        if words.is_empty() {
            return None;
        }
        let options: Vec<Vec<&LambekType>> = words
            .iter()
            .map(|w| {
                self.lexicon
                    .iter()
                    .filter(|(v, _)| v == w)
                    .map(|(_, t)| t)
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; words.len()];
        let mut prover = LcProver {
            restricted: self.restricted,
            memo: FxHashMap::default(),
        };
        loop {
            if options.iter().any(|o| o.is_empty()) {
                return None;
            }
            let ctx: Vec<LambekType> = pick
                .iter()
                .zip(&options)
                .map(|(&k, o)| o[k].clone())
                .collect();
            if let Some(d) = prover.prove(&ctx, target) {
                return Some(d);
            }
            let mut k = 0;
            loop {
                if k == pick.len() {
                    return None;
                }
                pick[k] += 1;
                if pick[k] < options[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }
}

/// Extended grammar with one lexical axiom `[w]_j^i ⊢ A^j_i` per entry.
pub fn translate_lambek_grammar(g: &LambekGrammar) -> Grammar {
    let mut literals = BTreeMap::new();
    for a in g.atoms() {
        literals.insert(a, Valency::new(1, 1));
    }
    let (i, j) = (Index::new("i"), Index::new("j"));
    let mut axioms = Vec::new();
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for (w, t) in &g.lexicon {
        let term = TensorTerm::single(Word::parse(w), j.clone(), i.clone());
        let ty = translate_typed(t, &j, &i);
        let jd = Judgement::new(term, vec![ty]).expect("lexical axiom is well formed");
        let n = count.entry(w).or_insert(0);
        *n += 1;
        let name = if *n == 1 {
            w.clone()
        } else {
            format!("{w}{n}")
        };
        axioms.push((name, crate::engine::prettify(&jd)));
    }
    let terminals = g.terminals().into_iter().collect();
    Grammar::new(
        literals,
        terminals,
        axioms,
        g.start.clone(),
        mode_for(g.restricted),
    )
}

struct TyParser<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

fn tokenize(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in s.char_indices() {
        if "()/\\*".contains(c) || c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push(&s[st..k]);
            }
            if !c.is_whitespace() {
                out.push(&s[k..k + c.len_utf8()]);
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

impl<'a> TyParser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    // product binds loosest, `/` is left- and `\` right-associative, `\`
    // binding tighter than `/` so that `np\s/np` reads `(np\s)/np`
    fn prod(&mut self) -> Result<LambekType, String> {
        let mut a = self.over()?;
        while self.peek() == Some("*") {
            self.pos += 1;
            a = LambekType::prod(a, self.over()?);
        }
        Ok(a)
    }

    fn over(&mut self) -> Result<LambekType, String> {
        let mut a = self.under()?;
        while self.peek() == Some("/") {
            self.pos += 1;
            a = LambekType::over(a, self.under()?);
        }
        Ok(a)
    }

    fn under(&mut self) -> Result<LambekType, String> {
        let a = self.prim()?;
        if self.peek() == Some("\\") {
            self.pos += 1;
            return Ok(LambekType::under(a, self.under()?));
        }
        Ok(a)
    }

    fn prim(&mut self) -> Result<LambekType, String> {
        match self.peek() {
            Some("(") => {
                self.pos += 1;
                let t = self.prod()?;
                if self.peek() != Some(")") {
                    return Err("expected ')'".into());
                }
                self.pos += 1;
                Ok(t)
            }
            Some(t) if t.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                self.pos += 1;
                Ok(LambekType::atom(t))
            }
            Some(t) => Err(format!("unexpected '{t}'")),
            None => Err("unexpected end of type".into()),
        }
    }
}

pub fn parse_lambek_type(s: &str) -> Result<LambekType, String> {
    let mut p = TyParser {
        toks: tokenize(s),
        pos: 0,
    };
    let t = p.prod()?;
    if p.pos != p.toks.len() {
        return Err(format!("unexpected '{}'", p.toks[p.pos]));
    }
    Ok(t)
}

/// `A1, A2 |- B` with Lambek types.
pub fn parse_lambek_sequent(s: &str) -> Result<LambekSequent, String> {
    let (l, r) = s.split_once("|-").ok_or("expected '|-'")?;
    let context = if l.trim().is_empty() {
        Vec::new()
    } else {
        l.split(',')
            .map(parse_lambek_type)
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(LambekSequent::new(context, parse_lambek_type(r)?))
}

/// Lexicon file: `word : TYPE` lines, `start: S`, `restriction: on|off`.
pub fn parse_lexicon(src: &str) -> Result<LambekGrammar, LambekParseError> {
    let mut lexicon = Vec::new();
    let mut start = None;
    let mut restricted = true;
    for (n, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| LambekParseError::Line(n + 1, m);
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| err("expected 'word : TYPE'".into()))?;
        let (head, rest) = (head.trim(), rest.trim());
        match head {
            "start" => start = Some(rest.to_string()),
            "restriction" => {
                restricted = match rest {
                    "on" => true,
                    "off" => false,
                    o => return Err(err(format!("restriction must be on or off, got {o}"))),
                }
            }
            w => lexicon.push((w.to_string(), parse_lambek_type(rest).map_err(err)?)),
        }
    }
    let start = start.ok_or(LambekParseError::Line(0, "missing start".into()))?;
    Ok(LambekGrammar {
        lexicon,
        start,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> LambekSequent {
        parse_lambek_sequent(s).unwrap()
    }

    #[test]
    fn slash_precedence() {
        assert_eq!(
            parse_lambek_type("np\\s/np").unwrap().to_string(),
            "((np\\s)/np)"
        );
        assert_eq!(parse_lambek_type("a/b/c").unwrap().to_string(), "((a/b)/c)");
        assert_eq!(
            parse_lambek_type("a\\b\\c").unwrap().to_string(),
            "(a\\(b\\c))"
        );
    }

    #[test]
    fn restriction_blocks_empty_context() {
        assert!(lc_prove(&seq("|- a/a"), false).is_some());
        assert!(lc_prove(&seq("|- a/a"), true).is_none());
        assert!(lc_prove(&seq("np, np\\s |- s"), true).is_some());
    }

    #[test]
    fn derivations_replay() {
        for s in [
            "a, a\\b |- b",
            "a, b |- a*b",
            "a*b |- a*b",
            "a/b, b/c |- a/c",
            "a |- b/(a\\b)",
        ] {
            let d = lc_prove(&seq(s), true).unwrap();
            lc_check(&d, true).unwrap();
            assert!(d.satisfies_restriction());
        }
    }

    #[test]
    fn translated_types_are_local() {
        for s in ["a/b", "a\\(b*c)", "(a/b)\\(c*(d/e))"] {
            let t = translate_lambek_type(&parse_lambek_type(s).unwrap());
            assert!(locally_connected(&t), "{s}");
            assert!(locally_connected(&t.dual()), "dual of {s}");
            assert_eq!(t.valency(), Valency::new(1, 1));
        }
    }

    #[test]
    fn cycles_agree_on_small_sequents() {
        for s in [
            "a |- a",
            "a, a\\b |- b",
            "a, b |- a*b",
            "a |- b",
            "|- a/a",
            "b/a, a |- b",
            "a*b |- b*a",
        ] {
            for r in [false, true] {
                assert!(embed_check(&seq(s), r).agrees(), "{s} restricted={r}");
            }
        }
    }
}
