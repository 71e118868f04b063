//! Seeded randomized checks, shared by the acceptance tests and the
//! `selftest` command. Each suite returns a report instead of panicking so
//! that callers can print one line per suite.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::engine::{enumerate, generates, joined, recheck, Grammar, ParseOutcome};
use crate::ettc::{ext_eliminate_cut, may_be_derivable};
use crate::lambda_acg::{
    acg_language, acg_translate, beta_eta_equivalent, inverse_translate, normal_terms, parse_acg,
    phi_symbol, tr_type, translate_judgement, Acg, ImplType, InverseSignature, LambdaJudgement,
    LambdaSignature, LambdaTerm, TensorTranslation,
};
use crate::lambek::{embed_check, LambekGrammar, LambekSequent, LambekType};
use crate::syntax::parse_script;
use crate::term::{delta_seq, multiply, normalize, Factor, Index, TensorTerm, TermExpr, Word};
use crate::ttc::{
    build_from_script, check, eliminate_cut, eta_identity, AxiomPool, Budget, Derivation, Mode,
    Rule, TensorType, Valency,
};

/// Fixture sources, compiled in so that the checks run from any directory.
pub mod fixtures {
    pub const JOHN_LOVES_MARY: &str = include_str!("../../../fixtures/john_loves_mary.tg");
    pub const ELABORATE: &str = include_str!("../../../fixtures/elaborate.tg");
    pub const TOY_ACG: &str = include_str!("../../../fixtures/toy.acg");
    pub const LAMBEK_LEXICON: &str = include_str!("../../../fixtures/lambek.lex");
}

/// Outcome of one suite. Only the first few failures keep a message.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub examples: Vec<String>,
    pub seconds: f64,
}

const KEPT_EXAMPLES: usize = 5;

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            failed: 0,
            examples: Vec::new(),
            seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn case(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.examples.len() < KEPT_EXAMPLES {
            self.examples.push(msg);
        }
    }

    fn timed(mut self, start: Instant) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        self
    }

    /// Adds the cases and failures of `other` into `self`.
    fn absorb(&mut self, other: SuiteReport) {
        self.cases += other.cases;
        self.failed += other.failed;
        for e in other.examples {
            if self.examples.len() < KEPT_EXAMPLES {
                self.examples.push(format!("{}: {e}", other.name));
            }
        }
    }
}

// ---- terms ----

fn show_expr(t: &TermExpr) -> String {
    let parts: Vec<String> = t
        .factors()
        .iter()
        .map(|f| match f {
            Factor::Edge { word, lower, upper } => format!("[{word}]_{lower}^{upper}"),
            Factor::Loop(w) => format!("[{w}]"),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" * ")
    }
}

fn random_word(rng: &mut StdRng) -> Word {
    let n = rng.gen_range(0..=2);
    let syms: Vec<&str> = (0..n)
        .map(|_| *["a", "b", "c"].choose(rng).expect("nonempty"))
        .collect();
    Word::from_symbols(&syms)
}

/// A random expression over a small index pool, so that many indices end
/// up bound. `[w]_i^i` factors occur.
pub fn random_expr(rng: &mut StdRng, max_factors: usize) -> TermExpr {
    let pool: Vec<Index> = (0..8).map(|k| Index::new(&format!("a{k}"))).collect();
    let n = rng.gen_range(0..=max_factors);
    let (mut lows, mut ups) = (BTreeSet::new(), BTreeSet::new());
    let mut factors = Vec::new();
    for _ in 0..n {
        if rng.gen_bool(0.1) {
            factors.push(Factor::Loop(random_word(rng)));
            continue;
        }
        let free_low: Vec<&Index> = pool.iter().filter(|i| !lows.contains(*i)).collect();
        let free_up: Vec<&Index> = pool.iter().filter(|i| !ups.contains(*i)).collect();
        let (Some(&l), Some(&u)) = (free_low.choose(rng), free_up.choose(rng)) else {
            break;
        };
        lows.insert(l.clone());
        ups.insert(u.clone());
        factors.push(Factor::edge(random_word(rng), l.clone(), u.clone()));
    }
    TermExpr::new(factors).expect("indices chosen apart")
}

/// Contracts one bound index at a time, in random order. Independent of
/// [`normalize`], which follows whole paths.
fn contract_stepwise(t: &TermExpr, rng: &mut StdRng) -> TensorTerm {
    let mut edges: Vec<(Index, Vec<String>, Index)> = Vec::new();
    let mut loops: Vec<Word> = Vec::new();
    for f in t.factors() {
        match f {
            Factor::Edge { word, lower, upper } => edges.push((
                lower.clone(),
                word.0.iter().map(|s| s.to_string()).collect(),
                upper.clone(),
            )),
            Factor::Loop(w) => loops.push(w.clone()),
        }
    }
    loop {
        let bound: Vec<Index> = edges
            .iter()
            .filter(|(_, _, u)| edges.iter().any(|(l, _, _)| l == u))
            .map(|e| e.2.clone())
            .collect();
        let Some(i) = bound.choose(rng).cloned() else {
            break;
        };
        let a = edges
            .iter()
            .position(|e| e.2 == i)
            .expect("upper occurrence");
        let b = edges
            .iter()
            .position(|e| e.0 == i)
            .expect("lower occurrence");
        if a == b {
            let (_, w, _) = edges.remove(a);
            loops.push(Word::from_symbols(&w));
            continue;
        }
        let (hi, lo) = (a.max(b), a.min(b));
        let e_hi = edges.remove(hi);
        let e_lo = edges.remove(lo);
        let (ea, eb) = if a > b { (e_hi, e_lo) } else { (e_lo, e_hi) };
        let mut w = ea.1;
        w.extend(eb.1);
        edges.push((ea.0, w, eb.2));
    }
    let mut out = TensorTerm::unit();
    for (l, w, u) in edges {
        out.insert_edge_raw(l, Word::from_symbols(&w), u);
    }
    for w in loops {
        out.push_loop(w);
    }
    out
}

fn split_at(t: &TermExpr, k: usize) -> (TermExpr, TermExpr) {
    let f = t.factors();
    (
        TermExpr::new(f[..k].to_vec()).expect("sub-product"),
        TermExpr::new(f[k..].to_vec()).expect("sub-product"),
    )
}

/// The term-engine properties for one expression; `rng` picks the splits,
/// shuffles and renamings.
pub fn check_expr(t: &TermExpr, rng: &mut StdRng) -> Result<(), String> {
    let n = normalize(t);
    if normalize(&n.to_expr()) != n {
        return Err("normalization is not idempotent".into());
    }
    let mut shuffled = t.factors().to_vec();
    shuffled.shuffle(rng);
    let shuffled = TermExpr::new(shuffled).expect("same factors");
    if normalize(&shuffled) != n {
        return Err("normal form depends on factor order".into());
    }
    if contract_stepwise(&shuffled, rng) != n {
        return Err("stepwise contraction disagrees with the normal form".into());
    }
    let len = t.factors().len();
    let k = rng.gen_range(0..=len);
    let (a, b) = split_at(t, k);
    let ba = multiply(&b, &a).map_err(|e| e.to_string())?;
    if !crate::term::congruent(&ba, t) {
        return Err(format!("product does not commute at split {k}"));
    }
    let k2 = rng.gen_range(k..=len);
    let (b1, c) = split_at(&b, k2 - k);
    let (na, nb, nc) = (normalize(&a), normalize(&b1), normalize(&c));
    let left = na
        .multiply(&nb)
        .and_then(|ab| ab.multiply(&nc))
        .map_err(|e| e.to_string())?;
    let right = nb
        .multiply(&nc)
        .and_then(|bc| na.multiply(&bc))
        .map_err(|e| e.to_string())?;
    if left != right || left != n {
        return Err(format!("product is not associative at splits {k}, {k2}"));
    }
    // renaming by deltas
    let mut map = BTreeMap::new();
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for (c, i) in n.free_sup().into_iter().enumerate() {
        if rng.gen_bool(0.7) {
            let r = Index::new(&format!("r{c}"));
            lower.push(i.clone());
            upper.push(r.clone());
            map.insert(i, r);
        }
    }
    for (c, j) in n.free_sub().into_iter().enumerate() {
        if rng.gen_bool(0.7) {
            let r = Index::new(&format!("s{c}"));
            lower.push(r.clone());
            upper.push(j.clone());
            map.insert(j, r);
        }
    }
    let deltas = delta_seq(&lower, &upper).map_err(|e| e.to_string())?;
    let renamed = n.rename_free(&map).map_err(|e| e.to_string())?;
    let by_deltas = normalize(&multiply(&deltas, t).map_err(|e| e.to_string())?);
    if renamed != by_deltas {
        return Err(format!(
            "delta product {} differs from renaming {renamed}",
            by_deltas
        ));
    }
    Ok(())
}

/// Normal forms: idempotence, independence of contraction order,
/// commutativity and associativity of products, renaming by deltas.
pub fn term_suite(cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = SuiteReport::new("terms");
    for _ in 0..cases {
        let t = random_expr(&mut rng, 8);
        let res = check_expr(&t, &mut rng);
        r.case(res.is_ok(), || {
            format!("{}: {}", show_expr(&t), res.unwrap_err())
        });
    }
    r.timed(start)
}

// ---- cut elimination ----

struct DerivationGen {
    rng: StdRng,
    mode: Mode,
    pool: AxiomPool,
}

impl DerivationGen {
    fn literal(&mut self) -> TensorType {
        let (name, v) = *[
            ("p", Valency::new(1, 1)),
            ("q", Valency::new(1, 1)),
            ("o", Valency::new(1, 0)),
        ]
        .choose(&mut self.rng)
        .expect("nonempty");
        let up = (0..v.up).map(|_| Index::fresh()).collect();
        let down = (0..v.down).map(|_| Index::fresh()).collect();
        let t = TensorType::lit(name, v, up, down).expect("fresh indices");
        if self.rng.gen_bool(0.5) {
            t.dual()
        } else {
            t
        }
    }

    fn ty(&mut self, connectives: usize) -> TensorType {
        if connectives == 0 {
            return self.literal();
        }
        if self.mode.allows_binders() && self.rng.gen_bool(0.3) {
            let body = self.ty(connectives - 1);
            if let (Some(a), Some(b)) = (
                body.lower.choose(&mut self.rng).cloned(),
                body.upper.choose(&mut self.rng).cloned(),
            ) {
                let bound = if self.rng.gen_bool(0.5) {
                    TensorType::nabla(&body, &a, &b)
                } else {
                    TensorType::tri(&body, &a, &b)
                };
                if let Ok(t) = bound {
                    return t;
                }
            }
            return body;
        }
        let k = self.rng.gen_range(0..connectives);
        let a = self.ty(k);
        let b = self.ty(connectives - 1 - k);
        let t = if self.rng.gen_bool(0.5) {
            TensorType::tensor(&a, &b)
        } else {
            TensorType::par(&a, &b)
        };
        t.expect("fresh indices")
    }

    fn leaf(&mut self) -> Derivation {
        let c = self.rng.gen_range(0..=1);
        let t = self.ty(c);
        eta_identity(&t, self.mode)
    }

    fn infer(&self, rule: Rule, premises: Vec<Derivation>) -> Option<Derivation> {
        Derivation::infer(rule, premises, &self.pool, self.mode).ok()
    }

    fn gen(&mut self, depth: usize) -> Derivation {
        if depth <= 2 || self.rng.gen_bool(0.15) {
            return self.leaf();
        }
        let kinds = if self.mode.allows_binders() { 6 } else { 4 };
        match self.rng.gen_range(0..kinds) {
            0 => self.cut(depth),
            1 => {
                let a = self.gen(depth - 1);
                let b = self.gen(depth - 1);
                let l = self.rng.gen_range(0..a.conclusion.types.len());
                let r = self.rng.gen_range(0..b.conclusion.types.len());
                let fallback = a.clone();
                self.infer(Rule::Tensor { left: l, right: r }, vec![a, b])
                    .unwrap_or(fallback)
            }
            2 => {
                let a = self.gen(depth - 1);
                self.par_somewhere(a, None).0
            }
            3 => {
                let a = self.gen(depth - 1);
                let mut perm: Vec<usize> = (0..a.conclusion.types.len()).collect();
                perm.shuffle(&mut self.rng);
                a.permuted(perm)
            }
            _ => {
                let a = self.gen(depth - 1);
                self.bind_somewhere(a)
            }
        }
    }

    /// A cut whose right premise is built around the dual of a member of
    /// the left one.
    fn cut(&mut self, depth: usize) -> Derivation {
        let a = self.gen(depth - 1);
        let k = self.rng.gen_range(0..a.conclusion.types.len());
        let target = a.conclusion.types[k].clone();
        let (b, pos) = self.with_dual(&target, depth - 1);
        let fallback = a.clone();
        self.infer(
            Rule::Cut {
                left: k,
                right: pos,
            },
            vec![a, b],
        )
        .unwrap_or(fallback)
    }

    /// Derivation with a member dual to `t`, and that member's position.
    fn with_dual(&mut self, t: &TensorType, depth: usize) -> (Derivation, usize) {
        let mut d = eta_identity(t, self.mode);
        let mut pos = 0;
        for _ in 0..self.rng.gen_range(0..=2) {
            if depth < 3 {
                break;
            }
            match self.rng.gen_range(0..3) {
                0 => {
                    let other = self.leaf();
                    let n = d.conclusion.types.len();
                    let l = (0..n).filter(|&x| x != pos).collect::<Vec<_>>();
                    let Some(&l) = l.choose(&mut self.rng) else {
                        continue;
                    };
                    let r = self.rng.gen_range(0..other.conclusion.types.len());
                    if let Some(e) =
                        self.infer(Rule::Tensor { left: l, right: r }, vec![d.clone(), other])
                    {
                        d = e;
                    }
                }
                1 => {
                    let (e, p) = self.par_somewhere(d, Some(pos));
                    d = e;
                    pos = p.expect("tracked");
                }
                _ => {
                    let mut perm: Vec<usize> = (0..d.conclusion.types.len()).collect();
                    perm.shuffle(&mut self.rng);
                    pos = perm.iter().position(|&x| x == pos).expect("permutation");
                    d = d.permuted(perm);
                }
            }
        }
        (d, pos)
    }

    /// Joins two random members other than `keep`; returns the new
    /// position of `keep`.
    fn par_somewhere(&mut self, d: Derivation, keep: Option<usize>) -> (Derivation, Option<usize>) {
        let n = d.conclusion.types.len();
        let free: Vec<usize> = (0..n).filter(|&x| Some(x) != keep).collect();
        if free.len() < 2 {
            return (d, keep);
        }
        let mut pick = free.choose_multiple(&mut self.rng, 2).copied();
        let (f, s) = (pick.next().expect("two"), pick.next().expect("two"));
        let at = f.min(s);
        let Some(e) = self.infer(
            Rule::Par {
                first: f,
                second: s,
            },
            vec![d.clone()],
        ) else {
            return (d, keep);
        };
        let moved = keep.map(|p| {
            let mut q = 0;
            for x in 0..p {
                if x == at || (x != f && x != s) {
                    q += 1;
                }
            }
            q
        });
        (e, moved)
    }

    fn bind_somewhere(&mut self, d: Derivation) -> Derivation {
        let mut options = Vec::new();
        for (pos, t) in d.conclusion.types.iter().enumerate() {
            for lower in 0..t.lower.len() {
                for upper in 0..t.upper.len() {
                    options.push(Rule::Nabla { pos, lower, upper });
                    options.push(Rule::Tri { pos, lower, upper });
                }
            }
        }
        options.shuffle(&mut self.rng);
        for r in options {
            if let Some(e) = self.infer(r, vec![d.clone()]) {
                return e;
            }
        }
        d
    }
}

/// Cut elimination on `d`: cut-free output with the same conclusion.
pub fn check_cut_elimination(d: &Derivation, mode: Mode) -> Result<(), String> {
    let pool = AxiomPool::new();
    check(d, &pool, mode).map_err(|e| format!("generated derivation does not check: {e}"))?;
    if d.conclusion.is_regular() && !may_be_derivable(&d.conclusion) {
        return Err(format!(
            "linking check refutes a derivable judgement: {}",
            d.conclusion
        ));
    }
    let out = if mode.allows_binders() {
        ext_eliminate_cut(d, mode)
    } else {
        eliminate_cut(d, mode)
    };
    let out = out.map_err(|e| e.to_string())?;
    if !out.is_cut_free() {
        return Err("output has cuts".into());
    }
    let concl = check(&out, &pool, mode).map_err(|e| format!("output does not check: {e}"))?;
    if !concl.alpha_eq_ordered(&d.conclusion) {
        return Err(format!("conclusion changed: {concl} vs {}", d.conclusion));
    }
    Ok(())
}

/// Random cut-carrying pure derivations of depth at most `max_depth`.
pub fn random_derivations(
    mode: Mode,
    count: usize,
    max_depth: usize,
    seed: u64,
) -> Vec<Derivation> {
    let mut g = DerivationGen {
        rng: StdRng::seed_from_u64(seed),
        mode,
        pool: AxiomPool::new(),
    };
    let mut out = Vec::new();
    while out.len() < count {
        let depth = g.rng.gen_range(3..=max_depth);
        let d = g.gen(depth);
        if d.depth() <= max_depth && !d.is_cut_free() {
            out.push(d);
        }
    }
    out
}

/// Cut elimination on random pure derivations, half TTC and half ETTC.
pub fn cut_suite(cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("cut elimination");
    let ttc = cases / 2;
    for (mode, n, s) in [
        (Mode::Ttc, ttc, seed),
        (Mode::Full, cases - ttc, seed.wrapping_add(1)),
    ] {
        for d in random_derivations(mode, n, 6, s) {
            let res = check_cut_elimination(&d, mode);
            r.case(res.is_ok(), || {
                format!("{mode:?} {}: {}", d.conclusion, res.unwrap_err())
            });
        }
    }
    r.timed(start)
}

// ---- Lambek ----

fn random_lambek_type(rng: &mut StdRng, connectives: usize) -> LambekType {
    if connectives == 0 {
        return LambekType::atom(["a", "b"].choose(rng).expect("nonempty"));
    }
    let k = rng.gen_range(0..connectives);
    let x = random_lambek_type(rng, k);
    let y = random_lambek_type(rng, connectives - 1 - k);
    match rng.gen_range(0..5) {
        0 | 1 => LambekType::over(x, y),
        2 | 3 => LambekType::under(x, y),
        _ => LambekType::prod(x, y),
    }
}

/// A random sequent with at most `max_connectives` connectives and a
/// nonempty antecedent.
pub fn random_sequent(rng: &mut StdRng, max_connectives: usize) -> LambekSequent {
    let c = rng.gen_range(0..=max_connectives);
    let n = rng.gen_range(1..=3);
    let mut cuts: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=c)).collect();
    cuts.sort();
    let mut parts = Vec::new();
    let mut prev = 0;
    for k in cuts {
        parts.push(k - prev);
        prev = k;
    }
    parts.push(c - prev);
    let goal = random_lambek_type(rng, parts.pop().expect("goal part"));
    let context = parts
        .into_iter()
        .map(|k| random_lambek_type(rng, k))
        .collect();
    LambekSequent::new(context, goal)
}

/// Random sequents, about half of them derivable in the unrestricted
/// calculus (kept by rejection), checked in both modes.
pub fn lambek_suite(cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = SuiteReport::new("Lambek conservativity");
    for n in 0..cases {
        let mut s = random_sequent(&mut rng, 6);
        if n % 2 == 0 {
            for _ in 0..500 {
                if crate::lambek::lc_prove(&s, false).is_some() {
                    break;
                }
                s = random_sequent(&mut rng, 6);
            }
        }
        for restricted in [false, true] {
            let o = embed_check(&s, restricted);
            r.case(o.agrees(), || {
                format!("{s} (restricted: {restricted}): {o:?}")
            });
        }
    }
    r.timed(start)
}

/// Every word up to `max_len` is in the start type on the Lambek side
/// iff the translated grammar generates it.
pub fn lambek_grammar_suite(g: &LambekGrammar, max_len: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("Lambek grammar");
    let tg = crate::lambek::translate_lambek_grammar(g);
    let e = match enumerate(&tg, max_len, &Budget::default()) {
        Ok(e) => e,
        Err(err) => {
            r.fail(err.to_string());
            return r.timed(start);
        }
    };
    for w in &e.inconclusive {
        r.fail(format!("inconclusive: {}", w.join(" ")));
    }
    let terms: Vec<String> = g.terminals().into_iter().collect();
    let goal = LambekType::atom(&g.start);
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                terms
                    .iter()
                    .map(move |t| [w.clone(), vec![t.clone()]].concat())
            })
            .collect();
        for w in &layer {
            let lc = g.generates_in(w, &goal).is_some();
            let tensor = e.words.contains(w);
            r.case(lc == tensor, || {
                format!("{}: Lambek {lc}, tensor {tensor}", w.join(" "))
            });
        }
    }
    r.timed(start)
}

// ---- ACG ----

fn string_sig() -> LambdaSignature {
    LambdaSignature::string(["a".to_string(), "b".to_string()])
}

fn str_tr(sig: &LambdaSignature) -> TensorTranslation {
    TensorTranslation::string(sig.constants.keys().cloned())
}

fn o() -> ImplType {
    ImplType::atom(crate::lambda_acg::STRING_ATOM)
}

/// Paths to every subterm; a path step picks the function (0), the
/// argument (1) or the body (0).
fn paths(t: &LambdaTerm, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    out.push(prefix.clone());
    match t {
        LambdaTerm::App(f, a) => {
            prefix.push(0);
            paths(f, prefix, out);
            prefix.pop();
            prefix.push(1);
            paths(a, prefix, out);
            prefix.pop();
        }
        LambdaTerm::Abs(_, b) => {
            prefix.push(0);
            paths(b, prefix, out);
            prefix.pop();
        }
        _ => {}
    }
}

fn at(t: &LambdaTerm, path: &[u8]) -> LambdaTerm {
    match (path.first(), t) {
        (None, _) => t.clone(),
        (Some(0), LambdaTerm::App(f, _)) => at(f, &path[1..]),
        (Some(1), LambdaTerm::App(_, a)) => at(a, &path[1..]),
        (Some(_), LambdaTerm::Abs(_, b)) => at(b, &path[1..]),
        _ => unreachable!("path from paths()"),
    }
}

fn replace(t: &LambdaTerm, path: &[u8], new: LambdaTerm) -> LambdaTerm {
    match (path.first(), t) {
        (None, _) => new,
        (Some(0), LambdaTerm::App(f, a)) => {
            LambdaTerm::App(Box::new(replace(f, &path[1..], new)), a.clone())
        }
        (Some(1), LambdaTerm::App(f, a)) => {
            LambdaTerm::App(f.clone(), Box::new(replace(a, &path[1..], new)))
        }
        (Some(_), LambdaTerm::Abs(x, b)) => {
            LambdaTerm::Abs(x.clone(), Box::new(replace(b, &path[1..], new)))
        }
        _ => unreachable!("path from paths()"),
    }
}

/// One βη-expansion at a random position: `u ↦ λz. u z`, `u ↦ (λz. z) u`
/// or `f a ↦ (λg. g a) f`. `None` when the choice does not apply.
fn expand_once(t: &LambdaTerm, rng: &mut StdRng, fresh: &mut usize) -> Option<LambdaTerm> {
    let mut ps = Vec::new();
    paths(t, &mut Vec::new(), &mut ps);
    let p = ps.choose(rng)?.clone();
    let u = at(t, &p);
    *fresh += 1;
    let z = format!("z{fresh}");
    let new = match rng.gen_range(0..3) {
        0 => LambdaTerm::abs(&z, LambdaTerm::app(u, LambdaTerm::var(&z))),
        1 => LambdaTerm::app(LambdaTerm::abs(&z, LambdaTerm::var(&z)), u),
        _ => {
            let LambdaTerm::App(f, a) = u else {
                return None;
            };
            LambdaTerm::app(
                LambdaTerm::abs(&z, LambdaTerm::app(LambdaTerm::var(&z), *a)),
                *f,
            )
        }
    };
    Some(replace(t, &p, new))
}

fn lemma6_types() -> Vec<ImplType> {
    let s = ImplType::str_type();
    vec![
        s.clone(),
        ImplType::arrow(s.clone(), s.clone()),
        ImplType::arrow(
            ImplType::arrow(s.clone(), s.clone()),
            ImplType::arrow(s.clone(), s.clone()),
        ),
        ImplType::arrow(s.clone(), ImplType::arrow(s.clone(), s)),
    ]
}

/// Translations of βη-equivalent closed terms coincide.
pub fn lemma6_suite(cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = SuiteReport::new("βη-invariance");
    let sig = string_sig();
    let tr = str_tr(&sig);
    let pool: Vec<(LambdaTerm, ImplType)> = lemma6_types()
        .into_iter()
        .flat_map(|ty| {
            normal_terms(&sig, &[], &ty, 3)
                .into_iter()
                .map(move |t| (t, ty.clone()))
        })
        .collect();
    let mut fresh = 0;
    let mut n = 0;
    while n < cases {
        let (t, ty) = pool.choose(&mut rng).expect("nonempty pool").clone();
        let mut v = t.clone();
        for _ in 0..rng.gen_range(1..=3) {
            if let Some(w) = expand_once(&v, &mut rng, &mut fresh) {
                let j = LambdaJudgement::closed(w.clone(), ty.clone());
                if crate::lambda_acg::lambda_typecheck(&j, &sig).is_ok() {
                    v = w;
                }
            }
        }
        if v == t {
            continue;
        }
        n += 1;
        let (a, b) = (
            LambdaJudgement::closed(t, ty.clone()),
            LambdaJudgement::closed(v, ty),
        );
        let res = (|| -> Result<(), String> {
            if !beta_eta_equivalent(&a, &b, &sig).map_err(|e| e.to_string())? {
                return Err("variant is not βη-equivalent".into());
            }
            let ta = translate_judgement(&a, &sig, &tr).map_err(|e| e.to_string())?;
            let tb = translate_judgement(&b, &sig, &tr).map_err(|e| e.to_string())?;
            if !ta.alpha_eq_ordered(&tb) {
                return Err(format!("{ta} vs {tb}"));
            }
            Ok(())
        })();
        r.case(res.is_ok(), || {
            format!("{} / {}: {}", a.term, b.term, res.unwrap_err())
        });
    }
    r.timed(start)
}

/// Derivable polarized judgements: translations of normal terms with
/// small contexts.
fn polarized_pool(sig: &LambdaSignature) -> Vec<LambdaJudgement> {
    let s = ImplType::str_type();
    let ctx_types = [o(), s.clone(), ImplType::arrow(s.clone(), o())];
    let goals = [o(), s.clone(), ImplType::arrow(s.clone(), s.clone())];
    let mut ctxs: Vec<Vec<ImplType>> = vec![Vec::new()];
    for a in &ctx_types {
        ctxs.push(vec![a.clone()]);
        for b in &ctx_types {
            ctxs.push(vec![a.clone(), b.clone()]);
        }
    }
    let mut out = Vec::new();
    for c in &ctxs {
        let ctx: Vec<(String, ImplType)> = c
            .iter()
            .enumerate()
            .map(|(k, a)| (format!("y{}", k + 1), a.clone()))
            .collect();
        for g in &goals {
            for t in normal_terms(sig, &ctx, g, 2) {
                out.push(LambdaJudgement {
                    context: ctx.clone(),
                    term: t,
                    ty: g.clone(),
                });
            }
        }
    }
    out
}

/// Inverse translation followed by translation is the identity, and the
/// recovered λ-judgement is βη-equivalent to the source.
pub fn inverse_suite(cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = SuiteReport::new("inverse translation");
    let sig = string_sig();
    let tr = str_tr(&sig);
    let pool = polarized_pool(&sig);
    for k in 0..cases {
        let src = &pool[if cases <= pool.len() {
            (k * pool.len()) / cases
        } else {
            rng.gen_range(0..pool.len())
        }];
        let res = (|| -> Result<(), String> {
            let j = translate_judgement(src, &sig, &tr).map_err(|e| e.to_string())?;
            let n = j.types.len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let shuffled = j.reordered(&perm);
            let back =
                inverse_translate(&shuffled, InverseSignature::Str).map_err(|e| e.to_string())?;
            let again = translate_judgement(&back, &sig, &tr).map_err(|e| e.to_string())?;
            // negatives keep their shuffled order, the positive goes last
            let mut order: Vec<usize> = perm.iter().copied().filter(|&p| p != n - 1).collect();
            order.push(n - 1);
            let want = j.reordered(&order);
            if !again.alpha_eq_ordered(&want) {
                return Err(format!("{again} vs {want}"));
            }
            let mut term = src.term.clone();
            let mut context = Vec::new();
            for (k, &p) in order[..n - 1].iter().enumerate() {
                let x = format!("x{}", k + 1);
                let (y, a) = &src.context[p];
                term = term.subst(y, &LambdaTerm::var(&x));
                context.push((x, a.clone()));
            }
            let renamed = LambdaJudgement {
                context,
                term,
                ty: src.ty.clone(),
            };
            if !beta_eta_equivalent(&back, &renamed, &sig).map_err(|e| e.to_string())? {
                return Err(format!("recovered {back}"));
            }
            Ok(())
        })();
        r.case(res.is_ok(), || format!("{src}: {}", res.unwrap_err()));
    }
    r.timed(start)
}

/// The language of the ACG equals that of its translation, and the
/// lexicon commutes with the type translation on every constant.
pub fn acg_language_suite(g: &Acg, max_len: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("ACG language");
    let res = (|| -> Result<(), String> {
        let t = acg_translate(g).map_err(|e| e.to_string())?;
        let a = acg_language(g, max_len).map_err(|e| e.to_string())?;
        if !a.complete {
            return Err("some constant has an empty image; the ACG side is not exhaustive".into());
        }
        let b = enumerate(&t.grammar, max_len, &Budget::default()).map_err(|e| e.to_string())?;
        if !b.inconclusive.is_empty() {
            return Err(format!("{} inconclusive words", b.inconclusive.len()));
        }
        let (aw, bw) = (joined(&a.words), joined(&b.words));
        if let Some(w) = aw.symmetric_difference(&bw).next() {
            return Err(format!("{w:?} is in only one language"));
        }
        let val = g.valencies().map_err(|e| e.to_string())?;
        let sval = BTreeMap::from([(
            crate::lambda_acg::STRING_ATOM.to_string(),
            Valency::new(1, 0),
        )]);
        for (c, a) in &g.abstract_sig.constants {
            let lhs = phi_symbol(g, &tr_type(a, &val).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let rhs = tr_type(&g.phi_type(a).map_err(|e| e.to_string())?, &sval)
                .map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("lexicon and translation do not commute on {c}"));
            }
        }
        Ok(())
    })();
    r.case(res.is_ok(), || res.unwrap_err());
    r.timed(start)
}

/// The three ACG checks under one report.
pub fn acg_suite(g: &Acg, max_len: usize, cases: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("ACG embedding");
    r.absorb(acg_language_suite(g, max_len));
    r.absorb(lemma6_suite(cases, seed));
    r.absorb(inverse_suite(cases, seed.wrapping_add(1)));
    r.timed(start)
}

// ---- lexicalization ----

/// Each grammar generates the same words before and after lexicalization.
pub fn lexicalization_suite(grammars: &[(String, Grammar)], max_len: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("lexicalization");
    for (name, g) in grammars {
        let res = (|| -> Result<(), String> {
            let l = g.lexicalized().map_err(|e| e.to_string())?;
            let b = Budget::default();
            let before = enumerate(g, max_len, &b).map_err(|e| e.to_string())?;
            let after = enumerate(&l, max_len, &b).map_err(|e| e.to_string())?;
            if !before.inconclusive.is_empty() || !after.inconclusive.is_empty() {
                return Err("inconclusive words".into());
            }
            if before.words != after.words {
                let d: Vec<String> = joined(&before.words)
                    .symmetric_difference(&joined(&after.words))
                    .cloned()
                    .collect();
                return Err(format!("languages differ on {d:?}"));
            }
            Ok(())
        })();
        r.case(res.is_ok(), || format!("{name}: {}", res.unwrap_err()));
    }
    r.timed(start)
}

// ---- parsing ----

/// Parses `sentence` and replays the printed script against the grammar.
pub fn parse_suite(name: &str, g: &Grammar, sentence: &str) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new(name);
    let w = Word::parse(sentence);
    let res = (|| -> Result<(), String> {
        let d = match generates(g, &w, &Budget::default()).map_err(|e| e.to_string())? {
            ParseOutcome::Parsed(p) => p.derivation,
            other => return Err(format!("{sentence:?} not parsed: {other:?}")),
        };
        let steps = parse_script(&d.to_script()).map_err(|e| e.to_string())?;
        let replayed = build_from_script(&steps, &g.pool(), g.mode).map_err(|e| e.to_string())?;
        recheck(g, &w, &replayed).map_err(|e| format!("printed derivation does not re-check: {e}"))
    })();
    r.case(res.is_ok(), || res.unwrap_err());
    r.timed(start)
}

// ---- the acceptance table ----

/// One acceptance criterion with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub number: usize,
    pub title: String,
    pub report: SuiteReport,
    /// Wall-clock limit in seconds, when the criterion has one.
    pub limit: Option<f64>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.limit.is_none_or(|l| self.report.seconds < l)
    }

    pub fn line(&self) -> String {
        let limit = self
            .limit
            .map(|l| format!(", limit {l} s"))
            .unwrap_or_default();
        format!(
            "criterion {}: {} ... {} ({} cases, {} failed, {:.2} s{limit})",
            self.number,
            self.title,
            if self.passed() { "PASS" } else { "FAIL" },
            self.report.cases,
            self.report.failed,
            self.report.seconds
        )
    }
}

/// Seed shared by the randomized criteria; fixed so reruns are identical.
pub const SEED: u64 = 20_241_014;

fn fixture_grammar(src: &str) -> Result<Grammar, String> {
    crate::syntax::parse_grammar(src).map_err(|e| e.to_string())
}

fn broken(name: &str, msg: String) -> SuiteReport {
    let mut r = SuiteReport::new(name);
    r.case(false, || msg);
    r
}

/// Runs criterion `n` (1 to 8).
pub fn criterion(n: usize) -> CriterionResult {
    let (title, limit, report) = match n {
        1 => (
            "John loves Mary parses and re-checks",
            Some(1.0),
            match fixture_grammar(fixtures::JOHN_LOVES_MARY) {
                Ok(g) => parse_suite("John loves Mary", &g, "John loves Mary"),
                Err(e) => broken("John loves Mary", e),
            },
        ),
        2 => (
            "relative clause with medial extraction parses",
            Some(10.0),
            match fixture_grammar(fixtures::ELABORATE) {
                Ok(g) => parse_suite("relative clause", &g, "Mary whom John loves madly leaves"),
                Err(e) => broken("relative clause", e),
            },
        ),
        3 => (
            "term engine properties on 1000 expressions",
            None,
            term_suite(1000, SEED),
        ),
        4 => (
            "cut elimination on 200 derivations",
            None,
            cut_suite(200, SEED),
        ),
        5 => (
            "Lambek sequents agree with their cycles",
            Some(60.0),
            lambek_suite(200, SEED),
        ),
        6 => (
            "ACG languages, βη-invariance, inverse translation",
            None,
            match parse_acg(fixtures::TOY_ACG) {
                Ok(g) => acg_suite(&g, 6, 100, SEED),
                Err(e) => broken("ACG embedding", e.to_string()),
            },
        ),
        7 => (
            "Lambek lexicon agrees with its translation up to length 5",
            None,
            match crate::lambek::parse_lexicon(fixtures::LAMBEK_LEXICON) {
                Ok(g) => lambek_grammar_suite(&g, 5),
                Err(e) => broken("Lambek grammar", e.to_string()),
            },
        ),
        8 => (
            "lexicalization keeps languages up to length 5",
            None,
            match lexicalization_fixtures() {
                Ok(gs) => lexicalization_suite(&gs, 5),
                Err(e) => broken("lexicalization", e),
            },
        ),
        _ => (
            "unknown criterion",
            None,
            broken("unknown", format!("no criterion {n}")),
        ),
    };
    CriterionResult {
        number: n,
        title: title.to_string(),
        report,
        limit,
    }
}

/// The grammars of the lexicalization check: both tensor fixtures and the
/// translated Lambek lexicon.
pub fn lexicalization_fixtures() -> Result<Vec<(String, Grammar)>, String> {
    let lex = crate::lambek::parse_lexicon(fixtures::LAMBEK_LEXICON).map_err(|e| e.to_string())?;
    Ok(vec![
        (
            "john_loves_mary.tg".into(),
            fixture_grammar(fixtures::JOHN_LOVES_MARY)?,
        ),
        ("elaborate.tg".into(), fixture_grammar(fixtures::ELABORATE)?),
        (
            "lambek.lex".into(),
            crate::lambek::translate_lambek_grammar(&lex),
        ),
    ])
}

pub const CRITERIA: usize = 8;
