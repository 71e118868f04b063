//! Linear λ-calculus, its tensor translation and the embedding of string
//! ACGs into tensor grammars.
//!
//! Translations are built as TTC derivations, so every translated judgement
//! comes with a checkable proof. Contexts are ordered; a translated
//! judgement lists the duals of the context types in context order and the
//! conclusion type last.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::engine::Grammar;
use crate::syntax::ParseError;
use crate::term::{Index, TensorTerm, Word};
use crate::ttc::{
    eta_identity, identity_term, par_inverse, AxiomPool, Derivation, Judgement, Literal, Mode,
    Rule, Split, Symbol, TensorType, Valency,
};

/// The string atom.
pub const STRING_ATOM: &str = "O";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImplType {
    Atom(String),
    Arrow(Box<ImplType>, Box<ImplType>),
}

impl ImplType {
    pub fn atom(name: &str) -> Self {
        ImplType::Atom(name.to_string())
    }

    pub fn arrow(a: ImplType, b: ImplType) -> Self {
        ImplType::Arrow(Box::new(a), Box::new(b))
    }

    /// `O ⊸ O`.
    pub fn str_type() -> Self {
        ImplType::arrow(ImplType::atom(STRING_ATOM), ImplType::atom(STRING_ATOM))
    }

    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            ImplType::Atom(a) => {
                out.insert(a.clone());
            }
            ImplType::Arrow(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Argument types and the target atom of `A1 ⊸ … ⊸ An ⊸ p`.
    pub fn spine(&self) -> (Vec<&ImplType>, &str) {
        let mut args = Vec::new();
        let mut t = self;
        loop {
            match t {
                ImplType::Atom(p) => return (args, p),
                ImplType::Arrow(a, b) => {
                    args.push(&**a);
                    t = b;
                }
            }
        }
    }

    /// Replaces atoms by their images.
    pub fn substitute(&self, map: &BTreeMap<String, ImplType>) -> Option<ImplType> {
        match self {
            ImplType::Atom(a) => map.get(a).cloned(),
            ImplType::Arrow(a, b) => Some(ImplType::arrow(a.substitute(map)?, b.substitute(map)?)),
        }
    }
}

impl fmt::Display for ImplType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImplType::Atom(a) => write!(f, "{a}"),
            ImplType::Arrow(a, b) => match **a {
                ImplType::Atom(_) => write!(f, "{a} -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaTerm {
    Var(String),
    Const(String),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Abs(String, Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(x: &str) -> Self {
        LambdaTerm::Var(x.to_string())
    }

    pub fn constant(c: &str) -> Self {
        LambdaTerm::Const(c.to_string())
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    pub fn abs(x: &str, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(x.to_string(), Box::new(body))
    }

    /// Free variables with multiplicity, left to right.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            LambdaTerm::Var(x) => {
                if !bound.contains(x) {
                    out.push(x.clone());
                }
            }
            LambdaTerm::Const(_) => {}
            LambdaTerm::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            LambdaTerm::Abs(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Constant occurrences, left to right.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let LambdaTerm::Const(c) = t {
                out.push(c.clone());
            }
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&LambdaTerm)) {
        f(self);
        match self {
            LambdaTerm::App(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            LambdaTerm::Abs(_, b) => b.walk(f),
            _ => {}
        }
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |t| match t {
            LambdaTerm::Var(x) | LambdaTerm::Abs(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
    }

    /// Capture-avoiding `self[x := s]`.
    pub fn subst(&self, x: &str, s: &LambdaTerm) -> LambdaTerm {
        let fv: BTreeSet<String> = s.free_vars().into_iter().collect();
        let mut avoid = fv.clone();
        self.all_names(&mut avoid);
        s.all_names(&mut avoid);
        self.subst_with(x, s, &fv, &mut avoid)
    }

    fn subst_with(
        &self,
        x: &str,
        s: &LambdaTerm,
        fv: &BTreeSet<String>,
        avoid: &mut BTreeSet<String>,
    ) -> LambdaTerm {
        match self {
            LambdaTerm::Var(y) if y == x => s.clone(),
            LambdaTerm::Var(_) | LambdaTerm::Const(_) => self.clone(),
            LambdaTerm::App(f, a) => {
                LambdaTerm::app(f.subst_with(x, s, fv, avoid), a.subst_with(x, s, fv, avoid))
            }
            LambdaTerm::Abs(y, _) if y == x => self.clone(),
            LambdaTerm::Abs(y, b) => {
                if fv.contains(y) {
                    let z = fresh_name(y, avoid);
                    let b2 = b.subst_with(
                        y,
                        &LambdaTerm::Var(z.clone()),
                        &BTreeSet::from([z.clone()]),
                        avoid,
                    );
                    LambdaTerm::Abs(z, Box::new(b2.subst_with(x, s, fv, avoid)))
                } else {
                    LambdaTerm::Abs(y.clone(), Box::new(b.subst_with(x, s, fv, avoid)))
                }
            }
        }
    }

    /// β-normal form. Linear terms shrink under β, so this terminates.
    pub fn beta_normal(&self) -> LambdaTerm {
        match self {
            LambdaTerm::Var(_) | LambdaTerm::Const(_) => self.clone(),
            LambdaTerm::Abs(x, b) => LambdaTerm::abs(x, b.beta_normal()),
            LambdaTerm::App(f, a) => match f.beta_normal() {
                LambdaTerm::Abs(x, b) => b.subst(&x, a).beta_normal(),
                f2 => LambdaTerm::app(f2, a.beta_normal()),
            },
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &LambdaTerm) -> bool {
        fn go<'a>(a: &'a LambdaTerm, b: &'a LambdaTerm, env: &mut Vec<(&'a str, &'a str)>) -> bool {
            match (a, b) {
                (LambdaTerm::Var(x), LambdaTerm::Var(y)) => {
                    for (p, q) in env.iter().rev() {
                        if *p == x || *q == y {
                            return *p == x && *q == y;
                        }
                    }
                    x == y
                }
                (LambdaTerm::Const(c), LambdaTerm::Const(d)) => c == d,
                (LambdaTerm::App(f, s), LambdaTerm::App(g, t)) => go(f, g, env) && go(s, t, env),
                (LambdaTerm::Abs(x, s), LambdaTerm::Abs(y, t)) => {
                    env.push((x, y));
                    let r = go(s, t, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Bound variables renamed `x1, x2, …` in binding order, skipping free names.
    pub fn canonical_names(&self) -> LambdaTerm {
        let free: BTreeSet<String> = self.free_vars().into_iter().collect();
        let mut n = 0usize;
        self.rename_bound(&free, &mut n, &BTreeMap::new())
    }

    fn rename_bound(
        &self,
        free: &BTreeSet<String>,
        n: &mut usize,
        env: &BTreeMap<String, String>,
    ) -> LambdaTerm {
        match self {
            LambdaTerm::Var(x) => LambdaTerm::Var(env.get(x).cloned().unwrap_or_else(|| x.clone())),
            LambdaTerm::Const(_) => self.clone(),
            LambdaTerm::App(f, a) => {
                LambdaTerm::app(f.rename_bound(free, n, env), a.rename_bound(free, n, env))
            }
            LambdaTerm::Abs(x, b) => {
                let name = loop {
                    *n += 1;
                    let c = format!("x{n}");
                    if !free.contains(&c) {
                        break c;
                    }
                };
                let mut env2 = env.clone();
                env2.insert(x.clone(), name.clone());
                LambdaTerm::Abs(name, Box::new(b.rename_bound(free, n, &env2)))
            }
        }
    }

    /// `λx.a1(…(an x)…)`.
    pub fn of_word(w: &[String]) -> LambdaTerm {
        let mut body = LambdaTerm::var("x");
        for c in w.iter().rev() {
            body = LambdaTerm::app(LambdaTerm::Const(c.clone()), body);
        }
        LambdaTerm::abs("x", body)
    }

    /// Reads `λx.a1(…(an x)…)` back as a word.
    pub fn as_word(&self) -> Option<Vec<String>> {
        let LambdaTerm::Abs(x, body) = self else {
            return None;
        };
        let mut out = Vec::new();
        let mut t = &**body;
        loop {
            match t {
                LambdaTerm::Var(y) if y == x => return Some(out),
                LambdaTerm::App(f, a) => {
                    let LambdaTerm::Const(c) = &**f else {
                        return None;
                    };
                    out.push(c.clone());
                    t = a;
                }
                _ => return None,
            }
        }
    }
}

fn fresh_name(base: &str, avoid: &mut BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    let mut n = 1usize;
    loop {
        let c = format!("{stem}{n}");
        if !avoid.contains(&c) {
            avoid.insert(c.clone());
            return c;
        }
        n += 1;
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) | LambdaTerm::Const(x) => write!(f, "{x}"),
            LambdaTerm::Abs(..) => {
                let mut vars = Vec::new();
                let mut t = self;
                while let LambdaTerm::Abs(x, b) = t {
                    vars.push(x.as_str());
                    t = b;
                }
                write!(f, "\\{}. {t}", vars.join(" "))
            }
            LambdaTerm::App(g, a) => {
                match **g {
                    LambdaTerm::Abs(..) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
                match **a {
                    LambdaTerm::Var(_) | LambdaTerm::Const(_) => write!(f, " {a}"),
                    _ => write!(f, " ({a})"),
                }
            }
        }
    }
}

/// `x1:A1, …, xn:An ⊢ t : A` with an ordered context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaJudgement {
    pub context: Vec<(String, ImplType)>,
    pub term: LambdaTerm,
    pub ty: ImplType,
}

impl LambdaJudgement {
    pub fn closed(term: LambdaTerm, ty: ImplType) -> Self {
        LambdaJudgement {
            context: Vec::new(),
            term,
            ty,
        }
    }
}

impl fmt::Display for LambdaJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self
            .context
            .iter()
            .map(|(x, a)| format!("{x} : {a}"))
            .collect();
        write!(f, "{} |- {} : {}", ctx.join(", "), self.term, self.ty)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LambdaSignature {
    pub atoms: BTreeSet<String>,
    pub constants: BTreeMap<String, ImplType>,
}

impl LambdaSignature {
    /// The string signature: atom `O`, each terminal of type `str`.
    pub fn string(terminals: impl IntoIterator<Item = String>) -> Self {
        LambdaSignature {
            atoms: BTreeSet::from([STRING_ATOM.to_string()]),
            constants: terminals
                .into_iter()
                .map(|c| (c, ImplType::str_type()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LambdaRule {
    Id,
    Axiom(String),
    /// `(⊸I)`; the bound variable is read off the conclusion.
    Intro,
    /// `(⊸E)`: function premise first, argument second.
    Elim,
}

/// Natural deduction derivation. Premise contexts list free variables in
/// order of occurrence; the root keeps the judgement's context order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaDerivation {
    pub rule: LambdaRule,
    pub premises: Vec<LambdaDerivation>,
    pub conclusion: LambdaJudgement,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("variable {0} is not used exactly once")]
    NonLinear(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("type error at {path:?}: {reason}")]
    TypeError { path: Vec<usize>, reason: String },
    #[error("type of the term is not determined: {0}")]
    Untypeable(String),
    #[error("context does not match the free variables of the term")]
    ContextMismatch,
}

/// Inference types with metavariables.
#[derive(Debug, Clone)]
enum Ty {
    Atom(String),
    Arrow(Box<Ty>, Box<Ty>),
    Meta(usize),
}

fn to_ty(a: &ImplType) -> Ty {
    match a {
        ImplType::Atom(p) => Ty::Atom(p.clone()),
        ImplType::Arrow(a, b) => Ty::Arrow(Box::new(to_ty(a)), Box::new(to_ty(b))),
    }
}

enum Node {
    Var(String, Ty),
    Const(String, Ty),
    Abs(String, Box<Node>, Ty),
    App(Box<Node>, Box<Node>, Ty),
}

impl Node {
    fn ty(&self) -> &Ty {
        match self {
            Node::Var(_, t) | Node::Const(_, t) | Node::Abs(_, _, t) | Node::App(_, _, t) => t,
        }
    }
}

#[derive(Default)]
struct Unifier {
    metas: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.metas.push(None);
        Ty::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Meta(m) => match &self.metas[*m] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(n) => n == m,
            Ty::Atom(_) => false,
            Ty::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), String> {
        match (self.resolve(a), self.resolve(b)) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => Ok(()),
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(m, &t) {
                    return Err("cyclic type".into());
                }
                self.metas[m] = Some(t);
                Ok(())
            }
            (Ty::Atom(p), Ty::Atom(q)) if p == q => Ok(()),
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(&a1, &a2)?;
                self.unify(&b1, &b2)
            }
            (x, y) => Err(format!(
                "cannot match {} with {}",
                self.show(&x),
                self.show(&y)
            )),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.zonk(t) {
            Some(a) => a.to_string(),
            None => "an undetermined type".into(),
        }
    }

    fn zonk(&self, t: &Ty) -> Option<ImplType> {
        match self.resolve(t) {
            Ty::Atom(p) => Some(ImplType::Atom(p)),
            Ty::Arrow(a, b) => Some(ImplType::arrow(self.zonk(&a)?, self.zonk(&b)?)),
            Ty::Meta(_) => None,
        }
    }
}

fn check_linear(t: &LambdaTerm) -> Result<(), LambdaError> {
    match t {
        LambdaTerm::Var(_) | LambdaTerm::Const(_) => Ok(()),
        LambdaTerm::App(f, a) => {
            check_linear(f)?;
            check_linear(a)?;
            let fv: BTreeSet<String> = f.free_vars().into_iter().collect();
            match a.free_vars().into_iter().find(|x| fv.contains(x)) {
                Some(x) => Err(LambdaError::NonLinear(x)),
                None => Ok(()),
            }
        }
        LambdaTerm::Abs(x, b) => {
            check_linear(b)?;
            if b.free_vars().iter().filter(|y| *y == x).count() != 1 {
                return Err(LambdaError::NonLinear(x.clone()));
            }
            Ok(())
        }
    }
}

fn infer(
    t: &LambdaTerm,
    env: &mut Vec<(String, Ty)>,
    sig: &LambdaSignature,
    u: &mut Unifier,
    path: &mut Vec<usize>,
) -> Result<Node, LambdaError> {
    match t {
        LambdaTerm::Var(x) => {
            let ty = env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone());
            let ty = ty.ok_or_else(|| LambdaError::TypeError {
                path: path.clone(),
                reason: format!("unbound variable {x}"),
            })?;
            Ok(Node::Var(x.clone(), ty))
        }
        LambdaTerm::Const(c) => {
            let a = sig
                .constants
                .get(c)
                .ok_or_else(|| LambdaError::UnknownConstant(c.clone()))?;
            Ok(Node::Const(c.clone(), to_ty(a)))
        }
        LambdaTerm::Abs(x, b) => {
            let m = u.fresh();
            env.push((x.clone(), m.clone()));
            path.push(0);
            let body = infer(b, env, sig, u, path);
            path.pop();
            env.pop();
            let body = body?;
            let ty = Ty::Arrow(Box::new(m), Box::new(body.ty().clone()));
            Ok(Node::Abs(x.clone(), Box::new(body), ty))
        }
        LambdaTerm::App(f, a) => {
            path.push(0);
            let fnode = infer(f, env, sig, u, path)?;
            path.pop();
            path.push(1);
            let anode = infer(a, env, sig, u, path)?;
            path.pop();
            let r = u.fresh();
            let want = Ty::Arrow(Box::new(anode.ty().clone()), Box::new(r.clone()));
            u.unify(fnode.ty(), &want)
                .map_err(|reason| LambdaError::TypeError {
                    path: path.clone(),
                    reason,
                })?;
            Ok(Node::App(Box::new(fnode), Box::new(anode), r))
        }
    }
}

fn build(n: &Node, u: &Unifier) -> Result<LambdaDerivation, LambdaError> {
    let z = |t: &Ty| {
        u.zonk(t)
            .ok_or_else(|| LambdaError::Untypeable("a subterm type is left open".into()))
    };
    Ok(match n {
        Node::Var(x, t) => {
            let a = z(t)?;
            LambdaDerivation {
                rule: LambdaRule::Id,
                premises: Vec::new(),
                conclusion: LambdaJudgement {
                    context: vec![(x.clone(), a.clone())],
                    term: LambdaTerm::Var(x.clone()),
                    ty: a,
                },
            }
        }
        Node::Const(c, t) => LambdaDerivation {
            rule: LambdaRule::Axiom(c.clone()),
            premises: Vec::new(),
            conclusion: LambdaJudgement::closed(LambdaTerm::Const(c.clone()), z(t)?),
        },
        Node::Abs(x, body, t) => {
            let p = build(body, u)?;
            let context = p
                .conclusion
                .context
                .iter()
                .filter(|(y, _)| y != x)
                .cloned()
                .collect();
            let term = LambdaTerm::abs(x, p.conclusion.term.clone());
            LambdaDerivation {
                rule: LambdaRule::Intro,
                premises: vec![p],
                conclusion: LambdaJudgement {
                    context,
                    term,
                    ty: z(t)?,
                },
            }
        }
        Node::App(f, a, t) => {
            let pf = build(f, u)?;
            let pa = build(a, u)?;
            let mut context = pf.conclusion.context.clone();
            context.extend(pa.conclusion.context.iter().cloned());
            let term = LambdaTerm::app(pf.conclusion.term.clone(), pa.conclusion.term.clone());
            LambdaDerivation {
                rule: LambdaRule::Elim,
                premises: vec![pf, pa],
                conclusion: LambdaJudgement {
                    context,
                    term,
                    ty: z(t)?,
                },
            }
        }
    })
}

fn check_type_atoms(a: &ImplType, sig: &LambdaSignature) -> Result<(), LambdaError> {
    let mut atoms = BTreeSet::new();
    a.atoms(&mut atoms);
    match atoms.into_iter().find(|p| !sig.atoms.contains(p)) {
        Some(p) => Err(LambdaError::UnknownAtom(p)),
        None => Ok(()),
    }
}

/// Derivation of a linear typing judgement.
pub fn lambda_typecheck(
    j: &LambdaJudgement,
    sig: &LambdaSignature,
) -> Result<LambdaDerivation, LambdaError> {
    check_linear(&j.term)?;
    let fv = j.term.free_vars();
    let ctx_vars: Vec<&String> = j.context.iter().map(|(x, _)| x).collect();
    if let Some(x) = ctx_vars
        .iter()
        .find(|x| fv.iter().filter(|y| y == *x).count() != 1)
    {
        return Err(LambdaError::NonLinear((*x).clone()));
    }
    if fv.len() != ctx_vars.len() {
        return Err(LambdaError::ContextMismatch);
    }
    check_type_atoms(&j.ty, sig)?;
    for (_, a) in &j.context {
        check_type_atoms(a, sig)?;
    }
    let mut u = Unifier::default();
    let mut env: Vec<(String, Ty)> = j
        .context
        .iter()
        .map(|(x, a)| (x.clone(), to_ty(a)))
        .collect();
    let node = infer(&j.term, &mut env, sig, &mut u, &mut Vec::new())?;
    u.unify(node.ty(), &to_ty(&j.ty))
        .map_err(|reason| LambdaError::TypeError {
            path: Vec::new(),
            reason,
        })?;
    let mut d = build(&node, &u)?;
    d.conclusion.context = j.context.clone();
    Ok(d)
}

/// β-normal η-long form, with bound variables renamed canonically.
pub fn beta_eta_normal(
    j: &LambdaJudgement,
    sig: &LambdaSignature,
) -> Result<LambdaTerm, LambdaError> {
    lambda_typecheck(j, sig)?;
    let b = j.term.beta_normal();
    let mut env: Vec<(String, ImplType)> = j.context.clone();
    let mut avoid = BTreeSet::new();
    b.all_names(&mut avoid);
    for (x, _) in &j.context {
        avoid.insert(x.clone());
    }
    Ok(eta_long(&b, &j.ty, &mut env, sig, &mut avoid)?.canonical_names())
}

/// Whether two judgements with the same context and type are βη-equal.
pub fn beta_eta_equivalent(
    a: &LambdaJudgement,
    b: &LambdaJudgement,
    sig: &LambdaSignature,
) -> Result<bool, LambdaError> {
    if a.context != b.context || a.ty != b.ty {
        return Ok(false);
    }
    Ok(beta_eta_normal(a, sig)?.alpha_eq(&beta_eta_normal(b, sig)?))
}

fn head_type(
    t: &LambdaTerm,
    env: &[(String, ImplType)],
    sig: &LambdaSignature,
) -> Result<ImplType, LambdaError> {
    match t {
        LambdaTerm::Var(x) => env
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, a)| a.clone())
            .ok_or_else(|| LambdaError::Untypeable(format!("unbound {x}"))),
        LambdaTerm::Const(c) => sig
            .constants
            .get(c)
            .cloned()
            .ok_or_else(|| LambdaError::UnknownConstant(c.clone())),
        LambdaTerm::App(f, _) => match head_type(f, env, sig)? {
            ImplType::Arrow(_, b) => Ok(*b),
            _ => Err(LambdaError::Untypeable("application of an atom".into())),
        },
        LambdaTerm::Abs(..) => Err(LambdaError::Untypeable("term is not β-normal".into())),
    }
}

fn eta_long(
    t: &LambdaTerm,
    ty: &ImplType,
    env: &mut Vec<(String, ImplType)>,
    sig: &LambdaSignature,
    avoid: &mut BTreeSet<String>,
) -> Result<LambdaTerm, LambdaError> {
    match (t, ty) {
        (LambdaTerm::Abs(x, b), ImplType::Arrow(a, c)) => {
            env.push((x.clone(), (**a).clone()));
            let r = eta_long(b, c, env, sig, avoid);
            env.pop();
            Ok(LambdaTerm::abs(x, r?))
        }
        (LambdaTerm::Abs(..), _) => Err(LambdaError::Untypeable(
            "abstraction at an atomic type".into(),
        )),
        (_, ImplType::Arrow(a, c)) => {
            let z = fresh_name("z", avoid);
            let applied = LambdaTerm::app(t.clone(), LambdaTerm::Var(z.clone()));
            env.push((z.clone(), (**a).clone()));
            let r = eta_long(&applied, c, env, sig, avoid);
            env.pop();
            Ok(LambdaTerm::Abs(z, Box::new(r?)))
        }
        (_, ImplType::Atom(_)) => {
            // neutral term h a1 … an
            let mut args = Vec::new();
            let mut h = t;
            while let LambdaTerm::App(f, a) = h {
                args.push(&**a);
                h = f;
            }
            args.reverse();
            let mut hty = head_type(h, env, sig)?;
            let mut out = h.clone();
            for a in args {
                let ImplType::Arrow(dom, cod) = hty else {
                    return Err(LambdaError::Untypeable("too many arguments".into()));
                };
                out = LambdaTerm::app(out, eta_long(a, &dom, env, sig, avoid)?);
                hty = *cod;
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("atom {0} has no valency")]
    UnknownAtom(String),
    #[error("no tensor translation for axiom {0}")]
    MissingAxiomTranslation(String),
    #[error("translation of axiom {0} does not have the translated type")]
    AxiomMismatch(String),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error("rule failed: {0}")]
    Rule(String),
}

/// `tr(p) = p`, `tr(A⊸B) = tr(B) ℘ dual(tr(A))`.
pub fn tr_type(
    a: &ImplType,
    valencies: &BTreeMap<String, Valency>,
) -> Result<Symbol, TranslationError> {
    match a {
        ImplType::Atom(p) => {
            let v = valencies
                .get(p)
                .ok_or_else(|| TranslationError::UnknownAtom(p.clone()))?;
            Ok(Symbol::lit(p, *v))
        }
        ImplType::Arrow(a, b) => Ok(Symbol::par(
            tr_type(b, valencies)?,
            tr_type(a, valencies)?.dual(),
        )),
    }
}

/// The implicational type whose translation is `s`, if any. `atom_ok`
/// restricts which literals count as atomic types.
pub fn positive_implicational(s: &Symbol, atom_ok: &dyn Fn(&Literal) -> bool) -> Option<ImplType> {
    match s {
        Symbol::Lit(l) if !l.negated && atom_ok(l) => Some(ImplType::Atom(l.name.to_string())),
        Symbol::Par(b, na) => {
            let a = positive_implicational(&na.dual(), atom_ok)?;
            Some(ImplType::arrow(a, positive_implicational(b, atom_ok)?))
        }
        _ => None,
    }
}

pub fn negative_implicational(s: &Symbol, atom_ok: &dyn Fn(&Literal) -> bool) -> Option<ImplType> {
    positive_implicational(&s.dual(), atom_ok)
}

/// Atom valencies and tensor translations of the signature axioms.
#[derive(Debug, Clone)]
pub struct TensorTranslation {
    pub valencies: BTreeMap<String, Valency>,
    pub axioms: AxiomPool,
}

impl TensorTranslation {
    /// Translation of the axiom-free calculus.
    pub fn pure(valencies: BTreeMap<String, Valency>) -> Self {
        TensorTranslation {
            valencies,
            axioms: AxiomPool::new(),
        }
    }

    /// The tensor string signature: `v(O) = (1,0)` and `[c]_i^j ⊢ O^i ℘ Ō_j`.
    pub fn string(terminals: impl IntoIterator<Item = String>) -> Self {
        let valencies = BTreeMap::from([(STRING_ATOM.to_string(), Valency::new(1, 0))]);
        let axioms = AxiomPool::unlimited(terminals.into_iter().map(|c| {
            let j = string_axiom(
                &Word::from_symbols(&[c.as_str()]),
                &Index::new("i"),
                &Index::new("j"),
            );
            (c, j)
        }));
        TensorTranslation { valencies, axioms }
    }
}

/// `[w]_i^j ⊢ O^i ℘ Ō_j`.
pub fn string_axiom(w: &Word, i: &Index, j: &Index) -> Judgement {
    let o = Symbol::lit(STRING_ATOM, Valency::new(1, 0));
    let ty = TensorType::new(
        Symbol::par(o.clone(), o.dual()),
        vec![i.clone()],
        vec![j.clone()],
    )
    .expect("distinct indices");
    Judgement::new(
        TensorTerm::single(w.clone(), i.clone(), j.clone()),
        vec![ty],
    )
    .expect("string axiom")
}

fn decorate(s: Symbol) -> TensorType {
    let v = s.valency();
    let up = (0..v.up).map(|_| Index::fresh()).collect();
    let down = (0..v.down).map(|_| Index::fresh()).collect();
    TensorType::new(s, up, down).expect("fresh indices")
}

fn rule_err(e: impl fmt::Display) -> TranslationError {
    TranslationError::Rule(e.to_string())
}

/// Tensor translation of a λ-derivation, as a TTC derivation over the
/// translated axioms. Conclusion: duals of the root context types in
/// context order, then the conclusion type.
pub fn translate_derivation(
    d: &LambdaDerivation,
    tr: &TensorTranslation,
) -> Result<Derivation, TranslationError> {
    let (out, vars) = translate_rec(d, tr)?;
    let mut perm = Vec::new();
    for (x, _) in &d.conclusion.context {
        perm.push(
            vars.iter()
                .position(|y| y == x)
                .ok_or(LambdaError::ContextMismatch)?,
        );
    }
    perm.push(vars.len());
    Ok(out.permuted(perm))
}

fn translate_rec(
    d: &LambdaDerivation,
    tr: &TensorTranslation,
) -> Result<(Derivation, Vec<String>), TranslationError> {
    let mode = Mode::Ttc;
    let pool = &tr.axioms;
    match &d.rule {
        LambdaRule::Id => {
            let a = decorate(tr_type(&d.conclusion.ty, &tr.valencies)?);
            let x = d.conclusion.context[0].0.clone();
            Ok((eta_identity(&a, mode), vec![x]))
        }
        LambdaRule::Axiom(c) => {
            if pool.get(c).is_none() {
                return Err(TranslationError::MissingAxiomTranslation(c.clone()));
            }
            let leaf = Derivation::leaf(Rule::Axiom(c.clone()), pool, mode).map_err(rule_err)?;
            let want = tr_type(&d.conclusion.ty, &tr.valencies)?;
            if leaf.conclusion.types.len() != 1 || leaf.conclusion.types[0].symbol != want {
                return Err(TranslationError::AxiomMismatch(c.clone()));
            }
            Ok((leaf, Vec::new()))
        }
        LambdaRule::Intro => {
            let LambdaTerm::Abs(x, _) = &d.conclusion.term else {
                return Err(TranslationError::Rule(
                    "intro without an abstraction".into(),
                ));
            };
            let (body, mut vars) = translate_rec(&d.premises[0], tr)?;
            let p = vars
                .iter()
                .position(|y| y == x)
                .ok_or(LambdaError::NonLinear(x.clone()))?;
            let n = body.conclusion.types.len();
            let joined = Derivation::infer(
                Rule::Par {
                    first: n - 1,
                    second: p,
                },
                vec![body],
                pool,
                mode,
            )
            .map_err(rule_err)?;
            vars.remove(p);
            let m = n - 1;
            let perm: Vec<usize> = (0..m).filter(|&k| k != p).chain([p]).collect();
            Ok((joined.permuted(perm), vars))
        }
        LambdaRule::Elim => {
            let (rho, mut vr) = translate_rec(&d.premises[0], tr)?;
            let (tau, vt) = translate_rec(&d.premises[1], tr)?;
            let n = rho.conclusion.types.len();
            // Γρ, B, Ā
            let opened = par_inverse(rho, n - 1, mode).map_err(rule_err)?;
            let nt = tau.conclusion.types.len();
            let cut = Derivation::infer(
                Rule::Cut {
                    left: n,
                    right: nt - 1,
                },
                vec![opened, tau],
                pool,
                mode,
            )
            .map_err(rule_err)?;
            // Γρ, B, Γτ to Γρ, Γτ, B
            let a = n - 1;
            let perm: Vec<usize> = (0..a).chain(a + 1..a + nt).chain([a]).collect();
            vr.extend(vt);
            Ok((cut.permuted(perm), vr))
        }
    }
}

/// Typechecks and translates; the translated judgement.
pub fn translate_judgement(
    j: &LambdaJudgement,
    sig: &LambdaSignature,
    tr: &TensorTranslation,
) -> Result<Judgement, TranslationError> {
    let d = lambda_typecheck(j, sig)?;
    Ok(translate_derivation(&d, tr)?.conclusion)
}

/// Which calculus an inverse translation reads judgements in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseSignature {
    /// Plain TTC, any positive atoms.
    Pure,
    /// The (big) tensor string signature over `O`.
    Str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InverseError {
    #[error("judgement is not polarized: {0}")]
    NotPolarized(String),
    #[error("judgement is not derivable: {0}")]
    NotDerivable(String),
}

/// λ-judgement translating to `j`. Context variables `x1, x2, …` stand
/// for the negative links in sequent order.
pub fn inverse_translate(
    j: &Judgement,
    sig: InverseSignature,
) -> Result<LambdaJudgement, InverseError> {
    let atom_ok = move |l: &Literal| match sig {
        InverseSignature::Pure => true,
        InverseSignature::Str => &*l.name == STRING_ATOM && l.valency == Valency::new(1, 0),
    };
    let mut labels = Vec::new();
    let mut context = Vec::new();
    let mut positive = None;
    for (k, t) in j.types.iter().enumerate() {
        if let Some(a) = positive_implicational(&t.symbol, &atom_ok) {
            if positive.replace((k, a)).is_some() {
                return Err(InverseError::NotPolarized("two positive links".into()));
            }
            labels.push(None);
        } else if let Some(a) = negative_implicational(&t.symbol, &atom_ok) {
            let x = format!("x{}", context.len() + 1);
            context.push((x.clone(), a));
            labels.push(Some(x));
        } else {
            return Err(InverseError::NotPolarized(format!(
                "link {} is not implicational",
                k + 1
            )));
        }
    }
    let Some((_, ty)) = positive else {
        return Err(InverseError::NotPolarized("no positive link".into()));
    };
    let mut inv = Inverter { sig, counter: 0 };
    let term = inv.inv(j.types.clone(), labels, j.term.clone())?;
    Ok(LambdaJudgement {
        context,
        term: term.canonical_names(),
        ty,
    })
}

struct Inverter {
    sig: InverseSignature,
    counter: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, a: usize) -> usize {
        if self.0[a] != a {
            let r = self.find(self.0[a]);
            self.0[a] = r;
        }
        self.0[a]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

impl Inverter {
    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        format!("{stem}{}", self.counter)
    }

    fn not_derivable<T>(msg: &str) -> Result<T, InverseError> {
        Err(InverseError::NotDerivable(msg.into()))
    }

    fn inv(
        &mut self,
        mut types: Vec<TensorType>,
        mut labels: Vec<Option<String>>,
        term: TensorTerm,
    ) -> Result<LambdaTerm, InverseError> {
        if !term.loops().is_empty() {
            return Self::not_derivable("closed loop in the term");
        }
        let pos = labels
            .iter()
            .position(Option::is_none)
            .expect("one positive link");
        if let Split::Par(b, na) = types[pos].split() {
            let z = self.fresh("z");
            types[pos] = b;
            types.push(na);
            labels.push(Some(z.clone()));
            let body = self.inv(types, labels, term)?;
            return Ok(LambdaTerm::Abs(z, Box::new(body)));
        }
        let mut saw_tensor = false;
        for k in 0..types.len() {
            let Split::Tensor(g, nh) = types[k].split() else {
                continue;
            };
            saw_tensor = true;
            if let Some(r) = self.try_split(&types, &labels, &term, k, g, nh)? {
                return Ok(r);
            }
        }
        if saw_tensor {
            return Self::not_derivable("no splitting link");
        }
        self.axiom(&types, &labels, &term)
    }

    /// Splits on the tensor link at `k` when removing it disconnects the
    /// judgement into the part of `g` and the part of `nh`.
    fn try_split(
        &mut self,
        types: &[TensorType],
        labels: &[Option<String>],
        term: &TensorTerm,
        k: usize,
        g: TensorType,
        nh: TensorType,
    ) -> Result<Option<LambdaTerm>, InverseError> {
        let n = types.len();
        // nodes: links by position, with g at k and nh at n
        let mut owner: BTreeMap<&Index, usize> = BTreeMap::new();
        for (p, t) in types.iter().enumerate() {
            if p != k {
                for i in t.indices() {
                    owner.insert(i, p);
                }
            }
        }
        for i in g.indices() {
            owner.insert(i, k);
        }
        for i in nh.indices() {
            owner.insert(i, n);
        }
        let mut uf = UnionFind((0..=n).collect());
        for (l, _, u) in term.edges() {
            let (Some(&a), Some(&b)) = (owner.get(l), owner.get(u)) else {
                return Self::not_derivable("term index outside the sequent");
            };
            uf.union(a, b);
        }
        let (cg, ch) = (uf.find(k), uf.find(n));
        if cg == ch {
            return Ok(None);
        }
        let mut left = Vec::new();
        let mut right = vec![n];
        for p in 0..n {
            if p == k {
                continue;
            }
            let c = uf.find(p);
            if c == cg {
                left.push(p);
            } else if c == ch {
                right.push(p);
            } else {
                return Self::not_derivable("disconnected sequent");
            }
        }
        let pos = labels
            .iter()
            .position(Option::is_none)
            .expect("one positive link");
        if left.contains(&pos) {
            return Self::not_derivable("split leaves two positive links on one side");
        }
        let sub_term = |node: usize, uf: &mut UnionFind| {
            let mut t = TensorTerm::unit();
            let comp = uf.find(node);
            for (l, w, u) in term.edges() {
                if uf.find(owner[l]) == comp {
                    t.insert_edge_raw(l.clone(), w.clone(), u.clone());
                }
            }
            t
        };
        let t1 = sub_term(k, &mut uf);
        let t2 = sub_term(n, &mut uf);
        let mut types1: Vec<TensorType> = left.iter().map(|&p| types[p].clone()).collect();
        let mut labels1: Vec<Option<String>> = left.iter().map(|&p| labels[p].clone()).collect();
        types1.push(g);
        labels1.push(None);
        let y = self.fresh("y");
        let mut types2 = vec![nh];
        let mut labels2 = vec![Some(y.clone())];
        for &p in &right[1..] {
            types2.push(types[p].clone());
            labels2.push(labels[p].clone());
        }
        for (ts, tm) in [(&types1, &t1), (&types2, &t2)] {
            if Judgement::new(tm.clone(), ts.clone()).is_err() {
                return Self::not_derivable("split part is not a judgement");
            }
        }
        let t = self.inv(types1, labels1, t1)?;
        let s = self.inv(types2, labels2, t2)?;
        let x = labels[k].clone().expect("tensor links are negative");
        Ok(Some(s.subst(&y, &LambdaTerm::app(LambdaTerm::Var(x), t))))
    }

    fn axiom(
        &self,
        types: &[TensorType],
        labels: &[Option<String>],
        term: &TensorTerm,
    ) -> Result<LambdaTerm, InverseError> {
        if types.len() != 2 {
            return Self::not_derivable("literal sequent that is not an axiom");
        }
        let pos = labels
            .iter()
            .position(Option::is_none)
            .expect("one positive link");
        let neg = 1 - pos;
        let x = labels[neg].clone().expect("negative link");
        if identity_term(&types[pos], &types[neg]).as_ref() == Some(term) {
            return Ok(LambdaTerm::Var(x));
        }
        if self.sig == InverseSignature::Str
            && types[pos].symbol == types[neg].symbol.dual()
            && term.edge_count() == 1
        {
            let (l, w, u) = term.edges().next().expect("one edge");
            if *l == types[pos].upper[0] && *u == types[neg].lower[0] {
                let mut t = LambdaTerm::Var(x);
                for c in w.0.iter().rev() {
                    t = LambdaTerm::app(LambdaTerm::Const(c.to_string()), t);
                }
                return Ok(t);
            }
        }
        Self::not_derivable("literal sequent that is not an axiom")
    }
}

/// A string ACG: abstract signature, lexicon into the string signature,
/// and a sentence atom.
#[derive(Debug, Clone)]
pub struct Acg {
    pub abstract_sig: LambdaSignature,
    pub terminals: BTreeSet<String>,
    pub type_lexicon: BTreeMap<String, ImplType>,
    pub term_lexicon: BTreeMap<String, LambdaTerm>,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcgError {
    #[error("lexicon image of {0} is ill typed: {1}")]
    LexiconIllTyped(String, String),
    #[error("{0} has no lexicon entry")]
    MissingLexicon(String),
    #[error("lexicon type of {0} is not over O")]
    NotStringType(String),
    #[error("sentence type {0} must be an atom mapped to O -> O")]
    BadStart(String),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Translation(#[from] TranslationError),
}

impl Acg {
    pub fn string_signature(&self) -> LambdaSignature {
        LambdaSignature::string(self.terminals.iter().cloned())
    }

    /// `φ(A)`.
    pub fn phi_type(&self, a: &ImplType) -> Result<ImplType, AcgError> {
        a.substitute(&self.type_lexicon).ok_or_else(|| {
            let mut atoms = BTreeSet::new();
            a.atoms(&mut atoms);
            let p = atoms
                .into_iter()
                .find(|p| !self.type_lexicon.contains_key(p))
                .unwrap_or_default();
            AcgError::MissingLexicon(p)
        })
    }

    /// `φ(t)`: constants replaced by their lexicon terms, variables kept.
    pub fn phi_term(&self, t: &LambdaTerm) -> Result<LambdaTerm, AcgError> {
        Ok(match t {
            LambdaTerm::Var(_) => t.clone(),
            LambdaTerm::Const(c) => self
                .term_lexicon
                .get(c)
                .cloned()
                .ok_or_else(|| AcgError::MissingLexicon(c.clone()))?,
            LambdaTerm::App(f, a) => LambdaTerm::app(self.phi_term(f)?, self.phi_term(a)?),
            LambdaTerm::Abs(x, b) => LambdaTerm::abs(x, self.phi_term(b)?),
        })
    }

    pub fn phi_judgement(&self, j: &LambdaJudgement) -> Result<LambdaJudgement, AcgError> {
        let context = j
            .context
            .iter()
            .map(|(x, a)| Ok((x.clone(), self.phi_type(a)?)))
            .collect::<Result<_, AcgError>>()?;
        Ok(LambdaJudgement {
            context,
            term: self.phi_term(&j.term)?,
            ty: self.phi_type(&j.ty)?,
        })
    }

    /// Checks the lexicon: types over `O`, `φ(S) = str`, and
    /// `⊢ φ(c) : φ(𝔗(c))` for every constant.
    pub fn validate(&self) -> Result<(), AcgError> {
        for p in &self.abstract_sig.atoms {
            let a = self
                .type_lexicon
                .get(p)
                .ok_or_else(|| AcgError::MissingLexicon(p.clone()))?;
            let mut atoms = BTreeSet::new();
            a.atoms(&mut atoms);
            if atoms.iter().any(|q| q != STRING_ATOM) {
                return Err(AcgError::NotStringType(p.clone()));
            }
        }
        if !self.abstract_sig.atoms.contains(&self.start)
            || self.type_lexicon.get(&self.start) != Some(&ImplType::str_type())
        {
            return Err(AcgError::BadStart(self.start.clone()));
        }
        let str_sig = self.string_signature();
        for (c, a) in &self.abstract_sig.constants {
            check_type_atoms(a, &self.abstract_sig)?;
            let t = self
                .term_lexicon
                .get(c)
                .ok_or_else(|| AcgError::MissingLexicon(c.clone()))?;
            let j = LambdaJudgement::closed(t.clone(), self.phi_type(a)?);
            lambda_typecheck(&j, &str_sig)
                .map_err(|e| AcgError::LexiconIllTyped(c.clone(), e.to_string()))?;
        }
        Ok(())
    }

    /// `v(p) = v(φ(p))`.
    pub fn valencies(&self) -> Result<BTreeMap<String, Valency>, AcgError> {
        let str_v = TensorTranslation::string(Vec::new()).valencies;
        let mut out = BTreeMap::new();
        for p in &self.abstract_sig.atoms {
            let s = tr_type(&self.phi_type(&ImplType::Atom(p.clone()))?, &str_v)?;
            out.insert(p.clone(), s.valency());
        }
        Ok(out)
    }
}

/// A translated ACG: the tensor grammar plus the single-type translated
/// axioms, which serve as the axiom translations of the abstract signature.
#[derive(Debug, Clone)]
pub struct AcgTranslation {
    pub grammar: Grammar,
    pub translation: TensorTranslation,
}

/// Splits a left-nested ℘ chain into its members.
fn unpack_pars(t: &TensorType) -> Vec<TensorType> {
    match t.split() {
        Split::Par(a, b) => {
            let mut out = unpack_pars(&a);
            out.push(b);
            out
        }
        _ => vec![t.clone()],
    }
}

/// Abstract axiom `⊢ c : A` becomes the translation of `⊢ φ(c) : φ(A)`
/// redecorated with the symbol of `A`, its outer ℘ chain written as
/// separate types.
pub fn acg_translate(g: &Acg) -> Result<AcgTranslation, AcgError> {
    g.validate()?;
    let valencies = g.valencies()?;
    let str_sig = g.string_signature();
    let str_tr = TensorTranslation::string(g.terminals.iter().cloned());
    let mut packed = Vec::new();
    let mut axioms = Vec::new();
    for (c, a) in &g.abstract_sig.constants {
        let j = LambdaJudgement::closed(g.term_lexicon[c].clone(), g.phi_type(a)?);
        let d = lambda_typecheck(&j, &str_sig)
            .map_err(|e| AcgError::LexiconIllTyped(c.clone(), e.to_string()))?;
        let t = translate_derivation(&d, &str_tr)?.conclusion;
        let ty = &t.types[0];
        let redecorated =
            TensorType::new(tr_type(a, &valencies)?, ty.upper.clone(), ty.lower.clone())
                .map_err(|e| TranslationError::Rule(e.to_string()))?;
        let one = Judgement::new(t.term.clone(), vec![redecorated.clone()])
            .map_err(|e| TranslationError::Rule(e.to_string()))?;
        let many = Judgement::new(t.term.clone(), unpack_pars(&redecorated))
            .map_err(|e| TranslationError::Rule(e.to_string()))?;
        packed.push((c.clone(), crate::engine::prettify(&one)));
        axioms.push((c.clone(), crate::engine::prettify(&many)));
    }
    let grammar = Grammar::new(
        valencies.clone(),
        g.terminals.iter().cloned().collect(),
        axioms,
        g.start.clone(),
        Mode::Ttc,
    );
    Ok(AcgTranslation {
        grammar,
        translation: TensorTranslation {
            valencies,
            axioms: AxiomPool::unlimited(packed),
        },
    })
}

/// Maps abstract literals through `φ` inside a tensor type symbol.
pub fn phi_symbol(g: &Acg, s: &Symbol) -> Result<Symbol, AcgError> {
    let str_v = TensorTranslation::string(Vec::new()).valencies;
    Ok(match s {
        Symbol::Lit(l) => {
            let img = tr_type(&g.phi_type(&ImplType::Atom(l.name.to_string()))?, &str_v)?;
            if l.negated {
                img.dual()
            } else {
                img
            }
        }
        Symbol::Tensor(a, b) => Symbol::tensor(phi_symbol(g, a)?, phi_symbol(g, b)?),
        Symbol::Par(a, b) => Symbol::par(phi_symbol(g, a)?, phi_symbol(g, b)?),
        Symbol::Nabla(..) | Symbol::Tri(..) => {
            return Err(AcgError::NotStringType("binder".into()))
        }
    })
}

/// All β-normal η-long terms of `ctx ⊢ ? : ty` using at most
/// `max_constants` constant occurrences, each context variable exactly once.
pub fn normal_terms(
    sig: &LambdaSignature,
    ctx: &[(String, ImplType)],
    ty: &ImplType,
    max_constants: usize,
) -> Vec<LambdaTerm> {
    let mut g = TermGen { sig, cost: &|_| 1 };
    let mut out: Vec<LambdaTerm> = g
        .gen(ctx, ty, max_constants, ctx.len())
        .into_iter()
        .map(|(t, _)| t.canonical_names())
        .collect();
    out.sort();
    out.dedup();
    out
}

struct TermGen<'a> {
    sig: &'a LambdaSignature,
    cost: &'a dyn Fn(&str) -> usize,
}

impl TermGen<'_> {
    /// Terms with their cost, at most `budget`. `depth` names fresh binders.
    fn gen(
        &mut self,
        ctx: &[(String, ImplType)],
        ty: &ImplType,
        budget: usize,
        depth: usize,
    ) -> Vec<(LambdaTerm, usize)> {
        match ty {
            ImplType::Arrow(a, b) => {
                let x = format!("_{depth}");
                let mut ctx2 = ctx.to_vec();
                ctx2.push((x.clone(), (**a).clone()));
                self.gen(&ctx2, b, budget, depth + 1)
                    .into_iter()
                    .map(|(t, c)| (LambdaTerm::Abs(x.clone(), Box::new(t)), c))
                    .collect()
            }
            ImplType::Atom(p) => {
                let mut out = Vec::new();
                for (k, (x, a)) in ctx.iter().enumerate() {
                    let (args, target) = a.spine();
                    if target != p {
                        continue;
                    }
                    let rest: Vec<(String, ImplType)> = ctx
                        .iter()
                        .enumerate()
                        .filter(|(q, _)| *q != k)
                        .map(|(_, v)| v.clone())
                        .collect();
                    let args: Vec<ImplType> = args.into_iter().cloned().collect();
                    self.applications(
                        LambdaTerm::Var(x.clone()),
                        &args,
                        &rest,
                        budget,
                        0,
                        depth,
                        &mut out,
                    );
                }
                let consts: Vec<(String, ImplType)> = self
                    .sig
                    .constants
                    .iter()
                    .map(|(c, a)| (c.clone(), a.clone()))
                    .collect();
                for (c, a) in consts {
                    let (args, target) = a.spine();
                    let cost = (self.cost)(&c);
                    if target != p || cost > budget {
                        continue;
                    }
                    let args: Vec<ImplType> = args.into_iter().cloned().collect();
                    self.applications(
                        LambdaTerm::Const(c.clone()),
                        &args,
                        ctx,
                        budget - cost,
                        cost,
                        depth,
                        &mut out,
                    );
                }
                out
            }
        }
    }

    /// `head a1 … an` with the context split among the arguments.
    #[allow(clippy::too_many_arguments)]
    fn applications(
        &mut self,
        head: LambdaTerm,
        args: &[ImplType],
        ctx: &[(String, ImplType)],
        budget: usize,
        spent: usize,
        depth: usize,
        out: &mut Vec<(LambdaTerm, usize)>,
    ) {
        if args.is_empty() {
            if ctx.is_empty() {
                out.push((head, spent));
            }
            return;
        }
        // the first argument takes a subset of the context, the rest recurse
        let n = ctx.len();
        for mask in 0..(1usize << n) {
            let (mine, others): (Vec<_>, Vec<_>) = ctx
                .iter()
                .enumerate()
                .partition(|(q, _)| mask & (1 << q) != 0);
            let mine: Vec<(String, ImplType)> = mine.into_iter().map(|(_, v)| v.clone()).collect();
            let others: Vec<(String, ImplType)> =
                others.into_iter().map(|(_, v)| v.clone()).collect();
            if args.len() == 1 && !others.is_empty() {
                continue;
            }
            for (a, c) in self.gen(&mine, &args[0], budget, depth) {
                let h = LambdaTerm::app(head.clone(), a);
                self.applications(h, &args[1..], &others, budget - c, spent + c, depth, out);
            }
        }
    }
}

/// Surface words of an ACG up to a length.
#[derive(Debug, Clone, Default)]
pub struct AcgLanguage {
    pub words: BTreeSet<Vec<String>>,
    /// False when some constant has an empty image, so the term bound
    /// does not bound word length.
    pub complete: bool,
}

/// Some constants have no terminal in their image; such constants are
/// allowed this many extra occurrences beyond the word length.
const EMPTY_IMAGE_SLACK: usize = 4;

/// `L(G)` up to `max_len`: abstract sentence terms mapped through the lexicon.
pub fn acg_language(g: &Acg, max_len: usize) -> Result<AcgLanguage, AcgError> {
    g.validate()?;
    let weight: BTreeMap<String, usize> = g
        .term_lexicon
        .iter()
        .map(|(c, t)| (c.clone(), t.constants().len()))
        .collect();
    let complete = weight.values().all(|&w| w > 0);
    let cost = |c: &str| if complete { weight[c] } else { 1 };
    let budget = if complete {
        max_len
    } else {
        max_len + EMPTY_IMAGE_SLACK
    };
    let mut gen = TermGen {
        sig: &g.abstract_sig,
        cost: &cost,
    };
    let str_sig = g.string_signature();
    let mut words = BTreeSet::new();
    for (t, _) in gen.gen(&[], &ImplType::Atom(g.start.clone()), budget, 0) {
        let img = LambdaJudgement::closed(g.phi_term(&t)?, ImplType::str_type());
        let nf = beta_eta_normal(&img, &str_sig)?;
        let w = nf.as_word().ok_or_else(|| {
            AcgError::LexiconIllTyped(g.start.clone(), format!("{nf} is not a string"))
        })?;
        if w.len() <= max_len {
            words.insert(w);
        }
    }
    Ok(AcgLanguage { words, complete })
}

fn tokens(src: &str) -> Result<Vec<(usize, String)>, String> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (p, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if "\\λ.()".contains(c) {
            out.push((p, c.to_string()));
            k += 1;
        } else if c == '-' && chars.get(k + 1).map(|x| x.1) == Some('>') {
            out.push((p, "->".into()));
            k += 2;
        } else if c.is_alphanumeric() || c == '_' || c == '\'' {
            let s = k;
            while k < chars.len()
                && (chars[k].1.is_alphanumeric() || chars[k].1 == '_' || chars[k].1 == '\'')
            {
                k += 1;
            }
            out.push((p, chars[s..k].iter().map(|x| x.1).collect()));
        } else {
            return Err(format!("unexpected {c:?} at column {}", p + 1));
        }
    }
    Ok(out)
}

struct LParser {
    toks: Vec<(usize, String)>,
    pos: usize,
}

impl LParser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|t| t.1.as_str())
    }

    fn err<T>(&self, msg: &str) -> Result<T, String> {
        match self.toks.get(self.pos) {
            Some((p, t)) => Err(format!("{msg} at {t:?}, column {}", p + 1)),
            None => Err(format!("{msg} at end of input")),
        }
    }

    fn expect(&mut self, t: &str) -> Result<(), String> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected {t:?}"))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(t)
                if t.chars()
                    .next()
                    .is_some_and(|c| c.is_alphanumeric() || c == '_') =>
            {
                let t = t.to_string();
                self.pos += 1;
                Ok(t)
            }
            _ => self.err("expected a name"),
        }
    }

    fn ty(&mut self) -> Result<ImplType, String> {
        let a = if self.peek() == Some("(") {
            self.pos += 1;
            let a = self.ty()?;
            self.expect(")")?;
            a
        } else {
            let n = self.ident()?;
            if n == "str" {
                ImplType::str_type()
            } else {
                ImplType::Atom(n)
            }
        };
        if self.peek() == Some("->") {
            self.pos += 1;
            Ok(ImplType::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn term(
        &mut self,
        bound: &mut Vec<String>,
        vars: &BTreeSet<String>,
    ) -> Result<LambdaTerm, String> {
        if matches!(self.peek(), Some("\\") | Some("λ")) {
            self.pos += 1;
            let mut xs = vec![self.ident()?];
            while self.peek() != Some(".") {
                xs.push(self.ident()?);
            }
            self.pos += 1;
            let n = bound.len();
            bound.extend(xs.iter().cloned());
            let body = self.term(bound, vars);
            bound.truncate(n);
            let mut t = body?;
            for x in xs.iter().rev() {
                t = LambdaTerm::abs(x, t);
            }
            return Ok(t);
        }
        let mut t = self.atom(bound, vars)?;
        loop {
            match self.peek() {
                None | Some(")") => return Ok(t),
                Some("\\") | Some("λ") => return Ok(LambdaTerm::app(t, self.term(bound, vars)?)),
                _ => t = LambdaTerm::app(t, self.atom(bound, vars)?),
            }
        }
    }

    fn atom(
        &mut self,
        bound: &mut Vec<String>,
        vars: &BTreeSet<String>,
    ) -> Result<LambdaTerm, String> {
        if self.peek() == Some("(") {
            self.pos += 1;
            let t = self.term(bound, vars)?;
            self.expect(")")?;
            return Ok(t);
        }
        let n = self.ident()?;
        Ok(if bound.contains(&n) || vars.contains(&n) {
            LambdaTerm::Var(n)
        } else {
            LambdaTerm::Const(n)
        })
    }

    fn done(&self) -> Result<(), String> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("unexpected input")
        }
    }
}

/// `A -> B -> C`, right-associative; `str` abbreviates `O -> O`.
pub fn parse_impl_type(src: &str) -> Result<ImplType, String> {
    let mut p = LParser {
        toks: tokens(src)?,
        pos: 0,
    };
    let t = p.ty()?;
    p.done()?;
    Ok(t)
}

/// `\x y. t`, application by juxtaposition. Names bound by a λ or listed
/// in `vars` are variables, all others constants.
pub fn parse_lambda_term(src: &str, vars: &BTreeSet<String>) -> Result<LambdaTerm, String> {
    let mut p = LParser {
        toks: tokens(src)?,
        pos: 0,
    };
    let t = p.term(&mut Vec::new(), vars)?;
    p.done()?;
    Ok(t)
}

/// `x : A, y : B |- t : C`.
pub fn parse_lambda_judgement(src: &str) -> Result<LambdaJudgement, String> {
    let (ctx, rest) = src.split_once("|-").ok_or("expected |-")?;
    let mut context = Vec::new();
    for part in ctx.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, a) = part.split_once(':').ok_or("context entries are x : A")?;
        context.push((x.trim().to_string(), parse_impl_type(a)?));
    }
    let (t, a) = rest.rsplit_once(':').ok_or("expected t : A")?;
    let vars = context.iter().map(|(x, _)| x.clone()).collect();
    Ok(LambdaJudgement {
        context,
        term: parse_lambda_term(t, &vars)?,
        ty: parse_impl_type(a)?,
    })
}

/// ACG file: sections `atoms:`, `constants:` (`c : A`), `lexicon types:`
/// (`p => A`), `lexicon terms:` (`c => t`), `start:` and optionally
/// `terminals:`. Terminals default to the constants of the lexicon terms.
pub fn parse_acg(src: &str) -> Result<Acg, ParseError> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Constants,
        Types,
        Terms,
    }
    let mut sec = Sec::None;
    let mut sig = LambdaSignature::default();
    let mut terminals = BTreeSet::new();
    let mut type_lexicon = BTreeMap::new();
    let mut term_lexicon = BTreeMap::new();
    let mut start = None;
    for (n, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ParseError::Line { line: n + 1, msg };
        let header = |name: &str| {
            line.strip_prefix(name)
                .and_then(|r| r.trim_start().strip_prefix(':'))
                .map(str::trim)
        };
        if let Some(r) = header("atoms") {
            sig.atoms.extend(r.split_whitespace().map(String::from));
            sec = Sec::None;
        } else if let Some(r) = header("terminals") {
            terminals.extend(r.split_whitespace().map(String::from));
            sec = Sec::None;
        } else if header("constants").is_some_and(str::is_empty) {
            sec = Sec::Constants;
        } else if header("lexicon types").is_some_and(str::is_empty) {
            sec = Sec::Types;
        } else if header("lexicon terms").is_some_and(str::is_empty) {
            sec = Sec::Terms;
        } else if let Some(r) = header("start") {
            start = Some(r.to_string());
            sec = Sec::None;
        } else {
            match sec {
                Sec::Constants => {
                    let (c, a) = line
                        .split_once(':')
                        .ok_or_else(|| err("expected 'c : TYPE'".into()))?;
                    sig.constants
                        .insert(c.trim().to_string(), parse_impl_type(a).map_err(err)?);
                }
                Sec::Types | Sec::Terms => {
                    let (c, rhs) = line
                        .split_once("=>")
                        .ok_or_else(|| err("expected 'name => ...'".into()))?;
                    let c = c.trim().to_string();
                    if sec == Sec::Types {
                        type_lexicon.insert(c, parse_impl_type(rhs).map_err(err)?);
                    } else {
                        let t = parse_lambda_term(rhs, &BTreeSet::new()).map_err(err)?;
                        if let Some(x) = t.free_vars().first() {
                            return Err(err(format!("free variable {x} in a lexicon term")));
                        }
                        term_lexicon.insert(c, t);
                    }
                }
                Sec::None => return Err(err(format!("unexpected line {line:?}"))),
            }
        }
    }
    for t in term_lexicon.values() {
        terminals.extend(t.constants());
    }
    let start = start.ok_or(ParseError::Line {
        line: 0,
        msg: "missing start".into(),
    })?;
    Ok(Acg {
        abstract_sig: sig,
        terminals,
        type_lexicon,
        term_lexicon,
        start,
    })
}

impl Acg {
    /// ACG file text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let atoms: Vec<&str> = self.abstract_sig.atoms.iter().map(String::as_str).collect();
        s.push_str(&format!("atoms: {}\n", atoms.join(" ")));
        s.push_str("constants:\n");
        for (c, a) in &self.abstract_sig.constants {
            s.push_str(&format!("  {c} : {a}\n"));
        }
        s.push_str("lexicon types:\n");
        for (p, a) in &self.type_lexicon {
            s.push_str(&format!("  {p} => {a}\n"));
        }
        s.push_str("lexicon terms:\n");
        for (c, t) in &self.term_lexicon {
            s.push_str(&format!("  {c} => {t}\n"));
        }
        s.push_str(&format!("start: {}\n", self.start));
        s
    }
}
