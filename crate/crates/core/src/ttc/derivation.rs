//! Rule application, derivation trees and the derivation checker.
//!
//! Rules address sequent members by position. Two-premise rules rename the
//! right premise apart from the left one first, so index names inside a
//! derivation never matter; only the rule structure and literal symbols do.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{identity_term, Judgement, Literal, Symbol, TensorType};
use crate::term::{delta_seq, normalize, Index, TensorTerm, Word};

/// Which calculus a rule application or search runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Plain tensor type calculus: no binder rules.
    Ttc,
    /// Extended calculus.
    Full,
    /// Extended calculus with `(∇)` forbidden on an empty context.
    LambekRestricted,
}

impl Mode {
    pub fn allows_binders(self) -> bool {
        self != Mode::Ttc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// `δ^{I'J̄}_{ĪJ'} ⊢ p̄^I_J, p^{J'}_{I'}` for a positive literal `p`.
    Id {
        lit: Literal,
        i: Vec<Index>,
        j: Vec<Index>,
        i2: Vec<Index>,
        j2: Vec<Index>,
    },
    Axiom(String),
    /// Cut on the `left`-th type of the first premise and the `right`-th of
    /// the second. Conclusion: remaining left types, then remaining right.
    Cut {
        left: usize,
        right: usize,
    },
    /// Conclusion: left types with position `left` replaced by `A⊗B`, then
    /// the right types without position `right`.
    Tensor {
        left: usize,
        right: usize,
    },
    /// Joins `first ℘ second`, placed at the smaller position.
    Par {
        first: usize,
        second: usize,
    },
    /// Reorders the sequent: member `k` of the conclusion is member
    /// `perm[k]` of the premise.
    Perm(Vec<usize>),
    /// Binds the lower slot `lower` and upper slot `upper` of the type at
    /// `pos`, consuming the ε-edge between them.
    Nabla {
        pos: usize,
        lower: usize,
        upper: usize,
    },
    /// Binds the slots and glues the term along them.
    Tri {
        pos: usize,
        lower: usize,
        upper: usize,
    },
}

impl Rule {
    pub fn arity(&self) -> usize {
        match self {
            Rule::Id { .. } | Rule::Axiom(_) => 0,
            Rule::Cut { .. } | Rule::Tensor { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule expects {expected} premises, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("position {0} is out of range")]
    Position(usize),
    #[error("Id needs a positive literal")]
    NotPositive,
    #[error("Id index sequences do not fit valency {0}")]
    ArityMismatch(String),
    #[error("index collision: {0}")]
    IndexCollision(String),
    #[error("cut formulas are not dual")]
    NotDual,
    #[error("par needs two distinct positions")]
    SamePosition,
    #[error("not a permutation of {0} types")]
    BadPermutation(usize),
    #[error("binder rules are not available in this calculus")]
    BinderInTtc,
    #[error("binder slot out of range")]
    BadSlot,
    #[error("no unlabelled edge between the bound indices")]
    MissingEpsilonEdge,
    #[error("(nabla) with empty context violates the Lambek restriction")]
    LambekRestrictionViolated,
    #[error("unknown axiom {0}")]
    UnknownAxiom(String),
    #[error("axiom {0} used more often than supplied")]
    AxiomReuse(String),
    #[error("ill-formed conclusion: {0}")]
    IllFormed(String),
}

/// Named non-logical axioms with optional multiplicities. `None` means the
/// axiom may be used any number of times (grammar style).
#[derive(Debug, Clone, Default)]
pub struct AxiomPool {
    entries: BTreeMap<String, (Judgement, Option<usize>)>,
}

impl AxiomPool {
    pub fn new() -> Self {
        AxiomPool::default()
    }

    pub fn unlimited(axioms: impl IntoIterator<Item = (String, Judgement)>) -> Self {
        AxiomPool {
            entries: axioms.into_iter().map(|(n, j)| (n, (j, None))).collect(),
        }
    }

    pub fn insert(&mut self, name: &str, j: Judgement, count: Option<usize>) {
        self.entries.insert(name.to_string(), (j, count));
    }

    pub fn get(&self, name: &str) -> Option<&Judgement> {
        self.entries.get(name).map(|(j, _)| j)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }
}

/// Identity axiom for a positive literal.
pub fn id_axiom(
    lit: &Literal,
    i: &[Index],
    j: &[Index],
    i2: &[Index],
    j2: &[Index],
) -> Result<Judgement, RuleError> {
    if lit.negated {
        return Err(RuleError::NotPositive);
    }
    let v = lit.valency;
    if i.len() != v.down || i2.len() != v.down || j.len() != v.up || j2.len() != v.up {
        return Err(RuleError::ArityMismatch(v.to_string()));
    }
    let lower: Vec<Index> = i.iter().rev().chain(j2.iter()).cloned().collect();
    let upper: Vec<Index> = i2.iter().chain(j.iter().rev()).cloned().collect();
    let expr = delta_seq(&lower, &upper).map_err(|e| RuleError::IndexCollision(e.to_string()))?;
    let neg = TensorType::new(Symbol::Lit(lit.dual()), i.to_vec(), j.to_vec())
        .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
    let pos = TensorType::new(Symbol::Lit(lit.clone()), j2.to_vec(), i2.to_vec())
        .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
    let j = Judgement::new(normalize(&expr), vec![neg, pos])
        .map_err(|e| RuleError::IllFormed(e.to_string()))?;
    Ok(j)
}

/// The Id leaf concluding exactly `[neg, pos]` with the given names.
pub fn id_rule_for(neg: &TensorType, pos: &TensorType) -> Option<Rule> {
    let Symbol::Lit(l) = &pos.symbol else {
        return None;
    };
    if l.negated || neg.symbol != pos.symbol.dual() {
        return None;
    }
    Some(Rule::Id {
        lit: l.clone(),
        i: neg.upper.clone(),
        j: neg.lower.clone(),
        i2: pos.lower.clone(),
        j2: pos.upper.clone(),
    })
}

fn pos_check(n: usize, p: usize) -> Result<(), RuleError> {
    if p < n {
        Ok(())
    } else {
        Err(RuleError::Position(p))
    }
}

fn finish(term: TensorTerm, types: Vec<TensorType>) -> Result<Judgement, RuleError> {
    Judgement::new(term, types).map_err(|e| RuleError::IllFormed(e.to_string()))
}

/// Applies one rule to premise judgements.
pub fn apply_rule(
    rule: &Rule,
    premises: &[&Judgement],
    axioms: &AxiomPool,
    mode: Mode,
) -> Result<Judgement, RuleError> {
    if premises.len() != rule.arity() {
        return Err(RuleError::Arity {
            expected: rule.arity(),
            got: premises.len(),
        });
    }
    match rule {
        Rule::Id { lit, i, j, i2, j2 } => id_axiom(lit, i, j, i2, j2),
        Rule::Axiom(name) => axioms
            .get(name)
            .cloned()
            .ok_or_else(|| RuleError::UnknownAxiom(name.clone())),
        Rule::Cut { left, right } => {
            let l = premises[0];
            let r = premises[1].rename_apart(&l.indices());
            pos_check(l.types.len(), *left)?;
            pos_check(r.types.len(), *right)?;
            let a = &l.types[*left];
            let b = &r.types[*right];
            if b.symbol != a.symbol.dual() {
                return Err(RuleError::NotDual);
            }
            let d = a.dual();
            let mut map = BTreeMap::new();
            for (x, y) in b.upper.iter().zip(&d.upper) {
                map.insert(x.clone(), y.clone());
            }
            for (x, y) in b.lower.iter().zip(&d.lower) {
                map.insert(x.clone(), y.clone());
            }
            let r = r.rename(&map);
            let term = l
                .term
                .multiply(&r.term)
                .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
            let mut types: Vec<TensorType> = l
                .types
                .iter()
                .enumerate()
                .filter(|(k, _)| k != left)
                .map(|(_, t)| t.clone())
                .collect();
            types.extend(
                r.types
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k != right)
                    .map(|(_, t)| t.clone()),
            );
            finish(term, types)
        }
        Rule::Tensor { left, right } => {
            let l = premises[0];
            let r = premises[1].rename_apart(&l.indices());
            pos_check(l.types.len(), *left)?;
            pos_check(r.types.len(), *right)?;
            let ab = TensorType::tensor(&l.types[*left], &r.types[*right])
                .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
            let mut types = l.types.clone();
            types[*left] = ab;
            types.extend(
                r.types
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k != right)
                    .map(|(_, t)| t.clone()),
            );
            let term = l
                .term
                .multiply(&r.term)
                .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
            finish(term, types)
        }
        Rule::Par { first, second } => {
            let p = premises[0];
            pos_check(p.types.len(), *first)?;
            pos_check(p.types.len(), *second)?;
            if first == second {
                return Err(RuleError::SamePosition);
            }
            let ab = TensorType::par(&p.types[*first], &p.types[*second])
                .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
            let at = (*first).min(*second);
            let mut types = Vec::with_capacity(p.types.len() - 1);
            for (k, t) in p.types.iter().enumerate() {
                if k == at {
                    types.push(ab.clone());
                } else if k != *first && k != *second {
                    types.push(t.clone());
                }
            }
            finish(p.term.clone(), types)
        }
        Rule::Perm(perm) => {
            let p = premises[0];
            let n = p.types.len();
            let set: BTreeSet<usize> = perm.iter().copied().collect();
            if perm.len() != n || set.len() != n || set.iter().any(|&k| k >= n) {
                return Err(RuleError::BadPermutation(n));
            }
            Ok(p.reordered(perm))
        }
        Rule::Nabla { pos, lower, upper } => {
            if !mode.allows_binders() {
                return Err(RuleError::BinderInTtc);
            }
            let p = premises[0];
            pos_check(p.types.len(), *pos)?;
            if mode == Mode::LambekRestricted && p.types.len() < 2 {
                return Err(RuleError::LambekRestrictionViolated);
            }
            let body = &p.types[*pos];
            let (Some(alpha), Some(beta)) = (body.lower.get(*lower), body.upper.get(*upper)) else {
                return Err(RuleError::BadSlot);
            };
            match p.term.edge_from(beta) {
                Some((w, u)) if w.is_empty() && u == alpha => {}
                _ => return Err(RuleError::MissingEpsilonEdge),
            }
            let mut term = p.term.clone();
            term.remove_edge(beta);
            let bound = TensorType::nabla(body, alpha, beta)
                .map_err(|e| RuleError::IllFormed(e.to_string()))?;
            let mut types = p.types.clone();
            types[*pos] = bound;
            finish(term, types)
        }
        Rule::Tri { pos, lower, upper } => {
            if !mode.allows_binders() {
                return Err(RuleError::BinderInTtc);
            }
            let p = premises[0];
            pos_check(p.types.len(), *pos)?;
            let body = &p.types[*pos];
            let (Some(alpha), Some(beta)) = (body.lower.get(*lower), body.upper.get(*upper)) else {
                return Err(RuleError::BadSlot);
            };
            let term = p
                .term
                .with_edge(Word::empty(), alpha.clone(), beta.clone())
                .map_err(|e| RuleError::IndexCollision(e.to_string()))?;
            let bound = TensorType::tri(body, alpha, beta)
                .map_err(|e| RuleError::IllFormed(e.to_string()))?;
            let mut types = p.types.clone();
            types[*pos] = bound;
            finish(term, types)
        }
    }
}

/// A derivation tree. Every node caches its conclusion; [`check`] replays
/// the tree from the leaves and ignores the cache.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: Judgement,
}

impl Derivation {
    /// Builds a node, computing its conclusion.
    pub fn infer(
        rule: Rule,
        premises: Vec<Derivation>,
        axioms: &AxiomPool,
        mode: Mode,
    ) -> Result<Derivation, RuleError> {
        let refs: Vec<&Judgement> = premises.iter().map(|d| &d.conclusion).collect();
        let conclusion = apply_rule(&rule, &refs, axioms, mode)?;
        Ok(Derivation {
            rule,
            premises,
            conclusion,
        })
    }

    pub fn leaf(rule: Rule, axioms: &AxiomPool, mode: Mode) -> Result<Derivation, RuleError> {
        Derivation::infer(rule, Vec::new(), axioms, mode)
    }

    /// Wraps in a permutation unless it is the identity.
    pub fn permuted(self, perm: Vec<usize>) -> Derivation {
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return self;
        }
        let conclusion = self.conclusion.reordered(&perm);
        Derivation {
            rule: Rule::Perm(perm),
            premises: vec![self],
            conclusion,
        }
    }

    /// Reorders the conclusion to match `target` up to renaming.
    pub fn aligned_to(self, target: &Judgement) -> Option<Derivation> {
        let perm = self.conclusion.alpha_perm(target)?;
        Some(self.permuted(perm))
    }

    pub fn count_rule(&self, pred: &dyn Fn(&Rule) -> bool) -> usize {
        usize::from(pred(&self.rule))
            + self
                .premises
                .iter()
                .map(|p| p.count_rule(pred))
                .sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.count_rule(&|r| matches!(r, Rule::Cut { .. })) == 0
    }

    pub fn uses_axioms(&self) -> bool {
        self.count_rule(&|r| matches!(r, Rule::Axiom(_))) > 0
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    /// Visits every node with its conclusion.
    pub fn for_each(&self, f: &mut dyn FnMut(&Derivation)) {
        for p in &self.premises {
            p.for_each(f);
        }
        f(self);
    }

    /// Postfix script: premises first, one rule per line.
    pub fn to_script(&self) -> String {
        let mut out = String::new();
        self.write_script(&mut out);
        out
    }

    fn write_script(&self, out: &mut String) {
        for p in &self.premises {
            p.write_script(out);
        }
        out.push_str(&self.rule.to_string());
        out.push('\n');
    }
}

fn fmt_list(ix: &[Index]) -> String {
    let names: Vec<&str> = ix.iter().map(|i| i.name()).collect();
    format!("({})", names.join(" "))
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Id { lit, i, j, i2, j2 } => write!(
                f,
                "id {} ({},{}) {} {} {} {}",
                lit.name,
                lit.valency.up,
                lit.valency.down,
                fmt_list(i),
                fmt_list(j),
                fmt_list(i2),
                fmt_list(j2)
            ),
            Rule::Axiom(n) => write!(f, "axiom {n}"),
            Rule::Cut { left, right } => write!(f, "cut {left} {right}"),
            Rule::Tensor { left, right } => write!(f, "tensor {left} {right}"),
            Rule::Par { first, second } => write!(f, "par {first} {second}"),
            Rule::Perm(p) => {
                let s: Vec<String> = p.iter().map(|k| k.to_string()).collect();
                write!(f, "perm {}", s.join(" "))
            }
            Rule::Nabla { pos, lower, upper } => write!(f, "nab {pos} {lower} {upper}"),
            Rule::Tri { pos, lower, upper } => write!(f, "tri {pos} {lower} {upper}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("step at {path:?} ({rule}): {reason}")]
    BadStep {
        path: Vec<usize>,
        rule: String,
        reason: RuleError,
    },
    #[error("unknown axiom {0}")]
    UnknownAxiom(String),
    #[error("axiom {0} used more often than supplied")]
    AxiomReuse(String),
    #[error("axiom {0} supplied but not used")]
    UnusedAxiom(String),
    #[error("stored conclusion at {0:?} differs from the replayed one")]
    ConclusionMismatch(Vec<usize>),
}

/// Replays `d` against `axioms`, enforcing multiplicities. Axioms with an
/// explicit count must be used exactly that often.
pub fn check(d: &Derivation, axioms: &AxiomPool, mode: Mode) -> Result<Judgement, CheckError> {
    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let j = replay(d, axioms, mode, &mut Vec::new(), &mut used)?;
    for (name, (_, count)) in &axioms.entries {
        if let Some(c) = count {
            let u = used.get(name).copied().unwrap_or(0);
            if u > *c {
                return Err(CheckError::AxiomReuse(name.clone()));
            }
            if u < *c {
                return Err(CheckError::UnusedAxiom(name.clone()));
            }
        }
    }
    Ok(j)
}

fn replay(
    d: &Derivation,
    axioms: &AxiomPool,
    mode: Mode,
    path: &mut Vec<usize>,
    used: &mut BTreeMap<String, usize>,
) -> Result<Judgement, CheckError> {
    let mut prem = Vec::new();
    for (k, p) in d.premises.iter().enumerate() {
        path.push(k);
        prem.push(replay(p, axioms, mode, path, used)?);
        path.pop();
    }
    if let Rule::Axiom(name) = &d.rule {
        let Some((_, count)) = axioms.entries.get(name) else {
            return Err(CheckError::UnknownAxiom(name.clone()));
        };
        let u = used.entry(name.clone()).or_default();
        *u += 1;
        if let Some(c) = count {
            if *u > *c {
                return Err(CheckError::AxiomReuse(name.clone()));
            }
        }
    }
    let refs: Vec<&Judgement> = prem.iter().collect();
    let j = apply_rule(&d.rule, &refs, axioms, mode).map_err(|reason| CheckError::BadStep {
        path: path.clone(),
        rule: d.rule.to_string(),
        reason,
    })?;
    if !j.alpha_eq(&d.conclusion) {
        return Err(CheckError::ConclusionMismatch(path.clone()));
    }
    Ok(j)
}

/// Replays a rule list without stored conclusions (the script form).
pub fn build_from_script(
    steps: &[Rule],
    axioms: &AxiomPool,
    mode: Mode,
) -> Result<Derivation, CheckError> {
    let mut stack: Vec<Derivation> = Vec::new();
    for (line, rule) in steps.iter().enumerate() {
        let n = rule.arity();
        if stack.len() < n {
            return Err(CheckError::BadStep {
                path: vec![line],
                rule: rule.to_string(),
                reason: RuleError::Arity {
                    expected: n,
                    got: stack.len(),
                },
            });
        }
        let premises = stack.split_off(stack.len() - n);
        if let Rule::Axiom(name) = rule {
            if axioms.get(name).is_none() {
                return Err(CheckError::UnknownAxiom(name.clone()));
            }
        }
        let d = Derivation::infer(rule.clone(), premises, axioms, mode).map_err(|reason| {
            CheckError::BadStep {
                path: vec![line],
                rule: rule.to_string(),
                reason,
            }
        })?;
        stack.push(d);
    }
    if stack.len() != 1 {
        return Err(CheckError::BadStep {
            path: vec![steps.len()],
            rule: "end of script".into(),
            reason: RuleError::Arity {
                expected: 1,
                got: stack.len(),
            },
        });
    }
    Ok(stack.pop().expect("one derivation left"))
}

/// Cut-free derivation of the η-expanded identity `⊢ Ā, A` with the
/// identity-linking term, the dual first.
pub fn eta_identity(a: &TensorType, mode: Mode) -> Derivation {
    let pool = AxiomPool::new();
    let d = eta(a, mode, &pool);
    let target_dual = a.dual().freshened();
    let target = Judgement::unchecked(
        identity_term(a, &target_dual).expect("dual symbol"),
        vec![target_dual, a.clone()],
    );
    d.aligned_to(&target)
        .expect("eta expansion concludes the identity")
}

fn eta(a: &TensorType, mode: Mode, pool: &AxiomPool) -> Derivation {
    use super::types::Split;
    let d = match a.split() {
        Split::Lit(l) => {
            let other = a.dual().freshened();
            if l.negated {
                let leaf = Derivation::leaf(id_rule_for(a, &other).expect("literal"), pool, mode)
                    .expect("id");
                leaf.permuted(vec![1, 0])
            } else {
                Derivation::leaf(id_rule_for(&other, a).expect("literal"), pool, mode).expect("id")
            }
        }
        Split::Tensor(x, y) => {
            // ⊢ ȳ℘x̄, x⊗y from ⊢ x̄, x and ⊢ ȳ, y
            let dx = eta(&x, mode, pool);
            let dy = eta(&y, mode, pool);
            let t = Derivation::infer(Rule::Tensor { left: 1, right: 1 }, vec![dx, dy], pool, mode)
                .expect("tensor");
            // t ⊢ x̄, x⊗y, ȳ
            Derivation::infer(
                Rule::Par {
                    first: 2,
                    second: 0,
                },
                vec![t],
                pool,
                mode,
            )
            .expect("par")
        }
        Split::Par(x, y) => {
            // ⊢ ȳ⊗x̄, x℘y from ⊢ ȳ, y and ⊢ x̄, x
            let dy = eta(&y, mode, pool);
            let dx = eta(&x, mode, pool);
            let t = Derivation::infer(Rule::Tensor { left: 0, right: 0 }, vec![dy, dx], pool, mode)
                .expect("tensor");
            // t ⊢ ȳ⊗x̄, y, x
            Derivation::infer(
                Rule::Par {
                    first: 2,
                    second: 1,
                },
                vec![t],
                pool,
                mode,
            )
            .expect("par")
        }
        Split::Nabla { body, alpha, beta } | Split::Tri { body, alpha, beta } => {
            let is_nabla = matches!(a.symbol, Symbol::Nabla(..));
            let e = eta(&body, mode, pool);
            // e ⊢ B̄, B; the dual carries α as an upper and β as a lower index
            let bd = &e.conclusion.types[0];
            let b = &e.conclusion.types[1];
            let slot = |v: &[Index], i: &Index| v.iter().position(|x| x == i);
            let orig = &body;
            let la = slot(&orig.lower, &alpha).expect("alpha");
            let ub = slot(&orig.upper, &beta).expect("beta");
            let alpha_b = b.lower[la].clone();
            let beta_b = b.upper[ub].clone();
            let d_lower_pos =
                slot(&bd.lower, &find_partner(&e.conclusion, &beta_b, true)).expect("dual beta");
            let d_upper_pos =
                slot(&bd.upper, &find_partner(&e.conclusion, &alpha_b, false)).expect("dual alpha");
            // Triangle on the dual first, then nabla on the body (context nonempty).
            let (dual_rule, body_rule) = (
                Rule::Tri {
                    pos: 0,
                    lower: d_lower_pos,
                    upper: d_upper_pos,
                },
                Rule::Nabla {
                    pos: 1,
                    lower: la,
                    upper: ub,
                },
            );
            let (first, second) = if is_nabla {
                (dual_rule, body_rule)
            } else {
                (
                    Rule::Tri {
                        pos: 1,
                        lower: la,
                        upper: ub,
                    },
                    Rule::Nabla {
                        pos: 0,
                        lower: d_lower_pos,
                        upper: d_upper_pos,
                    },
                )
            };
            let s1 = Derivation::infer(first, vec![e], pool, mode).expect("first binder");
            Derivation::infer(second, vec![s1], pool, mode).expect("second binder")
        }
    };
    d
}

/// In an identity linking, the index joined by an ε-edge to `i`. `from`
/// selects edges leaving `i` (true) or entering it (false).
fn find_partner(j: &Judgement, i: &Index, from: bool) -> Index {
    if from {
        j.term
            .edge_from(i)
            .map(|(_, u)| u.clone())
            .expect("edge from index")
    } else {
        j.term
            .edges()
            .find(|(_, _, u)| *u == i)
            .map(|(l, _, _)| l.clone())
            .expect("edge into index")
    }
}

/// `t ⊢ Γ, A℘B` to `t ⊢ Γ, A, B` by cutting against the switch judgement
/// `⊢ B̄⊗Ā, A, B`. The result lists Γ first, then `A`, `B`.
pub fn par_inverse(d: Derivation, pos: usize, mode: Mode) -> Result<Derivation, ParInverseError> {
    use super::types::Split;
    let Some(ty) = d.conclusion.types.get(pos).cloned() else {
        return Err(ParInverseError::Position(pos));
    };
    let Split::Par(a, b) = ty.split() else {
        return Err(ParInverseError::NotAPar);
    };
    let pool = AxiomPool::new();
    // ⊢ Ā, A and ⊢ B̄, B tensored on the duals: ⊢ B̄⊗Ā, B, A
    let ea = eta_identity(&a, mode);
    let eb = eta_identity(&b, mode);
    let sw = Derivation::infer(
        Rule::Tensor { left: 0, right: 0 },
        vec![eb, ea],
        &pool,
        mode,
    )
    .map_err(ParInverseError::Rule)?
    .permuted(vec![0, 2, 1]);
    let out = Derivation::infer(
        Rule::Cut {
            left: pos,
            right: 0,
        },
        vec![d, sw],
        &pool,
        mode,
    )
    .map_err(ParInverseError::Rule)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParInverseError {
    #[error("position {0} out of range")]
    Position(usize),
    #[error("the type is not a par")]
    NotAPar,
    #[error(transparent)]
    Rule(RuleError),
}
