//! Cut-free backward proof search for the plain tensor type calculus.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};

use super::derivation::{id_rule_for, AxiomPool, Derivation, Mode, Rule};
use super::types::{identity_term, CanonicalJudgement, Judgement, Split, Symbol, TensorType};
use crate::term::{Index, TensorTerm};

/// Searches for a cut-free derivation of `goal` from Id, ⊗ and ℘. The
/// returned derivation concludes `goal` with its sequent order.
pub fn prove(goal: &Judgement) -> Option<Derivation> {
    if goal.types.iter().any(|t| !t.symbol.is_binder_free()) {
        return None;
    }
    let mut p = Prover {
        failed: FxHashSet::default(),
        pool: AxiomPool::new(),
    };
    p.search(goal)
}

struct Prover {
    failed: FxHashSet<CanonicalJudgement>,
    pool: AxiomPool,
}

/// Term restricted to the edges that start in `side`.
pub(crate) fn restrict(term: &TensorTerm, side: &BTreeSet<Index>) -> TensorTerm {
    let mut t = TensorTerm::unit();
    for (l, w, u) in term.edges() {
        if side.contains(l) {
            t.insert_edge_raw(l.clone(), w.clone(), u.clone());
        }
    }
    t
}

/// Connected components of sequent members linked by term edges. Nodes are
/// the members of `types`; returns a component id per member.
pub(crate) fn components(term: &TensorTerm, types: &[&TensorType]) -> Vec<usize> {
    let mut owner: FxHashMap<&Index, usize> = FxHashMap::default();
    for (k, t) in types.iter().enumerate() {
        for i in t.indices() {
            owner.insert(i, k);
        }
    }
    let mut parent: Vec<usize> = (0..types.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let n = p[c];
            p[c] = r;
            c = n;
        }
        r
    }
    for (l, _, u) in term.edges() {
        if let (Some(&a), Some(&b)) = (owner.get(l), owner.get(u)) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..types.len()).map(|k| find(&mut parent, k)).collect()
}

/// Tensor splits of `types` around the member at `k` decomposed into
/// `(a, b)`. Yields the members (by position) that go with `a` and with `b`.
pub(crate) fn tensor_partitions(
    term: &TensorTerm,
    types: &[TensorType],
    k: usize,
    a: &TensorType,
    b: &TensorType,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = types.len();
    let mut nodes: Vec<&TensorType> = Vec::with_capacity(n + 1);
    for (q, t) in types.iter().enumerate() {
        nodes.push(if q == k { a } else { t });
    }
    nodes.push(b);
    let comp = components(term, &nodes);
    let (ca, cb) = (comp[k], comp[n]);
    if ca == cb {
        return Vec::new();
    }
    let mut free: Vec<usize> = Vec::new();
    for (q, &c) in comp[..n].iter().enumerate() {
        if q != k && c != ca && c != cb && !free.contains(&c) {
            free.push(c);
        }
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let left_comp = |c: usize| {
            c == ca
                || free
                    .iter()
                    .position(|&f| f == c)
                    .is_some_and(|p| mask & (1 << p) == 0)
        };
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (q, &c) in comp[..n].iter().enumerate() {
            if q == k {
                continue;
            }
            if left_comp(c) {
                l.push(q);
            } else {
                r.push(q);
            }
        }
        out.push((l, r));
    }
    out
}

/// Index set of some sequent members.
pub(crate) fn index_set<'a>(types: impl Iterator<Item = &'a TensorType>) -> BTreeSet<Index> {
    types.flat_map(|t| t.indices().cloned()).collect()
}

/// Leaf for a two-literal sequent whose term is the identity linking.
pub(crate) fn id_leaf(g: &Judgement, pool: &AxiomPool, mode: Mode) -> Option<Derivation> {
    if g.types.len() != 2 {
        return None;
    }
    let (x, y) = (&g.types[0], &g.types[1]);
    let (Symbol::Lit(lx), Symbol::Lit(_)) = (&x.symbol, &y.symbol) else {
        return None;
    };
    let (neg, pos, order) = if lx.negated {
        (x, y, vec![0, 1])
    } else {
        (y, x, vec![1, 0])
    };
    if identity_term(pos, neg)? != g.term {
        return None;
    }
    let leaf = Derivation::leaf(id_rule_for(neg, pos)?, pool, mode).ok()?;
    Some(leaf.permuted(order))
}

/// Assembles a tensor step: `d1 ⊢ A, Γ1`, `d2 ⊢ B, Γ2` concluding `g`
/// whose member `k` is `A⊗B` and whose other members split as `l`, `r`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn tensor_step(
    g: &Judgement,
    k: usize,
    l: &[usize],
    r: &[usize],
    d1: Derivation,
    d2: Derivation,
    pool: &AxiomPool,
    mode: Mode,
) -> Option<Derivation> {
    let d = Derivation::infer(Rule::Tensor { left: 0, right: 0 }, vec![d1, d2], pool, mode).ok()?;
    // conclusion order: A⊗B, l..., r...
    let mut at: Vec<usize> = vec![0; g.types.len()];
    at[k] = 0;
    for (p, &q) in l.iter().chain(r.iter()).enumerate() {
        at[q] = p + 1;
    }
    Some(d.permuted(at))
}

pub(crate) fn sub_judgement(g: &Judgement, first: &TensorType, members: &[usize]) -> Judgement {
    let mut types = vec![first.clone()];
    types.extend(members.iter().map(|&q| g.types[q].clone()));
    let idx = index_set(types.iter());
    Judgement::unchecked(restrict(&g.term, &idx), types)
}

impl Prover {
    fn search(&mut self, g: &Judgement) -> Option<Derivation> {
        if !g.is_regular() || g.term.edges().any(|(_, w, _)| !w.is_empty()) {
            return None;
        }
        if !g.literal_balance().is_empty() {
            return None;
        }
        for (k, t) in g.types.iter().enumerate() {
            if let Split::Par(a, b) = t.split() {
                let mut types = g.types.clone();
                types[k] = a;
                types.insert(k + 1, b);
                let prem = Judgement::unchecked(g.term.clone(), types);
                let d = self.search(&prem)?;
                return Derivation::infer(
                    Rule::Par {
                        first: k,
                        second: k + 1,
                    },
                    vec![d],
                    &self.pool,
                    Mode::Ttc,
                )
                .ok();
            }
        }
        let key = g.canonical();
        if self.failed.contains(&key) {
            return None;
        }
        if let Some(d) = id_leaf(g, &self.pool, Mode::Ttc) {
            return Some(d);
        }
        for (k, t) in g.types.iter().enumerate() {
            let Split::Tensor(a, b) = t.split() else {
                continue;
            };
            for (l, r) in tensor_partitions(&g.term, &g.types, k, &a, &b) {
                let p1 = sub_judgement(g, &a, &l);
                let p2 = sub_judgement(g, &b, &r);
                if !p1.literal_balance().is_empty() || !p2.literal_balance().is_empty() {
                    continue;
                }
                let Some(d1) = self.search(&p1) else { continue };
                let Some(d2) = self.search(&p2) else { continue };
                if let Some(d) = tensor_step(g, k, &l, &r, d1, d2, &self.pool, Mode::Ttc) {
                    return Some(d);
                }
            }
        }
        self.failed.insert(key);
        None
    }
}
