//! Cut-free backward search for the extended calculus. `∇` is inverted
//! eagerly (its inverse is admissible); `△` branches over the ways of
//! splitting a term edge at the glued vertex.

use rustc_hash::{FxHashMap, FxHashSet};

use super::linking::may_be_derivable;
use crate::term::{Index, Word};
use crate::ttc::{
    id_leaf, sub_judgement, tensor_partitions, tensor_step, AxiomPool, Derivation, Judgement, Mode,
    Rule, Split, Symbol,
};

/// Searches for a cut-free derivation of `goal` in `mode`. The derivation
/// concludes `goal` in its sequent order.
pub fn ext_prove(goal: &Judgement, mode: Mode) -> Option<Derivation> {
    ext_prove_with(goal, mode, &mut FailureCache::default())
}

/// Subgoals known to be underivable. Sharing one cache across searches in
/// the same mode saves the work common to related goals.
#[derive(Debug, Default)]
pub struct FailureCache {
    failed: FxHashSet<Key>,
    symbols: FxHashMap<Symbol, u32>,
    mode: Option<Mode>,
}

/// A subgoal up to renaming, in its own sequent order. Symbols are
/// interned; the term of a searched subgoal is all ε-edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    symbols: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

/// Entries kept before the cache starts over.
const CACHE_LIMIT: usize = 1 << 20;

impl FailureCache {
    fn reset_for(&mut self, mode: Mode) {
        if self.mode != Some(mode) || self.failed.len() > CACHE_LIMIT {
            self.failed.clear();
            self.symbols.clear();
            self.mode = Some(mode);
        }
    }

    fn key(&mut self, g: &Judgement) -> Key {
        let mut num: FxHashMap<&Index, u32> = FxHashMap::default();
        let mut symbols = Vec::with_capacity(g.types.len());
        for t in &g.types {
            t.for_each_reading(&mut |i| {
                let n = num.len() as u32;
                num.insert(i, n);
            });
            let next = self.symbols.len() as u32;
            let id = match self.symbols.get(&t.symbol) {
                Some(&id) => id,
                None => {
                    self.symbols.insert(t.symbol.clone(), next);
                    next
                }
            };
            symbols.push(id);
        }
        let mut edges: Vec<(u32, u32)> = g
            .term
            .edges()
            .map(|(l, _, u)| {
                (
                    num.get(l).copied().unwrap_or(u32::MAX),
                    num.get(u).copied().unwrap_or(u32::MAX),
                )
            })
            .collect();
        edges.sort_unstable();
        Key { symbols, edges }
    }
}

/// [`ext_prove`] with a cache that outlives the call.
pub fn ext_prove_with(
    goal: &Judgement,
    mode: Mode,
    cache: &mut FailureCache,
) -> Option<Derivation> {
    let mode = if mode == Mode::Ttc { Mode::Full } else { mode };
    cache.reset_for(mode);
    let mut p = ExtProver {
        cache,
        pool: AxiomPool::new(),
        mode,
        prune: true,
    };
    p.search(goal)
}

struct ExtProver<'a> {
    cache: &'a mut FailureCache,
    pool: AxiomPool,
    mode: Mode,
    /// Refute subgoals with no linking before branching.
    prune: bool,
}

impl ExtProver<'_> {
    fn search(&mut self, g: &Judgement) -> Option<Derivation> {
        if !g.is_regular() || g.term.edges().any(|(_, w, _)| !w.is_empty()) {
            return None;
        }
        if !g.literal_balance().is_empty() {
            return None;
        }
        // invertible steps first
        for (k, t) in g.types.iter().enumerate() {
            match (&t.symbol, t.split()) {
                (_, Split::Par(a, b)) => {
                    let mut types = g.types.clone();
                    types[k] = a;
                    types.insert(k + 1, b);
                    let d = self.search(&Judgement::unchecked(g.term.clone(), types))?;
                    return Derivation::infer(
                        Rule::Par {
                            first: k,
                            second: k + 1,
                        },
                        vec![d],
                        &self.pool,
                        self.mode,
                    )
                    .ok();
                }
                (Symbol::Nabla(_, bd), Split::Nabla { body, alpha, beta }) => {
                    if self.mode == Mode::LambekRestricted && g.types.len() < 2 {
                        return None;
                    }
                    let mut term = g.term.clone();
                    term.insert_edge_raw(beta, Word::empty(), alpha);
                    let mut types = g.types.clone();
                    types[k] = body;
                    let d = self.search(&Judgement::unchecked(term, types))?;
                    let rule = Rule::Nabla {
                        pos: k,
                        lower: bd.lower,
                        upper: bd.upper,
                    };
                    return Derivation::infer(rule, vec![d], &self.pool, self.mode).ok();
                }
                _ => {}
            }
        }
        let key = self.cache.key(g);
        if self.cache.failed.contains(&key) {
            return None;
        }
        if let Some(d) = id_leaf(g, &self.pool, self.mode) {
            return Some(d);
        }
        if self.prune && !may_be_derivable(g) {
            self.cache.failed.insert(key);
            return None;
        }
        for (k, t) in g.types.iter().enumerate() {
            match (&t.symbol, t.split()) {
                (_, Split::Tensor(a, b)) => {
                    for (l, r) in tensor_partitions(&g.term, &g.types, k, &a, &b) {
                        let p1 = sub_judgement(g, &a, &l);
                        let p2 = sub_judgement(g, &b, &r);
                        if !p1.literal_balance().is_empty() || !p2.literal_balance().is_empty() {
                            continue;
                        }
                        let Some(d1) = self.search(&p1) else { continue };
                        let Some(d2) = self.search(&p2) else { continue };
                        if let Some(d) = tensor_step(g, k, &l, &r, d1, d2, &self.pool, self.mode) {
                            return Some(d);
                        }
                    }
                }
                (Symbol::Tri(_, bd), Split::Tri { body, alpha, beta }) => {
                    let edges: Vec<_> = g
                        .term
                        .edges()
                        .map(|(l, w, u)| (l.clone(), w.clone(), u.clone()))
                        .collect();
                    for (x, w, y) in edges {
                        for cut in 0..=w.len() {
                            let mut term = g.term.clone();
                            term.remove_edge(&x);
                            term.insert_edge_raw(
                                x.clone(),
                                Word(w.0[..cut].to_vec()),
                                alpha.clone(),
                            );
                            term.insert_edge_raw(
                                beta.clone(),
                                Word(w.0[cut..].to_vec()),
                                y.clone(),
                            );
                            let mut types = g.types.clone();
                            types[k] = body.clone();
                            let Some(d) = self.search(&Judgement::unchecked(term, types)) else {
                                continue;
                            };
                            let rule = Rule::Tri {
                                pos: k,
                                lower: bd.lower,
                                upper: bd.upper,
                            };
                            if let Ok(d) = Derivation::infer(rule, vec![d], &self.pool, self.mode) {
                                return Some(d);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        self.cache.failed.insert(key);
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambek::{lambek_cycle, mode_for};
    use crate::selftest::{random_derivations, random_sequent};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn unpruned(goal: &Judgement, mode: Mode) -> Option<Derivation> {
        let mut cache = FailureCache::default();
        cache.reset_for(mode);
        ExtProver {
            cache: &mut cache,
            pool: AxiomPool::new(),
            mode,
            prune: false,
        }
        .search(goal)
    }

    #[test]
    fn pruning_keeps_every_answer() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let s = random_sequent(&mut rng, 4);
            let g = lambek_cycle(&s);
            for mode in [mode_for(true), mode_for(false)] {
                assert_eq!(
                    ext_prove(&g, mode).is_some(),
                    unpruned(&g, mode).is_some(),
                    "{s}"
                );
            }
        }
    }

    #[test]
    fn finds_random_derivable_goals() {
        for d in random_derivations(Mode::Full, 200, 6, 5) {
            let g = &d.conclusion;
            if !g.is_regular() {
                continue;
            }
            assert!(ext_prove(g, Mode::Full).is_some(), "{g}");
        }
    }
}
