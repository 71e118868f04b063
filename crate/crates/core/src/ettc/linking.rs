//! A necessary condition for cut-free derivability of pure judgements.
//!
//! Read geometrically, a derivation pairs every literal occurrence with a
//! dual one (its identity leaf) and every binder joins its two bound slots.
//! Following identity links and jumping across binders from a free upper
//! slot must lead to the free lower slot the term connects it to, and the
//! slots left over must close into cycles, each through some `∇` (the `∇`
//! rule erases exactly such a cycle's edge). Sequentialization is ignored,
//! so passing proves nothing; failing refutes the goal.

use rustc_hash::FxHashMap;

use crate::term::Index;
use crate::ttc::{Judgement, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Free(u32),
    /// Lower slot `α` of a binder.
    Alpha(u32),
    /// Upper slot `β` of a binder.
    Beta(u32),
}

#[derive(Debug)]
struct Occ {
    name: u32,
    negated: bool,
    ups: Vec<Slot>,
    lows: Vec<Slot>,
}

/// Steps after which the check gives up and reports the goal as possible.
const WORK_LIMIT: usize = 100_000;

struct Net {
    occs: Vec<Occ>,
    nabla: Vec<bool>,
    /// Upper slot `β` of each binder, as (occurrence, position).
    beta_at: Vec<(usize, usize)>,
    /// Term edges as (upper slot of the start, free index of the end).
    edges: Vec<((usize, usize), u32)>,
}

fn walk(
    sym: &Symbol,
    ups: &[Slot],
    lows: &[Slot],
    names: &mut FxHashMap<std::sync::Arc<str>, u32>,
    net: &mut Net,
) {
    match sym {
        Symbol::Lit(l) => {
            let next = names.len() as u32;
            let name = *names.entry(l.name.clone()).or_insert(next);
            net.occs.push(Occ {
                name,
                negated: l.negated,
                ups: ups.to_vec(),
                lows: lows.to_vec(),
            });
        }
        Symbol::Tensor(a, b) | Symbol::Par(a, b) => {
            let va = a.valency();
            walk(a, &ups[..va.up], &lows[..va.down], names, net);
            walk(b, &ups[va.up..], &lows[va.down..], names, net);
        }
        Symbol::Nabla(body, bd) | Symbol::Tri(body, bd) => {
            let id = net.nabla.len() as u32;
            net.nabla.push(matches!(sym, Symbol::Nabla(..)));
            net.beta_at.push((usize::MAX, 0));
            let mut u = ups.to_vec();
            u.insert(bd.upper, Slot::Beta(id));
            let mut l = lows.to_vec();
            l.insert(bd.lower, Slot::Alpha(id));
            walk(body, &u, &l, names, net);
        }
    }
}

/// False only if `g` (regular, all-ε term) has no cut-free derivation.
pub fn may_be_derivable(g: &Judgement) -> bool {
    let mut num: FxHashMap<&Index, u32> = FxHashMap::default();
    for i in g.types.iter().flat_map(|t| t.upper.iter().chain(&t.lower)) {
        let n = num.len() as u32;
        num.insert(i, n);
    }
    let mut net = Net {
        occs: Vec::new(),
        nabla: Vec::new(),
        beta_at: Vec::new(),
        edges: Vec::new(),
    };
    let mut names = FxHashMap::default();
    for t in &g.types {
        let ups: Vec<Slot> = t.upper.iter().map(|i| Slot::Free(num[i])).collect();
        let lows: Vec<Slot> = t.lower.iter().map(|i| Slot::Free(num[i])).collect();
        walk(&t.symbol, &ups, &lows, &mut names, &mut net);
    }
    let mut free_up: FxHashMap<u32, (usize, usize)> = FxHashMap::default();
    for (o, occ) in net.occs.iter().enumerate() {
        for (k, s) in occ.ups.iter().enumerate() {
            match *s {
                Slot::Free(i) => {
                    free_up.insert(i, (o, k));
                }
                Slot::Beta(b) => net.beta_at[b as usize] = (o, k),
                Slot::Alpha(_) => return true,
            }
        }
    }
    for (l, _, u) in g.term.edges() {
        let (Some(a), Some(b)) = (num.get(l), num.get(u)) else {
            return true;
        };
        let Some(&start) = free_up.get(a) else {
            return true;
        };
        net.edges.push((start, *b));
    }
    let n = net.occs.len();
    let mut s = Search {
        net: &net,
        mate: vec![None; n],
        seen: net.occs.iter().map(|o| vec![false; o.ups.len()]).collect(),
        work: 0,
    };
    let r = s.edges_from(0);
    r != Some(false)
}

struct Search<'a> {
    net: &'a Net,
    mate: Vec<Option<usize>>,
    seen: Vec<Vec<bool>>,
    work: usize,
}

/// Where a walk stands: about to leave the upper slot `at`.
#[derive(Clone, Copy)]
struct Walk {
    at: (usize, usize),
    /// Start of the cycle being closed, or `None` on a term edge.
    cycle: Option<(usize, usize)>,
    through_nabla: bool,
}

impl Search<'_> {
    fn compatible(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.net.occs[a], &self.net.occs[b]);
        x.name == y.name
            && x.negated != y.negated
            && x.ups.len() == y.lows.len()
            && x.lows.len() == y.ups.len()
    }

    /// `None` when the work limit is hit.
    fn edges_from(&mut self, e: usize) -> Option<bool> {
        if e == self.net.edges.len() {
            return self.cycles();
        }
        let start = self.net.edges[e].0;
        self.step(
            e,
            Walk {
                at: start,
                cycle: None,
                through_nabla: false,
            },
        )
    }

    fn cycles(&mut self) -> Option<bool> {
        let next = self
            .seen
            .iter()
            .enumerate()
            .find_map(|(o, v)| v.iter().position(|s| !s).map(|k| (o, k)));
        match next {
            Some(at) => self.step(
                usize::MAX,
                Walk {
                    at,
                    cycle: Some(at),
                    through_nabla: false,
                },
            ),
            // occurrences without upper slots still need a partner
            None => Some(self.pair_rest()),
        }
    }

    fn pair_rest(&mut self) -> bool {
        let Some(a) = (0..self.mate.len()).find(|&o| self.mate[o].is_none()) else {
            return true;
        };
        for b in a + 1..self.mate.len() {
            if self.mate[b].is_none() && self.compatible(a, b) {
                self.mate[a] = Some(b);
                self.mate[b] = Some(a);
                let ok = self.pair_rest();
                self.mate[a] = None;
                self.mate[b] = None;
                if ok {
                    return true;
                }
            }
        }
        false
    }

    fn step(&mut self, e: usize, w: Walk) -> Option<bool> {
        self.work += 1;
        if self.work > WORK_LIMIT {
            return None;
        }
        let (o, k) = w.at;
        if self.seen[o][k] {
            return Some(false);
        }
        match self.mate[o] {
            Some(m) => {
                self.seen[o][k] = true;
                let r = self.arrive(e, w, m);
                self.seen[o][k] = false;
                r
            }
            None => {
                let mut unknown = false;
                for m in 0..self.mate.len() {
                    if m == o || self.mate[m].is_some() || !self.compatible(o, m) {
                        continue;
                    }
                    self.mate[o] = Some(m);
                    self.mate[m] = Some(o);
                    self.seen[o][k] = true;
                    let r = self.arrive(e, w, m);
                    self.seen[o][k] = false;
                    self.mate[o] = None;
                    self.mate[m] = None;
                    match r {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    /// Crosses the identity link from the upper slot `w.at` into `m`.
    fn arrive(&mut self, e: usize, w: Walk, m: usize) -> Option<bool> {
        let (o, k) = w.at;
        let pos = self.net.occs[o].ups.len() - 1 - k;
        match self.net.occs[m].lows[pos] {
            Slot::Free(y) => {
                if w.cycle.is_some() || self.net.edges[e].1 != y {
                    return Some(false);
                }
                self.edges_from(e + 1)
            }
            Slot::Alpha(b) => {
                let at = self.net.beta_at[b as usize];
                let through_nabla = w.through_nabla || self.net.nabla[b as usize];
                if w.cycle == Some(at) {
                    return if through_nabla {
                        self.cycles()
                    } else {
                        Some(false)
                    };
                }
                self.step(
                    e,
                    Walk {
                        at,
                        cycle: w.cycle,
                        through_nabla,
                    },
                )
            }
            Slot::Beta(_) => Some(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::judgement;

    fn j(s: &str) -> Judgement {
        judgement(s).unwrap()
    }

    #[test]
    fn identity_linking() {
        assert!(may_be_derivable(&j("d_i^j * d_k^l |- p^i_l, ~p^k_j")));
        assert!(!may_be_derivable(&j(
            "d_i^j * d_k^b * d_a^d * d_c^l |- p^i_l, ~p^k_j, p^a_b, ~p^c_d"
        )));
    }

    #[test]
    fn cycles_need_a_nabla() {
        assert!(may_be_derivable(&j("d_z^y |- nab^a_b(p^b_y | ~p^z_a)")));
        assert!(!may_be_derivable(&j("d_z^y |- tri^a_b(p^b_y | ~p^z_a)")));
    }
}
