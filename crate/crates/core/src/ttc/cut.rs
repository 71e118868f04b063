//! Cut elimination by the usual reductions: identity cuts vanish, cuts
//! commute upward past rules that do not introduce the cut formula, and a
//! cut between two introductions splits into cuts on the components.

use thiserror::Error;

use super::derivation::{apply_rule, AxiomPool, Derivation, Mode, Rule, RuleError};
use super::types::Judgement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("the derivation uses non-logical axioms")]
    HasAxioms,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("reduct does not match the cut conclusion")]
    Misaligned,
}

/// A cut-free derivation of the same judgement, with the same sequent order.
pub fn eliminate_cut(d: &Derivation, mode: Mode) -> Result<Derivation, CutError> {
    if d.uses_axioms() {
        return Err(CutError::HasAxioms);
    }
    let e = Eliminator {
        mode,
        pool: AxiomPool::new(),
    };
    let out = e.elim(d)?;
    out.aligned_to(&d.conclusion).ok_or(CutError::Misaligned)
}

struct Eliminator {
    mode: Mode,
    pool: AxiomPool,
}

/// Index of premise position `k` inside the conclusion of a cut, for the
/// left (`left = true`) or right premise.
fn after_cut(k: usize, cut: usize, left: bool, left_len: usize) -> usize {
    let k = k - usize::from(k > cut);
    if left {
        k
    } else {
        left_len - 1 + k
    }
}

impl Eliminator {
    fn infer(&self, rule: Rule, premises: Vec<Derivation>) -> Result<Derivation, CutError> {
        Ok(Derivation::infer(rule, premises, &self.pool, self.mode)?)
    }

    fn elim(&self, d: &Derivation) -> Result<Derivation, CutError> {
        let premises = d
            .premises
            .iter()
            .map(|p| self.elim(p))
            .collect::<Result<Vec<_>, _>>()?;
        match &d.rule {
            Rule::Cut { left, right } => {
                let mut it = premises.into_iter();
                let (p1, p2) = (
                    it.next().expect("two premises"),
                    it.next().expect("two premises"),
                );
                self.reduce(p1, *left, p2, *right)
            }
            r => {
                // premises are aligned with the originals, so positional rule
                // parameters still apply
                let premises = premises
                    .into_iter()
                    .zip(&d.premises)
                    .map(|(n, o)| n.aligned_to(&o.conclusion).ok_or(CutError::Misaligned))
                    .collect::<Result<Vec<_>, _>>()?;
                self.infer(r.clone(), premises)
            }
        }
    }

    /// Cut-free derivation of the conclusion of `Cut{l, r}` on two cut-free
    /// derivations, in that rule's sequent order.
    fn reduce(
        &self,
        p1: Derivation,
        l: usize,
        p2: Derivation,
        r: usize,
    ) -> Result<Derivation, CutError> {
        let target: Judgement = apply_rule(
            &Rule::Cut { left: l, right: r },
            &[&p1.conclusion, &p2.conclusion],
            &self.pool,
            self.mode,
        )?;
        let out = self.reduce_raw(p1, l, p2, r)?;
        out.aligned_to(&target).ok_or(CutError::Misaligned)
    }

    fn reduce_raw(
        &self,
        p1: Derivation,
        l: usize,
        p2: Derivation,
        r: usize,
    ) -> Result<Derivation, CutError> {
        // identity cuts
        if matches!(p1.rule, Rule::Id { .. }) {
            return Ok(p2);
        }
        if matches!(p2.rule, Rule::Id { .. }) {
            return Ok(p1);
        }
        if let Rule::Perm(perm) = &p1.rule {
            let k = perm[l];
            let q = p1.premises.into_iter().next().expect("one premise");
            return self.reduce(q, k, p2, r);
        }
        if let Rule::Perm(perm) = &p2.rule {
            let k = perm[r];
            let q = p2.premises.into_iter().next().expect("one premise");
            return self.reduce(p1, l, q, k);
        }
        if !principal(&p1, l) {
            return self.commute(p1, l, p2, r, true);
        }
        if !principal(&p2, r) {
            return self.commute(p2, r, p1, l, false);
        }
        match (&p1.rule, &p2.rule) {
            (
                Rule::Tensor {
                    left: tl,
                    right: tr,
                },
                Rule::Par { first, second },
            ) => {
                let (tl, tr, first, second) = (*tl, *tr, *first, *second);
                let mut ps = p1.premises.into_iter();
                let (q1, q2) = (ps.next().expect("two"), ps.next().expect("two"));
                let q = p2.premises.into_iter().next().expect("one");
                let q1_len = q1.conclusion.types.len();
                let c1 = self.reduce(q1, tl, q, second)?;
                let at = after_cut(first, second, false, q1_len);
                self.reduce(q2, tr, c1, at)
            }
            (
                Rule::Par { first, second },
                Rule::Tensor {
                    left: tl,
                    right: tr,
                },
            ) => {
                let (tl, tr, first, second) = (*tl, *tr, *first, *second);
                let mut ps = p2.premises.into_iter();
                let (q1, q2) = (ps.next().expect("two"), ps.next().expect("two"));
                let q = p1.premises.into_iter().next().expect("one");
                // first member of the par is dual to the tensor's right factor
                let q_len = q.conclusion.types.len();
                let c1 = self.reduce(q, first, q2, tr)?;
                let at = after_cut(second, first, true, q_len);
                self.reduce(c1, at, q1, tl)
            }
            (Rule::Nabla { pos: a, .. }, Rule::Tri { pos: b, .. })
            | (Rule::Tri { pos: a, .. }, Rule::Nabla { pos: b, .. }) => {
                let (a, b) = (*a, *b);
                let q1 = p1.premises.into_iter().next().expect("one");
                let q2 = p2.premises.into_iter().next().expect("one");
                self.reduce(q1, a, q2, b)
            }
            _ => Err(CutError::Rule(RuleError::NotDual)),
        }
    }

    /// Moves the cut above the last rule of `p`, which does not introduce
    /// the cut formula at `k`. `o` is the other premise at `ko`; `p_left`
    /// says whether `p` is the left premise of the cut.
    fn commute(
        &self,
        p: Derivation,
        k: usize,
        o: Derivation,
        ko: usize,
        p_left: bool,
    ) -> Result<Derivation, CutError> {
        let cut = |s: &Self, q: Derivation, qk: usize, o: Derivation| {
            if p_left {
                s.reduce(q, qk, o, ko)
            } else {
                s.reduce(o, ko, q, qk)
            }
        };
        let o_len = o.conclusion.types.len();
        // position of a surviving premise member in the new cut conclusion
        let place = |pos: usize, qk: usize, q_len: usize| -> usize {
            if p_left {
                after_cut(pos, qk, true, q_len)
            } else {
                after_cut(pos, qk, false, o_len)
            }
        };
        let rule = p.rule.clone();
        match rule {
            Rule::Par { first, second } => {
                let q = p.premises.into_iter().next().expect("one");
                let at = first.min(second);
                // conclusion position k back to premise position
                let mut map = Vec::new();
                for j in 0..q.conclusion.types.len() {
                    if j == at || (j != first && j != second) {
                        map.push(j);
                    }
                }
                let qk = map[k];
                let q_len = q.conclusion.types.len();
                let c = cut(self, q, qk, o)?;
                let (f, s) = (place(first, qk, q_len), place(second, qk, q_len));
                self.infer(
                    Rule::Par {
                        first: f,
                        second: s,
                    },
                    vec![c],
                )
            }
            Rule::Tensor {
                left: tl,
                right: tr,
            } => {
                let mut ps = p.premises.into_iter();
                let (q1, q2) = (ps.next().expect("two"), ps.next().expect("two"));
                let n1 = q1.conclusion.types.len();
                if k < n1 {
                    let c = cut(self, q1, k, o)?;
                    let tl2 = place(tl, k, n1);
                    self.infer(
                        Rule::Tensor {
                            left: tl2,
                            right: tr,
                        },
                        vec![c, q2],
                    )
                } else {
                    let m = k - n1;
                    let qk = m + usize::from(m >= tr);
                    let n2 = q2.conclusion.types.len();
                    let c = cut(self, q2, qk, o)?;
                    let tr2 = place(tr, qk, n2);
                    self.infer(
                        Rule::Tensor {
                            left: tl,
                            right: tr2,
                        },
                        vec![q1, c],
                    )
                }
            }
            Rule::Nabla { pos, lower, upper } | Rule::Tri { pos, lower, upper } => {
                let q = p.premises.into_iter().next().expect("one");
                let q_len = q.conclusion.types.len();
                let c = cut(self, q, k, o)?;
                let pos2 = place(pos, k, q_len);
                let r = if matches!(p.rule, Rule::Nabla { .. }) {
                    Rule::Nabla {
                        pos: pos2,
                        lower,
                        upper,
                    }
                } else {
                    Rule::Tri {
                        pos: pos2,
                        lower,
                        upper,
                    }
                };
                self.infer(r, vec![c])
            }
            Rule::Axiom(_) => Err(CutError::HasAxioms),
            _ => Err(CutError::Misaligned),
        }
    }
}

/// Whether the last rule of `d` introduces the member at `k`.
fn principal(d: &Derivation, k: usize) -> bool {
    match &d.rule {
        Rule::Id { .. } => true,
        Rule::Par { first, second } => k == (*first).min(*second),
        Rule::Tensor { left, .. } => k == *left,
        Rule::Nabla { pos, .. } | Rule::Tri { pos, .. } => k == *pos,
        _ => false,
    }
}
