//! Admissible rules of the extended calculus, expanded into primitive
//! steps so the result replays under the checker.

use thiserror::Error;

use crate::ttc::{
    eta_identity, par_inverse, AxiomPool, Derivation, Mode, Rule, RuleError, Split, Symbol, Valency,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtRuleError {
    #[error("position {0} out of range")]
    Position(usize),
    #[error("the type is not a nabla")]
    NotANabla,
    #[error("premises do not match the elimination scheme")]
    SchemeMismatch,
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// From `t ⊢ Γ, ∇^α_β A` (member `pos`) to `δ^α_β·t ⊢ Γ, A`, by cutting
/// against `△` applied to the dual side of the η-identity of `A`. The
/// unbound member stays at `pos`.
pub fn nabla_inverse(d: Derivation, pos: usize, mode: Mode) -> Result<Derivation, ExtRuleError> {
    let Some(ty) = d.conclusion.types.get(pos).cloned() else {
        return Err(ExtRuleError::Position(pos));
    };
    let Symbol::Nabla(_, bd) = &ty.symbol else {
        return Err(ExtRuleError::NotANabla);
    };
    let bd = *bd;
    let Split::Nabla { body, .. } = ty.split() else {
        return Err(ExtRuleError::NotANabla);
    };
    let v = body.valency();
    let pool = AxiomPool::new();
    let e = eta_identity(&body, mode);
    let tri = Rule::Tri {
        pos: 0,
        lower: v.up - 1 - bd.upper,
        upper: v.down - 1 - bd.lower,
    };
    let e = Derivation::infer(tri, vec![e], &pool, mode)?;
    let n = d.conclusion.types.len();
    let c = Derivation::infer(
        Rule::Cut {
            left: pos,
            right: 0,
        },
        vec![d, e],
        &pool,
        mode,
    )?;
    // c ⊢ Γ without pos, A; move A back
    let mut perm: Vec<usize> = (0..n - 1).collect();
    perm.insert(pos, n - 1);
    Ok(c.permuted(perm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlashSide {
    /// `t ⊢ Θ, (B/A)` and `s ⊢ A, Γ` give `Θ, B, Γ`.
    Right,
    /// `s ⊢ Γ, A` and `t ⊢ (A\B), Θ` give `Γ, B, Θ`.
    Left,
}

fn lambek_style(s: &Symbol) -> bool {
    s.valency() == Valency::new(1, 1)
}

/// Slash elimination. `t` holds the slash type at `tpos`, `s` the argument
/// `A` at `spos`. For `Right` the conclusion lists `t`'s other members, `B`,
/// then `s`'s others; for `Left` it lists `s`'s others, `B`, then `t`'s.
pub fn slash_elim(
    side: SlashSide,
    t: Derivation,
    tpos: usize,
    s: Derivation,
    spos: usize,
    mode: Mode,
) -> Result<Derivation, ExtRuleError> {
    let ty = t
        .conclusion
        .types
        .get(tpos)
        .ok_or(ExtRuleError::Position(tpos))?
        .clone();
    let arg = s
        .conclusion
        .types
        .get(spos)
        .ok_or(ExtRuleError::Position(spos))?
        .clone();
    let Symbol::Nabla(body, bd) = &ty.symbol else {
        return Err(ExtRuleError::SchemeMismatch);
    };
    let Symbol::Par(x, y) = &**body else {
        return Err(ExtRuleError::SchemeMismatch);
    };
    if bd.lower != 0
        || bd.upper != 1
        || !lambek_style(x)
        || !lambek_style(y)
        || !lambek_style(&arg.symbol)
    {
        return Err(ExtRuleError::SchemeMismatch);
    }
    let a_bar = match side {
        SlashSide::Right => &**y,
        SlashSide::Left => &**x,
    };
    if *a_bar != arg.symbol.dual() {
        return Err(ExtRuleError::SchemeMismatch);
    }
    let pool = AxiomPool::new();
    let t_len = t.conclusion.types.len();
    let s_len = s.conclusion.types.len();
    let opened = nabla_inverse(t, tpos, mode)?;
    // Θ', X, Y with X℘Y unpacked at the end
    let unpacked = par_inverse(opened, tpos, mode).map_err(|_| ExtRuleError::SchemeMismatch)?;
    match side {
        SlashSide::Right => {
            // Θ', B, Ā cut with s on A
            let c = Derivation::infer(
                Rule::Cut {
                    left: t_len,
                    right: spos,
                },
                vec![unpacked, s],
                &pool,
                mode,
            )?;
            Ok(c)
        }
        SlashSide::Left => {
            // s ⊢ Γ, A cut with Θ', Ā, B
            let c = Derivation::infer(
                Rule::Cut {
                    left: spos,
                    right: t_len - 1,
                },
                vec![s, unpacked],
                &pool,
                mode,
            )?;
            // Γ', Θ', B to Γ', B, Θ'
            let g = s_len - 1;
            let th = t_len - 1;
            let mut perm: Vec<usize> = (0..g).collect();
            perm.push(g + th);
            perm.extend(g..g + th);
            Ok(c.permuted(perm))
        }
    }
}
